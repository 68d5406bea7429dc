#include "chartlink/text.h"

#include <cctype>

namespace chartlink {

namespace {

bool IsSpace(unsigned char c) { return std::isspace(c) != 0; }

// Non-ASCII bytes are treated as word characters so UTF-8 text survives.
bool IsWordByte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

std::string NormalizeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  size_t begin = 0;
  size_t end = out.size();
  auto strippable = [](unsigned char c) {
    return std::ispunct(c) != 0 || IsSpace(c);
  };
  while (begin < end && strippable(out[begin])) ++begin;
  while (end > begin && strippable(out[end - 1])) --end;
  return out.substr(begin, end - begin);
}

std::vector<std::string> WordTokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (IsWordByte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

}  // namespace chartlink
