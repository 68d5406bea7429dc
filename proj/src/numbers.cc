#include "chartlink/numbers.h"

#include <cctype>
#include <string>

#include "chartlink/text.h"

namespace chartlink {

namespace {

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

// Exactly three digits at `pos` not followed by a fourth.
bool IsThousandsGroup(std::string_view text, size_t pos) {
  if (pos + 3 > text.size()) return false;
  for (size_t i = pos; i < pos + 3; ++i) {
    if (!IsDigit(text[i])) return false;
  }
  return pos + 3 == text.size() || !IsDigit(text[pos + 3]);
}

}  // namespace

std::optional<double> ParseQuantity(std::string_view text) {
  size_t pos = 0;
  while (pos < text.size() && !IsDigit(text[pos])) {
    if (text[pos] == '.' && pos + 1 < text.size() && IsDigit(text[pos + 1])) {
      break;
    }
    ++pos;
  }
  if (pos == text.size()) return std::nullopt;

  bool negative = false;
  if (pos > 0 && (text[pos - 1] == '-' || text[pos - 1] == '+')) {
    // A dash between two numbers is a range separator, not a sign.
    bool range_dash = pos >= 2 && IsDigit(text[pos - 2]);
    negative = text[pos - 1] == '-' && !range_dash;
  }

  std::string digits;
  bool seen_point = false;
  size_t end = pos;
  for (; end < text.size(); ++end) {
    char c = text[end];
    if (IsDigit(c)) {
      digits.push_back(c);
    } else if (c == ',' && !seen_point && IsThousandsGroup(text, end + 1)) {
      continue;
    } else if (c == '.' && !seen_point && end + 1 < text.size() &&
               IsDigit(text[end + 1])) {
      seen_point = true;
      digits.push_back('.');
    } else {
      break;
    }
  }
  double value = std::stod(digits);
  if (negative) value = -value;

  std::vector<std::string> rest = WordTokens(text.substr(end));
  if (!rest.empty()) {
    const std::string &word = rest.front();
    if (word == "thousand") value *= 1e3;
    else if (word == "million") value *= 1e6;
    else if (word == "billion") value *= 1e9;
  }
  return value;
}

std::optional<std::string_view> YearToken(std::string_view text) {
  for (size_t i = 0; i + 4 <= text.size(); ++i) {
    if (i > 0 && IsDigit(text[i - 1])) continue;
    bool four = IsDigit(text[i]) && IsDigit(text[i + 1]) &&
                IsDigit(text[i + 2]) && IsDigit(text[i + 3]);
    if (!four) continue;
    if (i + 4 < text.size() && IsDigit(text[i + 4])) continue;
    return text.substr(i, 4);
  }
  return std::nullopt;
}

}  // namespace chartlink
