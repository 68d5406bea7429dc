#ifndef CHARTLINK_TEXT_H_
#define CHARTLINK_TEXT_H_

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace chartlink {

// Half-open byte range [start, end) into a paragraph.
struct CharSpan {
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
  bool empty() const { return end <= start; }
  bool contains(const CharSpan &other) const {
    return start <= other.start && other.end <= end;
  }
  bool contains(int offset) const { return start <= offset && offset < end; }
  bool overlaps(const CharSpan &other) const {
    return start < other.end && other.start < end;
  }

  auto operator<=>(const CharSpan &) const = default;
};

// Lowercase, collapse internal whitespace runs to one space and strip
// leading/trailing whitespace and punctuation.
std::string NormalizeText(std::string_view text);

// Lowercased alphanumeric runs, in order ("Coverage-PC (%)" -> coverage, pc).
std::vector<std::string> WordTokens(std::string_view text);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

}  // namespace chartlink

#endif  // CHARTLINK_TEXT_H_
