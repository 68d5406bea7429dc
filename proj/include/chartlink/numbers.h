#ifndef CHARTLINK_NUMBERS_H_
#define CHARTLINK_NUMBERS_H_

#include <optional>
#include <string_view>

namespace chartlink {

// Parses the first quantity written in `text`: digits with optional
// thousands separators and decimals, an optional sign, followed by an
// optional magnitude word (thousand, million, billion) or percent marker
// ("%" or "percent"). Percent values are returned as written (27.0% -> 27).
// Returns nullopt when no digits are present.
//
//   "100 million" -> 1e8, "$3,500" -> 3500, "27.0%" -> 27, "+65" -> 65
std::optional<double> ParseQuantity(std::string_view text);

// First run of exactly four digits in `text`, as written ("in 1940," ->
// "1940"). Used for matching years against categorical axes.
std::optional<std::string_view> YearToken(std::string_view text);

}  // namespace chartlink

#endif  // CHARTLINK_NUMBERS_H_
