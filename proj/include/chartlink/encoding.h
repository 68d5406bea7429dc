#ifndef CHARTLINK_ENCODING_H_
#define CHARTLINK_ENCODING_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace chartlink {

// Pixel rectangle, origin at the top-left corner of the chart image.
struct BoundingBox {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;

  double right() const { return x + width; }
  double bottom() const { return y + height; }
  bool operator==(const BoundingBox &) const = default;
};

enum class TextRole {
  kXAxisTitle,
  kXAxisLabel,
  kYAxisTitle,
  kYAxisLabel,
  kLegendTitle,
  kLegendLabel,
  kChartTitle,
};

std::string_view ToString(TextRole role);
std::optional<TextRole> ParseTextRole(std::string_view name);

enum class ChannelName { kX, kY, kColor };

std::string_view ToString(ChannelName channel);  // "x-position", ...
std::optional<ChannelName> ParseChannelName(std::string_view name);

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
  bool operator==(const Rgb &) const = default;
};

struct TextualElement {
  std::string id;
  std::string text;
  TextRole role = TextRole::kChartTitle;
  BoundingBox bbox;
  // Parsed numeric reading of the label text ("100 million" -> 1e8), filled
  // at ingestion for axis labels when the text holds a quantity.
  std::optional<double> numeric_value;

  bool operator==(const TextualElement &) const = default;
};

enum class ScaleKind { kLinear, kOrdinal };

// Maps data values to pixels. Linear scales carry a numeric [min, max]
// domain; ordinal scales carry ordered categories laid out as equal bands.
// The range is (start, end) in pixels and may be inverted (y axes).
class Scale {
 public:
  static Scale Linear(double domain_min, double domain_max, double range_start,
                      double range_end);
  static Scale Ordinal(std::vector<std::string> categories, double range_start,
                       double range_end);

  ScaleKind kind() const { return kind_; }
  double domain_min() const { return domain_min_; }
  double domain_max() const { return domain_max_; }
  const std::vector<std::string> &categories() const { return categories_; }
  double range_start() const { return range_start_; }
  double range_end() const { return range_end_; }

  // Band occupied by `category` as (low, high) pixels, low <= high.
  std::pair<double, double> Band(std::string_view category) const;
  std::optional<size_t> CategoryIndex(std::string_view category) const;

  bool operator==(const Scale &) const = default;

 private:
  Scale() = default;

  ScaleKind kind_ = ScaleKind::kLinear;
  double domain_min_ = 0;
  double domain_max_ = 1;
  std::vector<std::string> categories_;
  double range_start_ = 0;
  double range_end_ = 1;
};

struct Channel {
  ChannelName name = ChannelName::kX;
  std::optional<Scale> scale;
  std::optional<std::string> title_id;
  std::vector<std::string> label_ids;
  // Legend swatch per label id (color channel only).
  std::map<std::string, Rgb> colors;

  bool operator==(const Channel &) const = default;
};

enum class ChartType { kBar, kLine, kScatter };

std::string_view ToString(ChartType type);

struct ImageSize {
  int width = 0;
  int height = 0;
  bool operator==(const ImageSize &) const = default;
};

// Validated chart description. Construct through ParseEncoding or
// VisualEncoding::Validated; instances are immutable afterwards.
class VisualEncoding {
 public:
  // Checks every invariant and throws ParseError / UnsupportedChartError.
  static VisualEncoding Validated(ChartType chart_type, ImageSize image_size,
                                  std::vector<Channel> channels,
                                  std::vector<TextualElement> elements);

  ChartType chart_type() const { return chart_type_; }
  ImageSize image_size() const { return image_size_; }
  const std::vector<Channel> &channels() const { return channels_; }
  const std::vector<TextualElement> &elements() const { return elements_; }

  const Channel *channel(ChannelName name) const;
  const TextualElement *element(std::string_view id) const;
  // Channel that lists `element_id` as its title or one of its labels.
  std::optional<ChannelName> OwningChannel(std::string_view element_id) const;
  std::vector<const TextualElement *> ElementsWithRole(TextRole role) const;

  bool operator==(const VisualEncoding &) const = default;

 private:
  VisualEncoding() = default;

  ChartType chart_type_ = ChartType::kBar;
  ImageSize image_size_;
  std::vector<Channel> channels_;  // sorted by ChannelName
  std::vector<TextualElement> elements_;
};

// Parses the encoding JSON document (see README for the schema). Unknown
// keys and schema violations raise ParseError naming the field path;
// multiple marks, views or unsupported channels raise UnsupportedChartError.
VisualEncoding ParseEncoding(std::string_view document);
VisualEncoding EncodingFromJson(const nlohmann::json &doc);
nlohmann::json EncodingToJson(const VisualEncoding &encoding);

// Category or number accepted by ScaleToPixel.
using ScaleValue = std::variant<double, std::string>;

// Linear: affine map of the value onto the range. Ordinal: center of the
// category's band. Throws DomainError outside the domain.
double ScaleToPixel(const Scale &scale, const ScaleValue &value);

// Linear scales only; throws DomainError for ordinal scales.
bool ValueInDomain(const Scale &scale, double value);

}  // namespace chartlink

#endif  // CHARTLINK_ENCODING_H_
