#include "chartlink/encoding.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "chartlink/errors.h"
#include "chartlink/numbers.h"
#include "chartlink/text.h"

namespace chartlink {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<TextRole, std::string_view>, 7> kRoleNames = {{
    {TextRole::kXAxisTitle, "x-axis-title"},
    {TextRole::kXAxisLabel, "x-axis-label"},
    {TextRole::kYAxisTitle, "y-axis-title"},
    {TextRole::kYAxisLabel, "y-axis-label"},
    {TextRole::kLegendTitle, "legend-title"},
    {TextRole::kLegendLabel, "legend-label"},
    {TextRole::kChartTitle, "chart-title"},
}};

// Channel keys in the document; "color" is the legend.
constexpr std::array<std::pair<ChannelName, std::string_view>, 3> kChannelKeys = {{
    {ChannelName::kX, "x"},
    {ChannelName::kY, "y"},
    {ChannelName::kColor, "color"},
}};

TextRole TitleRole(ChannelName channel) {
  switch (channel) {
    case ChannelName::kX: return TextRole::kXAxisTitle;
    case ChannelName::kY: return TextRole::kYAxisTitle;
    case ChannelName::kColor: return TextRole::kLegendTitle;
  }
  return TextRole::kChartTitle;
}

TextRole LabelRole(ChannelName channel) {
  switch (channel) {
    case ChannelName::kX: return TextRole::kXAxisLabel;
    case ChannelName::kY: return TextRole::kYAxisLabel;
    case ChannelName::kColor: return TextRole::kLegendLabel;
  }
  return TextRole::kChartTitle;
}

std::string_view ChannelKey(ChannelName channel) {
  for (const auto &[name, key] : kChannelKeys) {
    if (name == channel) return key;
  }
  return "";
}

void RejectUnknownKeys(const json &object, const std::string &path,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto &item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ParseError(path.empty() ? item.key() : path + "/" + item.key(),
                       "unknown key");
    }
  }
}

const json &Require(const json &object, const std::string &path,
                    std::string_view key) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ParseError(path.empty() ? std::string(key)
                                  : path + "/" + std::string(key),
                     "missing required key");
  }
  return *it;
}

double RequireNumber(const json &value, const std::string &path) {
  if (!value.is_number()) throw ParseError(path, "expected a number");
  double v = value.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
  return v;
}

std::string RequireString(const json &value, const std::string &path) {
  if (!value.is_string()) throw ParseError(path, "expected a string");
  return value.get<std::string>();
}

const json &RequireObject(const json &value, const std::string &path) {
  if (!value.is_object()) throw ParseError(path, "expected an object");
  return value;
}

const json &RequireArray(const json &value, const std::string &path) {
  if (!value.is_array()) throw ParseError(path, "expected an array");
  return value;
}

ChartType ParseChartType(const json &value) {
  std::set<std::string> marks;
  if (value.is_string()) {
    marks.insert(value.get<std::string>());
  } else if (value.is_array()) {
    for (size_t i = 0; i < value.size(); ++i) {
      marks.insert(RequireString(value[i], "chartType/" + std::to_string(i)));
    }
  } else {
    throw ParseError("chartType", "expected a string");
  }
  if (marks.empty()) throw ParseError("chartType", "no mark type given");
  if (marks.size() > 1) {
    throw UnsupportedChartError("chart combines multiple mark types (" +
                                Join({marks.begin(), marks.end()}, ", ") + ")");
  }
  const std::string &mark = *marks.begin();
  if (mark == "bar") return ChartType::kBar;
  if (mark == "line") return ChartType::kLine;
  if (mark == "scatter") return ChartType::kScatter;
  throw UnsupportedChartError("unsupported chart type '" + mark + "'");
}

Scale ParseScale(const json &doc, const std::string &path) {
  RequireObject(doc, path);
  RejectUnknownKeys(doc, path, {"kind", "domain", "range"});
  std::string kind = RequireString(Require(doc, path, "kind"), path + "/kind");
  const json &domain = RequireArray(Require(doc, path, "domain"), path + "/domain");
  const json &range = RequireArray(Require(doc, path, "range"), path + "/range");
  if (range.size() != 2) throw ParseError(path + "/range", "expected [start, end]");
  double r0 = RequireNumber(range[0], path + "/range/0");
  double r1 = RequireNumber(range[1], path + "/range/1");
  try {
    if (kind == "linear") {
      if (domain.size() != 2) throw ParseError(path + "/domain", "expected [min, max]");
      return Scale::Linear(RequireNumber(domain[0], path + "/domain/0"),
                           RequireNumber(domain[1], path + "/domain/1"), r0, r1);
    }
    if (kind == "ordinal") {
      std::vector<std::string> categories;
      for (size_t i = 0; i < domain.size(); ++i) {
        categories.push_back(
            RequireString(domain[i], path + "/domain/" + std::to_string(i)));
      }
      return Scale::Ordinal(std::move(categories), r0, r1);
    }
  } catch (const DomainError &e) {
    throw ParseError(path, e.what());
  }
  throw ParseError(path + "/kind", "expected 'linear' or 'ordinal'");
}

json ScaleToJson(const Scale &scale) {
  json out;
  if (scale.kind() == ScaleKind::kLinear) {
    out["kind"] = "linear";
    out["domain"] = {scale.domain_min(), scale.domain_max()};
  } else {
    out["kind"] = "ordinal";
    out["domain"] = scale.categories();
  }
  out["range"] = {scale.range_start(), scale.range_end()};
  return out;
}

std::string FormatCategory(double value) {
  if (value == std::floor(value) && std::fabs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  json j = value;
  return j.dump();
}

}  // namespace

std::string_view ToString(TextRole role) {
  for (const auto &[r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "";
}

std::optional<TextRole> ParseTextRole(std::string_view name) {
  for (const auto &[r, n] : kRoleNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

std::string_view ToString(ChannelName channel) {
  switch (channel) {
    case ChannelName::kX: return "x-position";
    case ChannelName::kY: return "y-position";
    case ChannelName::kColor: return "color";
  }
  return "";
}

std::optional<ChannelName> ParseChannelName(std::string_view name) {
  if (name == "x-position") return ChannelName::kX;
  if (name == "y-position") return ChannelName::kY;
  if (name == "color") return ChannelName::kColor;
  return std::nullopt;
}

std::string_view ToString(ChartType type) {
  switch (type) {
    case ChartType::kBar: return "bar";
    case ChartType::kLine: return "line";
    case ChartType::kScatter: return "scatter";
  }
  return "";
}

Scale Scale::Linear(double domain_min, double domain_max, double range_start,
                    double range_end) {
  if (!(domain_min < domain_max)) {
    throw DomainError("linear domain requires min < max");
  }
  if (range_start == range_end) throw DomainError("range endpoints must differ");
  Scale s;
  s.kind_ = ScaleKind::kLinear;
  s.domain_min_ = domain_min;
  s.domain_max_ = domain_max;
  s.range_start_ = range_start;
  s.range_end_ = range_end;
  return s;
}

Scale Scale::Ordinal(std::vector<std::string> categories, double range_start,
                     double range_end) {
  if (categories.empty()) throw DomainError("ordinal domain is empty");
  std::set<std::string> distinct(categories.begin(), categories.end());
  if (distinct.size() != categories.size()) {
    throw DomainError("ordinal domain has duplicate categories");
  }
  if (range_start == range_end) throw DomainError("range endpoints must differ");
  Scale s;
  s.kind_ = ScaleKind::kOrdinal;
  s.categories_ = std::move(categories);
  s.range_start_ = range_start;
  s.range_end_ = range_end;
  return s;
}

std::optional<size_t> Scale::CategoryIndex(std::string_view category) const {
  auto it = std::find(categories_.begin(), categories_.end(), category);
  if (it == categories_.end()) return std::nullopt;
  return static_cast<size_t>(it - categories_.begin());
}

std::pair<double, double> Scale::Band(std::string_view category) const {
  if (kind_ != ScaleKind::kOrdinal) throw DomainError("bands need an ordinal scale");
  auto index = CategoryIndex(category);
  if (!index) {
    throw DomainError("category '" + std::string(category) + "' not in domain");
  }
  double width = (range_end_ - range_start_) / static_cast<double>(categories_.size());
  double a = range_start_ + static_cast<double>(*index) * width;
  double b = range_start_ + static_cast<double>(*index + 1) * width;
  return {std::min(a, b), std::max(a, b)};
}

double ScaleToPixel(const Scale &scale, const ScaleValue &value) {
  if (scale.kind() == ScaleKind::kLinear) {
    if (!std::holds_alternative<double>(value)) {
      throw DomainError("linear scale expects a number");
    }
    double v = std::get<double>(value);
    if (!(v >= scale.domain_min() && v <= scale.domain_max())) {
      throw DomainError("value " + FormatCategory(v) + " outside domain [" +
                        FormatCategory(scale.domain_min()) + ", " +
                        FormatCategory(scale.domain_max()) + "]");
    }
    if (v == scale.domain_max()) return scale.range_end();
    double t = (v - scale.domain_min()) / (scale.domain_max() - scale.domain_min());
    return scale.range_start() + t * (scale.range_end() - scale.range_start());
  }
  std::string category = std::holds_alternative<std::string>(value)
                             ? std::get<std::string>(value)
                             : FormatCategory(std::get<double>(value));
  auto index = scale.CategoryIndex(category);
  if (!index) throw DomainError("category '" + category + "' not in domain");
  double width = (scale.range_end() - scale.range_start()) /
                 static_cast<double>(scale.categories().size());
  return scale.range_start() + (static_cast<double>(*index) + 0.5) * width;
}

bool ValueInDomain(const Scale &scale, double value) {
  if (scale.kind() != ScaleKind::kLinear) {
    throw DomainError("domain containment is defined for linear scales only");
  }
  return scale.domain_min() <= value && value <= scale.domain_max();
}

const Channel *VisualEncoding::channel(ChannelName name) const {
  for (const Channel &c : channels_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const TextualElement *VisualEncoding::element(std::string_view id) const {
  for (const TextualElement &e : elements_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::optional<ChannelName> VisualEncoding::OwningChannel(
    std::string_view element_id) const {
  for (const Channel &c : channels_) {
    if (c.title_id && *c.title_id == element_id) return c.name;
    if (std::find(c.label_ids.begin(), c.label_ids.end(), element_id) !=
        c.label_ids.end()) {
      return c.name;
    }
  }
  return std::nullopt;
}

std::vector<const TextualElement *> VisualEncoding::ElementsWithRole(
    TextRole role) const {
  std::vector<const TextualElement *> out;
  for (const TextualElement &e : elements_) {
    if (e.role == role) out.push_back(&e);
  }
  return out;
}

VisualEncoding VisualEncoding::Validated(ChartType chart_type,
                                         ImageSize image_size,
                                         std::vector<Channel> channels,
                                         std::vector<TextualElement> elements) {
  if (image_size.width <= 0 || image_size.height <= 0) {
    throw ParseError("imageSize", "image dimensions must be positive");
  }
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < elements.size(); ++i) {
    const TextualElement &e = elements[i];
    std::string path = "elements/" + std::to_string(i);
    if (e.id.empty()) throw ParseError(path + "/id", "empty id");
    if (!index.emplace(e.id, i).second) {
      throw ParseError(path + "/id", "duplicate id '" + e.id + "'");
    }
    if (e.text.empty()) throw ParseError(path + "/text", "empty text");
    const BoundingBox &b = e.bbox;
    if (!(b.width > 0 && b.height > 0)) {
      throw ParseError(path + "/bbox", "width and height must be positive");
    }
    if (b.x < 0 || b.y < 0 || b.right() > image_size.width ||
        b.bottom() > image_size.height) {
      throw ParseError(path + "/bbox", "box lies outside the image");
    }
  }

  std::sort(channels.begin(), channels.end(),
            [](const Channel &a, const Channel &b) { return a.name < b.name; });
  std::map<std::string, int> references;
  for (size_t i = 0; i < channels.size(); ++i) {
    const Channel &c = channels[i];
    std::string path = "channels/" + std::string(ChannelKey(c.name));
    if (i > 0 && channels[i - 1].name == c.name) {
      throw ParseError(path, "channel declared twice");
    }
    if (c.name != ChannelName::kColor && !c.scale) {
      throw ParseError(path + "/scale", "position channels require a scale");
    }
    auto check_ref = [&](const std::string &id, TextRole role,
                         const std::string &field) {
      auto it = index.find(id);
      if (it == index.end()) {
        throw ParseError(field, "unknown element id '" + id + "'");
      }
      if (elements[it->second].role != role) {
        throw ParseError(field, "element '" + id + "' has role " +
                                    std::string(ToString(elements[it->second].role)) +
                                    ", expected " + std::string(ToString(role)));
      }
      ++references[id];
    };
    if (c.title_id) check_ref(*c.title_id, TitleRole(c.name), path + "/titleId");
    for (size_t j = 0; j < c.label_ids.size(); ++j) {
      check_ref(c.label_ids[j], LabelRole(c.name),
                path + "/labelIds/" + std::to_string(j));
    }
    for (const auto &[id, rgb] : c.colors) {
      if (std::find(c.label_ids.begin(), c.label_ids.end(), id) == c.label_ids.end()) {
        throw ParseError(path + "/colors/" + id, "color for an unlisted label");
      }
      for (int v : {rgb.r, rgb.g, rgb.b}) {
        if (v < 0 || v > 255) throw ParseError(path + "/colors/" + id, "RGB out of range");
      }
    }
  }
  for (size_t i = 0; i < elements.size(); ++i) {
    const TextualElement &e = elements[i];
    int count = references.count(e.id) ? references[e.id] : 0;
    if (e.role == TextRole::kChartTitle) continue;
    std::string path = "elements/" + std::to_string(i);
    if (count == 0) {
      throw ParseError(path, "element '" + e.id + "' is not referenced by any channel");
    }
    if (count > 1) {
      throw ParseError(path, "element '" + e.id + "' is referenced more than once");
    }
  }
  for (TextualElement &e : elements) {
    bool axis_label = e.role == TextRole::kXAxisLabel || e.role == TextRole::kYAxisLabel;
    if (axis_label && !e.numeric_value) e.numeric_value = ParseQuantity(e.text);
  }

  VisualEncoding enc;
  enc.chart_type_ = chart_type;
  enc.image_size_ = image_size;
  enc.channels_ = std::move(channels);
  enc.elements_ = std::move(elements);
  return enc;
}

VisualEncoding EncodingFromJson(const json &doc) {
  RequireObject(doc, "");
  for (std::string_view key : {"views", "facet", "concat", "repeat", "layer"}) {
    if (doc.contains(key)) {
      throw UnsupportedChartError("multi-view charts are not supported ('" +
                                  std::string(key) + "')");
    }
  }
  RejectUnknownKeys(doc, "", {"chartType", "imageSize", "channels", "elements"});
  ChartType chart_type = ParseChartType(Require(doc, "", "chartType"));

  const json &size = RequireObject(Require(doc, "", "imageSize"), "imageSize");
  RejectUnknownKeys(size, "imageSize", {"w", "h"});
  const json &w = Require(size, "imageSize", "w");
  const json &h = Require(size, "imageSize", "h");
  if (!w.is_number_integer()) throw ParseError("imageSize/w", "expected an integer");
  if (!h.is_number_integer()) throw ParseError("imageSize/h", "expected an integer");
  ImageSize image_size{w.get<int>(), h.get<int>()};

  std::vector<TextualElement> elements;
  const json &elems = RequireArray(Require(doc, "", "elements"), "elements");
  for (size_t i = 0; i < elems.size(); ++i) {
    std::string path = "elements/" + std::to_string(i);
    const json &e = RequireObject(elems[i], path);
    RejectUnknownKeys(e, path, {"id", "text", "role", "bbox", "numericValue"});
    TextualElement element;
    element.id = RequireString(Require(e, path, "id"), path + "/id");
    element.text = RequireString(Require(e, path, "text"), path + "/text");
    std::string role = RequireString(Require(e, path, "role"), path + "/role");
    auto parsed_role = ParseTextRole(role);
    if (!parsed_role) throw ParseError(path + "/role", "unknown role '" + role + "'");
    element.role = *parsed_role;
    std::string bpath = path + "/bbox";
    const json &b = RequireObject(Require(e, path, "bbox"), bpath);
    RejectUnknownKeys(b, bpath, {"x", "y", "w", "h"});
    element.bbox = {RequireNumber(Require(b, bpath, "x"), bpath + "/x"),
                    RequireNumber(Require(b, bpath, "y"), bpath + "/y"),
                    RequireNumber(Require(b, bpath, "w"), bpath + "/w"),
                    RequireNumber(Require(b, bpath, "h"), bpath + "/h")};
    if (e.contains("numericValue")) {
      element.numeric_value = RequireNumber(e["numericValue"], path + "/numericValue");
    }
    elements.push_back(std::move(element));
  }

  std::vector<Channel> channels;
  const json &chans = RequireObject(Require(doc, "", "channels"), "channels");
  for (const auto &item : chans.items()) {
    std::string path = "channels/" + item.key();
    std::optional<ChannelName> name;
    for (const auto &[n, key] : kChannelKeys) {
      if (key == item.key()) name = n;
    }
    if (!name) {
      static const std::set<std::string> kUnsupported = {
          "size", "shape", "orientation", "opacity", "angle", "theta", "radius"};
      if (kUnsupported.count(item.key())) {
        throw UnsupportedChartError("visual channel '" + item.key() +
                                    "' is not supported");
      }
      throw ParseError(path, "unknown channel");
    }
    const json &c = RequireObject(item.value(), path);
    RejectUnknownKeys(c, path, {"scale", "titleId", "labelIds", "colors"});
    Channel channel;
    channel.name = *name;
    if (c.contains("scale")) channel.scale = ParseScale(c["scale"], path + "/scale");
    if (c.contains("titleId")) {
      channel.title_id = RequireString(c["titleId"], path + "/titleId");
    }
    const json &labels = RequireArray(Require(c, path, "labelIds"), path + "/labelIds");
    for (size_t i = 0; i < labels.size(); ++i) {
      channel.label_ids.push_back(
          RequireString(labels[i], path + "/labelIds/" + std::to_string(i)));
    }
    if (c.contains("colors")) {
      const json &colors = RequireObject(c["colors"], path + "/colors");
      for (const auto &swatch : colors.items()) {
        std::string cpath = path + "/colors/" + swatch.key();
        const json &rgb = RequireArray(swatch.value(), cpath);
        if (rgb.size() != 3) throw ParseError(cpath, "expected [r, g, b]");
        for (const json &v : rgb) {
          if (!v.is_number_integer()) throw ParseError(cpath, "expected integer RGB");
        }
        channel.colors[swatch.key()] = {rgb[0].get<int>(), rgb[1].get<int>(),
                                        rgb[2].get<int>()};
      }
    }
    channels.push_back(std::move(channel));
  }

  return VisualEncoding::Validated(chart_type, image_size, std::move(channels),
                                   std::move(elements));
}

VisualEncoding ParseEncoding(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error &e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  return EncodingFromJson(doc);
}

json EncodingToJson(const VisualEncoding &encoding) {
  json out;
  out["chartType"] = ToString(encoding.chart_type());
  out["imageSize"] = {{"w", encoding.image_size().width},
                      {"h", encoding.image_size().height}};
  json channels = json::object();
  for (const Channel &c : encoding.channels()) {
    json channel;
    if (c.scale) channel["scale"] = ScaleToJson(*c.scale);
    if (c.title_id) channel["titleId"] = *c.title_id;
    channel["labelIds"] = c.label_ids;
    if (!c.colors.empty()) {
      json colors = json::object();
      for (const auto &[id, rgb] : c.colors) colors[id] = {rgb.r, rgb.g, rgb.b};
      channel["colors"] = colors;
    }
    channels[std::string(ChannelKey(c.name))] = channel;
  }
  out["channels"] = channels;
  json elements = json::array();
  for (const TextualElement &e : encoding.elements()) {
    json element = {{"id", e.id},
                    {"text", e.text},
                    {"role", ToString(e.role)},
                    {"bbox", {{"x", e.bbox.x}, {"y", e.bbox.y},
                              {"w", e.bbox.width}, {"h", e.bbox.height}}}};
    if (e.numeric_value) element["numericValue"] = *e.numeric_value;
    elements.push_back(element);
  }
  out["elements"] = elements;
  return out;
}

}  // namespace chartlink
