#include "chartlink/overlay.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "chartlink/errors.h"
#include "chartlink/numbers.h"

namespace chartlink {

namespace {

struct AxisValues {
  std::vector<ScaleValue> values;
  std::vector<std::string> link_ids;  // parallel to values, for error messages
};

struct GroupContent {
  std::map<ChannelName, AxisValues> axes;
  std::optional<Rgb> color;
};

bool IsTitle(TextRole role) {
  return role == TextRole::kXAxisTitle || role == TextRole::kYAxisTitle ||
         role == TextRole::kLegendTitle || role == TextRole::kChartTitle;
}

GroupContent ContentOf(const GroupedLink &group, const std::vector<IndividualLink> &links,
                       const VisualEncoding &encoding) {
  std::map<std::string, const IndividualLink *> by_id;
  for (const IndividualLink &link : links) by_id[link.id] = &link;

  GroupContent content;
  for (const std::string &id : group.member_link_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end() || it->second->status == LinkStatus::kRemoved) continue;
    const IndividualLink &link = *it->second;
    const TextualElement *element = encoding.element(link.element_id);
    if (!element || !link.channel || IsTitle(element->role)) continue;
    const Channel *channel = encoding.channel(*link.channel);
    if (!channel) continue;

    if (*link.channel == ChannelName::kColor) {
      auto swatch = channel->colors.find(element->id);
      if (!content.color && swatch != channel->colors.end()) content.color = swatch->second;
      continue;
    }
    if (!channel->scale) continue;
    std::optional<ScaleValue> value;
    if (channel->scale->kind() == ScaleKind::kOrdinal) {
      if (channel->scale->CategoryIndex(element->text)) {
        value = element->text;
      } else {
        auto pos = std::find(channel->label_ids.begin(), channel->label_ids.end(), element->id);
        size_t index = pos - channel->label_ids.begin();
        if (index < channel->scale->categories().size()) {
          value = channel->scale->categories()[index];
        }
      }
    } else {
      std::optional<double> number;
      if (link.provenance.op == MatchOperator::kNumerical) number = ParseQuantity(link.phrase.text);
      if (!number) number = element->numeric_value;
      if (number) value = *number;
    }
    if (!value) continue;
    AxisValues &axis = content.axes[*link.channel];
    if (std::find(axis.values.begin(), axis.values.end(), *value) != axis.values.end()) continue;
    axis.values.push_back(*value);
    axis.link_ids.push_back(link.id);
  }
  return content;
}

bool Nominal(const VisualEncoding &encoding, ChannelName name) {
  const Channel *channel = encoding.channel(name);
  return channel && channel->scale && channel->scale->kind() == ScaleKind::kOrdinal;
}

std::pair<double, double> Extent(const VisualEncoding &encoding, ChannelName name) {
  const Channel *channel = encoding.channel(name);
  if (channel && channel->scale) {
    double a = channel->scale->range_start(), b = channel->scale->range_end();
    return {std::min(a, b), std::max(a, b)};
  }
  ImageSize size = encoding.image_size();
  return {0.0, static_cast<double>(name == ChannelName::kX ? size.width : size.height)};
}

double Pixel(const VisualEncoding &encoding, ChannelName name, const ScaleValue &value,
             const std::string &link_id) {
  const Channel *channel = encoding.channel(name);
  if (!channel || !channel->scale) {
    throw GeometryError("link " + link_id + ": channel " + std::string(ToString(name)) +
                        " has no scale");
  }
  try {
    return ScaleToPixel(*channel->scale, value);
  } catch (const DomainError &e) {
    throw GeometryError("link " + link_id + ": " + e.what());
  }
}

class GeometryBuilder {
 public:
  GeometryBuilder(const GroupContent &content, const VisualEncoding &encoding)
      : content_(content), encoding_(encoding) {}

  const AxisValues *Axis(ChannelName name) const {
    auto it = content_.axes.find(name);
    return it == content_.axes.end() || it->second.values.empty() ? nullptr : &it->second;
  }

  // Full-length segments for every value on the given axes.
  void AddLines(OverlaySpec &spec, bool skip_nominal) const {
    for (ChannelName name : {ChannelName::kX, ChannelName::kY}) {
      const AxisValues *axis = Axis(name);
      if (!axis || (skip_nominal && Nominal(encoding_, name))) continue;
      for (size_t i = 0; i < axis->values.size(); ++i) {
        double p = Pixel(encoding_, name, axis->values[i], axis->link_ids[i]);
        if (name == ChannelName::kX) {
          auto [lo, hi] = Extent(encoding_, ChannelName::kY);
          spec.segments.push_back({{p, lo}, {p, hi}});
        } else {
          auto [lo, hi] = Extent(encoding_, ChannelName::kX);
          spec.segments.push_back({{lo, p}, {hi, p}});
        }
      }
    }
  }

  void AddPoint(OverlaySpec &spec) const {
    const AxisValues *x = Axis(ChannelName::kX);
    const AxisValues *y = Axis(ChannelName::kY);
    if (!x || !y) throw GeometryError("target point needs a value on both axes");
    double px = Pixel(encoding_, ChannelName::kX, x->values.front(), x->link_ids.front());
    double py = Pixel(encoding_, ChannelName::kY, y->values.front(), y->link_ids.front());
    double x_origin = encoding_.channel(ChannelName::kX)->scale->range_start();
    double y_origin = encoding_.channel(ChannelName::kY)->scale->range_start();
    spec.point = Point{px, py};
    spec.segments.push_back({{px, y_origin}, {px, py}});
    spec.segments.push_back({{x_origin, py}, {px, py}});
  }

  void AddBox(OverlaySpec &spec) const {
    for (ChannelName name : {ChannelName::kX, ChannelName::kY}) {
      const AxisValues *axis = Axis(name);
      if (!axis || !Nominal(encoding_, name)) continue;
      const Scale &scale = *encoding_.channel(name)->scale;
      double lo = 0, hi = 0;
      for (size_t i = 0; i < axis->values.size(); ++i) {
        auto [a, b] = scale.Band(std::get<std::string>(axis->values[i]));
        lo = i == 0 ? a : std::min(lo, a);
        hi = i == 0 ? b : std::max(hi, b);
      }
      ChannelName other = name == ChannelName::kX ? ChannelName::kY : ChannelName::kX;
      auto [olo, ohi] = Extent(encoding_, other);
      if (name == ChannelName::kX) {
        spec.box = BoundingBox{lo, olo, hi - lo, ohi - olo};
      } else {
        spec.box = BoundingBox{olo, lo, ohi - olo, hi - lo};
      }
      return;
    }
    throw GeometryError("bounding box needs a category on a nominal axis");
  }

  void AddColor(OverlaySpec &spec) const {
    if (!content_.color) throw GeometryError("color overlay needs a legend label with a swatch");
    spec.color = content_.color;
  }

 private:
  const GroupContent &content_;
  const VisualEncoding &encoding_;
};

void CheckBounds(const OverlaySpec &spec, ImageSize size) {
  auto inside = [&](double x, double y) {
    return x >= 0 && y >= 0 && x <= size.width && y <= size.height;
  };
  bool ok = true;
  for (const Segment &s : spec.segments) {
    ok = ok && inside(s.from.x, s.from.y) && inside(s.to.x, s.to.y);
  }
  if (spec.point) ok = ok && inside(spec.point->x, spec.point->y);
  if (spec.box) ok = ok && inside(spec.box->x, spec.box->y) &&
                     inside(spec.box->right(), spec.box->bottom());
  if (!ok) {
    throw GeometryError(std::string(ToString(spec.kind)) + " overlay of group " +
                        spec.group_id + " falls outside the image");
  }
}

bool IsFilter(OverlayKind kind) {
  return kind == OverlayKind::kColorFilter || kind == OverlayKind::kHighlightedBar ||
         kind == OverlayKind::kTargetBar;
}

bool ColorMatches(const std::uint8_t *pixel, const Rgb &target, double tolerance) {
  double dr = pixel[0] - target.r, dg = pixel[1] - target.g, db = pixel[2] - target.b;
  return std::sqrt(dr * dr + dg * dg + db * db) <= tolerance;
}

bool InBox(const BoundingBox &box, int x, int y) {
  double cx = x + 0.5, cy = y + 0.5;
  return cx >= box.x && cx <= box.right() && cy >= box.y && cy <= box.bottom();
}

void ApplyFilter(Image &image, const OverlaySpec &spec) {
  if (!spec.color) return;
  double dim = std::clamp(spec.style.dim_alpha, 0.0, 1.0);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      std::uint8_t *pixel = image.at(x, y);
      bool keep = ColorMatches(pixel, *spec.color, spec.style.tolerance) &&
                  (spec.kind == OverlayKind::kColorFilter || !spec.box ||
                   InBox(*spec.box, x, y));
      if (!keep) pixel[3] = static_cast<std::uint8_t>(std::lround(pixel[3] * dim));
    }
  }
}

void Paint(Image &image, int x, int y, const Rgb &color) {
  if (x < 0 || y < 0 || x >= image.width || y >= image.height) return;
  std::uint8_t *pixel = image.at(x, y);
  pixel[0] = static_cast<std::uint8_t>(color.r);
  pixel[1] = static_cast<std::uint8_t>(color.g);
  pixel[2] = static_cast<std::uint8_t>(color.b);
  pixel[3] = 255;
}

// Pixel indices whose centers lie within [lo, hi].
std::pair<int, int> Cover(double lo, double hi) {
  return {static_cast<int>(std::ceil(lo - 0.5)), static_cast<int>(std::floor(hi - 0.5))};
}

void DrawSegment(Image &image, const Segment &segment, const OverlayStyle &style) {
  double half = style.stroke_width / 2;
  double x0 = std::min(segment.from.x, segment.to.x), x1 = std::max(segment.from.x, segment.to.x);
  double y0 = std::min(segment.from.y, segment.to.y), y1 = std::max(segment.from.y, segment.to.y);
  // Thicken across the segment's direction only.
  bool vertical = x1 - x0 <= y1 - y0;
  auto [c0, c1] = vertical ? Cover(x0 - half, x1 + half) : Cover(x0, x1);
  auto [r0, r1] = vertical ? Cover(y0, y1) : Cover(y0 - half, y1 + half);
  for (int y = r0; y <= r1; ++y) {
    for (int x = c0; x <= c1; ++x) Paint(image, x, y, style.stroke);
  }
}

void DrawStrokes(Image &image, const OverlaySpec &spec) {
  for (const Segment &segment : spec.segments) DrawSegment(image, segment, spec.style);
  if (spec.kind == OverlayKind::kBoundingBox && spec.box) {
    const BoundingBox &b = *spec.box;
    for (const Segment &edge : {Segment{{b.x, b.y}, {b.right(), b.y}},
                                Segment{{b.x, b.bottom()}, {b.right(), b.bottom()}},
                                Segment{{b.x, b.y}, {b.x, b.bottom()}},
                                Segment{{b.right(), b.y}, {b.right(), b.bottom()}}}) {
      DrawSegment(image, edge, spec.style);
    }
  }
  if (spec.point) {
    double half = spec.style.stroke_width * 1.5;
    auto [c0, c1] = Cover(spec.point->x - half, spec.point->x + half);
    auto [r0, r1] = Cover(spec.point->y - half, spec.point->y + half);
    for (int y = r0; y <= r1; ++y) {
      for (int x = c0; x <= c1; ++x) Paint(image, x, y, spec.style.stroke);
    }
  }
}

nlohmann::json PointJson(const Point &p) { return {{"x", p.x}, {"y", p.y}}; }

nlohmann::json RgbJson(const Rgb &c) { return {c.r, c.g, c.b}; }

}  // namespace

std::string_view ToString(OverlayKind kind) {
  switch (kind) {
    case OverlayKind::kLineSegment: return "line-segment";
    case OverlayKind::kTargetPoint: return "target-point";
    case OverlayKind::kColorFilter: return "color-filter";
    case OverlayKind::kBoundingBox: return "bounding-box";
    case OverlayKind::kHighlightedBar: return "highlighted-bar";
    case OverlayKind::kTargetBar: return "target-bar";
  }
  return "";
}

std::vector<OverlayKind> SelectOverlayKinds(const GroupShape &shape) {
  bool bar = shape.chart_type == ChartType::kBar;
  int categories = 0, numbers = 0;
  if (bar) {
    (shape.x_nominal ? categories : numbers) += shape.x_values;
    (shape.y_nominal ? categories : numbers) += shape.y_values;
  }
  if (bar && categories > 0) {
    if (shape.color && numbers > 0) return {OverlayKind::kTargetBar};
    if (shape.color) return {OverlayKind::kHighlightedBar};
    if (numbers > 0) return {OverlayKind::kBoundingBox, OverlayKind::kLineSegment};
    return {OverlayKind::kBoundingBox};
  }
  std::vector<OverlayKind> kinds;
  if (shape.color) kinds.push_back(OverlayKind::kColorFilter);
  if (shape.x_values == 1 && shape.y_values == 1) {
    kinds.push_back(OverlayKind::kTargetPoint);
  } else if (shape.x_values + shape.y_values > 0) {
    kinds.push_back(OverlayKind::kLineSegment);
  }
  return kinds;
}

GroupShape ShapeOf(const GroupedLink &group, const std::vector<IndividualLink> &links,
                   const VisualEncoding &encoding) {
  GroupContent content = ContentOf(group, links, encoding);
  GroupShape shape;
  shape.chart_type = encoding.chart_type();
  shape.color = content.color.has_value();
  if (auto it = content.axes.find(ChannelName::kX); it != content.axes.end()) {
    shape.x_values = static_cast<int>(it->second.values.size());
  }
  if (auto it = content.axes.find(ChannelName::kY); it != content.axes.end()) {
    shape.y_values = static_cast<int>(it->second.values.size());
  }
  shape.x_nominal = Nominal(encoding, ChannelName::kX);
  shape.y_nominal = Nominal(encoding, ChannelName::kY);
  return shape;
}

OverlaySpec BuildGeometry(const GroupedLink &group, const std::vector<IndividualLink> &links,
                          const VisualEncoding &encoding, OverlayKind kind,
                          const OverlayStyle &style) {
  GroupContent content = ContentOf(group, links, encoding);
  GeometryBuilder builder(content, encoding);
  OverlaySpec spec;
  spec.kind = kind;
  spec.group_id = group.id;
  spec.style = style;
  bool bar = encoding.chart_type() == ChartType::kBar;
  switch (kind) {
    case OverlayKind::kLineSegment:
      builder.AddLines(spec, bar);
      if (spec.segments.empty()) throw GeometryError("line segment needs an axis value");
      break;
    case OverlayKind::kTargetPoint:
      builder.AddPoint(spec);
      break;
    case OverlayKind::kColorFilter:
      builder.AddColor(spec);
      break;
    case OverlayKind::kBoundingBox:
      builder.AddBox(spec);
      break;
    case OverlayKind::kHighlightedBar:
      builder.AddBox(spec);
      builder.AddColor(spec);
      break;
    case OverlayKind::kTargetBar:
      builder.AddBox(spec);
      builder.AddColor(spec);
      builder.AddLines(spec, true);
      break;
  }
  CheckBounds(spec, encoding.image_size());
  return spec;
}

std::vector<OverlaySpec> BuildOverlays(const GroupedLink &group,
                                       const std::vector<IndividualLink> &links,
                                       const VisualEncoding &encoding,
                                       const OverlayStyle &style) {
  std::vector<OverlaySpec> specs;
  for (OverlayKind kind : SelectOverlayKinds(ShapeOf(group, links, encoding))) {
    specs.push_back(BuildGeometry(group, links, encoding, kind, style));
  }
  return specs;
}

Image Composite(const Image &image, std::span<const OverlaySpec> specs,
                std::optional<ImageSize> expected) {
  if (expected && (expected->width != image.width || expected->height != image.height)) {
    throw PreconditionError("image is " + std::to_string(image.width) + "x" +
                            std::to_string(image.height) + " but the encoding declares " +
                            std::to_string(expected->width) + "x" +
                            std::to_string(expected->height));
  }
  Image out = image;
  for (const OverlaySpec &spec : specs) {
    if (IsFilter(spec.kind)) ApplyFilter(out, spec);
  }
  for (const OverlaySpec &spec : specs) DrawStrokes(out, spec);
  return out;
}

nlohmann::json OverlayToJson(const OverlaySpec &spec) {
  nlohmann::json doc = {
      {"kind", ToString(spec.kind)},
      {"groupId", spec.group_id},
      {"style",
       {{"strokeWidth", spec.style.stroke_width},
        {"stroke", RgbJson(spec.style.stroke)},
        {"dimAlpha", spec.style.dim_alpha},
        {"tolerance", spec.style.tolerance}}}};
  if (!spec.segments.empty()) {
    nlohmann::json segments = nlohmann::json::array();
    for (const Segment &s : spec.segments) {
      segments.push_back({{"from", PointJson(s.from)}, {"to", PointJson(s.to)}});
    }
    doc["segments"] = segments;
  }
  if (spec.point) doc["point"] = PointJson(*spec.point);
  if (spec.box) {
    doc["box"] = {{"x", spec.box->x}, {"y", spec.box->y}, {"w", spec.box->width},
                  {"h", spec.box->height}};
  }
  if (spec.color) doc["color"] = RgbJson(*spec.color);
  return doc;
}

}  // namespace chartlink
