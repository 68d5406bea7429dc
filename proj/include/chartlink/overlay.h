#ifndef CHARTLINK_OVERLAY_H_
#define CHARTLINK_OVERLAY_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chartlink/encoding.h"
#include "chartlink/grouping.h"
#include "chartlink/matching.h"
#include "chartlink/raster.h"
#include "json.hpp"

namespace chartlink {

enum class OverlayKind {
  kLineSegment,
  kTargetPoint,
  kColorFilter,
  kBoundingBox,
  kHighlightedBar,
  kTargetBar,
};

std::string_view ToString(OverlayKind kind);

struct OverlayStyle {
  double stroke_width = 2;
  Rgb stroke{226, 61, 40};
  double dim_alpha = 0.25;
  // Euclidean RGB distance under which a pixel counts as the target color.
  double tolerance = 60;

  bool operator==(const OverlayStyle &) const = default;
};

struct Point {
  double x = 0;
  double y = 0;
  bool operator==(const Point &) const = default;
};

// Axis-aligned segment.
struct Segment {
  Point from;
  Point to;
  bool operator==(const Segment &) const = default;
};

// One overlay. Which geometry fields are set depends on the kind:
//   line-segment    segments (two for a value range)
//   target-point    point, plus the two segments from the axes to it
//   color-filter    color
//   bounding-box    box
//   highlighted-bar box, color
//   target-bar      box, color, segments
struct OverlaySpec {
  OverlayKind kind = OverlayKind::kLineSegment;
  std::string group_id;
  std::vector<Segment> segments;
  std::optional<Point> point;
  std::optional<BoundingBox> box;
  std::optional<Rgb> color;
  OverlayStyle style;

  bool operator==(const OverlaySpec &) const = default;
};

// What a group says about the chart, reduced to what decides the overlay.
struct GroupShape {
  ChartType chart_type = ChartType::kBar;
  bool color = false;       // a legend label with a known swatch
  int x_values = 0;         // values or categories named on each axis
  int y_values = 0;
  bool x_nominal = false;   // axis has an ordinal scale
  bool y_nominal = false;
};

// Overlay kinds for a group, filters first. Empty means no overlay
// (titles only, or nothing chart-specific). Defined for every shape.
std::vector<OverlayKind> SelectOverlayKinds(const GroupShape &shape);

GroupShape ShapeOf(const GroupedLink &group, const std::vector<IndividualLink> &links,
                   const VisualEncoding &encoding);

// Throws GeometryError when a value lies outside its scale's domain or a
// needed scale or swatch is missing.
OverlaySpec BuildGeometry(const GroupedLink &group, const std::vector<IndividualLink> &links,
                          const VisualEncoding &encoding, OverlayKind kind,
                          const OverlayStyle &style = {});

std::vector<OverlaySpec> BuildOverlays(const GroupedLink &group,
                                       const std::vector<IndividualLink> &links,
                                       const VisualEncoding &encoding,
                                       const OverlayStyle &style = {});

// Returns a copy of `image` with the overlays applied: alpha filters
// first, then strokes. Throws PreconditionError when `expected` is given
// and does not match the image size.
Image Composite(const Image &image, std::span<const OverlaySpec> specs,
                std::optional<ImageSize> expected = std::nullopt);

nlohmann::json OverlayToJson(const OverlaySpec &spec);

}  // namespace chartlink

#endif  // CHARTLINK_OVERLAY_H_
