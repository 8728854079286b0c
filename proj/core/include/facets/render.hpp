#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "facets/dual.hpp"
#include "facets/regions.hpp"
#include "facets/trainer.hpp"

namespace facets {

namespace svg {

struct Polygon {
    std::vector<std::array<double, 2>> points; // data units
    std::string fill;
    std::string stroke;    // empty: none
    double stroke_px = 1.0;
};

struct Polyline {
    std::vector<std::array<double, 2>> points;
    std::string stroke;
    double stroke_px = 1.0;
};

struct Circle {
    double x = 0, y = 0;   // data units
    double radius_px = 2.0;
    std::string fill;
};

struct Rect {
    double x = 0, y = 0, w = 0, h = 0; // data units
    std::string fill;
};

using Element = std::variant<Polygon, Polyline, Circle, Rect>;

} // namespace svg

/// Draw list in data coordinates plus the affine data-to-pixel mapping
/// (fixed by viewbox and pixel size; y is flipped on output).
struct SvgScene {
    double width_px = 640, height_px = 640;
    BBox viewbox;
    std::vector<svg::Element> elements;
    std::string metadata_comment; // emitted verbatim inside an XML comment
};

void write_svg(std::ostream& os, const SvgScene& scene);
void write_svg(const std::filesystem::path& path, const SvgScene& scene);

enum class RegionFillMode { by_class, by_region };

/// Cells filled by class sign/argmax at the centroid (green positive, red
/// negative) or by a per-cell palette; black cell boundaries.
SvgScene render_regions(const std::vector<RegionCell>& cells, RegionFillMode mode,
                        const BBox& bbox);

/// One scene per ReLU layer plus the output layer: the layer's zero
/// polylines in per-unit colors over the earlier layers' zeros in gray.
std::vector<SvgScene> render_layer_zeros(const Mlp& net, const BBox& bbox);

/// Orthographic projection of (w1, w2, b) triples; blue dots for all facets,
/// red for highlighted ones.
SvgScene render_dual(const std::vector<DualPoint>& points,
                     const std::vector<Vector>& highlight);

/// Fig-style overlay of mapped vs target dual points with connecting
/// segments.
SvgScene render_dual_pair(const Matrix& mapped, const Matrix& target);

/// Signed-value raster with a diverging palette centered at 0.
SvgScene render_gradient_image(const Vector& row, std::size_t img_rows,
                               std::size_t img_cols);

/// One render_regions frame per snapshot, written as frame_0000.svg, ... in
/// out_dir; returns the file names. The data-to-pixel mapping is identical
/// across frames.
std::vector<std::string> render_frames(const TrainRun& run, const BBox& bbox,
                                       const std::filesystem::path& out_dir,
                                       RegionFillMode mode = RegionFillMode::by_class);

/// Deterministic palette color for an index.
std::string palette_color(std::size_t index);

} // namespace facets
