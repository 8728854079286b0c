#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "facets/network.hpp"

namespace facets {

struct BBox {
    double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

/// Counter-clockwise convex polygon.
struct ConvexPolygon2D {
    std::vector<std::array<double, 2>> vertices;
    double area() const;
    std::array<double, 2> centroid() const;
};

/// One linear-region cell of a 2-input network: its polygon, the activation
/// pattern holding on it, and the affine map the network equals there.
struct RegionCell {
    ConvexPolygon2D polygon;
    ActivationPattern pattern;
    AffineMap map;
};

struct Segment1D {
    Vector p0, p1;
    std::vector<double> breakpoints; // strictly increasing, in (0,1)
};

/// Exact cell decomposition of the bbox: processes ReLU layers in order and
/// splits each working cell by every unit's preactivation line under the
/// cell's pattern-so-far. Cells with area < 1e-12 are discarded.
std::vector<RegionCell> enumerate_regions_2d(const Mlp& net, const BBox& bbox);

struct Census1D {
    std::size_t count = 0;
    Segment1D segment;
};

/// Number of maximal constant-pattern subintervals of [p0,p1]. Breakpoints
/// are located by recursive bisection to parameter tolerance 1e-9; intervals
/// with equal endpoint patterns shorter than min_feature are not subdivided.
Census1D count_regions_1d(const Mlp& net, const Vector& p0, const Vector& p1,
                          double min_feature = 1e-3);

/// Phase-1 feasibility of {x : Ax <= c} via a dense simplex with Bland's
/// rule; a point with max violation <= 1e-9 counts as feasible.
bool is_empty(const Polytope& poly);

struct UnitZeroSet {
    std::size_t unit = 0;
    std::vector<std::array<double, 4>> segments; // x1,y1,x2,y2
};

/// Input-space zero segments of every unit of layers()[layer_index]
/// (preactivations for a ReLU layer, scores for the output layer), computed
/// per enumerated cell of the preceding layers.
std::vector<UnitZeroSet> layer_zero_sets(const Mlp& net, std::size_t layer_index,
                                         const BBox& bbox);

/// true iff the cell's polygon touches no bbox edge. Cells touching the
/// boundary are treated as unbounded when the bbox strictly contains the
/// data region.
bool cell_bounded(const RegionCell& cell, const BBox& bbox);

struct PatternCount {
    std::uint64_t key = 0;
    std::size_t samples = 0;
};

/// Distinct activation patterns met on a per_side x per_side grid over the
/// bbox, sorted by key. An independent sampling census for checking the
/// exact enumeration.
std::vector<PatternCount> sample_patterns_grid(const Mlp& net, const BBox& bbox,
                                               std::size_t per_side);

void write_cells(std::ostream& os, const std::vector<RegionCell>& cells,
                 std::size_t output_dim);
std::vector<RegionCell> read_cells(std::istream& is);

} // namespace facets
