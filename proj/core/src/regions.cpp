#include "facets/regions.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "facets/error.hpp"

namespace facets {

namespace {

constexpr double kSplitEps = 1e-9;   // snapping distance for split lines
constexpr double kMinCellArea = 1e-12;

using Pt = std::array<double, 2>;

Pt lerp(const Pt& a, const Pt& b, double t) {
    return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

} // namespace

double ConvexPolygon2D::area() const {
    double s = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Pt& a = vertices[i];
        const Pt& b = vertices[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * s;
}

Pt ConvexPolygon2D::centroid() const {
    double a6 = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Pt& p = vertices[i];
        const Pt& q = vertices[(i + 1) % n];
        const double cross = p[0] * q[1] - q[0] * p[1];
        a6 += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    if (std::abs(a6) < 1e-300) { // degenerate; fall back to vertex mean
        double mx = 0, my = 0;
        for (const Pt& p : vertices) mx += p[0], my += p[1];
        return {mx / n, my / n};
    }
    return {cx / (3.0 * a6), cy / (3.0 * a6)};
}

namespace {

void push_unique(std::vector<Pt>& v, const Pt& p) {
    if (!v.empty() && std::abs(v.back()[0] - p[0]) < 1e-14 &&
        std::abs(v.back()[1] - p[1]) < 1e-14)
        return;
    v.push_back(p);
}

void close_ring(std::vector<Pt>& v) {
    while (v.size() > 1 && std::abs(v.front()[0] - v.back()[0]) < 1e-14 &&
           std::abs(v.front()[1] - v.back()[1]) < 1e-14)
        v.pop_back();
}

// Splits poly by the line n.x = c into the n.x <= c part (neg) and the
// n.x >= c part (pos). Vertices within kSplitEps of the line (scaled by
// |n|) are placed on the line.
void split_polygon(const ConvexPolygon2D& poly, double nx, double ny, double c,
                   ConvexPolygon2D& neg, ConvexPolygon2D& pos) {
    neg.vertices.clear();
    pos.vertices.clear();
    const double norm = std::hypot(nx, ny);
    if (norm < 1e-300) return; // caller handles constant functions

    const std::size_t n = poly.vertices.size();
    std::vector<double> dist(n);
    std::vector<int> side(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = (nx * poly.vertices[i][0] + ny * poly.vertices[i][1] - c) / norm;
        side[i] = dist[i] > kSplitEps ? 1 : (dist[i] < -kSplitEps ? -1 : 0);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        Pt v = poly.vertices[i];
        if (side[i] == 0) {
            // snap onto the line
            v = {v[0] - dist[i] * nx / norm, v[1] - dist[i] * ny / norm};
            push_unique(neg.vertices, v);
            push_unique(pos.vertices, v);
        } else if (side[i] < 0) {
            push_unique(neg.vertices, v);
        } else {
            push_unique(pos.vertices, v);
        }
        if (side[i] * side[j] < 0) {
            const double t = dist[i] / (dist[i] - dist[j]);
            const Pt m = lerp(poly.vertices[i], poly.vertices[j], t);
            push_unique(neg.vertices, m);
            push_unique(pos.vertices, m);
        }
    }
    close_ring(neg.vertices);
    close_ring(pos.vertices);
    if (neg.vertices.size() < 3) neg.vertices.clear();
    if (pos.vertices.size() < 3) pos.vertices.clear();
}

ConvexPolygon2D bbox_polygon(const BBox& b) {
    check(b.xmax > b.xmin && b.ymax > b.ymin, "bbox: degenerate box");
    return ConvexPolygon2D{{{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}}};
}

// A working cell during layer-by-layer splitting: polygon, masks of the
// processed ReLU layers, and the masked affine (aw, ab) composed through
// every processed layer.
struct PrefixCell {
    ConvexPolygon2D poly;
    std::vector<std::vector<bool>> masks;
    Matrix aw;
    Vector ab;
};

void fold_layer(PrefixCell& cell, const Layer& l, const std::vector<bool>* mask) {
    Matrix w = l.weight;
    Vector b = l.bias;
    if (mask) {
        for (std::size_t u = 0; u < mask->size(); ++u) {
            if ((*mask)[u]) continue;
            auto row = w.row(u);
            for (double& v : row) v = 0.0;
            b[u] = 0.0;
        }
    }
    Vector nb = matvec(w, cell.ab);
    for (std::size_t i = 0; i < nb.size(); ++i) nb[i] += b[i];
    cell.aw = matmul(w, cell.aw);
    cell.ab = std::move(nb);
}

// Splits the cells of `cells` by every unit of the ReLU layer `l`, appending
// the layer's mask to each surviving cell, then folds the masked layer.
std::vector<PrefixCell> split_by_layer(std::vector<PrefixCell> cells, const Layer& l) {
    std::vector<PrefixCell> out;
    for (PrefixCell& cell : cells) {
        const Matrix pw = matmul(l.weight, cell.aw);
        Vector pv = matvec(l.weight, cell.ab);
        for (std::size_t i = 0; i < pv.size(); ++i) pv[i] += l.bias[i];

        struct Piece {
            ConvexPolygon2D poly;
            std::vector<bool> bits;
        };
        std::vector<Piece> pieces{{cell.poly, {}}};
        for (std::size_t u = 0; u < l.weight.rows(); ++u) {
            const double nx = pw(u, 0), ny = pw(u, 1), c = -pv[u];
            std::vector<Piece> next;
            next.reserve(pieces.size() + 4);
            for (Piece& p : pieces) {
                if (std::hypot(nx, ny) < 1e-300) {
                    // Constant preactivation on the whole plane.
                    p.bits.push_back(pv[u] > 0.0);
                    next.push_back(std::move(p));
                    continue;
                }
                ConvexPolygon2D negp, posp;
                split_polygon(p.poly, nx, ny, c, negp, posp);
                if (negp.area() >= kMinCellArea) {
                    Piece q{std::move(negp), p.bits};
                    q.bits.push_back(false);
                    next.push_back(std::move(q));
                }
                if (posp.area() >= kMinCellArea) {
                    Piece q{std::move(posp), std::move(p.bits)};
                    q.bits.push_back(true);
                    next.push_back(std::move(q));
                }
            }
            pieces = std::move(next);
        }
        for (Piece& p : pieces) {
            PrefixCell c2{std::move(p.poly), cell.masks, cell.aw, cell.ab};
            c2.masks.push_back(p.bits);
            fold_layer(c2, l, &p.bits);
            out.push_back(std::move(c2));
        }
    }
    return out;
}

// Enumerates cells folding layers [0, stop_layer). ReLU layers split, linear
// layers fold only.
std::vector<PrefixCell> enumerate_prefix(const Mlp& net, const BBox& bbox,
                                         std::size_t stop_layer) {
    check(net.input_dim() == 2, "enumeration requires a 2-input network");
    PrefixCell root{bbox_polygon(bbox), {}, Matrix::identity(2), Vector(2, 0.0)};
    std::vector<PrefixCell> cells{std::move(root)};
    for (std::size_t k = 0; k < stop_layer; ++k) {
        const Layer& l = net.layers()[k];
        if (l.relu_after) {
            cells = split_by_layer(std::move(cells), l);
        } else {
            for (PrefixCell& c : cells) fold_layer(c, l, nullptr);
        }
    }
    return cells;
}

} // namespace

std::vector<RegionCell> enumerate_regions_2d(const Mlp& net, const BBox& bbox) {
    std::vector<PrefixCell> prefix = enumerate_prefix(net, bbox, net.layer_count());
    std::vector<RegionCell> out;
    out.reserve(prefix.size());
    for (PrefixCell& c : prefix) {
        RegionCell cell;
        cell.polygon = std::move(c.poly);
        cell.pattern.masks = std::move(c.masks);
        cell.map = AffineMap{std::move(c.aw), std::move(c.ab)};
        out.push_back(std::move(cell));
    }
    return out;
}

Census1D count_regions_1d(const Mlp& net, const Vector& p0, const Vector& p1,
                          double min_feature) {
    check(p0.size() == net.input_dim() && p1.size() == net.input_dim(),
          "count_regions_1d: dimension mismatch");
    check(p0 != p1, "count_regions_1d: degenerate segment");
    constexpr double kTol = 1e-9;

    auto at = [&](double t) {
        Vector x(p0.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = p0[i] + t * (p1[i] - p0[i]);
        return activation_pattern(net, x);
    };

    std::vector<double> breaks;
    // Recursive bisection: intervals with equal endpoint patterns shorter
    // than min_feature are taken as constant; differing endpoints are
    // refined to kTol to localize the breakpoint.
    auto collect = [&](auto&& self, double a, const ActivationPattern& pa, double b,
                       const ActivationPattern& pb) -> void {
        if (pa == pb && (b - a) <= min_feature) return;
        if ((b - a) <= kTol) {
            if (!(pa == pb)) breaks.push_back(0.5 * (a + b));
            return;
        }
        const double m = 0.5 * (a + b);
        ActivationPattern pm = at(m);
        self(self, a, pa, m, pm);
        self(self, m, pm, b, pb);
    };
    ActivationPattern pa = at(0.0), pb = at(1.0);
    collect(collect, 0.0, pa, 1.0, pb);
    std::sort(breaks.begin(), breaks.end());

    // Merge adjacent intervals whose midpoint patterns agree.
    std::vector<double> kept;
    ActivationPattern prev;
    double lo = 0.0;
    for (std::size_t bi = 0; bi <= breaks.size(); ++bi) {
        const double hi = bi == breaks.size() ? 1.0 : breaks[bi];
        ActivationPattern cur = at(0.5 * (lo + hi));
        if (bi > 0 && !(cur == prev)) kept.push_back(lo);
        prev = std::move(cur);
        lo = hi;
    }

    Census1D result;
    result.segment = Segment1D{p0, p1, kept};
    result.count = kept.size() + 1;
    return result;
}

bool is_empty(const Polytope& poly) {
    const std::size_t m = poly.a.rows();
    if (m == 0) return false;
    const std::size_t d = poly.a.cols();
    check(poly.c.size() == m, "is_empty: rhs length mismatch");

    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::min(worst, poly.c[i]);
    if (worst >= -1e-9) return false; // the origin already satisfies Ax <= c

    // Phase-1 LP: minimize t subject to A(u - w) - t <= c, u,w,t >= 0.
    // Feasible (polytope nonempty) iff min t <= 1e-9.
    const std::size_t nstruct = 2 * d + 1; // u, w, t
    const std::size_t tcol = 2 * d;
    const std::size_t ncols = nstruct + m; // plus slacks
    Matrix T(m, ncols + 1);                // last column = rhs
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            T(i, j) = poly.a(i, j);
            T(i, d + j) = -poly.a(i, j);
        }
        T(i, tcol) = -1.0;
        T(i, nstruct + i) = 1.0;
        T(i, ncols) = poly.c[i];
        basis[i] = nstruct + i;
    }
    // Objective row: minimize t (reduced costs tracked directly).
    Vector obj(ncols + 1, 0.0);
    obj[tcol] = 1.0;

    auto pivot = [&](std::size_t pr, std::size_t pc) {
        const double pv = T(pr, pc);
        for (std::size_t j = 0; j <= ncols; ++j) T(pr, j) /= pv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == pr) continue;
            const double f = T(i, pc);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= ncols; ++j) T(i, j) -= f * T(pr, j);
        }
        const double f = obj[pc];
        if (f != 0.0)
            for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= f * T(pr, j);
        basis[pr] = pc;
    };

    // Make the initial basis feasible by pivoting t into the worst row.
    std::size_t worst_row = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (T(i, ncols) < T(worst_row, ncols)) worst_row = i;
    pivot(worst_row, tcol);

    const std::size_t max_iter = 2000 * (m + ncols);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // Bland's rule: lowest-index improving column.
        std::size_t enter = ncols;
        for (std::size_t j = 0; j < ncols; ++j)
            if (obj[j] < -1e-12) {
                enter = j;
                break;
            }
        if (enter == ncols) {
            const double tval = -obj[ncols]; // objective value of min t
            return tval > 1e-9;
        }
        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (T(i, enter) <= 1e-12) continue;
            const double ratio = T(i, ncols) / T(i, enter);
            if (leave == m || ratio < best - 1e-15 ||
                (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m)
            throw NumericError("is_empty: unbounded phase-1 problem");
        pivot(leave, enter);
    }
    throw NumericError("is_empty: simplex iteration limit");
}

std::vector<UnitZeroSet> layer_zero_sets(const Mlp& net, std::size_t layer_index,
                                         const BBox& bbox) {
    check(net.input_dim() == 2, "layer_zero_sets requires a 2-input network");
    check(layer_index < net.layer_count(), "layer_zero_sets: bad layer index");
    const Layer& layer = net.layers()[layer_index];

    std::vector<PrefixCell> cells = enumerate_prefix(net, bbox, layer_index);
    std::vector<UnitZeroSet> out(layer.weight.rows());
    for (std::size_t u = 0; u < out.size(); ++u) out[u].unit = u;

    const double scale = std::max(bbox.width(), bbox.height());
    for (const PrefixCell& cell : cells) {
        const Matrix pw = matmul(layer.weight, cell.aw);
        Vector pv = matvec(layer.weight, cell.ab);
        for (std::size_t i = 0; i < pv.size(); ++i) pv[i] += layer.bias[i];

        for (std::size_t u = 0; u < out.size(); ++u) {
            const double nx = pw(u, 0), ny = pw(u, 1), v0 = pv[u];
            const double norm = std::hypot(nx, ny);
            if (norm < 1e-14) continue; // constant on the cell; no zero line
            // Chord of n.x + v0 = 0 inside the cell polygon.
            const std::size_t n = cell.poly.vertices.size();
            std::vector<Pt> hits;
            for (std::size_t i = 0; i < n; ++i) {
                const Pt& a = cell.poly.vertices[i];
                const Pt& b = cell.poly.vertices[(i + 1) % n];
                const double ga = (nx * a[0] + ny * a[1] + v0) / norm;
                const double gb = (nx * b[0] + ny * b[1] + v0) / norm;
                if (std::abs(ga) <= 1e-9 * std::max(1.0, scale)) {
                    push_unique(hits, a);
                } else if ((ga > 0) != (gb > 0) && std::abs(gb) > 1e-9 * std::max(1.0, scale)) {
                    hits.push_back(lerp(a, b, ga / (ga - gb)));
                }
            }
            if (hits.size() < 2) continue;
            // Extremes along the line direction.
            const double dx = -ny / norm, dy = nx / norm;
            auto param = [&](const Pt& p) { return dx * p[0] + dy * p[1]; };
            const Pt* lo = &hits[0];
            const Pt* hi = &hits[0];
            for (const Pt& p : hits) {
                if (param(p) < param(*lo)) lo = &p;
                if (param(p) > param(*hi)) hi = &p;
            }
            if (param(*hi) - param(*lo) < 1e-12) continue;
            out[u].segments.push_back({(*lo)[0], (*lo)[1], (*hi)[0], (*hi)[1]});
        }
    }
    return out;
}

bool cell_bounded(const RegionCell& cell, const BBox& bbox) {
    const double eps = 1e-9 * std::max(bbox.width(), bbox.height());
    for (const Pt& v : cell.polygon.vertices) {
        if (std::abs(v[0] - bbox.xmin) <= eps || std::abs(v[0] - bbox.xmax) <= eps ||
            std::abs(v[1] - bbox.ymin) <= eps || std::abs(v[1] - bbox.ymax) <= eps)
            return false;
    }
    return true;
}

std::vector<PatternCount> sample_patterns_grid(const Mlp& net, const BBox& bbox,
                                               std::size_t per_side) {
    check(net.input_dim() == 2, "sample_patterns_grid requires a 2-input network");
    check(per_side >= 2, "sample_patterns_grid: need at least 2 points per side");
    check(net.relu_unit_count() <= 64, "sample_patterns_grid: > 64 ReLU units");

    std::unordered_map<std::uint64_t, std::size_t> counts;
    Vector x(2);
    Vector h, nh;
    for (std::size_t gy = 0; gy < per_side; ++gy) {
        x[1] = bbox.ymin + bbox.height() * double(gy) / double(per_side - 1);
        for (std::size_t gx = 0; gx < per_side; ++gx) {
            x[0] = bbox.xmin + bbox.width() * double(gx) / double(per_side - 1);
            std::uint64_t key = 0;
            std::size_t bit = 0;
            h = x;
            for (const Layer& l : net.layers()) {
                nh.assign(l.weight.rows(), 0.0);
                for (std::size_t u = 0; u < l.weight.rows(); ++u)
                    nh[u] = dot(l.weight.row(u), h) + l.bias[u];
                if (l.relu_after) {
                    for (std::size_t u = 0; u < nh.size(); ++u, ++bit) {
                        if (nh[u] > 0.0)
                            key |= (std::uint64_t{1} << bit);
                        else
                            nh[u] = 0.0;
                    }
                }
                std::swap(h, nh);
            }
            ++counts[key];
        }
    }
    std::vector<PatternCount> out;
    out.reserve(counts.size());
    for (const auto& [k, c] : counts) out.push_back({k, c});
    std::sort(out.begin(), out.end(),
              [](const PatternCount& a, const PatternCount& b) { return a.key < b.key; });
    return out;
}

namespace {

void write_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

std::string pattern_string(const ActivationPattern& p) {
    std::string s;
    for (std::size_t k = 0; k < p.masks.size(); ++k) {
        if (k) s += '|';
        for (bool b : p.masks[k]) s += b ? '1' : '0';
    }
    return s;
}

ActivationPattern parse_pattern(const std::string& s) {
    ActivationPattern p;
    std::vector<bool> cur;
    for (char ch : s) {
        if (ch == '|') {
            p.masks.push_back(cur);
            cur.clear();
        } else if (ch == '0' || ch == '1') {
            cur.push_back(ch == '1');
        } else {
            throw DataError("cells: bad pattern string");
        }
    }
    p.masks.push_back(cur);
    return p;
}

} // namespace

void write_cells(std::ostream& os, const std::vector<RegionCell>& cells,
                 std::size_t output_dim) {
    os << "facets-cells 1\n";
    os << "cells " << cells.size() << " dim 2 outputs " << output_dim << "\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const RegionCell& c = cells[i];
        os << "cell " << i << "\n";
        os << "pattern " << pattern_string(c.pattern) << "\n";
        os << "vertices " << c.polygon.vertices.size() << "\n";
        for (const Pt& v : c.polygon.vertices) {
            write_double(os, v[0]);
            os << ' ';
            write_double(os, v[1]);
            os << '\n';
        }
        os << "w\n";
        for (std::size_t r = 0; r < c.map.w.rows(); ++r) {
            for (std::size_t j = 0; j < c.map.w.cols(); ++j) {
                if (j) os << ' ';
                write_double(os, c.map.w(r, j));
            }
            os << '\n';
        }
        os << "b\n";
        for (std::size_t r = 0; r < c.map.b.size(); ++r) {
            if (r) os << ' ';
            write_double(os, c.map.b[r]);
        }
        os << '\n';
    }
}

std::vector<RegionCell> read_cells(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "facets-cells" || version != 1) throw DataError("cells: bad header");
    std::size_t n = 0, dim = 0, outputs = 0;
    std::string kw1, kw2, kw3;
    is >> kw1 >> n >> kw2 >> dim >> kw3 >> outputs;
    if (kw1 != "cells" || kw2 != "dim" || kw3 != "outputs" || dim != 2)
        throw DataError("cells: bad header line");

    std::vector<RegionCell> cells;
    cells.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string kw;
        std::size_t idx = 0;
        is >> kw >> idx;
        if (kw != "cell") throw DataError("cells: expected cell record");
        std::string pat;
        is >> kw >> pat;
        if (kw != "pattern") throw DataError("cells: expected pattern");
        RegionCell cell;
        cell.pattern = parse_pattern(pat);
        std::size_t verts = 0;
        is >> kw >> verts;
        if (kw != "vertices") throw DataError("cells: expected vertices");
        cell.polygon.vertices.resize(verts);
        for (auto& v : cell.polygon.vertices) is >> v[0] >> v[1];
        is >> kw;
        if (kw != "w") throw DataError("cells: expected w");
        Matrix w(outputs, dim);
        for (std::size_t r = 0; r < outputs; ++r)
            for (std::size_t j = 0; j < dim; ++j) is >> w(r, j);
        is >> kw;
        if (kw != "b") throw DataError("cells: expected b");
        Vector b(outputs);
        for (double& v : b) is >> v;
        if (!is) throw DataError("cells: truncated file");
        cell.map = AffineMap{std::move(w), std::move(b)};
        cells.push_back(std::move(cell));
    }
    return cells;
}

} // namespace facets
