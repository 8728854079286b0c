#include "facets/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "facets/error.hpp"

namespace facets {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Mapper {
    const SvgScene& s;
    double px(double x) const {
        return (x - s.viewbox.xmin) / s.viewbox.width() * s.width_px;
    }
    double py(double y) const {
        return (1.0 - (y - s.viewbox.ymin) / s.viewbox.height()) * s.height_px;
    }
};

std::string hsl_to_rgb(double h, double sat, double light) {
    const double c = (1.0 - std::abs(2.0 * light - 1.0)) * sat;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1)      r = c, g = x;
    else if (hp < 2) r = x, g = c;
    else if (hp < 3) g = c, b = x;
    else if (hp < 4) g = x, b = c;
    else if (hp < 5) r = x, b = c;
    else             r = c, b = x;
    const double m = light - c / 2.0;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", int((r + m) * 255.0 + 0.5),
                  int((g + m) * 255.0 + 0.5), int((b + m) * 255.0 + 0.5));
    return buf;
}

} // namespace

std::string palette_color(std::size_t index) {
    // Golden-angle hue walk keyed by a small hash so colors are stable
    // across frames for the same region index.
    const std::uint64_t h = (index + 1) * 0x9e3779b97f4a7c15ULL;
    const double hue = std::fmod(double(h % 36000) / 100.0, 360.0);
    return hsl_to_rgb(hue, 0.55, 0.62);
}

void write_svg(std::ostream& os, const SvgScene& scene) {
    check(scene.viewbox.width() > 0 && scene.viewbox.height() > 0,
          "svg: degenerate viewbox");
    Mapper m{scene};
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(scene.width_px)
       << "\" height=\"" << fmt(scene.height_px) << "\" viewBox=\"0 0 "
       << fmt(scene.width_px) << ' ' << fmt(scene.height_px)
       << "\" data-viewbox=\"" << fmt(scene.viewbox.xmin) << ' '
       << fmt(scene.viewbox.ymin) << ' ' << fmt(scene.viewbox.xmax) << ' '
       << fmt(scene.viewbox.ymax) << "\">\n";
    if (!scene.metadata_comment.empty())
        os << "<!-- " << scene.metadata_comment << " -->\n";

    for (const svg::Element& el : scene.elements) {
        if (const auto* p = std::get_if<svg::Polygon>(&el)) {
            os << "<polygon points=\"";
            for (std::size_t i = 0; i < p->points.size(); ++i) {
                if (i) os << ' ';
                check(std::isfinite(p->points[i][0]) && std::isfinite(p->points[i][1]),
                      "svg: non-finite coordinate");
                os << fmt(m.px(p->points[i][0])) << ',' << fmt(m.py(p->points[i][1]));
            }
            os << "\" fill=\"" << (p->fill.empty() ? "none" : p->fill) << '"';
            if (!p->stroke.empty())
                os << " stroke=\"" << p->stroke << "\" stroke-width=\""
                   << fmt(p->stroke_px) << '"';
            os << "/>\n";
        } else if (const auto* l = std::get_if<svg::Polyline>(&el)) {
            os << "<polyline points=\"";
            for (std::size_t i = 0; i < l->points.size(); ++i) {
                if (i) os << ' ';
                check(std::isfinite(l->points[i][0]) && std::isfinite(l->points[i][1]),
                      "svg: non-finite coordinate");
                os << fmt(m.px(l->points[i][0])) << ',' << fmt(m.py(l->points[i][1]));
            }
            os << "\" fill=\"none\" stroke=\"" << l->stroke << "\" stroke-width=\""
               << fmt(l->stroke_px) << "\"/>\n";
        } else if (const auto* c = std::get_if<svg::Circle>(&el)) {
            check(std::isfinite(c->x) && std::isfinite(c->y), "svg: non-finite coordinate");
            os << "<circle cx=\"" << fmt(m.px(c->x)) << "\" cy=\"" << fmt(m.py(c->y))
               << "\" r=\"" << fmt(c->radius_px) << "\" fill=\"" << c->fill << "\"/>\n";
        } else if (const auto* r = std::get_if<svg::Rect>(&el)) {
            check(std::isfinite(r->x) && std::isfinite(r->y), "svg: non-finite coordinate");
            const double x0 = m.px(r->x), y0 = m.py(r->y + r->h);
            os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\""
               << fmt(m.px(r->x + r->w) - x0) << "\" height=\""
               << fmt(m.py(r->y) - y0) << "\" fill=\"" << r->fill << "\"/>\n";
        }
    }
    os << "</svg>\n";
}

void write_svg(const std::filesystem::path& path, const SvgScene& scene) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    write_svg(os, scene);
    if (!os) throw DataError("svg: write failed");
}

SvgScene render_regions(const std::vector<RegionCell>& cells, RegionFillMode mode,
                        const BBox& bbox) {
    check(!cells.empty(), "render_regions: no cells");
    SvgScene scene;
    scene.viewbox = bbox;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const RegionCell& cell = cells[i];
        svg::Polygon poly;
        poly.points = cell.polygon.vertices;
        if (mode == RegionFillMode::by_region) {
            poly.fill = palette_color(i);
        } else {
            const auto c = cell.polygon.centroid();
            const Vector scores = affine_apply(cell.map.w, cell.map.b, {c[0], c[1]});
            if (scores.size() == 1)
                poly.fill = scores[0] > 0.0 ? "#3cb06c" : "#d94f4f"; // green/red
            else
                poly.fill = palette_color(label_of_scores(scores));
        }
        scene.elements.push_back(std::move(poly));
    }
    // Cell boundaries on top.
    for (const RegionCell& cell : cells) {
        svg::Polyline outline;
        outline.points = cell.polygon.vertices;
        outline.points.push_back(cell.polygon.vertices.front());
        outline.stroke = "#000000";
        outline.stroke_px = 1.0;
        scene.elements.push_back(std::move(outline));
    }
    return scene;
}

std::vector<SvgScene> render_layer_zeros(const Mlp& net, const BBox& bbox) {
    check(net.input_dim() == 2, "render_layer_zeros: need 2 inputs");
    std::vector<SvgScene> scenes;
    std::vector<svg::Element> gray_underlay;
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
        const bool is_relu = net.layers()[k].relu_after;
        const bool is_output = k + 1 == net.layer_count();
        if (!is_relu && !is_output) continue;

        const auto zeros = layer_zero_sets(net, k, bbox);
        SvgScene scene;
        scene.viewbox = bbox;
        scene.metadata_comment = "layer " + std::to_string(k);
        scene.elements = gray_underlay;
        for (const UnitZeroSet& z : zeros) {
            for (const auto& s : z.segments) {
                svg::Polyline line;
                line.points = {{s[0], s[1]}, {s[2], s[3]}};
                line.stroke = palette_color(z.unit);
                line.stroke_px = 2.0;
                scene.elements.push_back(std::move(line));

                svg::Polyline gray;
                gray.points = {{s[0], s[1]}, {s[2], s[3]}};
                gray.stroke = "#c8c8c8";
                gray.stroke_px = 1.0;
                gray_underlay.push_back(std::move(gray));
            }
        }
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

namespace {

// Fixed orthographic camera for (w1, w2, b) point clouds.
std::array<double, 2> project3(double x, double y, double z) {
    constexpr double az = 0.6108652381980153;  // 35 degrees
    constexpr double el = 0.5235987755982988;  // 30 degrees
    const double ca = std::cos(az), sa = std::sin(az);
    const double ce = std::cos(el), se = std::sin(el);
    const double u = ca * x + sa * y;
    const double v = -sa * se * x + ca * se * y + ce * z;
    return {u, v};
}

BBox extent_of(const std::vector<std::array<double, 2>>& pts) {
    BBox b{pts[0][0], pts[0][1], pts[0][0], pts[0][1]};
    for (const auto& p : pts) {
        b.xmin = std::min(b.xmin, p[0]);
        b.xmax = std::max(b.xmax, p[0]);
        b.ymin = std::min(b.ymin, p[1]);
        b.ymax = std::max(b.ymax, p[1]);
    }
    const double px = std::max(b.width(), 1e-6) * 0.1;
    const double py = std::max(b.height(), 1e-6) * 0.1;
    return BBox{b.xmin - px, b.ymin - py, b.xmax + px, b.ymax + py};
}

} // namespace

SvgScene render_dual(const std::vector<DualPoint>& points,
                     const std::vector<Vector>& highlight) {
    check(!points.empty(), "render_dual: no points");
    for (const DualPoint& p : points)
        check(p.coords.size() == 3, "render_dual: points must be 3D (d == 2)");

    std::vector<std::array<double, 2>> proj;
    proj.reserve(points.size());
    for (const DualPoint& p : points)
        proj.push_back(project3(p.coords[0], p.coords[1], p.coords[2]));

    SvgScene scene;
    scene.viewbox = extent_of(proj);
    for (const auto& p : proj)
        scene.elements.push_back(svg::Circle{p[0], p[1], 2.5, "#2060c0"});
    for (const Vector& h : highlight) {
        check(h.size() == 3, "render_dual: highlight must be 3D");
        const auto p = project3(h[0], h[1], h[2]);
        scene.elements.push_back(svg::Circle{p[0], p[1], 3.5, "#d01818"});
    }
    return scene;
}

SvgScene render_dual_pair(const Matrix& mapped, const Matrix& target) {
    check(mapped.rows() == target.rows(), "render_dual_pair: row count mismatch");
    check(mapped.cols() == 3 && target.cols() == 3, "render_dual_pair: need 3D rows");
    std::vector<std::array<double, 2>> pm, pt;
    for (std::size_t i = 0; i < mapped.rows(); ++i) {
        pm.push_back(project3(mapped(i, 0), mapped(i, 1), mapped(i, 2)));
        pt.push_back(project3(target(i, 0), target(i, 1), target(i, 2)));
    }
    std::vector<std::array<double, 2>> all = pm;
    all.insert(all.end(), pt.begin(), pt.end());

    SvgScene scene;
    scene.viewbox = extent_of(all);
    for (std::size_t i = 0; i < pm.size(); ++i) {
        svg::Polyline tie;
        tie.points = {pm[i], pt[i]};
        tie.stroke = "#b0b0b0";
        tie.stroke_px = 0.5;
        scene.elements.push_back(std::move(tie));
    }
    for (const auto& p : pt)
        scene.elements.push_back(svg::Circle{p[0], p[1], 2.5, "#2060c0"});
    for (const auto& p : pm)
        scene.elements.push_back(svg::Circle{p[0], p[1], 2.0, "#d01818"});
    return scene;
}

SvgScene render_gradient_image(const Vector& row, std::size_t img_rows,
                               std::size_t img_cols) {
    check(row.size() == img_rows * img_cols, "render_gradient_image: shape mismatch");
    double vmax = 0.0;
    for (double v : row) vmax = std::max(vmax, std::abs(v));

    SvgScene scene;
    scene.viewbox = BBox{0, 0, double(img_cols), double(img_rows)};
    scene.width_px = double(img_cols) * 8;
    scene.height_px = double(img_rows) * 8;
    for (std::size_t r = 0; r < img_rows; ++r)
        for (std::size_t c = 0; c < img_cols; ++c) {
            const double v = vmax == 0.0 ? 0.0 : row[r * img_cols + c] / vmax;
            // Diverging blue-white-red.
            int rr, gg, bb;
            if (v >= 0) {
                rr = 255;
                gg = bb = int(255.0 * (1.0 - v) + 0.5);
            } else {
                bb = 255;
                rr = gg = int(255.0 * (1.0 + v) + 0.5);
            }
            char buf[8];
            std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rr, gg, bb);
            // Row 0 at the top.
            scene.elements.push_back(
                svg::Rect{double(c), double(img_rows - 1 - r), 1.0, 1.0, buf});
        }
    return scene;
}

std::vector<std::string> render_frames(const TrainRun& run, const BBox& bbox,
                                       const std::filesystem::path& out_dir,
                                       RegionFillMode mode) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> files;
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        const auto& [epoch, net] = run.snapshots[i];
        SvgScene scene = render_regions(enumerate_regions_2d(net, bbox), mode, bbox);
        scene.metadata_comment = "epoch " + std::to_string(epoch);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu.svg", i);
        write_svg(out_dir / name, scene);
        files.emplace_back(name);
    }
    return files;
}

} // namespace facets
