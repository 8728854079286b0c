#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "facets/dataio.hpp"
#include "facets/render.hpp"
#include "facets/rng.hpp"
#include "support/fixtures.hpp"

using namespace facets;
using namespace facets::testing;
namespace fs = std::filesystem;

namespace {

const BBox kBox{-2, -2, 2, 2};

std::string render_to_string(const SvgScene& scene) {
    std::stringstream ss;
    write_svg(ss, scene);
    return ss.str();
}

// Light well-formedness check: one root svg element, balanced self-closing
// children, declared viewbox.
void check_svg_shape(const std::string& text) {
    CHECK(text.rfind("<?xml", 0) == 0);
    CHECK(text.find("<svg ") != std::string::npos);
    CHECK(text.find("</svg>") == text.rfind("</svg>"));
    CHECK(text.find("data-viewbox=") != std::string::npos);
    std::size_t opens = 0, pos = 0;
    while ((pos = text.find("<svg", pos)) != std::string::npos) {
        ++opens;
        pos += 4;
    }
    CHECK(opens == 1);
}

} // namespace

TEST_CASE("render_regions by_class splits a step net into green and red") {
    // f = relu(x) - 0.5: negative half-plane red, right half green.
    std::vector<Layer> layers;
    layers.push_back({Matrix{{1, 0}}, Vector{0}, true});
    layers.push_back({Matrix{{1}}, Vector{-0.5}, false});
    Mlp net{std::move(layers)};
    auto cells = enumerate_regions_2d(net, kBox);
    REQUIRE(cells.size() == 2);
    SvgScene scene = render_regions(cells, RegionFillMode::by_class, kBox);
    const std::string text = render_to_string(scene);
    check_svg_shape(text);
    CHECK(text.find("#3cb06c") != std::string::npos);
    CHECK(text.find("#d94f4f") != std::string::npos);
    CHECK(text.find("polygon") != std::string::npos);
    CHECK(text.find("stroke=\"#000000\"") != std::string::npos);
}

TEST_CASE("render_regions by_class paints every xor band red") {
    // The handcrafted xor net never exceeds 0, so every band centroid
    // scores negative.
    Mlp net = xor_net();
    auto cells = enumerate_regions_2d(net, kBox);
    SvgScene scene = render_regions(cells, RegionFillMode::by_class, kBox);
    const std::string text = render_to_string(scene);
    CHECK(text.find("#3cb06c") == std::string::npos);
    CHECK(text.find("#d94f4f") != std::string::npos);
}

TEST_CASE("render_regions by_region assigns distinct colors per cell") {
    Mlp net = xor_net();
    auto cells = enumerate_regions_2d(net, kBox);
    SvgScene scene = render_regions(cells, RegionFillMode::by_region, kBox);
    std::set<std::string> fills;
    for (const auto& el : scene.elements)
        if (const auto* p = std::get_if<svg::Polygon>(&el)) fills.insert(p->fill);
    CHECK(fills.size() == cells.size());
}

TEST_CASE("render_regions on a single affine cell emits one uniform fill") {
    std::vector<Layer> layers;
    layers.push_back({Matrix{{1, 0}}, Vector{1.0}, false});
    Mlp net{std::move(layers)};
    auto cells = enumerate_regions_2d(net, kBox);
    SvgScene scene = render_regions(cells, RegionFillMode::by_class, kBox);
    std::size_t polygons = 0;
    for (const auto& el : scene.elements)
        if (std::holds_alternative<svg::Polygon>(el)) ++polygons;
    CHECK(polygons == 1);
}

TEST_CASE("render_regions rejects an empty cell list") {
    CHECK_THROWS_AS(render_regions({}, RegionFillMode::by_class, kBox),
                    std::invalid_argument);
}

TEST_CASE("layer zero scenes: first layer colored only, later layers add gray") {
    Mlp net = random_net({2, 5, 4, 1}, 404);
    auto scenes = render_layer_zeros(net, kBox);
    REQUIRE(scenes.size() == 3); // two relu layers + output
    const std::string first = render_to_string(scenes[0]);
    CHECK(first.find("#c8c8c8") == std::string::npos);
    const std::string second = render_to_string(scenes[1]);
    CHECK(second.find("#c8c8c8") != std::string::npos);
    for (const auto& s : scenes) check_svg_shape(render_to_string(s));
}

TEST_CASE("output-layer zero scene matches the region decision boundary") {
    Mlp net = xor_net();
    auto scenes = render_layer_zeros(net, kBox);
    REQUIRE(scenes.size() == 2);
    // The output zero set of the xor net is the line x+y=0; vertices of the
    // zero polylines must satisfy it.
    const auto zeros = layer_zero_sets(net, 1, kBox);
    for (const auto& z : zeros)
        for (const auto& s : z.segments) {
            CHECK(std::abs(s[0] + s[1]) < 1e-6);
            CHECK(std::abs(s[2] + s[3]) < 1e-6);
        }
}

TEST_CASE("render_dual paints facets blue and highlights red") {
    Mlp net = xor_net();
    CMatrix c = build_c_matrix(net, make_grid2d(BBox{-1, -1, 1, 1}, 101).inputs, 0);
    auto pts = dual_points(c);
    REQUIRE(pts.size() == 3);

    // Highlight the facet rows used by the four data corners; the corner
    // rows reuse the same three facets.
    std::vector<Vector> highlight = {{-1, -1, 0}, {1, 1, 0}, {0, 0, -1}};
    SvgScene scene = render_dual(pts, highlight);
    const std::string text = render_to_string(scene);
    check_svg_shape(text);
    std::size_t blue = 0, red = 0, pos = 0;
    while ((pos = text.find("#2060c0", pos)) != std::string::npos) ++blue, pos += 7;
    pos = 0;
    while ((pos = text.find("#d01818", pos)) != std::string::npos) ++red, pos += 7;
    CHECK(blue == 3);
    CHECK(red == 3);
}

TEST_CASE("render_dual rejects wrong dimensionality") {
    std::vector<DualPoint> pts{{{1, 2}, 1}};
    CHECK_THROWS_AS(render_dual(pts, {}), std::invalid_argument);
}

TEST_CASE("render_dual_pair draws ties between mapped and target points") {
    Matrix mapped(2, 3, {0, 0, 0, 1, 1, 1});
    Matrix target(2, 3, {0.1, 0, 0, 1, 0.9, 1});
    SvgScene scene = render_dual_pair(mapped, target);
    std::size_t lines = 0;
    for (const auto& el : scene.elements)
        if (std::holds_alternative<svg::Polyline>(el)) ++lines;
    CHECK(lines == 2);
}

TEST_CASE("gradient image rasters: zero row is uniform, one-hot is a single extreme") {
    SvgScene zero = render_gradient_image(Vector(9, 0.0), 3, 3);
    std::size_t mid = 0;
    for (const auto& el : zero.elements)
        if (const auto* r = std::get_if<svg::Rect>(&el))
            if (r->fill == "#ffffff") ++mid;
    CHECK(mid == 9);

    Vector onehot(9, 0.0);
    onehot[4] = 2.5;
    SvgScene hot = render_gradient_image(onehot, 3, 3);
    std::size_t extreme = 0;
    for (const auto& el : hot.elements)
        if (const auto* r = std::get_if<svg::Rect>(&el))
            if (r->fill == "#ff0000") ++extreme;
    CHECK(extreme == 1);

    CHECK_THROWS_AS(render_gradient_image(Vector(8, 0.0), 3, 3), std::invalid_argument);
}

TEST_CASE("gradient image renders for a dense digit net without error") {
    Mlp net = random_net({784, 16, 10}, 606);
    Rng rng(1);
    Vector x(784);
    for (double& v : x) v = rng.uniform(0, 1);
    Matrix img = restricted_gradient_image(net, x, 3);
    Vector row(img.data().begin(), img.data().end());
    SvgScene scene = render_gradient_image(row, 28, 28);
    check_svg_shape(render_to_string(scene));
}

TEST_CASE("render_frames writes zero-padded files with stable mapping") {
    Mlp net = init_net({2, 4, 1}, 5);
    Dataset d = make_xor4();
    TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.epochs = 4;
    cfg.batch_size = 4;
    cfg.snapshot_every = 1;
    TrainRun run = train(net, d, cfg);

    const fs::path dir =
        fs::temp_directory_path() / ("facets-frames-" + std::to_string(::getpid()));
    auto files = render_frames(run, kBox, dir);
    REQUIRE(files.size() == 5);
    CHECK(files[0] == "frame_0000.svg");
    CHECK(files[4] == "frame_0004.svg");

    std::string viewbox_line;
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::ifstream is(dir / files[i]);
        std::string text((std::istreambuf_iterator<char>(is)), {});
        check_svg_shape(text);
        CHECK(text.find("<!-- epoch " + std::to_string(i) + " -->") != std::string::npos);
        const auto at = text.find("data-viewbox=");
        const std::string vb = text.substr(at, text.find('>', at) - at);
        if (i == 0)
            viewbox_line = vb;
        else
            CHECK(vb == viewbox_line);
    }
    fs::remove_all(dir);
}

TEST_CASE("write_svg rejects degenerate viewboxes") {
    SvgScene scene;
    scene.viewbox = BBox{0, 0, 0, 1};
    std::stringstream ss;
    CHECK_THROWS_AS(write_svg(ss, scene), std::invalid_argument);
}
