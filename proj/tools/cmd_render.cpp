#include <cmath>
#include <cstdio>

#include "facets/dual.hpp"
#include "facets/render.hpp"
#include "common.hpp"

namespace facets::cli {

int cmd_render(const std::vector<std::string>& args) {
    Options opt("render", "render region maps, layer zero sets, dual scatters "
                          "or gradient images for a saved net");
    opt.add("net", "weight file", "", true)
        .add("what", "regions | layers | dual | gradient", "", true)
        .add("bbox", "viewport xmin,ymin,xmax,ymax (regions/layers/dual)")
        .add("data", "dataset spec; bounding box +20% is used when bbox is absent")
        .add("grid", "samples per side for the dual scatter", "101")
        .add("input", "dataset spec providing the probe input (gradient)")
        .add("row", "input row index (gradient)", "0")
        .add("image_shape", "rows,cols of the input image (gradient; default square)")
        .add("outdir", "output directory", "", true);
    opt.parse(args);

    Mlp net = load_mlp(opt.str("net"));
    const std::string what = opt.str("what");
    const auto outdir = ensure_outdir(opt);
    char buf[48];

    if (what == "regions") {
        const BBox box = bbox_for(opt);
        auto cells = enumerate_regions_2d(net, box);
        write_svg(outdir / "regions_by_class.svg",
                  render_regions(cells, RegionFillMode::by_class, box));
        write_svg(outdir / "regions_by_region.svg",
                  render_regions(cells, RegionFillMode::by_region, box));
        return 0;
    }
    if (what == "layers") {
        const BBox box = bbox_for(opt);
        auto scenes = render_layer_zeros(net, box);
        for (std::size_t i = 0; i < scenes.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "layer_zeros_%zu.svg", i);
            write_svg(outdir / buf, scenes[i]);
        }
        return 0;
    }
    if (what == "dual") {
        const BBox box = bbox_for(opt);
        Matrix samples = make_grid2d(box, opt.count("grid")).inputs;
        for (std::size_t j = 0; j < net.output_dim(); ++j) {
            CMatrix c = build_c_matrix(net, samples, j);
            std::snprintf(buf, sizeof(buf), "dual_%zu.svg", j);
            write_svg(outdir / buf, render_dual(dual_points(c), {}));
        }
        return 0;
    }
    if (what == "gradient") {
        if (opt.str("input").empty())
            throw UsageError("gradient rendering needs input=<dataset spec>");
        Dataset d = load_dataset_spec(opt.str("input"));
        const std::size_t row = opt.count("row");
        if (row >= d.size()) throw UsageError("row index out of range");
        Vector x(d.inputs.row(row).begin(), d.inputs.row(row).end());
        std::size_t ir = 0, ic = 0;
        if (!opt.str("image_shape").empty()) {
            const auto v = parse_numbers(opt.str("image_shape"));
            if (v.size() != 2) throw UsageError("image_shape wants rows,cols");
            ir = std::size_t(v[0]);
            ic = std::size_t(v[1]);
        } else {
            const auto side = std::size_t(std::llround(std::sqrt(double(net.input_dim()))));
            ir = ic = side;
        }
        for (std::size_t j = 0; j < net.output_dim(); ++j) {
            Matrix img = restricted_gradient_image(net, x, j, ir, ic);
            Vector flat(img.data().begin(), img.data().end());
            std::snprintf(buf, sizeof(buf), "gradient_%zu.svg", j);
            write_svg(outdir / buf, render_gradient_image(flat, ir, ic));
        }
        return 0;
    }
    throw UsageError("unknown what '" + what + "'");
}

} // namespace facets::cli
