#include <fstream>
#include <set>

#include "facets/render.hpp"
#include "common.hpp"

namespace facets::cli {

int cmd_regions(const std::vector<std::string>& args) {
    Options opt("regions",
                "enumerate the linear-region cells of a 2-input net over a box");
    opt.add("net", "weight file", "", true)
        .add("bbox", "viewport xmin,ymin,xmax,ymax")
        .add("data", "dataset spec; its bounding box +20% is used when bbox is absent")
        .add("oracle", "also run the grid-sampling census and compare", "false")
        .add("oracle_grid", "grid points per side for the census", "2001")
        .add("outdir", "output directory", "", true);
    opt.parse(args);

    Mlp net = load_mlp(opt.str("net"));
    const BBox box = bbox_for(opt);
    const auto outdir = ensure_outdir(opt);

    auto cells = enumerate_regions_2d(net, box);
    {
        std::ofstream os(outdir / "cells.txt");
        write_cells(os, cells, net.output_dim());
    }
    write_svg(outdir / "regions_by_class.svg",
              render_regions(cells, RegionFillMode::by_class, box));
    write_svg(outdir / "regions_by_region.svg",
              render_regions(cells, RegionFillMode::by_region, box));

    std::size_t bounded = 0;
    for (const auto& c : cells)
        if (cell_bounded(c, box)) ++bounded;

    std::ofstream os(outdir / "summary.txt");
    os << "cells " << cells.size() << "\n";
    os << "bounded " << bounded << "\n";

    if (opt.flag("oracle")) {
        const std::size_t per_side = opt.count("oracle_grid");
        auto sampled = sample_patterns_grid(net, box, per_side);
        std::set<std::uint64_t> enumerated;
        for (const auto& c : cells) enumerated.insert(pattern_key(c.pattern));
        std::size_t missing = 0;
        for (const auto& pc : sampled)
            if (!enumerated.count(pc.key)) ++missing;
        const double pitch = box.width() / double(per_side - 1);
        std::size_t unsampled_large = 0;
        std::set<std::uint64_t> sampled_keys;
        for (const auto& pc : sampled) sampled_keys.insert(pc.key);
        for (const auto& c : cells)
            if (c.polygon.area() > pitch * pitch &&
                !sampled_keys.count(pattern_key(c.pattern)))
                ++unsampled_large;
        os << "oracle_grid " << per_side << "\n";
        os << "oracle_patterns " << sampled.size() << "\n";
        os << "oracle_patterns_not_enumerated " << missing << "\n";
        os << "oracle_large_cells_unsampled " << unsampled_large << "\n";
    }
    return 0;
}

} // namespace facets::cli
