#include <cstdio>
#include <fstream>

#include "common.hpp"

namespace facets::cli {

int cmd_census(const std::vector<std::string>& args) {
    Options opt("census", "count constant-pattern pieces along 1D segments");
    opt.add("net", "weight file", "", true)
        .add("segment", "segment as x0,y0,...:x1,y1,... (d coordinates each side)", "",
             true, /*repeatable=*/true)
        .add("min_feature", "smallest constant-pattern interval assumed, as a "
                            "fraction of the segment", "0.001")
        .add("out", "report file", "", true);
    opt.parse(args);

    Mlp net = load_mlp(opt.str("net"));
    const double min_feature = opt.num("min_feature");

    std::ofstream os(opt.str("out"));
    char buf[64];
    const auto segments = opt.repeated("segment");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto colon = segments[i].find(':');
        if (colon == std::string::npos)
            throw UsageError("segment wants p0:p1 coordinates");
        const Vector p0 = parse_numbers(segments[i].substr(0, colon));
        const Vector p1 = parse_numbers(segments[i].substr(colon + 1));
        Census1D census = count_regions_1d(net, p0, p1, min_feature);
        os << "segment " << i << " count " << census.count << " breakpoints";
        for (double t : census.segment.breakpoints) {
            std::snprintf(buf, sizeof(buf), " %.9f", t);
            os << buf;
        }
        os << "\n";
    }
    return 0;
}

} // namespace facets::cli
