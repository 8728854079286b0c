#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "facets/dataio.hpp"
#include "facets/regions.hpp"
#include "facets/trainer.hpp"
#include "config.hpp"

namespace facets::cli {

inline std::vector<double> parse_numbers(const std::string& s, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (item.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw UsageError("bad number '" + item + "'");
    }
    return out;
}

inline BBox parse_bbox(const std::string& s) {
    const auto v = parse_numbers(s);
    if (v.size() != 4) throw UsageError("bbox wants xmin,ymin,xmax,ymax");
    return BBox{v[0], v[1], v[2], v[3]};
}

inline std::vector<std::size_t> parse_arch(const std::string& s) {
    std::vector<std::size_t> widths;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, '-')) widths.push_back(std::stoul(item));
    if (widths.size() < 2) throw UsageError("arch wants widths like 2-8-1");
    return widths;
}

/// Dataset specs shared by the analysis commands:
///   xor4
///   grid:<xmin>,<ymin>,<xmax>,<ymax>,<per_side>
///   circle:<seed>[,<per_class>]
///   circles_grid:<seed>[,<per_class>]
///   csv:<path>
///   idx:<images>,<labels>[,<subset>,<seed>]
inline Dataset load_dataset_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "xor4") return make_xor4();
    if (kind == "grid") {
        const auto v = parse_numbers(rest);
        if (v.size() != 5) throw UsageError("grid spec wants 5 numbers");
        return make_grid2d(BBox{v[0], v[1], v[2], v[3]}, std::size_t(v[4]));
    }
    if (kind == "circle" || kind == "circles_grid") {
        const auto v = parse_numbers(rest);
        if (v.empty()) throw UsageError(kind + " spec wants a seed");
        CircleParams p;
        if (v.size() > 1) p.per_class = std::size_t(v[1]);
        const auto seed = std::uint64_t(v[0]);
        return kind == "circle" ? make_circle_annulus(p, seed)
                                : make_circles_grid(p, seed);
    }
    if (kind == "csv") return load_csv_dataset(rest);
    if (kind == "idx") {
        std::vector<std::string> parts;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        if (parts.size() != 2 && parts.size() != 4)
            throw UsageError("idx spec wants images,labels[,subset,seed]");
        IdxImages img = load_idx_images(parts[0]);
        IdxLabels lab = load_idx_labels(parts[1]);
        const std::size_t subset =
            parts.size() == 4 ? std::stoul(parts[2]) : img.count;
        const std::uint64_t seed = parts.size() == 4 ? std::stoull(parts[3]) : 0;
        return to_dataset(img, lab, subset == 0 ? img.count : subset, seed);
    }
    throw UsageError("unknown dataset spec '" + spec + "'");
}

inline std::filesystem::path ensure_outdir(const Options& opt) {
    const std::filesystem::path dir = opt.str("outdir");
    std::filesystem::create_directories(dir);
    return dir;
}

inline BBox bbox_for(const Options& opt, const char* bbox_key = "bbox",
                     const char* data_key = "data") {
    if (!opt.str(bbox_key).empty()) return parse_bbox(opt.str(bbox_key));
    if (!opt.str(data_key).empty()) {
        Dataset d = load_dataset_spec(opt.str(data_key));
        return d.bounding_box(0.2);
    }
    throw UsageError(std::string("either ") + bbox_key + " or " + data_key +
                     " must be given");
}

int cmd_train(const std::vector<std::string>& args);
int cmd_regions(const std::vector<std::string>& args);
int cmd_census(const std::vector<std::string>& args);
int cmd_cluster(const std::vector<std::string>& args);
int cmd_crossmap(const std::vector<std::string>& args);
int cmd_render(const std::vector<std::string>& args);
int cmd_mnist_prep(const std::vector<std::string>& args);

} // namespace facets::cli
