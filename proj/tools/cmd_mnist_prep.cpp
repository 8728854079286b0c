#include <fstream>

#include "common.hpp"

namespace facets::cli {

int cmd_mnist_prep(const std::vector<std::string>& args) {
    Options opt("mnist-prep",
                "subset IDX digit files into a CSV dataset, or synthesize a "
                "digit set in IDX format");
    opt.add("images", "IDX image file to read")
        .add("labels", "IDX label file to read")
        .add("subset", "stratified subset size (0: all)", "0")
        .add("seed", "subset / synthesis seed", "0")
        .add("synthesize", "generate this many synthetic digit images instead "
                           "of reading files", "0")
        .add("out_images", "IDX image output (synthesize mode)")
        .add("out_labels", "IDX label output (synthesize mode)")
        .add("out_csv", "CSV dataset output")
        .add("summary", "summary text file");
    opt.parse(args);

    IdxImages img;
    IdxLabels lab;
    const std::size_t synth = opt.count("synthesize");
    if (synth > 0) {
        auto pair = make_synthetic_digits(synth, opt.seed("seed"));
        img = std::move(pair.first);
        lab = std::move(pair.second);
        if (!opt.str("out_images").empty()) save_idx_images(opt.str("out_images"), img);
        if (!opt.str("out_labels").empty()) save_idx_labels(opt.str("out_labels"), lab);
    } else {
        if (opt.str("images").empty() || opt.str("labels").empty())
            throw UsageError("mnist-prep needs images= and labels= (or synthesize=N)");
        img = load_idx_images(opt.str("images"));
        lab = load_idx_labels(opt.str("labels"));
    }

    std::size_t subset = opt.count("subset");
    if (subset == 0) subset = img.count;
    Dataset d = to_dataset(img, lab, subset, opt.seed("seed"));
    if (!opt.str("out_csv").empty()) save_csv_dataset(opt.str("out_csv"), d);

    if (!opt.str("summary").empty()) {
        std::ofstream os(opt.str("summary"));
        os << "count " << d.size() << "\n";
        os << "dim " << d.inputs.cols() << "\n";
        std::vector<std::size_t> per_class(10, 0);
        for (auto l : d.labels) ++per_class[l];
        os << "per_class";
        for (std::size_t c = 0; c < 10; ++c) os << ' ' << per_class[c];
        os << "\n";
    }
    return 0;
}

} // namespace facets::cli
