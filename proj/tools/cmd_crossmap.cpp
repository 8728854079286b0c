#include <cstdio>
#include <fstream>

#include "facets/dual.hpp"
#include "facets/render.hpp"
#include "common.hpp"

namespace facets::cli {

int cmd_crossmap(const std::vector<std::string>& args) {
    Options opt("crossmap",
                "fit least-squares maps between two networks' facet rows and "
                "evaluate the mapped classifier");
    opt.add("net1", "source weight file", "", true)
        .add("net2", "target weight file (may equal net1 for a self pair)", "", true)
        .add("fit_data", "dataset spec whose samples fit the maps", "", true)
        .add("eval_data", "dataset spec for evaluation (defaults to fit_data)")
        .add("svg", "write a dual-space overlay per output (2-input nets)", "false")
        .add("dump_maps", "write the fitted matrices", "false")
        .add("threads", "worker threads for facet extraction", "2")
        .add("outdir", "output directory", "", true);
    opt.parse(args);

    Mlp net1 = load_mlp(opt.str("net1"));
    Mlp net2 = load_mlp(opt.str("net2"));
    if (net1.input_dim() != net2.input_dim() ||
        net1.output_dim() != net2.output_dim())
        throw UsageError("crossmap: networks must share input and output dims");
    Dataset fit_d = load_dataset_spec(opt.str("fit_data"));
    Dataset eval_d = opt.str("eval_data").empty()
                         ? load_dataset_spec(opt.str("fit_data"))
                         : load_dataset_spec(opt.str("eval_data"));
    const std::size_t threads = opt.count("threads");
    const auto outdir = ensure_outdir(opt);

    auto fit_c1 = build_c_matrices(net1, fit_d.inputs, threads);
    auto fit_c2 = build_c_matrices(net2, fit_d.inputs, threads);
    std::vector<CrossMap> maps;
    for (std::size_t j = 0; j < net1.output_dim(); ++j)
        maps.push_back(fit_crossmap(fit_c1[j], fit_c2[j]));

    auto eval_c1 = build_c_matrices(net1, eval_d.inputs, threads);
    const auto mapped_labels = crossmap_classify_rows(maps, eval_c1, eval_d.inputs);

    const bool have_truth = !eval_d.labels.empty() || !eval_d.targets.empty();
    std::size_t net2_correct = 0, mapped_correct = 0, agree = 0;
    for (std::size_t i = 0; i < eval_d.size(); ++i) {
        Vector x(eval_d.inputs.row(i).begin(), eval_d.inputs.row(i).end());
        const std::size_t l2 = label_of_scores(forward(net2, x));
        if (mapped_labels[i] == l2) ++agree;
        if (have_truth) {
            if (l2 == dataset_label(eval_d, i)) ++net2_correct;
            if (mapped_labels[i] == dataset_label(eval_d, i)) ++mapped_correct;
        }
    }

    std::ofstream os(outdir / "report.txt");
    os << "# affine maps between facet rows, evaluated on the mapped classifier\n";
    os << "pair " << opt.str("net1") << " -> " << opt.str("net2") << "\n";
    os << "n_fit " << fit_d.size() << " n_eval " << eval_d.size() << "\n";
    if (have_truth) {
        os << "baseline_net2 correct " << net2_correct << "/" << eval_d.size() << "\n";
        os << "mapped correct " << mapped_correct << "/" << eval_d.size() << "\n";
    }
    os << "mapped_agrees_with_net2 " << agree << "/" << eval_d.size() << "\n";

    if (opt.flag("dump_maps")) {
        char buf[40];
        for (std::size_t j = 0; j < maps.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "map_%zu.txt", j);
            std::ofstream ms(outdir / buf);
            char num[32];
            for (std::size_t r = 0; r < maps[j].m.rows(); ++r) {
                for (std::size_t c = 0; c < maps[j].m.cols(); ++c) {
                    if (c) ms << ' ';
                    std::snprintf(num, sizeof(num), "%.17g", maps[j].m(r, c));
                    ms << num;
                }
                ms << '\n';
            }
        }
    }

    if (opt.flag("svg")) {
        if (net1.input_dim() != 2) throw UsageError("svg overlay needs 2-input nets");
        auto eval_c2 = build_c_matrices(net2, eval_d.inputs, threads);
        char buf[40];
        for (std::size_t j = 0; j < maps.size(); ++j) {
            Matrix mapped = matmul(eval_c1[j].rows, maps[j].m);
            std::snprintf(buf, sizeof(buf), "dual_overlay_%zu.svg", j);
            write_svg(outdir / buf, render_dual_pair(mapped, eval_c2[j].rows));
        }
    }
    return 0;
}

} // namespace facets::cli
