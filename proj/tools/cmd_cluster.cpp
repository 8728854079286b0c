#include <fstream>

#include "facets/dual.hpp"
#include "facets/rng.hpp"
#include "common.hpp"

namespace facets::cli {

namespace {

void scale_bias_column(Matrix& rows, double s) {
    if (s == 1.0) return;
    const std::size_t last = rows.cols() - 1;
    for (std::size_t i = 0; i < rows.rows(); ++i) rows(i, last) *= s;
}

struct Counts {
    std::size_t correct = 0; // vs data labels, if present
    std::size_t agree = 0;   // vs the network's own predictions
};

bool has_truth(const Dataset& data) {
    return !data.labels.empty() || !data.targets.empty();
}

Counts tally(const std::vector<std::size_t>& got,
             const std::vector<std::size_t>& net_labels, const Dataset& data) {
    Counts c;
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (got[i] == net_labels[i]) ++c.agree;
        if (has_truth(data) && got[i] == dataset_label(data, i)) ++c.correct;
    }
    return c;
}

void print_row(std::ostream& os, const std::string& head, const Counts& c,
               const Dataset& data) {
    os << head;
    if (has_truth(data)) os << " correct " << c.correct << "/" << data.size();
    os << " agree " << c.agree << "/" << data.size() << "\n";
}

} // namespace

int cmd_cluster(const std::vector<std::string>& args) {
    Options opt("cluster",
                "k-means facet clustering with the snap-and-score classifier");
    opt.add("net", "weight file", "", true)
        .add("train_data", "dataset spec for fitting (see README)", "", true)
        .add("test_data", "dataset spec for evaluation (defaults to train_data)")
        .add("k", "comma list of cluster counts", "1,10,100")
        .add("seed", "root seed", "0")
        .add("restarts", "best-of-N seeded k-means restarts (capped at 2 for k >= 1000)",
             "5")
        .add("bias_scale", "scaling of the bias coordinate in the k-means metric",
             "1.0")
        .add("saturated", "add a row with centers at the distinct test rows", "false")
        .add("threads", "worker threads for facet extraction", "2")
        .add("outdir", "output directory", "", true);
    opt.parse(args);

    Mlp net = load_mlp(opt.str("net"));
    Dataset train_d = load_dataset_spec(opt.str("train_data"));
    Dataset test_d = opt.str("test_data").empty()
                         ? load_dataset_spec(opt.str("train_data"))
                         : load_dataset_spec(opt.str("test_data"));
    const double bias_scale = opt.num("bias_scale");
    const std::uint64_t seed = opt.seed("seed");
    const std::size_t restarts = opt.count("restarts");
    const std::size_t threads = opt.count("threads");
    const auto outdir = ensure_outdir(opt);

    auto train_c = build_c_matrices(net, train_d.inputs, threads);
    auto test_c = build_c_matrices(net, test_d.inputs, threads);
    const std::size_t o = net.output_dim();
    const std::size_t p = train_c.empty() ? 0 : train_c[0].rows.rows();
    for (auto& c : train_c) scale_bias_column(c.rows, bias_scale);
    std::vector<CMatrix> test_scaled = test_c;
    for (auto& c : test_scaled) scale_bias_column(c.rows, bias_scale);

    // The network's own predictions on the test set.
    std::vector<std::size_t> net_labels(test_d.size());
    for (std::size_t i = 0; i < test_d.size(); ++i) {
        Vector x(test_d.inputs.row(i).begin(), test_d.inputs.row(i).end());
        net_labels[i] = label_of_scores(forward(net, x));
    }

    std::ofstream os(outdir / "report.txt");
    os << "# k-means facet clustering, snap-and-score classification\n";
    os << "n_train " << train_d.size() << " n_test " << test_d.size() << "\n";
    if (has_truth(test_d)) {
        std::size_t base = 0;
        for (std::size_t i = 0; i < test_d.size(); ++i)
            if (net_labels[i] == dataset_label(test_d, i)) ++base;
        os << "baseline correct " << base << "/" << test_d.size() << "\n";
    }

    // Scoring must undo the bias scaling on the chosen centers.
    auto classify_with = [&](const std::vector<KMeansModel>& models) {
        std::vector<KMeansModel> unscaled = models;
        if (bias_scale != 1.0)
            for (auto& m : unscaled) {
                const std::size_t last = m.centers.cols() - 1;
                for (std::size_t c = 0; c < m.centers.rows(); ++c)
                    m.centers(c, last) /= bias_scale;
            }
        // Snap in the scaled metric, score with unscaled bias: run the batch
        // classifier on scaled rows against scaled centers, then rescore.
        // For bias_scale == 1 this is plain cluster_classify_rows.
        if (bias_scale == 1.0)
            return cluster_classify_rows(models, test_scaled, test_d.inputs);
        std::vector<std::size_t> labels(test_d.size());
        Vector scores(o);
        for (std::size_t i = 0; i < test_d.size(); ++i) {
            auto x = test_d.inputs.row(i);
            for (std::size_t j = 0; j < o; ++j) {
                auto row = test_scaled[j].rows.row(i);
                std::size_t best = 0;
                double bd = 1e300;
                for (std::size_t c = 0; c < models[j].centers.rows(); ++c) {
                    double s = 0;
                    for (std::size_t t = 0; t < row.size(); ++t) {
                        const double e = row[t] - models[j].centers(c, t);
                        s += e * e;
                    }
                    if (s < bd) {
                        bd = s;
                        best = c;
                    }
                }
                double sc = unscaled[j].centers(best, row.size() - 1);
                for (std::size_t t = 0; t + 1 < row.size(); ++t)
                    sc += unscaled[j].centers(best, t) * x[t];
                scores[j] = sc;
            }
            labels[i] = label_of_scores(scores);
        }
        return labels;
    };

    for (const std::string& kstr : opt.list("k")) {
        std::size_t k = 0;
        try {
            k = std::stoul(kstr);
        } catch (const std::exception&) {
            throw UsageError("cluster: bad k value '" + kstr + "'");
        }
        if (k > p) {
            os << "k=" << k << " error k exceeds sample count " << p << "\n";
            continue;
        }
        const std::size_t r = k >= 1000 ? std::min<std::size_t>(restarts, 2) : restarts;
        std::vector<KMeansModel> models;
        for (std::size_t j = 0; j < o; ++j)
            models.push_back(
                kmeans_fit_best(train_c[j].rows, k, derive_seed(seed, j), r));
        const Counts c = tally(classify_with(models), net_labels, test_d);
        print_row(os, "k=" + kstr, c, test_d);
    }

    if (opt.flag("saturated")) {
        std::vector<KMeansModel> models;
        for (std::size_t j = 0; j < o; ++j)
            models.push_back(saturated_model(test_scaled[j].rows));
        const Counts c = tally(classify_with(models), net_labels, test_d);
        print_row(os, "saturated k=" + std::to_string(models[0].k), c, test_d);
    }
    return 0;
}

} // namespace facets::cli
