// Acceptance suite: one checkable criterion per function, each printing a
// single PASS/FAIL line. Run with a list of criterion numbers (default: all).
//
//   facets_acceptance [--cli PATH] [--scratch DIR] [--mnist DIR] [N ...]
//
// Digit-dataset criteria (5-7) use real IDX files from --mnist (or the
// FACETS_MNIST_DIR environment variable) when present, and otherwise fall
// back to the deterministic synthetic digit set, exercising the same IDX
// loading path at the same scale. The line notes which source ran.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "facets/dataio.hpp"
#include "facets/dual.hpp"
#include "facets/regions.hpp"
#include "facets/render.hpp"
#include "facets/rng.hpp"
#include "facets/trainer.hpp"

using namespace facets;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_scratch;
std::string g_mnist_dir;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

Mlp xor_fixture() {
    std::vector<Layer> layers;
    layers.push_back({Matrix{{1, 1}, {1, 1}}, Vector{1, 0}, true});
    layers.push_back({Matrix{{1, -2}}, Vector{-1}, false});
    return Mlp(std::move(layers));
}

Mlp integer_fixture() {
    std::vector<Layer> layers;
    layers.push_back({Matrix{{3, 0, 4}, {5, 9, 1}, {6, 1, 2}}, Vector{7, 2, 9}, true});
    layers.push_back({Matrix{{2, 9, 5}, {1, 3, 3}, {8, 7, 0}}, Vector{7, 7, 8}, true});
    layers.push_back({Matrix{{7, 9, 6}, {4, 0, 9}, {7, 3, 7}}, Vector{5, 5, 2}, false});
    return Mlp(std::move(layers));
}

double continuity_gap(const std::vector<RegionCell>& cells) {
    double worst = 0.0;
    for (std::size_t a = 0; a < cells.size(); ++a)
        for (std::size_t b = a + 1; b < cells.size(); ++b)
            for (const auto& va : cells[a].polygon.vertices)
                for (const auto& vb : cells[b].polygon.vertices) {
                    if (std::hypot(va[0] - vb[0], va[1] - vb[1]) > 1e-7) continue;
                    for (std::size_t j = 0; j < cells[a].map.w.rows(); ++j) {
                        const double fa = cells[a].map.w(j, 0) * va[0] +
                                          cells[a].map.w(j, 1) * va[1] + cells[a].map.b[j];
                        const double fb = cells[b].map.w(j, 0) * va[0] +
                                          cells[b].map.w(j, 1) * va[1] + cells[b].map.b[j];
                        worst = std::max(worst, std::abs(fa - fb));
                    }
                }
    return worst;
}

// ---- digit data source (real IDX files when available) --------------------

struct DigitData {
    Dataset train;    // stratified 10000-sample training subset
    Dataset test;     // 2000-sample test subset
    std::string source;
};

DigitData load_digit_data() {
    DigitData out;
    if (!g_mnist_dir.empty()) {
        const fs::path dir = g_mnist_dir;
        const fs::path ti = dir / "train-images-idx3-ubyte";
        const fs::path tl = dir / "train-labels-idx1-ubyte";
        const fs::path ei = dir / "t10k-images-idx3-ubyte";
        const fs::path el = dir / "t10k-labels-idx1-ubyte";
        if (fs::exists(ti) && fs::exists(tl) && fs::exists(ei) && fs::exists(el)) {
            out.train = to_dataset(load_idx_images(ti), load_idx_labels(tl), 10000, 2);
            out.test = to_dataset(load_idx_images(ei), load_idx_labels(el), 2000, 3);
            out.source = "mnist-idx";
            return out;
        }
    }
    // Synthetic fallback, written to and read back from IDX files so the
    // binary container path is exercised end to end. Files are staged under
    // a process-unique name and renamed so concurrent criteria never read a
    // half-written file (the content is identical either way).
    fs::create_directories(g_scratch);
    const fs::path ti = g_scratch / "synth-train-images.idx";
    const fs::path tl = g_scratch / "synth-train-labels.idx";
    const fs::path ei = g_scratch / "synth-test-images.idx";
    const fs::path el = g_scratch / "synth-test-labels.idx";
    if (!fs::exists(ti) || !fs::exists(tl) || !fs::exists(ei) || !fs::exists(el)) {
        const std::string tag = "." + std::to_string(::getpid());
        auto stage = [&](const fs::path& target, auto&& save) {
            const fs::path tmp = target.string() + tag;
            save(tmp);
            fs::rename(tmp, target);
        };
        auto [img, lab] = make_synthetic_digits(12000, 1);
        stage(ti, [&](const fs::path& p) { save_idx_images(p, img); });
        stage(tl, [&](const fs::path& p) { save_idx_labels(p, lab); });
        auto [img2, lab2] = make_synthetic_digits(2000, 99);
        stage(ei, [&](const fs::path& p) { save_idx_images(p, img2); });
        stage(el, [&](const fs::path& p) { save_idx_labels(p, lab2); });
    }
    out.train = to_dataset(load_idx_images(ti), load_idx_labels(tl), 10000, 2);
    out.test = to_dataset(load_idx_images(ei), load_idx_labels(el), 2000, 3);
    out.source = "synthetic-idx";
    return out;
}

Mlp train_dense(const Dataset& train_d, std::uint64_t seed, std::size_t epochs) {
    Mlp net = init_net({784, 128, 10}, seed);
    TrainConfig cfg;
    cfg.lr = 0.01;
    cfg.momentum = 0.5;
    cfg.weight_decay = 0.01;
    cfg.batch_size = 64;
    cfg.epochs = epochs;
    cfg.loss = Loss::cross_entropy;
    cfg.seed = seed;
    return train(net, train_d, cfg).final_net;
}

std::size_t count_correct(const std::vector<std::size_t>& labels, const Dataset& d) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == dataset_label(d, i)) ++n;
    return n;
}

std::vector<std::size_t> net_labels_of(const Mlp& net, const Dataset& d) {
    std::vector<std::size_t> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        Vector x(d.inputs.row(i).begin(), d.inputs.row(i).end());
        out[i] = label_of_scores(forward(net, x));
    }
    return out;
}

// ---- criteria --------------------------------------------------------------

Outcome criterion1() {
    Mlp net = xor_fixture();
    const BBox box{-2, -2, 2, 2};
    auto cells = enumerate_regions_2d(net, box);
    if (cells.size() != 3) return {false, "expected 3 cells, got " + std::to_string(cells.size())};

    const double gap = continuity_gap(cells);
    if (gap > 1e-9) return {false, "continuity gap " + std::to_string(gap)};

    if (forward(net, {-1, -1}) != Vector{-1}) return {false, "f(-1,-1) != -1"};

    // Derived facets -x-y / x+y / -1 against forward on a 100x100 grid.
    double max_err = 0.0;
    for (int gy = 0; gy < 100; ++gy)
        for (int gx = 0; gx < 100; ++gx) {
            const double x = -2.0 + 4.0 * gx / 99.0;
            const double y = -2.0 + 4.0 * gy / 99.0;
            const double s = x + y;
            const double expected = s >= 0 ? -s : (s >= -1 ? s : -1.0);
            max_err = std::max(max_err, std::abs(forward(net, {x, y})[0] - expected));
        }
    if (max_err >= 1e-12) return {false, "facet formula error " + std::to_string(max_err)};
    char buf[128];
    std::snprintf(buf, sizeof(buf), "3 cells, continuity %.1e, facet err %.1e", gap, max_err);
    return {true, buf};
}

Outcome criterion2() {
    Mlp net = integer_fixture();
    const Vector probe{1, 1, 1}; // a realizable region (every unit active)

    const AffineMap map = local_affine(net, probe);
    double worst = 0.0;
    const double step = 1e-5;
    Vector xp = probe, xm = probe;
    for (std::size_t j = 0; j < 3; ++j) {
        xp[j] += step;
        xm[j] -= step;
        const Vector fp = forward(net, xp);
        const Vector fm = forward(net, xm);
        for (std::size_t i = 0; i < 3; ++i)
            worst = std::max(worst,
                             std::abs((fp[i] - fm[i]) / (2 * step) - map.w(i, j)));
        xp[j] = probe[j];
        xm[j] = probe[j];
    }
    if (worst > 1e-6) return {false, "jacobian gap " + std::to_string(worst)};

    const Polytope poly = region_inequalities(net, probe);
    if (poly.a.rows() != 6)
        return {false, "expected 6 constraints, got " + std::to_string(poly.a.rows())};
    for (std::size_t r = 0; r < 6; ++r) {
        double lhs = 0;
        for (std::size_t j = 0; j < 3; ++j) lhs += poly.a(r, j) * probe[j];
        if (lhs > poly.c[r] + 1e-12) return {false, "constraint violated at probe"};
    }

    // The displayed pattern's map, checked algebraically (it has an empty
    // region, so no probe point can exercise it).
    ActivationPattern imposed;
    imposed.masks = {{true, false, true}, {false, true, false}};
    const AffineMap composed = compose_affine(net, imposed);
    const Matrix want_w{{189, 27, 90}, {0, 0, 0}, {63, 9, 30}};
    const Vector want_b{374, 5, 125};
    if (!(composed.w == want_w && composed.b == want_b))
        return {false, "imposed-pattern composition mismatch"};
    if (!is_empty(region_inequalities_for_pattern(net, imposed)))
        return {false, "imposed pattern should be infeasible"};
    char buf[128];
    std::snprintf(buf, sizeof(buf), "jacobian gap %.1e, 6 constraints hold", worst);
    return {true, buf};
}

Outcome criterion3() {
    const BBox box{-2, -2, 2, 2};
    const std::vector<std::vector<std::size_t>> archs = {
        {2, 8, 1}, {2, 6, 6, 1}, {2, 5, 5, 5, 2}, {2, 8, 8, 1}, {2, 4, 4, 4, 1}};
    std::size_t total_cells = 0;
    for (int rep = 0; rep < 20; ++rep) {
        Mlp net = init_net(archs[rep % archs.size()], 100 + rep);
        auto cells = enumerate_regions_2d(net, box);
        total_cells += cells.size();
        std::set<std::uint64_t> enumerated;
        for (const auto& c : cells) enumerated.insert(pattern_key(c.pattern));

        auto sampled = sample_patterns_grid(net, box, 2001);
        std::set<std::uint64_t> sampled_keys;
        for (const auto& pc : sampled) {
            if (!enumerated.count(pc.key))
                return {false, "net " + std::to_string(rep) + ": sampled pattern missing"};
            sampled_keys.insert(pc.key);
        }
        const double pitch = box.width() / 2000.0;
        for (const auto& c : cells)
            if (c.polygon.area() > pitch * pitch &&
                !sampled_keys.count(pattern_key(c.pattern)))
                return {false, "net " + std::to_string(rep) + ": large cell unsampled"};
    }
    return {true, "20 nets, " + std::to_string(total_cells) + " cells total"};
}

Outcome criterion4() {
    Dataset data = make_circle_annulus(CircleParams{}, 1001);
    const BBox box = data.bounding_box(0.2);

    // Ten width-2 nets of depth <= 3: every cell unbounded.
    const std::vector<std::vector<std::size_t>> w2 = {{2, 2, 1}, {2, 2, 2, 1}, {2, 2, 2, 2, 1}};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        TrainConfig cfg;
        cfg.lr = 0.03;
        cfg.momentum = 0.9;
        cfg.batch_size = 25;
        cfg.epochs = 600;
        cfg.loss = Loss::mse;
        cfg.seed = seed;
        Mlp net = train(init_net(w2[seed % 3], seed), data, cfg).final_net;
        for (const auto& c : enumerate_regions_2d(net, box))
            if (cell_bounded(c, box))
                return {false, "width-2 net (seed " + std::to_string(seed) +
                                   ") produced a bounded cell"};
    }

    // Width-3 single hidden layer: some seed reaches a bounded cell at >= 95%
    // training accuracy.
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        TrainConfig cfg;
        cfg.lr = 0.03;
        cfg.momentum = 0.9;
        cfg.batch_size = 25;
        cfg.epochs = 1500;
        cfg.loss = Loss::mse;
        cfg.seed = seed;
        Mlp net = train(init_net({2, 3, 1}, seed), data, cfg).final_net;
        const double acc = classification_accuracy(net, data);
        if (acc < 0.95) continue;
        for (const auto& c : enumerate_regions_2d(net, box))
            if (cell_bounded(c, box)) {
                char buf[128];
                std::snprintf(buf, sizeof(buf),
                              "10 width-2 nets all-unbounded; width-3 seed %llu: "
                              "acc %.3f with a bounded cell",
                              static_cast<unsigned long long>(seed), acc);
                return {true, buf};
            }
    }
    return {false, "no width-3 seed reached a bounded cell at >= 95% accuracy"};
}

Outcome criterion5() {
    // XOR half: saturated centers reproduce the net's labels on the grid.
    Mlp net = xor_fixture();
    Matrix grid = make_grid2d(BBox{-1, -1, 1, 1}, 101).inputs;
    auto cs = build_c_matrices(net, grid);
    std::vector<KMeansModel> models;
    for (const auto& c : cs) models.push_back(saturated_model(c.rows));
    auto labels = cluster_classify_rows(models, cs, grid);
    const auto want = net_labels_of(net, {grid, {}, {}, ""});
    std::size_t mism = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != want[i]) ++mism;
    if (mism != 0) return {false, "xor grid mismatches: " + std::to_string(mism)};

    // Digit half: a briefly trained dense net on the 2000-sample test subset.
    DigitData dd = load_digit_data();
    Mlp dense = train_dense(dd.train, 7, 3);
    auto test_c = build_c_matrices(dense, dd.test.inputs, 2);
    std::vector<KMeansModel> dmodels;
    for (const auto& c : test_c) dmodels.push_back(saturated_model(c.rows));
    auto dlabels = cluster_classify_rows(dmodels, test_c, dd.test.inputs);
    const auto dwant = net_labels_of(dense, dd.test);
    std::size_t dmism = 0;
    for (std::size_t i = 0; i < dlabels.size(); ++i)
        if (dlabels[i] != dwant[i]) ++dmism;
    if (dmism != 0)
        return {false, dd.source + " mismatches: " + std::to_string(dmism)};
    return {true, "0 mismatches on 10201 xor grid points and 2000 " + dd.source +
                      " samples"};
}

Outcome criterion6() {
    DigitData dd = load_digit_data();
    Mlp dense = train_dense(dd.train, 7, 30);

    const auto base_labels = net_labels_of(dense, dd.test);
    const std::size_t baseline = count_correct(base_labels, dd.test);
    const double base_acc = double(baseline) / double(dd.test.size());
    if (base_acc < 0.90) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "baseline accuracy %.3f < 0.90 (%s)",
                      base_acc, dd.source.c_str());
        return {false, buf};
    }

    auto train_c = build_c_matrices(dense, dd.train.inputs, 2);
    auto test_c = build_c_matrices(dense, dd.test.inputs, 2);

    std::vector<std::size_t> ks = {1, 10, 100, 1000};
    std::vector<std::size_t> correct(ks.size());
    for (std::size_t t = 0; t < ks.size(); ++t) {
        const std::size_t k = ks[t];
        const std::size_t restarts = k >= 1000 ? 2 : 5;
        std::vector<KMeansModel> models;
        for (std::size_t j = 0; j < 10; ++j)
            models.push_back(
                kmeans_fit_best(train_c[j].rows, k, derive_seed(11, j), restarts));
        correct[t] =
            count_correct(cluster_classify_rows(models, test_c, dd.test.inputs), dd.test);
    }

    // Non-decreasing in k up to 0.5 accuracy points per step.
    const double half_point = 0.005 * double(dd.test.size());
    for (std::size_t t = 1; t < ks.size(); ++t)
        if (double(correct[t]) < double(correct[t - 1]) - half_point) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "correct count drops: k=%zu %zu -> k=%zu %zu (%s)",
                          ks[t - 1], correct[t - 1], ks[t], correct[t],
                          dd.source.c_str());
            return {false, buf};
        }
    if (double(correct[1]) < 0.85 * double(baseline)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "k=10 retention %zu/%zu below 85%% (%s)",
                      correct[1], baseline, dd.source.c_str());
        return {false, buf};
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "baseline %zu/2000; k=1/10/100/1000 -> %zu/%zu/%zu/%zu (%s)",
                  baseline, correct[0], correct[1], correct[2], correct[3],
                  dd.source.c_str());
    return {true, buf};
}

Outcome criterion7() {
    // Identity half: self-fit maps preserve labels exactly on the fitting
    // set when C has full column rank.
    Mlp small = init_net({2, 8, 8, 1}, 2024);
    Matrix grid = make_grid2d(BBox{-1, -1, 1, 1}, 51).inputs;
    CMatrix c = build_c_matrix(small, grid, 0);
    CrossMap self = fit_crossmap(c, c);
    auto self_labels = crossmap_classify_rows({self}, {c}, grid);
    const auto small_want = net_labels_of(small, {grid, {}, {}, ""});
    for (std::size_t i = 0; i < self_labels.size(); ++i)
        if (self_labels[i] != small_want[i])
            return {false, "self-fit label flip at sample " + std::to_string(i)};

    // Retention half: two independently seeded dense nets.
    DigitData dd = load_digit_data();
    Mlp net1 = train_dense(dd.train, 7, 10);
    Mlp net2 = train_dense(dd.train, 8, 10);

    auto fit_c1 = build_c_matrices(net1, dd.train.inputs, 2);
    auto fit_c2 = build_c_matrices(net2, dd.train.inputs, 2);
    std::vector<CrossMap> maps;
    for (std::size_t j = 0; j < 10; ++j)
        maps.push_back(fit_crossmap(fit_c1[j], fit_c2[j]));

    auto eval_c1 = build_c_matrices(net1, dd.test.inputs, 2);
    const std::size_t mapped =
        count_correct(crossmap_classify_rows(maps, eval_c1, dd.test.inputs), dd.test);
    const std::size_t base2 = count_correct(net_labels_of(net2, dd.test), dd.test);
    if (double(mapped) < 0.90 * double(base2)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "retention %zu/%zu below 90%% (%s)", mapped,
                      base2, dd.source.c_str());
        return {false, buf};
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "self-fit exact on 2601 samples; mapped %zu vs baseline %zu (%s)",
                  mapped, base2, dd.source.c_str());
    return {true, buf};
}

Outcome criterion8() {
    // Backprop vs central finite differences on small nets, both losses.
    for (int rep = 0; rep < 4; ++rep) {
        const Loss loss = rep % 2 == 0 ? Loss::mse : Loss::cross_entropy;
        Mlp net = init_net({3, 5, 4, 3}, 4000 + rep);
        Rng rng(90 + rep);
        Dataset d;
        d.inputs = Matrix(6, 3);
        for (double& v : d.inputs.data()) v = rng.uniform(-2, 2);
        Matrix t(6, 3);
        for (double& v : t.data()) v = rng.uniform(-1, 1);
        d.targets = t;
        d.labels = {0, 1, 2, 1, 0, 2};

        const double lr = 1e-6;
        TrainConfig cfg;
        cfg.lr = lr;
        cfg.batch_size = 6;
        cfg.epochs = 1;
        cfg.loss = loss;
        TrainRun run = train(net, d, cfg);

        std::vector<Layer> layers = net.layers();
        auto eval = [&] { return dataset_loss(Mlp(layers), d, loss); };
        std::size_t pi = 0;
        for (std::size_t k = 0; k < layers.size(); ++k) {
            auto check_param = [&](double& slot, double trained) {
                const double keep = slot;
                slot = keep + 1e-5;
                const double fp = eval();
                slot = keep - 1e-5;
                const double fm = eval();
                slot = keep;
                const double numeric = (fp - fm) / 2e-5;
                const double analytic = (keep - trained) / lr;
                ++pi;
                return std::abs(numeric - analytic) < 1e-4;
            };
            for (std::size_t i = 0; i < layers[k].weight.data().size(); ++i)
                if (!check_param(layers[k].weight.data()[i],
                                 run.final_net.layers()[k].weight.data()[i]))
                    return {false, "gradient mismatch (weights)"};
            for (std::size_t i = 0; i < layers[k].bias.size(); ++i)
                if (!check_param(layers[k].bias[i], run.final_net.layers()[k].bias[i]))
                    return {false, "gradient mismatch (bias)"};
        }
    }

    // Affine consistency and polytope membership on 1000 random cases.
    Rng rng(31);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t h = 2 + rep % 5;
        Mlp net = init_net({3, h, h, 2}, 5000 + rep);
        Vector x{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Vector fx = forward(net, x);
        const AffineMap map = local_affine(net, x);
        const Vector ax = affine_apply(map.w, map.b, x);
        for (std::size_t i = 0; i < fx.size(); ++i)
            if (std::abs(fx[i] - ax[i]) >= 1e-9 * (1 + std::abs(fx[i])))
                return {false, "affine consistency failed at case " + std::to_string(rep)};
        const Polytope poly = region_inequalities(net, x);
        for (std::size_t r = 0; r < poly.a.rows(); ++r) {
            double lhs = 0;
            for (std::size_t j = 0; j < 3; ++j) lhs += poly.a(r, j) * x[j];
            if (lhs > poly.c[r] + 1e-12)
                return {false, "membership failed at case " + std::to_string(rep)};
        }
    }
    return {true, "gradients within 1e-4; 1000 consistency/membership cases hold"};
}

Outcome criterion9() {
    if (g_cli.empty()) return {false, "--cli path not given"};
    const fs::path dir = g_scratch / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto run = [&](const std::string& args) {
        const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };
    auto same_trees = [&](const fs::path& a, const fs::path& b, std::string& why) {
        std::size_t files = 0;
        for (const auto& e : fs::recursive_directory_iterator(a)) {
            if (!e.is_regular_file()) continue;
            ++files;
            const fs::path rel = fs::relative(e.path(), a);
            if (slurp(e.path()) != slurp(b / rel)) {
                why = rel.string() + " differs";
                return false;
            }
        }
        if (files == 0) {
            why = "no files produced";
            return false;
        }
        return true;
    };

    const std::string net = (dir / "t_a/weights_final.txt").string();
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"t", "train task=xor4 arch=2-4-1 lr=0.05 momentum=0.9 weight_decay=0 "
              "batch_size=4 epochs=400 loss=mse seed=3 snapshot_every=200 "
              "frames=true bbox=-2,-2,2,2"},
        {"r", "regions net=" + net + " bbox=-2,-2,2,2 oracle=true oracle_grid=201"},
        {"cl", "cluster net=" + net + " train_data=grid:-1,-1,1,1,31 k=1,2 "
               "saturated=true seed=5"},
        {"cm", "crossmap net1=" + net + " net2=" + net +
               " fit_data=grid:-1,-1,1,1,31 dump_maps=true svg=true"},
        {"re", "render net=" + net + " what=layers bbox=-2,-2,2,2"},
    };
    for (const auto& [name, args] : cases) {
        const fs::path a = dir / (name + "_a");
        const fs::path b = dir / (name + "_b");
        if (!run(args + " outdir=" + a.string())) return {false, name + " run A failed"};
        if (!run(args + " outdir=" + b.string())) return {false, name + " run B failed"};
        std::string why;
        if (!same_trees(a, b, why)) return {false, name + ": " + why};
    }
    // census and mnist-prep write single files.
    for (const char* suffix : {"a", "b"}) {
        if (!run("census net=" + net + " segment=-2,-2:2,2 out=" +
                 (dir / (std::string("census_") + suffix + ".txt")).string()))
            return {false, "census run failed"};
        const std::string base = (dir / (std::string("prep_") + suffix)).string();
        if (!run("mnist-prep synthesize=64 seed=9 out_images=" + base +
                 ".idx out_labels=" + base + ".lab out_csv=" + base + ".csv"))
            return {false, "mnist-prep run failed"};
    }
    if (slurp(dir / "census_a.txt") != slurp(dir / "census_b.txt"))
        return {false, "census outputs differ"};
    for (const char* ext : {".idx", ".lab", ".csv"})
        if (slurp(dir / ("prep_a" + std::string(ext))) !=
            slurp(dir / ("prep_b" + std::string(ext))))
            return {false, std::string("mnist-prep outputs differ (") + ext + ")"};
    return {true, "7 commands byte-identical across repeated runs"};
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    g_scratch = fs::temp_directory_path() / "facets-acceptance";
    if (const char* env = std::getenv("FACETS_MNIST_DIR")) g_mnist_dir = env;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc) {
            g_cli = argv[++i];
        } else if (std::strcmp(argv[i], "--scratch") == 0 && i + 1 < argc) {
            g_scratch = argv[++i];
        } else if (std::strcmp(argv[i], "--mnist") == 0 && i + 1 < argc) {
            g_mnist_dir = argv[++i];
        } else {
            wanted.push_back(std::atoi(argv[i]));
        }
    }
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"xor facet reproduction", criterion1},
        {"masked composition vs finite differences", criterion2},
        {"enumeration vs grid census on 20 random nets", criterion3},
        {"width-2 impossibility / width-3 sufficiency", criterion4},
        {"saturated clustering identity", criterion5},
        {"clustering accuracy trend at desk scale", criterion6},
        {"cross-map identity and retention", criterion7},
        {"gradient and consistency property suite", criterion8},
        {"CLI determinism", criterion9},
    };

    bool all_pass = true;
    for (int n : wanted) {
        if (n < 1 || n > int(criteria.size())) {
            std::printf("criterion %d FAIL: unknown criterion\n", n);
            all_pass = false;
            continue;
        }
        const double t0 = now_seconds();
        Outcome out;
        try {
            out = criteria[n - 1].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double dt = now_seconds() - t0;
        std::printf("criterion %d %s: %s (%.1fs) %s\n", n, out.pass ? "PASS" : "FAIL",
                    criteria[n - 1].first.c_str(), dt, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) all_pass = false;
    }
    return all_pass ? 0 : 1;
}
