#include "facets/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "facets/error.hpp"
#include "facets/rng.hpp"

namespace facets {

BBox Dataset::bounding_box(double inflate) const {
    check(inputs.rows() > 0 && inputs.cols() == 2, "bounding_box: need 2D data");
    BBox b{inputs(0, 0), inputs(0, 1), inputs(0, 0), inputs(0, 1)};
    for (std::size_t i = 0; i < inputs.rows(); ++i) {
        b.xmin = std::min(b.xmin, inputs(i, 0));
        b.xmax = std::max(b.xmax, inputs(i, 0));
        b.ymin = std::min(b.ymin, inputs(i, 1));
        b.ymax = std::max(b.ymax, inputs(i, 1));
    }
    const double dx = b.width() * inflate, dy = b.height() * inflate;
    return BBox{b.xmin - dx, b.ymin - dy, b.xmax + dx, b.ymax + dy};
}

Dataset make_xor4() {
    Dataset d;
    d.name = "xor4";
    d.inputs = Matrix{{-1, -1}, {1, -1}, {-1, 1}, {1, 1}};
    d.targets = Matrix{{-1}, {1}, {1}, {-1}};
    d.labels = {0, 1, 1, 0};
    return d;
}

namespace {

void append_ring_samples(Dataset& d, std::vector<double>& in, std::vector<double>& tg,
                         Rng& rng, double cx, double cy, double r0, double r1,
                         std::size_t n, double target) {
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::sqrt(rng.uniform(r0 * r0, r1 * r1));
        const double th = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        in.push_back(cx + r * std::cos(th));
        in.push_back(cy + r * std::sin(th));
        tg.push_back(target);
        d.labels.push_back(target > 0 ? 1 : 0);
    }
}

} // namespace

Dataset make_circle_annulus(const CircleParams& p, std::uint64_t seed) {
    check(p.inner_radius > 0 && p.annulus_inner < p.annulus_outer &&
              p.inner_radius <= p.annulus_inner,
          "circle_annulus: invalid radii");
    check(p.per_class >= 1, "circle_annulus: empty class");
    Dataset d;
    d.name = "circle_annulus";
    std::vector<double> in, tg;
    Rng rng(derive_seed(seed, 0x11));
    append_ring_samples(d, in, tg, rng, 0, 0, 0.0, p.inner_radius, p.per_class, +1.0);
    append_ring_samples(d, in, tg, rng, 0, 0, p.annulus_inner, p.annulus_outer, p.per_class, -1.0);
    const std::size_t n = tg.size();
    d.inputs = Matrix(n, 2, std::move(in));
    d.targets = Matrix(n, 1, std::move(tg));
    return d;
}

Dataset make_circles_grid(const CircleParams& p, std::uint64_t seed) {
    check(p.inner_radius > 0 && p.annulus_inner < p.annulus_outer &&
              p.inner_radius <= p.annulus_inner,
          "circles_grid: invalid radii");
    Dataset d;
    d.name = "circles_grid";
    std::vector<double> in, tg;
    Rng rng(derive_seed(seed, 0x12));
    const double s = p.center_scale;
    for (double cx : {-s, s})
        for (double cy : {-s, s}) {
            const double disk_class = (cx * cy < 0) ? +1.0 : -1.0;
            append_ring_samples(d, in, tg, rng, cx, cy, 0.0, p.inner_radius,
                                p.per_class, disk_class);
            append_ring_samples(d, in, tg, rng, cx, cy, p.annulus_inner,
                                p.annulus_outer, p.per_class, -disk_class);
        }
    const std::size_t n = tg.size();
    d.inputs = Matrix(n, 2, std::move(in));
    d.targets = Matrix(n, 1, std::move(tg));
    return d;
}

Dataset make_grid2d(const BBox& box, std::size_t per_side) {
    check(per_side >= 2, "grid2d: need at least 2 points per side");
    check(box.xmax > box.xmin && box.ymax > box.ymin, "grid2d: degenerate box");
    Dataset d;
    d.name = "grid2d";
    Matrix in(per_side * per_side, 2);
    std::size_t r = 0;
    for (std::size_t gy = 0; gy < per_side; ++gy)
        for (std::size_t gx = 0; gx < per_side; ++gx, ++r) {
            in(r, 0) = box.xmin + box.width() * double(gx) / double(per_side - 1);
            in(r, 1) = box.ymin + box.height() * double(gy) / double(per_side - 1);
        }
    d.inputs = std::move(in);
    return d;
}

Mlp init_net(const std::vector<std::size_t>& widths, std::uint64_t seed) {
    check(widths.size() >= 2, "init_net: need input and output widths");
    for (std::size_t w : widths) check(w >= 1, "init_net: zero width");
    Rng rng(derive_seed(seed, 0x01));
    std::vector<Layer> layers;
    for (std::size_t k = 1; k < widths.size(); ++k) {
        const std::size_t rows = widths[k], cols = widths[k - 1];
        const double bound = 1.0 / std::sqrt(double(cols));
        Layer l;
        l.weight = Matrix(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                l.weight(i, j) = rng.uniform(-bound, bound);
        l.bias.resize(rows);
        for (double& b : l.bias) b = rng.uniform(-bound, bound);
        l.relu_after = k + 1 < widths.size();
        layers.push_back(std::move(l));
    }
    return Mlp(std::move(layers));
}

namespace {

// Forward pass over a batch (rows = samples). Returns per-layer
// post-activations; preacts receives the preactivation matrices.
std::vector<Matrix> batch_forward(const std::vector<Layer>& layers, const Matrix& batch,
                                  std::vector<Matrix>& preacts) {
    std::vector<Matrix> acts;
    acts.reserve(layers.size() + 1);
    acts.push_back(batch);
    preacts.clear();
    for (const Layer& l : layers) {
        Matrix z = matmul_nt(acts.back(), l.weight); // (B x prev)(prev x rows)^T
        for (std::size_t i = 0; i < z.rows(); ++i) {
            auto row = z.row(i);
            for (std::size_t u = 0; u < row.size(); ++u) row[u] += l.bias[u];
        }
        preacts.push_back(z);
        if (l.relu_after)
            for (double& v : z.data()) v = v > 0.0 ? v : 0.0;
        acts.push_back(std::move(z));
    }
    return acts;
}

double batch_loss_and_grad(const Matrix& scores, const Matrix& targets,
                           const std::vector<std::uint8_t>& labels,
                           std::span<const std::size_t> idx, Loss loss,
                           Matrix& grad) {
    const std::size_t B = scores.rows(), o = scores.cols();
    grad = Matrix(B, o);
    double total = 0.0;
    if (loss == Loss::mse) {
        for (std::size_t i = 0; i < B; ++i)
            for (std::size_t j = 0; j < o; ++j) {
                const double e = scores(i, j) - targets(idx[i], j);
                total += e * e;
                grad(i, j) = 2.0 * e / double(B);
            }
    } else {
        for (std::size_t i = 0; i < B; ++i) {
            double mx = scores(i, 0);
            for (std::size_t j = 1; j < o; ++j) mx = std::max(mx, scores(i, j));
            double z = 0.0;
            for (std::size_t j = 0; j < o; ++j) z += std::exp(scores(i, j) - mx);
            const std::size_t y = labels[idx[i]];
            total += -(scores(i, y) - mx - std::log(z));
            for (std::size_t j = 0; j < o; ++j) {
                const double p = std::exp(scores(i, j) - mx) / z;
                grad(i, j) = (p - (j == y ? 1.0 : 0.0)) / double(B);
            }
        }
    }
    return total / double(B);
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = m.row(idx[i]);
        auto dst = out.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

} // namespace

double dataset_loss(const Mlp& net, const Dataset& data, Loss loss) {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<Matrix> preacts;
    std::vector<Matrix> acts = batch_forward(net.layers(), data.inputs, preacts);
    Matrix grad;
    return batch_loss_and_grad(acts.back(), data.targets, data.labels, idx, loss, grad);
}

double classification_accuracy(const Mlp& net, const Dataset& data) {
    std::vector<Matrix> preacts;
    std::vector<Matrix> acts = batch_forward(net.layers(), data.inputs, preacts);
    const Matrix& scores = acts.back();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        Vector s(scores.row(i).begin(), scores.row(i).end());
        if (label_of_scores(s) == dataset_label(data, i)) ++correct;
    }
    return double(correct) / double(data.size());
}

std::size_t dataset_label(const Dataset& data, std::size_t i) {
    if (!data.labels.empty()) return data.labels[i];
    check(!data.targets.empty(), "dataset_label: no labels or targets");
    if (data.targets.cols() == 1) return data.targets(i, 0) > 0 ? 1 : 0;
    Vector t(data.targets.row(i).begin(), data.targets.row(i).end());
    return label_of_scores(t);
}

TrainRun train(const Mlp& net, const Dataset& data, const TrainConfig& cfg) {
    check(cfg.lr > 0, "train: lr must be positive");
    check(cfg.momentum >= 0 && cfg.momentum < 1, "train: momentum in [0,1)");
    check(cfg.batch_size >= 1, "train: batch_size >= 1");
    check(data.inputs.cols() == net.input_dim(), "train: input dim mismatch");
    if (cfg.loss == Loss::mse)
        check(data.targets.cols() == net.output_dim(), "train: target dim mismatch");
    else
        check(data.labels.size() == data.size(), "train: cross_entropy needs labels");

    Mlp cur = net;
    TrainRun run;
    run.snapshots.emplace_back(0, cur);
    run.loss_curve.push_back(dataset_loss(cur, data, cfg.loss));

    // Momentum buffers per layer.
    std::vector<Matrix> vel_w;
    std::vector<Vector> vel_b;
    for (const Layer& l : cur.layers()) {
        vel_w.emplace_back(l.weight.rows(), l.weight.cols());
        vel_b.emplace_back(l.bias.size(), 0.0);
    }

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0x100 + epoch));
        shuffle_rng.shuffle(order);

        std::vector<Layer> layers = cur.layers();
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t bsz = std::min(cfg.batch_size, order.size() - start);
            std::span<const std::size_t> idx(order.data() + start, bsz);
            Matrix batch = gather_rows(data.inputs, idx);

            std::vector<Matrix> preacts;
            std::vector<Matrix> acts = batch_forward(layers, batch, preacts);
            Matrix g;
            batch_loss_and_grad(acts.back(), data.targets, data.labels, idx, cfg.loss, g);

            // Backward pass; ReLU derivative at exactly 0 is 0.
            for (std::size_t k = net.layer_count(); k-- > 0;) {
                Layer& l = layers[k];
                if (l.relu_after) {
                    const Matrix& z = preacts[k];
                    for (std::size_t t = 0; t < g.data().size(); ++t)
                        if (z.data()[t] <= 0.0) g.data()[t] = 0.0;
                }
                Matrix dw = matmul_tn(g, acts[k]); // (o_k x B)(B x in_k)
                Vector db(l.bias.size(), 0.0);
                for (std::size_t i = 0; i < g.rows(); ++i) {
                    auto row = g.row(i);
                    for (std::size_t u = 0; u < row.size(); ++u) db[u] += row[u];
                }
                if (k > 0) g = matmul(g, l.weight);

                // SGD with momentum and weight decay (applied to W and b alike).
                for (std::size_t t = 0; t < dw.data().size(); ++t) {
                    double& v = vel_w[k].data()[t];
                    v = cfg.momentum * v -
                        cfg.lr * (dw.data()[t] + cfg.weight_decay * l.weight.data()[t]);
                    l.weight.data()[t] += v;
                }
                for (std::size_t u = 0; u < db.size(); ++u) {
                    double& v = vel_b[k][u];
                    v = cfg.momentum * v - cfg.lr * (db[u] + cfg.weight_decay * l.bias[u]);
                    l.bias[u] += v;
                }
            }
        }
        cur = Mlp(std::move(layers));
        run.loss_curve.push_back(dataset_loss(cur, data, cfg.loss));
        if (cfg.snapshot_every > 0 && epoch % cfg.snapshot_every == 0)
            run.snapshots.emplace_back(epoch, cur);
    }
    if (run.snapshots.back().first != cfg.epochs && cfg.epochs > 0)
        run.snapshots.emplace_back(cfg.epochs, cur);
    run.final_net = cur;
    return run;
}

} // namespace facets
