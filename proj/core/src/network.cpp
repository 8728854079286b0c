#include "facets/network.hpp"

#include <cmath>

#include "facets/error.hpp"

namespace facets {

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
    check(!layers_.empty(), "Mlp: no layers");
    input_dim_ = layers_.front().weight.cols();
    output_dim_ = layers_.back().weight.rows();
    std::size_t prev = input_dim_;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const Layer& l = layers_[k];
        check(l.weight.cols() == prev, "Mlp: layer dims do not chain");
        check(l.bias.size() == l.weight.rows(), "Mlp: bias length != rows");
        prev = l.weight.rows();
    }
    check(!layers_.back().relu_after, "Mlp: final layer must be linear");
}

std::size_t Mlp::relu_layer_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers_)
        if (l.relu_after) ++n;
    return n;
}

std::size_t Mlp::relu_unit_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers_)
        if (l.relu_after) n += l.weight.rows();
    return n;
}

Vector forward(const Mlp& net, const Vector& x) {
    check(x.size() == net.input_dim(), "forward: input dim mismatch");
    Vector h = x;
    for (const Layer& l : net.layers()) {
        h = affine_apply(l.weight, l.bias, h);
        if (l.relu_after)
            for (double& v : h) v = v > 0.0 ? v : 0.0;
    }
    return h;
}

ActivationPattern activation_pattern(const Mlp& net, const Vector& x) {
    check(x.size() == net.input_dim(), "activation_pattern: input dim mismatch");
    ActivationPattern p;
    Vector h = x;
    for (const Layer& l : net.layers()) {
        h = affine_apply(l.weight, l.bias, h);
        if (l.relu_after) {
            std::vector<bool> mask(h.size());
            for (std::size_t u = 0; u < h.size(); ++u) {
                mask[u] = h[u] > 0.0;
                if (h[u] < 0.0) h[u] = 0.0;
            }
            p.masks.push_back(std::move(mask));
        }
    }
    return p;
}

namespace {

void validate_pattern(const Mlp& net, const ActivationPattern& pattern) {
    check(pattern.masks.size() == net.relu_layer_count(),
          "pattern: mask count != ReLU layer count");
    std::size_t mi = 0;
    for (const Layer& l : net.layers())
        if (l.relu_after) {
            check(pattern.masks[mi].size() == l.weight.rows(),
                  "pattern: mask length != layer width");
            ++mi;
        }
}

// Accumulated affine (aw, ab) mapping the raw input to the current layer's
// post-activation output under the given masks.
struct Accum {
    Matrix w;
    Vector b;
};

Accum masked_layer(const Layer& l, const std::vector<bool>& mask) {
    Accum a{l.weight, l.bias};
    for (std::size_t u = 0; u < mask.size(); ++u) {
        if (mask[u]) continue;
        auto row = a.w.row(u);
        for (double& v : row) v = 0.0;
        a.b[u] = 0.0;
    }
    return a;
}

} // namespace

AffineMap compose_affine(const Mlp& net, const ActivationPattern& pattern) {
    validate_pattern(net, pattern);
    Accum acc;
    std::size_t mi = 0;
    bool first = true;
    for (const Layer& l : net.layers()) {
        Accum step = l.relu_after ? masked_layer(l, pattern.masks[mi++]) : Accum{l.weight, l.bias};
        if (first) {
            acc = std::move(step);
            first = false;
        } else {
            Vector nb = matvec(step.w, acc.b);
            for (std::size_t i = 0; i < nb.size(); ++i) nb[i] += step.b[i];
            acc.w = matmul(step.w, acc.w);
            acc.b = std::move(nb);
        }
    }
    return AffineMap{std::move(acc.w), std::move(acc.b)};
}

AffineMap local_affine(const Mlp& net, const Vector& x) {
    return compose_affine(net, activation_pattern(net, x));
}

Polytope region_inequalities_for_pattern(const Mlp& net, const ActivationPattern& pattern) {
    validate_pattern(net, pattern);
    const std::size_t d = net.input_dim();
    const std::size_t q = net.relu_unit_count();
    Matrix a(q, d);
    Vector c(q);

    Accum acc; // masked composition through the layers already passed
    bool first = true;
    std::size_t mi = 0, row = 0;
    for (const Layer& l : net.layers()) {
        if (l.relu_after) {
            // Preactivation of this layer as an affine function of the input.
            Matrix pw = first ? l.weight : matmul(l.weight, acc.w);
            Vector pv = l.bias;
            if (!first) {
                Vector v = matvec(l.weight, acc.b);
                for (std::size_t i = 0; i < v.size(); ++i) pv[i] += v[i];
            }
            const std::vector<bool>& mask = pattern.masks[mi];
            for (std::size_t u = 0; u < mask.size(); ++u, ++row) {
                const double sign = mask[u] ? -1.0 : 1.0;
                for (std::size_t j = 0; j < d; ++j) a(row, j) = sign * pw(u, j);
                c[row] = -sign * pv[u];
            }
        }
        Accum step = l.relu_after ? masked_layer(l, pattern.masks[mi++]) : Accum{l.weight, l.bias};
        if (first) {
            acc = std::move(step);
            first = false;
        } else {
            Vector nb = matvec(step.w, acc.b);
            for (std::size_t i = 0; i < nb.size(); ++i) nb[i] += step.b[i];
            acc.w = matmul(step.w, acc.w);
            acc.b = std::move(nb);
        }
    }
    return Polytope{std::move(a), std::move(c)};
}

Polytope region_inequalities(const Mlp& net, const Vector& x) {
    return region_inequalities_for_pattern(net, activation_pattern(net, x));
}

Matrix restricted_gradient_image(const Mlp& net, const Vector& x, std::size_t j,
                                 std::size_t img_rows, std::size_t img_cols) {
    check(j < net.output_dim(), "restricted_gradient_image: output index out of range");
    check(img_rows * img_cols == net.input_dim(),
          "restricted_gradient_image: shape does not match input dim");
    AffineMap map = local_affine(net, x);
    Matrix img(img_rows, img_cols);
    auto row = map.w.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) img(i / img_cols, i % img_cols) = row[i];
    return img;
}

Matrix restricted_gradient_image(const Mlp& net, const Vector& x, std::size_t j) {
    auto side = static_cast<std::size_t>(std::llround(std::sqrt(double(net.input_dim()))));
    check(side * side == net.input_dim(),
          "restricted_gradient_image: input dim is not a perfect square");
    return restricted_gradient_image(net, x, j, side, side);
}

std::size_t label_of_scores(const Vector& scores) {
    check(!scores.empty(), "label_of_scores: empty scores");
    if (scores.size() == 1) return scores[0] > 0.0 ? 1 : 0;
    std::size_t best = 0;
    for (std::size_t j = 1; j < scores.size(); ++j)
        if (scores[j] > scores[best]) best = j;
    return best;
}

std::uint64_t pattern_key(const ActivationPattern& pattern) {
    std::uint64_t key = 0;
    std::size_t bit = 0;
    for (const auto& mask : pattern.masks)
        for (bool on : mask) {
            check(bit < 64, "pattern_key: more than 64 ReLU units");
            if (on) key |= (std::uint64_t{1} << bit);
            ++bit;
        }
    return key;
}

} // namespace facets
