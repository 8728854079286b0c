#pragma once

#include <cstdint>
#include <vector>

#include "facets/linalg.hpp"

namespace facets {

struct Layer {
    Matrix weight;
    Vector bias;
    bool relu_after = false;
};

/// A fully-connected ReLU network f: R^d -> R^o. Immutable after
/// construction; all operations on it are pure.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<Layer> layers);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    const std::vector<Layer>& layers() const { return layers_; }
    std::size_t layer_count() const { return layers_.size(); }

    std::size_t relu_layer_count() const;
    std::size_t relu_unit_count() const;

private:
    std::vector<Layer> layers_;
    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
};

/// Per-ReLU-layer on/off state. true == unit active (preactivation > 0);
/// a preactivation of exactly zero counts as inactive.
struct ActivationPattern {
    std::vector<std::vector<bool>> masks;
    bool operator==(const ActivationPattern&) const = default;
};

/// One facet's affine map: row j of w is the gradient of output j wherever
/// the map is valid.
struct AffineMap {
    Matrix w; // o x d
    Vector b; // o
};

/// Halfspace system a*x <= c.
struct Polytope {
    Matrix a; // q x d
    Vector c; // q
};

Vector forward(const Mlp& net, const Vector& x);

ActivationPattern activation_pattern(const Mlp& net, const Vector& x);

/// Masked composition: zeroes the rows of each ReLU layer's weights and bias
/// whose units the pattern marks inactive, then composes all layers into a
/// single affine map. The pattern need not be realizable by any input.
AffineMap compose_affine(const Mlp& net, const ActivationPattern& pattern);

/// compose_affine at the pattern induced by x; agrees with forward(net, x)
/// up to roundoff.
AffineMap local_affine(const Mlp& net, const Vector& x);

/// One inequality per ReLU unit. Each unit's preactivation, composed through
/// masked earlier layers, is an affine g(z) = u.z + v of the raw input; an
/// inactive unit contributes u.z <= -v, an active one -u.z <= v.
Polytope region_inequalities_for_pattern(const Mlp& net, const ActivationPattern& pattern);

/// region_inequalities_for_pattern at the pattern of x; the result always
/// contains x.
Polytope region_inequalities(const Mlp& net, const Vector& x);

/// Row j of local_affine(net, x).w reshaped to an image.
Matrix restricted_gradient_image(const Mlp& net, const Vector& x, std::size_t j,
                                 std::size_t img_rows, std::size_t img_cols);
/// Square-image overload; input_dim must be a perfect square.
Matrix restricted_gradient_image(const Mlp& net, const Vector& x, std::size_t j);

/// Classification label for a score vector: argmax (lowest index on ties)
/// when there are several outputs, sign-based (score > 0 -> 1) for a single
/// output.
std::size_t label_of_scores(const Vector& scores);

/// Flattens a pattern to a bit key, unit bits in (layer, unit) order.
/// Requires the total unit count to be <= 64.
std::uint64_t pattern_key(const ActivationPattern& pattern);

} // namespace facets
