#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "facets/network.hpp"
#include "facets/regions.hpp"

namespace facets {

/// Training/evaluation data. Toy problems carry +-1 regression targets and
/// the matching 0/1 labels; classification sets may carry labels only.
struct Dataset {
    Matrix inputs;               // n x d
    Matrix targets;              // n x o, may be empty
    std::vector<std::uint8_t> labels; // may be empty
    std::string name;

    std::size_t size() const { return inputs.rows(); }
    BBox bounding_box(double inflate = 0.0) const;
};

enum class Loss { mse, cross_entropy };

struct TrainConfig {
    double lr = 0.01;
    double momentum = 0.0;
    double weight_decay = 0.0;
    std::size_t batch_size = 1;
    std::size_t epochs = 0;
    Loss loss = Loss::mse;
    std::uint64_t seed = 0;
    std::size_t snapshot_every = 0; // 0: snapshot only init and final
};

struct TrainRun {
    std::vector<std::pair<std::size_t, Mlp>> snapshots; // (epoch, weights)
    Mlp final_net;
    std::vector<double> loss_curve; // [0] = before training, then one per epoch
};

struct CircleParams {
    double inner_radius = 0.5;
    double annulus_inner = 0.75;
    double annulus_outer = 1.0;
    std::size_t per_class = 250;
    double center_scale = 1.0; // group spacing for the grid-of-circles task
};

/// The 4-point XOR table with +-1 targets.
Dataset make_xor4();
/// Inner disk (class +) vs. surrounding annulus (class -), seeded sampling.
Dataset make_circle_annulus(const CircleParams& p, std::uint64_t seed);
/// Four disk/annulus groups at (+-s, +-s); disk class follows the XOR sign
/// of the quadrant, the annulus gets the opposite class.
Dataset make_circles_grid(const CircleParams& p, std::uint64_t seed);
/// Uniform per_side x per_side grid over the box, no targets.
Dataset make_grid2d(const BBox& box, std::size_t per_side);

/// Layer widths [d, h1, ..., o]; ReLU after every layer except the last.
/// Weights and biases uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Mlp init_net(const std::vector<std::size_t>& widths, std::uint64_t seed);

/// Minibatch SGD: v <- momentum*v - lr*(grad + weight_decay*theta),
/// theta <- theta + v. Deterministic given the seed; minibatches come from a
/// seeded shuffle each epoch; snapshots are deep copies.
TrainRun train(const Mlp& net, const Dataset& data, const TrainConfig& cfg);

double dataset_loss(const Mlp& net, const Dataset& data, Loss loss);

/// Fraction of samples whose label_of_scores(forward(x)) matches the data.
double classification_accuracy(const Mlp& net, const Dataset& data);

/// Data label for sample i (from labels, or the sign of a +-1 target).
std::size_t dataset_label(const Dataset& data, std::size_t i);

} // namespace facets
