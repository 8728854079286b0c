#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "facets/network.hpp"

namespace facets {

/// Sampled facet rows for one output: row i is [gradient of output j at
/// sample i, bias term], a point in R^(d+1).
struct CMatrix {
    std::size_t output_index = 0;
    Matrix rows; // p x (d+1)
    std::vector<std::size_t> sample_ids;
};

struct KMeansModel {
    std::size_t k = 0;
    Matrix centers; // k x (d+1)
    double inertia = 0.0;
    std::uint64_t seed = 0;
};

/// Least-squares map sending one network's facet rows toward another's.
struct CrossMap {
    std::size_t output_index = 0;
    Matrix m; // (d+1) x (d+1)
};

CMatrix build_c_matrix(const Mlp& net, const Matrix& samples, std::size_t j);

/// All outputs in one pass (one local_affine per sample). threads <= 1 runs
/// sequentially; results are identical either way (per-sample work is pure
/// and written by index).
std::vector<CMatrix> build_c_matrices(const Mlp& net, const Matrix& samples,
                                      std::size_t threads = 1);

struct DualPoint {
    Vector coords;
    std::size_t multiplicity = 0;
};

/// Rows as points, deduplicated by exact equality, first-seen order.
std::vector<DualPoint> dual_points(const CMatrix& c);

/// Lloyd iterations from distance-weighted seeding; stops when assignments
/// are unchanged or after 300 iterations; empty clusters are reseeded to the
/// point farthest from its center. Deterministic given the seed.
KMeansModel kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed);

/// Best of `restarts` seeded runs by inertia (seeds derived from `seed`).
KMeansModel kmeans_fit_best(const Matrix& points, std::size_t k, std::uint64_t seed,
                            std::size_t restarts = 5);

/// Centers placed at the distinct rows of `points`, no Lloyd iterations.
KMeansModel saturated_model(const Matrix& points);

/// Snaps x's facet row for each output to the nearest center, scores the
/// centers at [x;1], and labels by argmax (sign for a single output).
std::size_t cluster_classify(const std::vector<KMeansModel>& models, const Mlp& net,
                             const Vector& x);

/// Batch form over precomputed facet rows (rows[i] of test_c[j] belongs to
/// inputs row i).
std::vector<std::size_t> cluster_classify_rows(const std::vector<KMeansModel>& models,
                                               const std::vector<CMatrix>& test_c,
                                               const Matrix& inputs);

/// M_j minimizing ||c1.rows * M - c2.rows||_F (minimum-norm on rank
/// deficiency). Requires matching sample order.
CrossMap fit_crossmap(const CMatrix& c1, const CMatrix& c2);

std::size_t crossmap_classify(const Mlp& net1, const std::vector<CrossMap>& maps,
                              const Vector& x);

std::vector<std::size_t> crossmap_classify_rows(const std::vector<CrossMap>& maps,
                                                const std::vector<CMatrix>& c1,
                                                const Matrix& inputs);

void write_cmatrix(std::ostream& os, const CMatrix& c);
CMatrix read_cmatrix(std::istream& is);

} // namespace facets
