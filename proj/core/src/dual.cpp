#include "facets/dual.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

#include "facets/error.hpp"
#include "facets/rng.hpp"

namespace facets {

namespace {

// Facet rows of every output at one sample: the local affine map's rows with
// the bias appended.
void facet_rows_at(const Mlp& net, const Vector& x, Matrix& out) {
    const AffineMap map = local_affine(net, x);
    const std::size_t d = net.input_dim(), o = net.output_dim();
    for (std::size_t j = 0; j < o; ++j) {
        auto src = map.w.row(j);
        auto dst = out.row(j);
        std::copy(src.begin(), src.end(), dst.begin());
        dst[d] = map.b[j];
    }
}

} // namespace

CMatrix build_c_matrix(const Mlp& net, const Matrix& samples, std::size_t j) {
    check(j < net.output_dim(), "build_c_matrix: output index out of range");
    check(samples.cols() == net.input_dim(), "build_c_matrix: sample dim mismatch");
    const std::size_t p = samples.rows(), d = net.input_dim();
    CMatrix c;
    c.output_index = j;
    c.rows = Matrix(p, d + 1);
    c.sample_ids.resize(p);
    Matrix rows(net.output_dim(), d + 1);
    for (std::size_t i = 0; i < p; ++i) {
        Vector x(samples.row(i).begin(), samples.row(i).end());
        facet_rows_at(net, x, rows);
        std::copy(rows.row(j).begin(), rows.row(j).end(), c.rows.row(i).begin());
        c.sample_ids[i] = i;
    }
    return c;
}

std::vector<CMatrix> build_c_matrices(const Mlp& net, const Matrix& samples,
                                      std::size_t threads) {
    check(samples.cols() == net.input_dim(), "build_c_matrices: sample dim mismatch");
    const std::size_t p = samples.rows(), d = net.input_dim(), o = net.output_dim();
    std::vector<CMatrix> cs(o);
    for (std::size_t j = 0; j < o; ++j) {
        cs[j].output_index = j;
        cs[j].rows = Matrix(p, d + 1);
        cs[j].sample_ids.resize(p);
        std::iota(cs[j].sample_ids.begin(), cs[j].sample_ids.end(), std::size_t{0});
    }

    auto work = [&](std::size_t i, Matrix& rows) {
        Vector x(samples.row(i).begin(), samples.row(i).end());
        facet_rows_at(net, x, rows);
        for (std::size_t j = 0; j < o; ++j)
            std::copy(rows.row(j).begin(), rows.row(j).end(), cs[j].rows.row(i).begin());
    };

    if (threads <= 1 || p < 2 * threads) {
        Matrix rows(o, d + 1);
        for (std::size_t i = 0; i < p; ++i) work(i, rows);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                Matrix rows(o, d + 1);
                for (std::size_t i = next.fetch_add(1); i < p; i = next.fetch_add(1))
                    work(i, rows);
            });
        for (auto& th : pool) th.join();
    }
    return cs;
}

std::vector<DualPoint> dual_points(const CMatrix& c) {
    std::vector<DualPoint> out;
    std::map<std::vector<double>, std::size_t> seen; // value -> index in out
    for (std::size_t i = 0; i < c.rows.rows(); ++i) {
        std::vector<double> row(c.rows.row(i).begin(), c.rows.row(i).end());
        auto [it, fresh] = seen.emplace(row, out.size());
        if (fresh)
            out.push_back(DualPoint{std::move(row), 1});
        else
            ++out[it->second].multiplicity;
    }
    return out;
}

namespace {

// Thin orthonormal basis of the span of the centered points via pivoted QR
// of the transposed data. Lloyd's algorithm runs in these coordinates when
// the cloud has low affine rank (distances and centroids are preserved
// exactly); facet rows of narrow networks live in such a subspace.
struct Projection {
    bool active = false;
    Vector mean;   // d
    Matrix basis;  // r x d, orthonormal rows
};

Projection make_projection(const Matrix& points) {
    const std::size_t p = points.rows(), d = points.cols();
    Projection proj;
    if (p < 3 || d < 8) return proj;

    proj.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        auto row = points.row(i);
        for (std::size_t j = 0; j < d; ++j) proj.mean[j] += row[j];
    }
    for (double& v : proj.mean) v /= double(p);

    // Column-pivoted Gram-Schmidt on centered points, capped at d basis rows.
    const double tol_scale = 1e-12;
    std::vector<Vector> basis;
    std::vector<double> norms(p);
    std::vector<Vector> resid(p);
    double max0 = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        resid[i].assign(points.row(i).begin(), points.row(i).end());
        for (std::size_t j = 0; j < d; ++j) resid[i][j] -= proj.mean[j];
        norms[i] = std::sqrt(dot(resid[i], resid[i]));
        max0 = std::max(max0, norms[i]);
    }
    if (max0 == 0.0) return proj;
    while (basis.size() < d) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < p; ++i)
            if (norms[i] > norms[best]) best = i;
        if (norms[best] <= tol_scale * max0 * std::sqrt(double(d))) break;
        Vector q = resid[best];
        const double nq = std::sqrt(dot(q, q));
        if (nq <= tol_scale * max0) break;
        for (double& v : q) v /= nq;
        for (std::size_t i = 0; i < p; ++i) {
            if (norms[i] == 0.0) continue;
            const double proj_i = dot(resid[i], q);
            for (std::size_t j = 0; j < d; ++j) resid[i][j] -= proj_i * q[j];
            norms[i] = std::sqrt(dot(resid[i], resid[i]));
        }
        basis.push_back(std::move(q));
        if (basis.size() >= std::min(p, d)) break;
    }
    const std::size_t r = basis.size();
    if (r == 0 || r * 4 > d * 3) return proj; // not worth projecting
    proj.basis = Matrix(r, d);
    for (std::size_t i = 0; i < r; ++i)
        std::copy(basis[i].begin(), basis[i].end(), proj.basis.row(i).begin());
    proj.active = true;
    return proj;
}

Matrix project_points(const Projection& proj, const Matrix& points) {
    Matrix centered = points;
    for (std::size_t i = 0; i < centered.rows(); ++i) {
        auto row = centered.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] -= proj.mean[j];
    }
    return matmul_nt(centered, proj.basis); // p x r
}

Matrix unproject_centers(const Projection& proj, const Matrix& centers) {
    Matrix out = matmul(centers, proj.basis); // k x d
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += proj.mean[j];
    }
    return out;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a[i] - b[i];
        s += e * e;
    }
    return s;
}

// Assignment step: nearest center per point (lowest index on ties).
// Returns total inertia.
double assign_points(const Matrix& pts, const Matrix& centers,
                     std::vector<std::size_t>& assign) {
    const std::size_t p = pts.rows(), k = centers.rows();
    assign.resize(p);
    double inertia = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        auto row = pts.row(i);
        double best = sq_dist(row, centers.row(0));
        std::size_t bj = 0;
        for (std::size_t j = 1; j < k; ++j) {
            const double dd = sq_dist(row, centers.row(j));
            if (dd < best) {
                best = dd;
                bj = j;
            }
        }
        assign[i] = bj;
        inertia += best;
    }
    return inertia;
}

KMeansModel lloyd(const Matrix& pts, std::size_t k, std::uint64_t seed) {
    const std::size_t p = pts.rows(), d = pts.cols();
    Rng rng(seed);

    // Distance-weighted (k-means++ style) seeding.
    Matrix centers(k, d);
    std::vector<double> mind(p, 0.0);
    {
        const std::size_t first = static_cast<std::size_t>(rng.below(p));
        std::copy(pts.row(first).begin(), pts.row(first).end(), centers.row(0).begin());
        for (std::size_t i = 0; i < p; ++i) mind[i] = sq_dist(pts.row(i), centers.row(0));
        for (std::size_t c = 1; c < k; ++c) {
            double total = std::accumulate(mind.begin(), mind.end(), 0.0);
            std::size_t chosen;
            if (total <= 0.0) {
                chosen = static_cast<std::size_t>(rng.below(p));
            } else {
                double target = rng.uniform() * total, acc = 0.0;
                chosen = p;
                for (std::size_t i = 0; i < p; ++i) {
                    if (mind[i] <= 0.0) continue;
                    acc += mind[i];
                    if (chosen == p) chosen = i; // fallback: first positive
                    if (acc >= target) {
                        chosen = i;
                        break;
                    }
                }
            }
            std::copy(pts.row(chosen).begin(), pts.row(chosen).end(), centers.row(c).begin());
            for (std::size_t i = 0; i < p; ++i)
                mind[i] = std::min(mind[i], sq_dist(pts.row(i), centers.row(c)));
        }
    }

    std::vector<std::size_t> assign, prev;
    double inertia = 0.0;
    for (std::size_t iter = 0; iter < 300; ++iter) {
        inertia = assign_points(pts, centers, assign);
        if (assign == prev) break;
        prev = assign;

        Matrix sums(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < p; ++i) {
            auto row = pts.row(i);
            auto srow = sums.row(assign[i]);
            for (std::size_t j = 0; j < d; ++j) srow[j] += row[j];
            ++counts[assign[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed to the point farthest from its center.
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < p; ++i) {
                    const double dd = sq_dist(pts.row(i), centers.row(assign[i]));
                    if (dd > fd) {
                        fd = dd;
                        far = i;
                    }
                }
                std::copy(pts.row(far).begin(), pts.row(far).end(), centers.row(c).begin());
                continue;
            }
            auto srow = sums.row(c);
            auto crow = centers.row(c);
            for (std::size_t j = 0; j < d; ++j) crow[j] = srow[j] / double(counts[c]);
        }
    }
    inertia = assign_points(pts, centers, assign);

    KMeansModel model;
    model.k = k;
    model.centers = std::move(centers);
    model.inertia = inertia;
    model.seed = seed;
    return model;
}

} // namespace

KMeansModel kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed) {
    check(k >= 1, "kmeans_fit: k must be >= 1");
    check(k <= points.rows(), "kmeans_fit: k exceeds number of points");

    const Projection proj = make_projection(points);
    if (!proj.active) return lloyd(points, k, seed);

    KMeansModel model = lloyd(project_points(proj, points), k, seed);
    model.centers = unproject_centers(proj, model.centers);
    return model;
}

KMeansModel kmeans_fit_best(const Matrix& points, std::size_t k, std::uint64_t seed,
                            std::size_t restarts) {
    check(restarts >= 1, "kmeans_fit_best: restarts must be >= 1");
    const Projection proj = make_projection(points);
    const Matrix pts = proj.active ? project_points(proj, points) : Matrix();
    const Matrix& work = proj.active ? pts : points;

    KMeansModel best;
    for (std::size_t r = 0; r < restarts; ++r) {
        KMeansModel m = lloyd(work, k, derive_seed(seed, 0x200 + r));
        if (r == 0 || m.inertia < best.inertia) best = std::move(m);
    }
    best.seed = seed;
    if (proj.active) best.centers = unproject_centers(proj, best.centers);
    return best;
}

KMeansModel saturated_model(const Matrix& points) {
    check(points.rows() >= 1, "saturated_model: no points");
    std::map<std::vector<double>, std::size_t> seen;
    std::vector<std::vector<double>> distinct;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        std::vector<double> row(points.row(i).begin(), points.row(i).end());
        if (seen.emplace(row, distinct.size()).second) distinct.push_back(std::move(row));
    }
    KMeansModel m;
    m.k = distinct.size();
    m.centers = Matrix(distinct.size(), points.cols());
    for (std::size_t i = 0; i < distinct.size(); ++i)
        std::copy(distinct[i].begin(), distinct[i].end(), m.centers.row(i).begin());
    m.inertia = 0.0;
    return m;
}

namespace {

std::size_t nearest_center(const Matrix& centers, std::span<const double> row) {
    std::size_t best = 0;
    double bd = sq_dist(row, centers.row(0));
    for (std::size_t c = 1; c < centers.rows(); ++c) {
        const double dd = sq_dist(row, centers.row(c));
        if (dd < bd) {
            bd = dd;
            best = c;
        }
    }
    return best;
}

double score_row_at(std::span<const double> row, std::span<const double> x) {
    double s = row[row.size() - 1]; // bias
    for (std::size_t j = 0; j < x.size(); ++j) s += row[j] * x[j];
    return s;
}

} // namespace

std::size_t cluster_classify(const std::vector<KMeansModel>& models, const Mlp& net,
                             const Vector& x) {
    check(models.size() == net.output_dim(), "cluster_classify: one model per output");
    Matrix rows(net.output_dim(), net.input_dim() + 1);
    facet_rows_at(net, x, rows);
    Vector scores(net.output_dim());
    for (std::size_t j = 0; j < models.size(); ++j) {
        const std::size_t c = nearest_center(models[j].centers, rows.row(j));
        scores[j] = score_row_at(models[j].centers.row(c), x);
    }
    return label_of_scores(scores);
}

std::vector<std::size_t> cluster_classify_rows(const std::vector<KMeansModel>& models,
                                               const std::vector<CMatrix>& test_c,
                                               const Matrix& inputs) {
    check(models.size() == test_c.size(), "cluster_classify_rows: model/c count mismatch");
    const std::size_t n = inputs.rows();
    std::vector<std::size_t> labels(n);
    Vector scores(models.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto x = inputs.row(i);
        for (std::size_t j = 0; j < models.size(); ++j) {
            auto row = test_c[j].rows.row(i);
            const std::size_t c = nearest_center(models[j].centers, row);
            scores[j] = score_row_at(models[j].centers.row(c), x);
        }
        labels[i] = label_of_scores(scores);
    }
    return labels;
}

CrossMap fit_crossmap(const CMatrix& c1, const CMatrix& c2) {
    check(c1.rows.rows() == c2.rows.rows() && c1.rows.cols() == c2.rows.cols(),
          "fit_crossmap: shape mismatch");
    check(c1.sample_ids == c2.sample_ids, "fit_crossmap: sample order mismatch");
    CrossMap map;
    map.output_index = c1.output_index;
    map.m = least_squares(c1.rows, c2.rows);
    return map;
}

std::size_t crossmap_classify(const Mlp& net1, const std::vector<CrossMap>& maps,
                              const Vector& x) {
    check(maps.size() == net1.output_dim(), "crossmap_classify: one map per output");
    Matrix rows(net1.output_dim(), net1.input_dim() + 1);
    facet_rows_at(net1, x, rows);
    Vector scores(maps.size());
    Vector mapped(net1.input_dim() + 1);
    for (std::size_t j = 0; j < maps.size(); ++j) {
        auto row = rows.row(j);
        const Matrix& m = maps[j].m;
        for (std::size_t c = 0; c < mapped.size(); ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < mapped.size(); ++r) s += row[r] * m(r, c);
            mapped[c] = s;
        }
        scores[j] = score_row_at(mapped, x);
    }
    return label_of_scores(scores);
}

std::vector<std::size_t> crossmap_classify_rows(const std::vector<CrossMap>& maps,
                                                const std::vector<CMatrix>& c1,
                                                const Matrix& inputs) {
    check(maps.size() == c1.size(), "crossmap_classify_rows: map/c count mismatch");
    const std::size_t n = inputs.rows();
    std::vector<std::size_t> labels(n);

    // Map all rows per output with one GEMM, then score.
    std::vector<Matrix> mapped(maps.size());
    for (std::size_t j = 0; j < maps.size(); ++j)
        mapped[j] = matmul(c1[j].rows, maps[j].m);

    Vector scores(maps.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto x = inputs.row(i);
        for (std::size_t j = 0; j < maps.size(); ++j)
            scores[j] = score_row_at(mapped[j].row(i), x);
        labels[i] = label_of_scores(scores);
    }
    return labels;
}

namespace {

void write_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

} // namespace

void write_cmatrix(std::ostream& os, const CMatrix& c) {
    const std::size_t d = c.rows.cols() == 0 ? 0 : c.rows.cols() - 1;
    os << "facets-cmatrix 1\n";
    os << "j " << c.output_index << " p " << c.rows.rows() << " d " << d << "\n";
    for (std::size_t i = 0; i < c.rows.rows(); ++i) {
        os << c.sample_ids[i];
        auto row = c.rows.row(i);
        for (double v : row) {
            os << ' ';
            write_double(os, v);
        }
        os << '\n';
    }
}

CMatrix read_cmatrix(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "facets-cmatrix" || version != 1) throw DataError("cmatrix: bad header");
    std::string kj, kp, kd;
    std::size_t j = 0, p = 0, d = 0;
    is >> kj >> j >> kp >> p >> kd >> d;
    if (kj != "j" || kp != "p" || kd != "d") throw DataError("cmatrix: bad header line");
    CMatrix c;
    c.output_index = j;
    c.rows = Matrix(p, d + 1);
    c.sample_ids.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        is >> c.sample_ids[i];
        for (std::size_t col = 0; col <= d; ++col) is >> c.rows(i, col);
    }
    if (!is) throw DataError("cmatrix: truncated file");
    return c;
}

} // namespace facets
