#include "facets/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "facets/error.hpp"

namespace facets {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values)
        check(std::isfinite(v), std::string(what) + ": non-finite entry");
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    check(data_.size() == rows_ * cols_, "Matrix: data length != rows*cols");
    require_finite(data_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        check(r.size() == cols_, "Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    check(a.cols() == b.rows(), "matmul: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    const double* bd = b.data().data();
    double* cd = c.data().data();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ar = a.data().data() + i * a.cols();
        double* cr = cd + i * n;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ar[k];
            if (aik == 0.0) continue;
            const double* br = bd + k * n;
            for (std::size_t j = 0; j < n; ++j) cr[j] += aik * br[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check(a.cols() == b.cols(), "matmul_nt: inner dimension mismatch");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ar = a.row(i);
        auto cr = c.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) cr[j] = dot(ar, b.row(j));
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check(a.rows() == b.rows(), "matmul_tn: inner dimension mismatch");
    Matrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    double* cd = c.data().data();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ar = a.data().data() + k * a.cols();
        const double* br = b.data().data() + k * n;
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ar[i];
            if (aki == 0.0) continue;
            double* cr = cd + i * n;
            for (std::size_t j = 0; j < n; ++j) cr[j] += aki * br[j];
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Vector matvec(const Matrix& a, const Vector& x) {
    check(a.cols() == x.size(), "matvec: dimension mismatch");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Vector affine_apply(const Matrix& w, const Vector& b, const Vector& x) {
    check(w.cols() == x.size(), "affine_apply: w.cols != len(x)");
    check(w.rows() == b.size(), "affine_apply: w.rows != len(b)");
    // Routed through matmul so that W*x + b agrees with the matrix product
    // bit for bit (contraction choices differ between compiled loops).
    Matrix wx = matmul(w, Matrix(x.size(), 1, std::vector<double>(x)));
    Vector y(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) y[i] = wx(i, 0) + b[i];
    return y;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

namespace {

// Column-major scratch view used by the least-squares factorization.
struct ColMat {
    std::size_t m = 0, n = 0;
    std::vector<double> d; // column j at d[j*m]

    ColMat(std::size_t m_, std::size_t n_) : m(m_), n(n_), d(m * n, 0.0) {}
    explicit ColMat(const Matrix& a) : ColMat(a.rows(), a.cols()) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) d[j * m + i] = a(i, j);
    }
    double* col(std::size_t j) { return d.data() + j * m; }
};

double norm2(const double* v, std::size_t len) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

// Builds the Householder reflector for x (length len), overwriting x with the
// normalized v (v[0] == 1 implicit, x[0] gets the resulting diagonal value).
// Returns tau; tau == 0 means the column was already zero below the pivot.
double make_householder(double* x, std::size_t len, double& diag) {
    double nrm = norm2(x, len);
    if (nrm == 0.0) {
        diag = 0.0;
        return 0.0;
    }
    double alpha = x[0];
    double beta = -std::copysign(nrm, alpha);
    double tau = (beta - alpha) / beta;
    double scale = 1.0 / (alpha - beta);
    for (std::size_t i = 1; i < len; ++i) x[i] *= scale;
    diag = beta;
    return tau;
}

// Applies I - tau*v*v^T to the column c (length len), v[0] implicit 1.
void apply_householder(const double* v, double tau, double* c, std::size_t len) {
    if (tau == 0.0) return;
    double w = c[0];
    for (std::size_t i = 1; i < len; ++i) w += v[i] * c[i];
    w *= tau;
    c[0] -= w;
    for (std::size_t i = 1; i < len; ++i) c[i] -= w * v[i];
}

} // namespace

Matrix least_squares(const Matrix& a, const Matrix& b) {
    check(a.rows() == b.rows(), "least_squares: a.rows != b.rows");
    const std::size_t m = a.rows(), n = a.cols(), q = b.cols();
    if (n == 0 || q == 0) return Matrix(n, q);

    ColMat A(a), B(b);
    std::vector<std::size_t> piv(n);
    std::iota(piv.begin(), piv.end(), std::size_t{0});
    std::vector<double> tau(std::min(m, n), 0.0);
    std::vector<double> cnorm(n), cnorm0(n);
    for (std::size_t j = 0; j < n; ++j) cnorm[j] = cnorm0[j] = norm2(A.col(j), m);

    const double maxnorm = *std::max_element(cnorm.begin(), cnorm.end());
    const double tol = 1e-10 * maxnorm;

    std::size_t r = 0;
    const std::size_t kmax = std::min(m, n);
    for (std::size_t k = 0; k < kmax; ++k) {
        std::size_t jmax = k;
        for (std::size_t j = k + 1; j < n; ++j)
            if (cnorm[j] > cnorm[jmax]) jmax = j;
        if (cnorm[jmax] <= tol) break;
        if (jmax != k) {
            std::swap_ranges(A.col(k), A.col(k) + m, A.col(jmax));
            std::swap(piv[k], piv[jmax]);
            std::swap(cnorm[k], cnorm[jmax]);
            std::swap(cnorm0[k], cnorm0[jmax]);
        }

        double* ck = A.col(k) + k;
        double diag;
        tau[k] = make_householder(ck, m - k, diag);
        ck[0] = 1.0;
        for (std::size_t j = k + 1; j < n; ++j)
            apply_householder(ck, tau[k], A.col(j) + k, m - k);
        for (std::size_t j = 0; j < q; ++j)
            apply_householder(ck, tau[k], B.col(j) + k, m - k);
        ck[0] = diag;

        // Downdate remaining column norms; recompute on cancellation.
        for (std::size_t j = k + 1; j < n; ++j) {
            double t = A.col(j)[k];
            double upd = cnorm[j] * cnorm[j] - t * t;
            if (upd < 1e-12 * cnorm0[j] * cnorm0[j]) {
                cnorm[j] = norm2(A.col(j) + k + 1, m - k - 1);
                cnorm0[j] = cnorm[j];
            } else {
                cnorm[j] = std::sqrt(upd);
            }
        }
        ++r;
    }

    Matrix x(n, q);
    if (r == 0) return x;

    // Right-hand sides reduced by Q^T, truncated to the leading r rows.
    // Solve with R
    if (r == n) {
        // Back substitution on the n x n upper triangle.
        for (std::size_t col = 0; col < q; ++col) {
            double* bc = B.col(col);
            std::vector<double> y(n);
            for (std::size_t ii = n; ii-- > 0;) {
                double s = bc[ii];
                for (std::size_t jj = ii + 1; jj < n; ++jj) s -= A.col(jj)[ii] * y[jj];
                y[ii] = s / A.col(ii)[ii];
            }
            for (std::size_t ii = 0; ii < n; ++ii) x(piv[ii], col) = y[ii];
        }
        return x;
    }

    // Complete orthogonal factorization for the rank-deficient case:
    // QR of R^T (n x r) gives R = [U^T 0] Z^T with U upper triangular.
    ColMat Rt(n, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < n; ++j) Rt.d[i * n + j] = A.col(j)[i];

    std::vector<double> tau2(r, 0.0);
    for (std::size_t k = 0; k < r; ++k) {
        double* ck = Rt.col(k) + k;
        double diag;
        tau2[k] = make_householder(ck, n - k, diag);
        ck[0] = 1.0;
        for (std::size_t j = k + 1; j < r; ++j)
            apply_householder(ck, tau2[k], Rt.col(j) + k, n - k);
        ck[0] = diag;
    }

    for (std::size_t col = 0; col < q; ++col) {
        const double* bc = B.col(col);
        // Forward substitution on U^T (lower triangular), U(i,j) = Rt.col(j)[i].
        std::vector<double> y(n, 0.0);
        for (std::size_t ii = 0; ii < r; ++ii) {
            double s = bc[ii];
            for (std::size_t jj = 0; jj < ii; ++jj) s -= Rt.col(ii)[jj] * y[jj];
            y[ii] = s / Rt.col(ii)[ii];
        }
        // y = Z * [w; 0]: apply reflectors in reverse order.
        for (std::size_t k = r; k-- > 0;) {
            double* vk = Rt.col(k) + k;
            double head = vk[0];
            vk[0] = 1.0;
            apply_householder(vk, tau2[k], y.data() + k, n - k);
            vk[0] = head;
        }
        for (std::size_t ii = 0; ii < n; ++ii) x(piv[ii], col) = y[ii];
    }
    return x;
}

} // namespace facets
