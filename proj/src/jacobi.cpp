#include "dynoclust/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dynoclust {

namespace {

double off_diag_norm(const Mat& a) {
    const int n = static_cast<int>(a.rows());
    double s = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition sym_eigendecomp(const Mat& g) {
    const int n = static_cast<int>(g.rows());
    if (g.cols() != n) throw ConfigError("eigendecomposition requires a square matrix");

    Mat a = g;
    Mat v = Mat::Identity(n, n);
    const double tol = 1e-10 * g.norm();
    // Any entry at or below skip_tol leaves the off-diagonal norm within tol
    // even if every entry sits exactly there, so skipping it is safe.
    const double skip_tol = n > 1 ? tol / std::sqrt(2.0) / n : 0.0;

    constexpr int kMaxSweeps = 100;
    bool converged = (n <= 1) || off_diag_norm(a) <= tol;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= skip_tol) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;  // avoid overflow in theta^2
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                double* colp = a.data() + static_cast<std::ptrdiff_t>(p) * n;
                double* colq = a.data() + static_cast<std::ptrdiff_t>(q) * n;
                for (int j = 0; j < n; ++j) {
                    const double ajp = colp[j];
                    const double ajq = colq[j];
                    colp[j] = c * ajp - s * ajq;
                    colq[j] = s * ajp + c * ajq;
                }
                for (int j = 0; j < n; ++j) {
                    const double apj = a(p, j);
                    const double aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                // Symmetrize the rotated 2x2 block explicitly.
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                double* vp = v.data() + static_cast<std::ptrdiff_t>(p) * n;
                double* vq = v.data() + static_cast<std::ptrdiff_t>(q) * n;
                for (int j = 0; j < n; ++j) {
                    const double vjp = vp[j];
                    const double vjq = vq[j];
                    vp[j] = c * vjp - s * vjq;
                    vq[j] = s * vjp + c * vjq;
                }
            }
        }
        converged = off_diag_norm(a) <= tol;
    }
    if (!converged)
        throw std::runtime_error("jacobi eigensolver did not converge: residual " +
                                 std::to_string(off_diag_norm(a)) + " exceeds " +
                                 std::to_string(tol));

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
        out.values(i) = a(idx[i], idx[i]);
        out.vectors.col(i) = v.col(idx[i]);
    }
    return out;
}

}  // namespace dynoclust
