#include "dynoclust/sparse_center.hpp"

#include <algorithm>
#include <cmath>

namespace dynoclust {

std::vector<SupportPoint> exact_center_coeffs(const std::vector<ClusterHistoryStep>& history) {
    if (history.empty()) throw ConfigError("cluster has no active history to expand");
    const int steps = static_cast<int>(history.size());
    std::vector<double> step_coeff(steps);
    double tail = 1.0;  // prod over steps after tau of gamma/(gamma+n)
    for (int tau = steps - 1; tau >= 0; --tau) {
        const auto& h = history[tau];
        if (h.points.empty()) throw ConfigError("history steps must have assigned points");
        const double gn = h.gamma + static_cast<double>(h.points.size());
        step_coeff[tau] = tail / gn;
        tail *= h.gamma / gn;
    }
    std::vector<SupportPoint> out;
    for (int tau = 0; tau < steps; ++tau)
        for (const Vec& y : history[tau].points) out.push_back({step_coeff[tau], y});
    return out;
}

std::vector<SupportPoint> dense_center_update(const std::vector<SupportPoint>& support,
                                              double gamma,
                                              const std::vector<Vec>& assigned) {
    const double gn = gamma + static_cast<double>(assigned.size());
    std::vector<SupportPoint> out;
    out.reserve(support.size() + assigned.size());
    for (const SupportPoint& s : support) out.push_back({s.coeff * gamma / gn, s.point});
    for (const Vec& y : assigned) out.push_back({1.0 / gn, y});
    return out;
}

SparseReduceResult sparse_reduce(const std::vector<SupportPoint>& dense,
                                 int budget,
                                 const KernelSpec& kernel,
                                 const EuclideanMst* mst) {
    SparseReduceResult res;
    const int n = static_cast<int>(dense.size());
    if (n <= budget) {
        res.support = dense;  // budget not binding: exact
        return res;
    }

    Mat w(n, n);
    Vec a(n);
    for (int i = 0; i < n; ++i) {
        a(i) = dense[i].coeff;
        w(i, i) = kernel_eval(kernel, dense[i].point, dense[i].point, mst);
        for (int j = i + 1; j < n; ++j) {
            const double v = kernel_eval(kernel, dense[i].point, dense[j].point, mst);
            w(i, j) = v;
            w(j, i) = v;
        }
    }

    // Greedy selection with rank-one deflation: after projecting out the
    // chosen columns, the residual reduction from adding column j is
    // r_j^2 / W_jj for the deflated quantities r = W a, W.
    Vec r = w * a;
    Mat wd = w;
    std::vector<int> chosen;
    std::vector<bool> used(n, false);
    for (int pick = 0; pick < budget; ++pick) {
        int best = -1;
        double best_red = 0.0;
        for (int j = 0; j < n; ++j) {
            if (used[j] || wd(j, j) <= 1e-14) continue;
            const double red = r(j) * r(j) / wd(j, j);
            if (best < 0 || red > best_red) {
                best = j;
                best_red = red;
            }
        }
        if (best < 0) break;  // nothing left with usable energy
        used[best] = true;
        chosen.push_back(best);
        const Vec col = wd.col(best);
        const double piv = wd(best, best);
        r -= col * (r(best) / piv);
        wd -= (col * col.transpose()) / piv;
    }
    std::sort(chosen.begin(), chosen.end());

    const int m = static_cast<int>(chosen.size());
    Mat wss(m, m);
    Vec b(m);
    Vec wa = w * a;
    for (int i = 0; i < m; ++i) {
        b(i) = wa(chosen[i]);
        for (int j = 0; j < m; ++j) wss(i, j) = w(chosen[i], chosen[j]);
    }
    Vec x = wss.ldlt().solve(b);
    if (!x.allFinite() || (wss * x - b).norm() > 1e-8 * (b.norm() + 1.0)) {
        res.regularized = true;
        Mat ridge = wss + 1e-10 * Mat::Identity(m, m);
        x = ridge.ldlt().solve(b);
    }

    Vec full = Vec::Zero(n);
    for (int i = 0; i < m; ++i) full(chosen[i]) = x(i);
    const Vec diff = a - full;
    res.achieved_eps = std::sqrt(std::max(0.0, diff.dot(w * diff)));
    for (int i = 0; i < m; ++i) res.support.push_back({x(i), dense[chosen[i]].point});
    return res;
}

namespace {

// All-pairs path-excess tables make mst_rbf grams O(N^2) instead of O(N^3):
// one tree traversal per batch point, one per carried support point.
GramTables build_gram_tables_mst(const std::vector<Vec>& points,
                                 const std::vector<SparseCenter>& centers,
                                 const KernelSpec& kernel,
                                 const EuclideanMst& mst) {
    const int n = static_cast<int>(points.size());
    const int k = static_cast<int>(centers.size());
    const double om = kernel.omega;
    const double denom = 2.0 * om * om;
    auto krn = [&](double d) { return std::exp(-d * d / denom); };

    GramTables g;
    g.k_yy.resize(n, n);
    g.k_yphi.resize(n, k);
    g.k_phiphi_diag.resize(k);

    for (int i = 0; i < n; ++i) {
        const std::vector<double> ex = mst.excess_from_node(i, om);
        g.k_yy(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) g.k_yy(i, j) = krn(ex[j]);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.k_yy(j, i) = g.k_yy(i, j);

    for (int c = 0; c < k; ++c) {
        const auto& sup = centers[c].support;
        const int m = static_cast<int>(sup.size());
        std::vector<int> attach_node(m);
        std::vector<double> attach_excess(m);
        std::vector<std::vector<double>> ex(m);
        for (int p = 0; p < m; ++p) {
            attach_node[p] = mst.nearest_node(sup[p].point);
            const double len = (sup[p].point - mst.nodes()[attach_node[p]]).norm();
            attach_excess[p] = len > om ? len : 0.0;
            ex[p] = mst.excess_from_node(attach_node[p], om);
        }
        auto same = [](const Vec& a, const Vec& b) { return (a - b).squaredNorm() == 0.0; };
        for (int i = 0; i < n; ++i) {
            double v = 0.0;
            for (int p = 0; p < m; ++p) {
                const double d = same(points[i], sup[p].point) ? 0.0 : attach_excess[p] + ex[p][i];
                v += sup[p].coeff * krn(d);
            }
            g.k_yphi(i, c) = v;
        }
        double self = 0.0;
        for (int p = 0; p < m; ++p) {
            self += sup[p].coeff * sup[p].coeff;  // krn(0) = 1
            for (int q = p + 1; q < m; ++q) {
                const double d = same(sup[p].point, sup[q].point)
                                     ? 0.0
                                     : attach_excess[p] + ex[p][attach_node[q]] + attach_excess[q];
                self += 2.0 * sup[p].coeff * sup[q].coeff * krn(d);
            }
        }
        if (self < 0.0) {
            // mst_rbf is not guaranteed PSD; clamp the self-similarity so
            // downstream costs stay meaningful.
            self = 0.0;
            g.clamped = true;
        }
        g.k_phiphi_diag(c) = self;
    }
    return g;
}

}  // namespace

GramTables build_gram_tables(const std::vector<Vec>& points,
                             const std::vector<SparseCenter>& centers,
                             const KernelSpec& kernel,
                             const EuclideanMst* mst) {
    if (kernel.kind == KernelKind::MstRbf) {
        if (mst == nullptr) throw ConfigError("mst_rbf kernel requires the batch MST context");
        return build_gram_tables_mst(points, centers, kernel, *mst);
    }

    const int n = static_cast<int>(points.size());
    const int k = static_cast<int>(centers.size());
    GramTables g;
    g.k_yy.resize(n, n);
    g.k_yphi.resize(n, k);
    g.k_phiphi_diag.resize(k);

    for (int i = 0; i < n; ++i) {
        g.k_yy(i, i) = kernel_eval(kernel, points[i], points[i], mst);
        for (int j = i + 1; j < n; ++j) {
            const double v = kernel_eval(kernel, points[i], points[j], mst);
            g.k_yy(i, j) = v;
            g.k_yy(j, i) = v;
        }
    }
    for (int c = 0; c < k; ++c) {
        const auto& sup = centers[c].support;
        for (int i = 0; i < n; ++i) {
            double v = 0.0;
            for (const SupportPoint& s : sup) v += s.coeff * kernel_eval(kernel, points[i], s.point, mst);
            g.k_yphi(i, c) = v;
        }
        double self = 0.0;
        for (std::size_t p = 0; p < sup.size(); ++p) {
            self += sup[p].coeff * sup[p].coeff *
                    kernel_eval(kernel, sup[p].point, sup[p].point, mst);
            for (std::size_t q = p + 1; q < sup.size(); ++q)
                self += 2.0 * sup[p].coeff * sup[q].coeff *
                        kernel_eval(kernel, sup[p].point, sup[q].point, mst);
        }
        if (self < 0.0) {
            self = 0.0;
            g.clamped = true;
        }
        g.k_phiphi_diag(c) = self;
    }
    return g;
}

}  // namespace dynoclust
