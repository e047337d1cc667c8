#include "dynoclust/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynoclust {

KernelSpec KernelSpec::rbf(double omega) {
    if (!(omega > 0.0)) throw ConfigError("rbf kernel requires omega > 0");
    return {KernelKind::Rbf, omega};
}

KernelSpec KernelSpec::mst_rbf(double omega) {
    if (!(omega > 0.0)) throw ConfigError("mst_rbf kernel requires omega > 0");
    return {KernelKind::MstRbf, omega};
}

std::string KernelSpec::name() const {
    switch (kind) {
        case KernelKind::Linear: return "linear";
        case KernelKind::Rbf: return "rbf";
        case KernelKind::MstRbf: return "mst_rbf";
    }
    return "?";
}

EuclideanMst EuclideanMst::build(const std::vector<Vec>& points) {
    if (points.empty()) throw ConfigError("MST requires at least one point");
    const int n = static_cast<int>(points.size());
    EuclideanMst mst;
    mst.nodes_ = points;
    mst.parent_.assign(n, -1);
    mst.parent_len_.assign(n, 0.0);
    mst.depth_.assign(n, 0);

    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<int> best_from(n, 0);
    in_tree[0] = true;
    for (int j = 1; j < n; ++j) best[j] = (points[j] - points[0]).norm();

    for (int added = 1; added < n; ++added) {
        int pick = -1;
        double pick_len = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (!in_tree[j] && best[j] < pick_len) {
                pick = j;
                pick_len = best[j];
            }
        }
        in_tree[pick] = true;
        mst.parent_[pick] = best_from[pick];
        mst.parent_len_[pick] = pick_len;
        mst.depth_[pick] = mst.depth_[best_from[pick]] + 1;
        for (int j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            const double d = (points[j] - points[pick]).norm();
            if (d < best[j]) {
                best[j] = d;
                best_from[j] = pick;
            }
        }
    }
    mst.adj_.assign(n, {});
    for (int j = 1; j < n; ++j) {
        mst.adj_[j].emplace_back(mst.parent_[j], mst.parent_len_[j]);
        mst.adj_[mst.parent_[j]].emplace_back(j, mst.parent_len_[j]);
    }
    return mst;
}

std::vector<double> EuclideanMst::excess_from_node(int src, double omega) const {
    std::vector<double> out(size(), 0.0);
    std::vector<int> stack{src};
    std::vector<bool> seen(size(), false);
    seen[src] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& [v, len] : adj_[u]) {
            if (seen[v]) continue;
            seen[v] = true;
            out[v] = out[u] + (len > omega ? len : 0.0);
            stack.push_back(v);
        }
    }
    return out;
}

double EuclideanMst::total_weight() const {
    double w = 0.0;
    for (double l : parent_len_) w += l;
    return w;
}

std::vector<double> EuclideanMst::path_edges(int a, int b) const {
    std::vector<double> edges;
    int u = a, v = b;
    while (depth_[u] > depth_[v]) {
        edges.push_back(parent_len_[u]);
        u = parent_[u];
    }
    while (depth_[v] > depth_[u]) {
        edges.push_back(parent_len_[v]);
        v = parent_[v];
    }
    while (u != v) {
        edges.push_back(parent_len_[u]);
        edges.push_back(parent_len_[v]);
        u = parent_[u];
        v = parent_[v];
    }
    return edges;
}

int EuclideanMst::nearest_node(const Vec& x) const {
    int pick = 0;
    double pick_d = (nodes_[0] - x).squaredNorm();
    for (int j = 1; j < size(); ++j) {
        const double d = (nodes_[j] - x).squaredNorm();
        if (d < pick_d) {
            pick = j;
            pick_d = d;
        }
    }
    return pick;
}

double EuclideanMst::exceed_sum(const Vec& x, const Vec& y, double omega) const {
    if ((x - y).squaredNorm() == 0.0) return 0.0;
    const int a = nearest_node(x);
    const int b = nearest_node(y);
    double d = 0.0;
    const double ax = (x - nodes_[a]).norm();
    const double by = (y - nodes_[b]).norm();
    if (ax > omega) d += ax;
    if (by > omega) d += by;
    for (double l : path_edges(a, b))
        if (l > omega) d += l;
    return d;
}

double kernel_eval(const KernelSpec& spec, const Vec& x, const Vec& y, const EuclideanMst* mst) {
    switch (spec.kind) {
        case KernelKind::Linear:
            return x.dot(y);
        case KernelKind::Rbf:
            return std::exp(-(x - y).squaredNorm() / (2.0 * spec.omega * spec.omega));
        case KernelKind::MstRbf: {
            if (mst == nullptr) throw ConfigError("mst_rbf kernel requires the batch MST context");
            const double d = mst->exceed_sum(x, y, spec.omega);
            return std::exp(-d * d / (2.0 * spec.omega * spec.omega));
        }
    }
    return 0.0;
}

}  // namespace dynoclust
