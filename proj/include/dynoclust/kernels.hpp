#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynoclust/common.hpp"

namespace dynoclust {

enum class KernelKind { Linear, Rbf, MstRbf };

struct KernelSpec {
    KernelKind kind = KernelKind::Linear;
    double omega = 1.0;  // bandwidth for rbf / mst_rbf

    static KernelSpec linear() { return {KernelKind::Linear, 1.0}; }
    static KernelSpec rbf(double omega);
    static KernelSpec mst_rbf(double omega);

    bool needs_mst() const { return kind == KernelKind::MstRbf; }
    std::string name() const;
};

// Minimum spanning tree of the complete Euclidean graph over a point set,
// built with Prim's method (O(N^2)), rooted at node 0. Supports queries for
// the unique tree path between nodes, and between arbitrary points attached
// to the tree at their nearest node.
class EuclideanMst {
public:
    static EuclideanMst build(const std::vector<Vec>& points);

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Vec>& nodes() const { return nodes_; }
    double total_weight() const;

    // Edge lengths along the unique path between nodes a and b.
    std::vector<double> path_edges(int a, int b) const;

    // Index of the tree node nearest to x (lowest index on ties).
    int nearest_node(const Vec& x) const;

    // Sum of edge lengths strictly exceeding omega along the path between x
    // and y. Points off the tree attach to their nearest node; the
    // attachment edges obey the same threshold rule.
    double exceed_sum(const Vec& x, const Vec& y, double omega) const;

    // Excess sums from src to every node in one O(N) traversal; row src of
    // the all-pairs table.
    std::vector<double> excess_from_node(int src, double omega) const;

private:
    std::vector<Vec> nodes_;
    std::vector<int> parent_;        // parent_[0] = -1
    std::vector<double> parent_len_;
    std::vector<int> depth_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
};

// Kernel evaluation. mst_rbf requires the per-batch MST context.
double kernel_eval(const KernelSpec& spec, const Vec& x, const Vec& y,
                   const EuclideanMst* mst = nullptr);

}  // namespace dynoclust
