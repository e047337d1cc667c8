#pragma once

#include <utility>
#include <vector>

#include "dynoclust/kernels.hpp"
#include "dynoclust/stream.hpp"

namespace dynoclust {

struct SupportPoint {
    double coeff = 0.0;
    Vec point;
};

// Kernel-space old cluster center held as a budgeted weighted combination of
// past data vectors, plus the same carried statistics as OldCluster.
struct SparseCenter {
    ClusterId id = 0;
    std::vector<SupportPoint> support;
    double weight = 0.0;
    int staleness = 1;
};

// Fold state for the kernelized engines.
struct KernelStreamState {
    int dim = 0;
    std::vector<SparseCenter> centers;
    ClusterId next_id = 0;

    static KernelStreamState empty(int dim) { return KernelStreamState{dim, {}, 0}; }
};

// One timestep of a cluster's past, for the unbudgeted center expansion.
struct ClusterHistoryStep {
    double gamma = 0.0;  // gamma the cluster had when this step was clustered
    std::vector<Vec> points;
};

// Unbudgeted expansion of an old center over all past assigned data: the
// points of step tau carry coefficient (gamma_tau + n_tau)^-1 multiplied by
// prod over later steps r of gamma_r / (gamma_r + n_r). Serves as the exact
// reference the budgeted approximation is checked against.
std::vector<SupportPoint> exact_center_coeffs(const std::vector<ClusterHistoryStep>& history);

// One-step dense update: old coefficients shrink by gamma/(gamma+n), newly
// assigned points append with coefficient 1/(gamma+n). Length grows to
// |support| + n; no budget applied here.
std::vector<SupportPoint> dense_center_update(const std::vector<SupportPoint>& support,
                                              double gamma,
                                              const std::vector<Vec>& assigned);

struct SparseReduceResult {
    std::vector<SupportPoint> support;  // at most `budget` entries
    double achieved_eps = 0.0;          // sqrt of the final quadratic residual
    bool regularized = false;           // restricted solve needed a ridge
};

// Budgeted reapproximation: greedy forward selection on the quadratic
// (a - x)^T W (a - x), W_ij = kernel(v_i, v_j), followed by an exact refit of
// the selected coefficients via the restricted normal equations.
SparseReduceResult sparse_reduce(const std::vector<SupportPoint>& dense,
                                 int budget,
                                 const KernelSpec& kernel,
                                 const EuclideanMst* mst = nullptr);

// Dense kernel tables for one batch against the carried sparse centers.
struct GramTables {
    Mat k_yy;           // N x N, symmetric
    Mat k_yphi;         // N x K
    Vec k_phiphi_diag;  // K
    bool clamped = false;  // negative center self-similarity clamped to 0
};

GramTables build_gram_tables(const std::vector<Vec>& points,
                             const std::vector<SparseCenter>& centers,
                             const KernelSpec& kernel,
                             const EuclideanMst* mst = nullptr);

}  // namespace dynoclust
