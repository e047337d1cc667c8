#pragma once

#include <map>
#include <vector>

#include "dynoclust/dmeans.hpp"
#include "dynoclust/sparse_center.hpp"

namespace dynoclust {

// Stats for one instantiated cluster as seen by the kernelized label update.
// p_sum = sum over members of K^YPhi, t_sum = full double sum over member
// pairs of K^YY (diagonal included). gamma and k_phiphi are 0 for clusters
// opened this timestep.
struct KdActiveView {
    ClusterId id = 0;
    double gamma = 0.0;
    double k_phiphi = 0.0;
    double p_sum = 0.0;
    double t_sum = 0.0;
    int col = -1;  // gram column when the cluster is a revival, else -1
    const std::vector<int>* members = nullptr;
};

// A carried, currently uninstantiated cluster; col indexes the gram tables.
struct KdOldView {
    ClusterId id = 0;
    int staleness = 1;
    double gamma = 0.0;
    int col = 0;
};

// Kernelized label decision for point i, which must already be deassigned
// from its cluster. The instantiated branch prices joining a cluster with the
// center implicitly re-optimized; old and new branches match the exact
// engine. Ties break instantiated < old < new, then lowest id.
AssignChoice kd_assign(int i,
                       const std::vector<KdActiveView>& instantiated,
                       const std::vector<KdOldView>& old,
                       const GramTables& gram,
                       const DMeansConfig& cfg);

// Kernelized clustering cost of a labeling. Labels matching ids in `state`
// mark revivals; any other id is a cluster opened this step. With
// modified_penalty the revival term Q*dt is scaled by n/(gamma+n), the
// surrogate used by the spectral relaxation.
double kd_objective(const GramTables& gram,
                    const std::vector<ClusterId>& labels,
                    const KernelStreamState& state,
                    const DMeansConfig& cfg,
                    bool modified_penalty = false);

struct KernelBatchOutput {
    BatchResult result;
    KernelStreamState state;                 // folded state after this batch
    std::map<ClusterId, double> sparse_eps;  // realized reduce residual per refreshed cluster
    bool gram_clamped = false;
};

// Kernelized coordinate descent over one batch. The first labeling pass is
// nearest-first: the unassigned point with the cheapest assignment against
// the current instantiated/old clusters goes next (ties by point index).
// Subsequent sweeps visit points in batch order (restart 0) or a seeded
// permutation (restarts >= 1); the lowest-objective restart wins. Centers
// are then refreshed with dense_center_update + sparse_reduce under
// cfg.budget, and staleness/weights folded as in the exact engine.
KernelBatchOutput kd_cluster_batch(const Batch& batch,
                                   const KernelStreamState& state,
                                   const KernelSpec& kernel,
                                   const DMeansConfig& cfg);

}  // namespace dynoclust
