#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dynoclust/config.hpp"
#include "dynoclust/stream.hpp"

namespace dynoclust {

// One candidate target for a point assignment.
struct AssignChoice {
    ClusterId id = -1;   // -1 encodes "open a new cluster"
    double cost = 0.0;
    bool is_new() const { return id < 0; }
};

// View of an instantiated cluster during a label pass.
struct ActiveView {
    ClusterId id;
    const Vec* theta;
};

// View of a carried, currently uninstantiated cluster.
struct OldView {
    ClusterId id;
    const Vec* phi;
    double gamma;
    int staleness;
};

// Single label decision: min over instantiated Euclidean cost, revival cost
// Q*dt + gamma/(gamma+1)*||y - phi||^2, and the new-cluster penalty lambda.
// Ties break instantiated < old < new, then lowest id.
AssignChoice assign_point(const Vec& y,
                          const std::vector<ActiveView>& instantiated,
                          const std::vector<OldView>& old,
                          const DMeansConfig& cfg);

// Weighted center (gamma*phi + sum y) / (gamma + n). Callers guarantee
// gamma > 0 or a nonempty assignment.
Vec update_center(const Vec& phi, double gamma, const std::vector<Vec>& assigned);

// Full cost of a labeling: per active cluster, lambda for new clusters,
// Q*dt for revived ones, gamma-weighted prior pull, and the within-cluster
// sum of squares.
double batch_objective(const Batch& batch,
                       const std::vector<ClusterId>& labels,
                       const std::map<ClusterId, Vec>& centers,
                       const StreamState& state,
                       const DMeansConfig& cfg);

// Coordinate descent over one batch (label sweeps alternating with center
// updates) with restarts over the assignment order; the lowest-objective
// restart wins. Restart 0 visits points in batch order, restarts >= 1 in a
// seeded uniform permutation. New clusters in the returned result are
// numbered from state.next_id in order of first appearance in the labels.
BatchResult cluster_batch(const Batch& batch, const StreamState& state, const DMeansConfig& cfg);

// Fold the result into carried state: observed clusters refresh (phi = theta,
// w = gamma + n, dt = 1), unobserved ones age (dt += 1), and any cluster
// whose revival penalty Q*dt now exceeds lambda is dropped for good.
StreamState advance_state(const StreamState& state,
                          const BatchResult& result,
                          const Batch& batch,
                          const DMeansConfig& cfg);

}  // namespace dynoclust
