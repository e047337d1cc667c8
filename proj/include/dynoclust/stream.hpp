#pragma once

#include <map>
#include <string>
#include <vector>

#include "dynoclust/common.hpp"

namespace dynoclust {

// Memory carried for one cluster between timesteps: last known center phi,
// accumulated weight w > 0, and staleness = timesteps since last observed
// (>= 1 for any carried cluster).
struct OldCluster {
    ClusterId id = 0;
    Vec phi;
    double weight = 0.0;
    int staleness = 1;
};

// Fold state across timesteps for the exact (vector-space) engine.
struct StreamState {
    int dim = 0;
    std::vector<OldCluster> old_clusters;
    ClusterId next_id = 0;

    static StreamState empty(int dim) { return StreamState{dim, {}, 0}; }
};

// One timestep of data.
struct Batch {
    int t = 0;
    std::vector<Vec> points;
    std::vector<std::string> point_ids;  // optional, parallel to points
};

// Objective values recorded after each sweep of one restart.
struct SweepTrace {
    int restart = 0;
    std::vector<double> objectives;
};

struct BatchResult {
    std::vector<ClusterId> labels;        // per point
    std::map<ClusterId, Vec> centers;     // active clusters only
    double objective = 0.0;
    std::vector<ClusterId> active_set;    // ids with n > 0, ascending
    int iterations = 0;
    bool converged = true;
    std::vector<SweepTrace> sweep_traces; // one entry per restart
};

}  // namespace dynoclust
