#pragma once

#include <vector>

#include "dynoclust/stream.hpp"

namespace dynoclust {

// Moving isotropic Gaussian clusters on the unit square: centers random-walk
// between steps and occasionally die, each death immediately replaced by a
// fresh cluster at a uniform location (so the cluster count stays fixed).
struct GaussianStreamCfg {
    int n_clusters = 5;
    int pts_per_cluster = 15;
    double noise_sd = 0.05;
    double walk_sd = 0.05;
    double death_prob = 0.05;
    int steps = 100;
    std::uint64_t seed = 0;
};

// Concentric rings (radius 0 is a blob) whose centers random-walk
// independently; points are uniform in angle with isotropic noise. The
// per-step point total splits across rings as evenly as possible, leftovers
// going to the lowest ring indices (400 over 3 rings = 134/133/133).
struct RingStreamCfg {
    int pts_per_step = 400;
    std::vector<double> radii{0.4, 0.2, 0.0};
    double noise_sd = 0.03;
    double walk_sd = 0.05;
    int steps = 10;
    std::uint64_t seed = 0;
};

struct StreamEvent {
    int t = 0;
    bool birth = true;
    ClusterId id = 0;
};

struct LabeledStream {
    std::vector<Batch> batches;
    std::vector<std::vector<ClusterId>> truth;  // per step, parallel to points
    std::vector<StreamEvent> events;
};

LabeledStream gen_moving_gaussians(const GaussianStreamCfg& cfg);
LabeledStream gen_moving_rings(const RingStreamCfg& cfg);

}  // namespace dynoclust
