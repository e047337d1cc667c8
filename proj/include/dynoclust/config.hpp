#pragma once

#include <cstdint>
#include <limits>

#include "dynoclust/common.hpp"

namespace dynoclust {

// Sentinel for tau = +infinity, i.e. carried centers contribute no prior
// weight (gamma = 0 for every old cluster).
inline constexpr double kTauInfinite = std::numeric_limits<double>::infinity();

// Clustering parameters shared by all engines.
//
//   lambda     cost of opening a new cluster
//   q_penalty  per-step cost of reviving a cluster unseen for one step (Q)
//   tau        motion-variance rate; kTauInfinite forgets carried centers
//
// The reparameterized form (lambda, t_q, k_tau) is usually easier to tune:
// t_q is the number of unobserved steps after which revival can never beat
// opening a new cluster, and k_tau*lambda is the squared radius within which
// a one-step-old cluster is still revived.
struct DMeansConfig {
    double lambda = 1.0;
    double q_penalty = 0.0;
    double tau = 0.0;
    int restarts = 1;
    int max_iters = 100;
    std::uint64_t seed = 0;
    int budget = 32;  // sparse support budget m (kernel engines)

    static DMeansConfig from_reparam(double lambda, double t_q, double k_tau);
    void validate() const;
};

// Effective prior weight gamma = (weight^-1 + tau * staleness)^-1.
// New clusters (no carried memory) have gamma = 0 by convention.
double gamma_of(double weight, int staleness, double tau);

}  // namespace dynoclust
