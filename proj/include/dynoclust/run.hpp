#pragma once

#include <string>
#include <vector>

#include "dynoclust/dmeans.hpp"
#include "dynoclust/kdmeans.hpp"
#include "dynoclust/kernels.hpp"

namespace dynoclust {

enum class Algorithm { DMeans, KdMeans, SdMeans };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

// Everything needed to drive one engine over a stream. A kernel must be
// present exactly when the algorithm is kernelized.
struct RunConfig {
    Algorithm algorithm = Algorithm::DMeans;
    DMeansConfig params;
    KernelSpec kernel;
    bool has_kernel = false;

    void validate() const;
};

struct StepMetrics {
    int t = 0;
    double objective = 0.0;
    int iters = 0;
    int k_active = 0;
    int k_total = 0;  // carried clusters after the fold
    double seconds = 0.0;
};

struct RunOutput {
    std::vector<std::vector<ClusterId>> labels;  // per step, parallel to batch points
    std::vector<StepMetrics> metrics;
    StreamState final_state;         // dmeans
    KernelStreamState final_kstate;  // kdmeans / sdmeans
};

// Sequential fold over the batches with the configured engine.
RunOutput run_stream(const std::vector<Batch>& batches, const RunConfig& rc);

}  // namespace dynoclust
