#include "dynoclust/run.hpp"

#include <chrono>

#include "dynoclust/spectral.hpp"

namespace dynoclust {

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::DMeans: return "dmeans";
        case Algorithm::KdMeans: return "kdmeans";
        case Algorithm::SdMeans: return "sdmeans";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "dmeans") return Algorithm::DMeans;
    if (name == "kdmeans") return Algorithm::KdMeans;
    if (name == "sdmeans") return Algorithm::SdMeans;
    throw ConfigError("unknown algorithm '" + name + "' (expected dmeans|kdmeans|sdmeans)");
}

void RunConfig::validate() const {
    params.validate();
    if ((algorithm != Algorithm::DMeans) != has_kernel)
        throw ConfigError("a kernel must be given exactly when the algorithm is kernelized");
}

RunOutput run_stream(const std::vector<Batch>& batches, const RunConfig& rc) {
    rc.validate();
    if (batches.empty()) throw ConfigError("stream contains no batches");
    const int dim = static_cast<int>(batches.front().points.front().size());

    RunOutput out;
    out.final_state = StreamState::empty(dim);
    out.final_kstate = KernelStreamState::empty(dim);

    for (const Batch& batch : batches) {
        const auto start = std::chrono::steady_clock::now();
        StepMetrics sm;
        sm.t = batch.t;
        if (rc.algorithm == Algorithm::DMeans) {
            BatchResult res = cluster_batch(batch, out.final_state, rc.params);
            out.final_state = advance_state(out.final_state, res, batch, rc.params);
            sm.objective = res.objective;
            sm.iters = res.iterations;
            sm.k_active = static_cast<int>(res.active_set.size());
            sm.k_total = static_cast<int>(out.final_state.old_clusters.size());
            out.labels.push_back(std::move(res.labels));
        } else {
            KernelBatchOutput res =
                rc.algorithm == Algorithm::KdMeans
                    ? kd_cluster_batch(batch, out.final_kstate, rc.kernel, rc.params)
                    : sdmeans_batch(batch, out.final_kstate, rc.kernel, rc.params);
            out.final_kstate = std::move(res.state);
            sm.objective = res.result.objective;
            sm.iters = res.result.iterations;
            sm.k_active = static_cast<int>(res.result.active_set.size());
            sm.k_total = static_cast<int>(out.final_kstate.centers.size());
            out.labels.push_back(std::move(res.result.labels));
        }
        sm.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.metrics.push_back(sm);
    }
    return out;
}

}  // namespace dynoclust
