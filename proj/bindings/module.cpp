// Python bindings for the stream-clustering toolkit: synthetic generators,
// the three engines behind one cluster_stream entry point, and the
// consistent-tracking score.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dynoclust/datagen.hpp"
#include "dynoclust/eval.hpp"
#include "dynoclust/run.hpp"

namespace py = pybind11;
using namespace dynoclust;

namespace {

using PyPoints = std::vector<std::vector<double>>;
using PyStream = std::vector<PyPoints>;

std::vector<Batch> batches_from_py(const PyStream& stream) {
    std::vector<Batch> batches;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        Batch b;
        b.t = static_cast<int>(t);
        for (const auto& row : stream[t]) {
            Vec v(row.size());
            for (std::size_t d = 0; d < row.size(); ++d) v(d) = row[d];
            b.points.push_back(std::move(v));
        }
        batches.push_back(std::move(b));
    }
    return batches;
}

PyStream stream_to_py(const std::vector<Batch>& batches) {
    PyStream out;
    for (const Batch& b : batches) {
        PyPoints pts;
        for (const Vec& p : b.points) pts.emplace_back(p.data(), p.data() + p.size());
        out.push_back(std::move(pts));
    }
    return out;
}

RunConfig make_config(const std::string& algorithm, double lambda, py::object q, py::object tau,
                      py::object t_q, py::object k_tau, py::object kernel, double omega,
                      int budget, int restarts, std::uint64_t seed, int max_iters) {
    RunConfig rc;
    rc.algorithm = algorithm_from_name(algorithm);
    const bool reparam = !t_q.is_none() || !k_tau.is_none();
    const bool direct = !q.is_none() || !tau.is_none();
    if (reparam && direct) throw ConfigError("give either (q, tau) or (t_q, k_tau), not both");
    if (reparam) {
        rc.params = DMeansConfig::from_reparam(lambda, t_q.cast<double>(), k_tau.cast<double>());
    } else if (direct) {
        rc.params.lambda = lambda;
        rc.params.q_penalty = q.cast<double>();
        rc.params.tau = tau.cast<double>();
    } else {
        throw ConfigError("give (q, tau) or (t_q, k_tau)");
    }
    rc.params.budget = budget;
    rc.params.restarts = restarts;
    rc.params.seed = seed;
    rc.params.max_iters = max_iters;
    if (!kernel.is_none()) {
        const std::string name = kernel.cast<std::string>();
        if (name == "linear")
            rc.kernel = KernelSpec::linear();
        else if (name == "rbf")
            rc.kernel = KernelSpec::rbf(omega);
        else if (name == "mst_rbf")
            rc.kernel = KernelSpec::mst_rbf(omega);
        else
            throw ConfigError("unknown kernel '" + name + "'");
        rc.has_kernel = true;
    }
    rc.validate();
    return rc;
}

}  // namespace

PYBIND11_MODULE(_dynoclust, m) {
    m.doc() = "Temporal stream clustering: D-Means, KD-Means, and SD-Means";

    m.def("gamma_of", &gamma_of, py::arg("weight"), py::arg("staleness"), py::arg("tau"),
          "Effective prior weight (weight^-1 + tau*staleness)^-1.");

    m.def(
        "reparam",
        [](double lambda, double t_q, double k_tau) {
            const DMeansConfig cfg = DMeansConfig::from_reparam(lambda, t_q, k_tau);
            return py::make_tuple(cfg.q_penalty, cfg.tau);
        },
        py::arg("lambda_"), py::arg("t_q"), py::arg("k_tau"),
        "Map (lambda, T_Q, k_tau) to the direct (Q, tau) parameters.");

    m.def(
        "generate_gaussians",
        [](int clusters, int pts_per_cluster, double noise_sd, double walk_sd, double death_prob,
           int steps, std::uint64_t seed) {
            GaussianStreamCfg cfg;
            cfg.n_clusters = clusters;
            cfg.pts_per_cluster = pts_per_cluster;
            cfg.noise_sd = noise_sd;
            cfg.walk_sd = walk_sd;
            cfg.death_prob = death_prob;
            cfg.steps = steps;
            cfg.seed = seed;
            const LabeledStream s = gen_moving_gaussians(cfg);
            return py::make_tuple(stream_to_py(s.batches), s.truth);
        },
        py::arg("clusters") = 5, py::arg("pts_per_cluster") = 15, py::arg("noise_sd") = 0.05,
        py::arg("walk_sd") = 0.05, py::arg("death_prob") = 0.05, py::arg("steps") = 100,
        py::arg("seed") = 0, "Moving-Gaussian stream; returns (batches, truth_labels).");

    m.def(
        "generate_rings",
        [](int pts_per_step, std::vector<double> radii, double noise_sd, double walk_sd, int steps,
           std::uint64_t seed) {
            RingStreamCfg cfg;
            cfg.pts_per_step = pts_per_step;
            cfg.radii = std::move(radii);
            cfg.noise_sd = noise_sd;
            cfg.walk_sd = walk_sd;
            cfg.steps = steps;
            cfg.seed = seed;
            const LabeledStream s = gen_moving_rings(cfg);
            return py::make_tuple(stream_to_py(s.batches), s.truth);
        },
        py::arg("pts_per_step") = 400, py::arg("radii") = std::vector<double>{0.4, 0.2, 0.0},
        py::arg("noise_sd") = 0.03, py::arg("walk_sd") = 0.05, py::arg("steps") = 10,
        py::arg("seed") = 0, "Concentric moving-ring stream; returns (batches, truth_labels).");

    m.def(
        "cluster_stream",
        [](const std::string& algorithm, const PyStream& stream, double lambda, py::object q,
           py::object tau, py::object t_q, py::object k_tau, py::object kernel, double omega,
           int budget, int restarts, std::uint64_t seed, int max_iters) {
            const RunConfig rc = make_config(algorithm, lambda, q, tau, t_q, k_tau, kernel, omega,
                                             budget, restarts, seed, max_iters);
            const RunOutput out = run_stream(batches_from_py(stream), rc);
            py::dict res;
            res["labels"] = out.labels;
            std::vector<double> objectives;
            std::vector<int> iters, k_active, k_total;
            for (const StepMetrics& sm : out.metrics) {
                objectives.push_back(sm.objective);
                iters.push_back(sm.iters);
                k_active.push_back(sm.k_active);
                k_total.push_back(sm.k_total);
            }
            res["objectives"] = objectives;
            res["iterations"] = iters;
            res["k_active"] = k_active;
            res["k_total"] = k_total;
            return res;
        },
        py::arg("algorithm"), py::arg("stream"), py::arg("lambda_"), py::arg("q") = py::none(),
        py::arg("tau") = py::none(), py::arg("t_q") = py::none(), py::arg("k_tau") = py::none(),
        py::arg("kernel") = py::none(), py::arg("omega") = 1.0, py::arg("budget") = 32,
        py::arg("restarts") = 1, py::arg("seed") = 0, py::arg("max_iters") = 100,
        "Cluster a batch-sequential stream with dmeans, kdmeans, or sdmeans.");

    m.def(
        "consistent_accuracy",
        [](const std::vector<std::vector<ClusterId>>& pred,
           const std::vector<std::vector<ClusterId>>& truth) {
            const AccuracyReport rep = consistent_accuracy(pred, truth);
            py::dict res;
            res["overall"] = rep.overall;
            res["per_step"] = rep.per_step_accuracy;
            res["consistency_removals"] = rep.consistency_removals;
            return res;
        },
        py::arg("pred"), py::arg("truth"),
        "Consistent-tracking accuracy of predicted labels against truth.");

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
