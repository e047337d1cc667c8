// Batch front end for the stream-clustering toolkit: generate synthetic
// streams, cluster them with any engine, score label files, and run
// parameter sweeps. File formats are documented in the README.
//
// Exit codes: 0 success, 2 malformed/missing input, 3 invalid configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "dynoclust/io.hpp"

namespace dc = dynoclust;
using nlohmann::json;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitBadConfig = 3;

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    if (const char* env = std::getenv("DYNOCLUST_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw dc::ConfigError("DYNOCLUST_SEED is not an integer");
        }
    }
    return cli_seed;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw dc::ParseError("cannot open output file: " + path);
    return out;
}

int cmd_gen(const std::string& kind, int steps, std::uint64_t seed, int clusters,
            int pts_per_cluster, int pts_per_step, double noise_sd, double walk_sd,
            double death_prob, const std::string& out_path, const std::string& truth_path) {
    dc::LabeledStream stream;
    if (kind == "gaussians") {
        dc::GaussianStreamCfg cfg;
        cfg.n_clusters = clusters;
        cfg.pts_per_cluster = pts_per_cluster;
        cfg.noise_sd = noise_sd;
        cfg.walk_sd = walk_sd;
        cfg.death_prob = death_prob;
        cfg.steps = steps;
        cfg.seed = seed;
        stream = dc::gen_moving_gaussians(cfg);
    } else if (kind == "rings") {
        dc::RingStreamCfg cfg;
        cfg.pts_per_step = pts_per_step;
        cfg.noise_sd = noise_sd;
        cfg.walk_sd = walk_sd;
        cfg.steps = steps;
        cfg.seed = seed;
        stream = dc::gen_moving_rings(cfg);
    } else {
        throw dc::ConfigError("unknown kind '" + kind + "' (expected gaussians|rings)");
    }

    {
        std::ofstream out = open_out(out_path);
        dc::write_stream(out, stream.batches);
    }
    {
        std::ofstream out = open_out(truth_path);
        dc::write_labels(out, stream.batches, stream.truth);
    }
    long points = 0;
    std::set<dc::ClusterId> ids;
    for (std::size_t s = 0; s < stream.batches.size(); ++s) {
        points += static_cast<long>(stream.batches[s].points.size());
        for (dc::ClusterId id : stream.truth[s]) ids.insert(id);
    }
    std::cout << "generated " << kind << ": steps=" << stream.batches.size()
              << " points=" << points << " clusters=" << ids.size() << "\n";
    return 0;
}

int cmd_cluster(const std::string& config_path, const std::string& in_path,
                const std::string& out_path, const std::string& metrics_path,
                const std::string& state_path) {
    dc::RunConfig rc = dc::read_run_config_file(config_path);
    rc.params.seed = effective_seed(rc.params.seed);

    // Parse everything before opening any output, so a bad input never
    // leaves partial files behind.
    const std::vector<dc::Batch> batches = dc::read_stream_file(in_path);
    const dc::RunOutput run = dc::run_stream(batches, rc);

    {
        std::ofstream out = open_out(out_path);
        dc::write_labels(out, batches, run.labels);
    }
    if (!metrics_path.empty()) {
        std::ofstream out = open_out(metrics_path);
        dc::write_metrics(out, run.metrics);
    }
    if (!state_path.empty()) {
        std::ofstream out = open_out(state_path);
        dc::write_state(out, run, rc);
    }
    double total = 0.0;
    for (const dc::StepMetrics& m : run.metrics) total += m.seconds;
    std::cout << "clustered " << batches.size() << " batches with "
              << dc::algorithm_name(rc.algorithm) << " in " << total << " s\n";
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path) {
    const dc::LabelFile pred = dc::read_labels_file(pred_path);
    const dc::LabelFile truth = dc::read_labels_file(truth_path);
    const dc::AccuracyReport report = dc::score_label_files(pred, truth);
    std::cout << "step,accuracy\n";
    for (std::size_t s = 0; s < report.per_step_accuracy.size(); ++s)
        std::cout << truth.ts[s] << "," << report.per_step_accuracy[s] << "\n";
    std::cout << "overall," << report.overall << "\n";
    return 0;
}

int cmd_sweep(const std::string& algo, const std::string& grid_path,
              const std::string& stream_cfg_path, int trials, const std::string& out_path) {
    std::ifstream gin(grid_path);
    if (!gin) throw dc::ParseError("cannot open grid file: " + grid_path);
    json grid = json::parse(gin, nullptr, false);
    if (grid.is_discarded() || !grid.is_object())
        throw dc::ParseError("grid file is not a JSON object");
    auto axis = [&](const char* key) {
        if (!grid.contains(key) || !grid[key].is_array())
            throw dc::ConfigError(std::string("grid file needs array '") + key + "'");
        return grid[key].get<std::vector<double>>();
    };
    const std::vector<double> lambdas = axis("lambda");
    const std::vector<double> t_qs = axis("t_q");
    const std::vector<double> k_taus = axis("k_tau");

    std::ifstream sin(stream_cfg_path);
    if (!sin) throw dc::ParseError("cannot open stream config: " + stream_cfg_path);
    json scfg_json = json::parse(sin, nullptr, false);
    if (scfg_json.is_discarded() || !scfg_json.is_object())
        throw dc::ParseError("stream config is not a JSON object");
    dc::GaussianStreamCfg scfg;
    scfg.n_clusters = scfg_json.value("clusters", scfg.n_clusters);
    scfg.pts_per_cluster = scfg_json.value("pts_per_cluster", scfg.pts_per_cluster);
    scfg.noise_sd = scfg_json.value("noise_sd", scfg.noise_sd);
    scfg.walk_sd = scfg_json.value("walk_sd", scfg.walk_sd);
    scfg.death_prob = scfg_json.value("death_prob", scfg.death_prob);
    scfg.steps = scfg_json.value("steps", scfg.steps);
    scfg.seed = scfg_json.value("seed", scfg.seed);
    scfg.seed = effective_seed(scfg.seed);

    dc::RunConfig base;
    base.algorithm = dc::algorithm_from_name(algo);
    base.params.lambda = 1.0;  // replaced cell by cell
    if (base.algorithm != dc::Algorithm::DMeans) {
        if (!scfg_json.contains("omega"))
            throw dc::ConfigError("kernelized sweeps need 'omega' in the stream config");
        base.kernel = dc::KernelSpec::rbf(scfg_json["omega"].get<double>());
        base.has_kernel = true;
    }
    base.params.restarts = scfg_json.value("restarts", 1);
    base.params.seed = scfg_json.value("engine_seed", 0);

    const std::vector<dc::SweepRow> rows =
        dc::sweep(base, scfg, lambdas, t_qs, k_taus, trials);
    std::ofstream out = open_out(out_path);
    out << "lambda,t_q,k_tau,trial,accuracy,seconds\n";
    for (const dc::SweepRow& r : rows)
        out << r.lambda << "," << r.t_q << "," << r.k_tau << "," << r.trial << ","
            << r.accuracy << "," << r.seconds << "\n";
    std::cout << "sweep wrote " << rows.size() << " rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynoclust: temporal stream clustering (D-Means, KD-Means, SD-Means)"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic labeled stream");
    std::string kind = "gaussians";
    int steps = 10, clusters = 5, pts_per_cluster = 15, pts_per_step = 400;
    double noise_sd = -1.0, walk_sd = 0.05, death_prob = 0.05;
    std::uint64_t seed = 0;
    std::string out_path, truth_path;
    gen->add_option("--kind", kind, "gaussians|rings");
    gen->add_option("--steps", steps, "number of timesteps");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--clusters", clusters, "gaussians: cluster count");
    gen->add_option("--pts-per-cluster", pts_per_cluster, "gaussians: points per cluster");
    gen->add_option("--pts-per-step", pts_per_step, "rings: points per step");
    gen->add_option("--noise-sd", noise_sd, "observation noise (default 0.05 / 0.03)");
    gen->add_option("--walk-sd", walk_sd, "center random-walk sd");
    gen->add_option("--death-prob", death_prob, "gaussians: per-step death probability");
    gen->add_option("--out", out_path, "stream JSONL output")->required();
    gen->add_option("--truth-out", truth_path, "truth JSONL output")->required();

    // cluster
    auto* cluster = app.add_subcommand("cluster", "cluster a stream file");
    std::string config_path, in_path, labels_path, metrics_path, state_path;
    cluster->add_option("--config", config_path, "run config JSON")->required();
    cluster->add_option("--in", in_path, "input stream JSONL")->required();
    cluster->add_option("--out", labels_path, "label JSONL output")->required();
    cluster->add_option("--metrics-out", metrics_path, "per-step metrics JSONL output");
    cluster->add_option("--state-out", state_path, "final carried state JSON output");

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against truth");
    std::string pred_path, truth_in_path;
    eval->add_option("--pred", pred_path, "predicted label JSONL")->required();
    eval->add_option("--truth", truth_in_path, "truth label JSONL")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid sweep over (lambda, t_q, k_tau)");
    std::string algo = "dmeans", grid_path, stream_cfg_path, sweep_out;
    int trials = 1;
    sweep->add_option("--algo", algo, "dmeans|kdmeans|sdmeans");
    sweep->add_option("--grid-file", grid_path, "JSON grid axes")->required();
    sweep->add_option("--stream-cfg", stream_cfg_path, "JSON moving-Gaussian stream config")
        ->required();
    sweep->add_option("--trials", trials, "trials per grid cell");
    sweep->add_option("--out", sweep_out, "CSV output")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (noise_sd < 0.0) noise_sd = kind == "rings" ? 0.03 : 0.05;
            return cmd_gen(kind, steps, effective_seed(seed), clusters, pts_per_cluster,
                           pts_per_step, noise_sd, walk_sd, death_prob, out_path, truth_path);
        }
        if (cluster->parsed())
            return cmd_cluster(config_path, in_path, labels_path, metrics_path, state_path);
        if (eval->parsed()) return cmd_eval(pred_path, truth_in_path);
        if (sweep->parsed())
            return cmd_sweep(algo, grid_path, stream_cfg_path, trials, sweep_out);
    } catch (const dc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const dc::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return 0;
}
