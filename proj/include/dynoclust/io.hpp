#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dynoclust/datagen.hpp"
#include "dynoclust/eval.hpp"
#include "dynoclust/run.hpp"

namespace dynoclust {

// Stream format: JSON Lines, one point per line,
//   {"t": <int>, "id": "<string>", "x": [<reals>]}
// Batches are maximal runs of equal t; t must be strictly increasing between
// batches. Label and truth files share one format,
//   {"t": <int>, "id": "<string>", "cluster": <int>}

std::vector<Batch> read_stream(std::istream& in);
std::vector<Batch> read_stream_file(const std::string& path);
void write_stream(std::ostream& out, const std::vector<Batch>& batches);

struct LabelFile {
    // Step-aligned: one entry per batch, each a list of (point id, cluster).
    std::vector<int> ts;
    std::vector<std::vector<std::pair<std::string, ClusterId>>> rows;
};

LabelFile read_labels_file(const std::string& path);
void write_labels(std::ostream& out,
                  const std::vector<Batch>& batches,
                  const std::vector<std::vector<ClusterId>>& labels);

// Metrics: JSONL per step,
//   {"t", "objective", "iters", "k_active", "k_total", "seconds"}
void write_metrics(std::ostream& out, const std::vector<StepMetrics>& metrics);

// Final carried state, one JSON document.
void write_state(std::ostream& out, const RunOutput& run, const RunConfig& rc);

// Run configuration: one flat JSON object. Accepts either (lambda, q, tau)
// or (lambda, t_q, k_tau), never both; "tau": "inf" is the forget-everything
// sentinel. Kernel spec: "kernel": "linear" | {"variant": "rbf"|"mst_rbf",
// "omega": <real>}, required exactly for kdmeans/sdmeans.
RunConfig parse_run_config(const std::string& json_text);
RunConfig read_run_config_file(const std::string& path);

// Aligns a prediction label file against a truth label file by (t, point id)
// and scores it. Throws ParseError when steps or points are missing.
AccuracyReport score_label_files(const LabelFile& pred, const LabelFile& truth);

}  // namespace dynoclust
