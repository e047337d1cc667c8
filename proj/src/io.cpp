#include "dynoclust/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

namespace dynoclust {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, long line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ParseError("malformed JSON object", line_no);
    return j;
}

// Shortest round-trippable decimal representation.
std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    double back = 0.0;
    std::istringstream(os.str()) >> back;
    if (back == v) {
        std::ostringstream shorter;
        for (int prec = 1; prec < 17; ++prec) {
            shorter.str("");
            shorter << std::setprecision(prec) << v;
            double b2 = 0.0;
            std::istringstream(shorter.str()) >> b2;
            if (b2 == v) return shorter.str();
        }
    }
    return os.str();
}

}  // namespace

std::vector<Batch> read_stream(std::istream& in) {
    std::vector<Batch> batches;
    std::string line;
    long line_no = 0;
    int dim = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, line_no);
        if (!j.contains("t") || !j["t"].is_number_integer())
            throw ParseError("missing integer field 't'", line_no);
        if (!j.contains("x") || !j["x"].is_array() || j["x"].empty())
            throw ParseError("missing nonempty array field 'x'", line_no);
        const int t = j["t"].get<int>();
        Vec x(j["x"].size());
        for (std::size_t d = 0; d < j["x"].size(); ++d) {
            if (!j["x"][d].is_number()) throw ParseError("non-numeric coordinate in 'x'", line_no);
            x(d) = j["x"][d].get<double>();
        }
        if (dim < 0) dim = static_cast<int>(x.size());
        if (x.size() != dim) throw ParseError("inconsistent point dimension", line_no);
        if (j.contains("id") && !j["id"].is_string())
            throw ParseError("field 'id' must be a string", line_no);
        const std::string id =
            j.contains("id") ? j["id"].get<std::string>() : std::to_string(line_no);

        if (batches.empty() || batches.back().t != t) {
            if (!batches.empty() && t <= batches.back().t)
                throw ParseError("timestep 't' must be strictly increasing between batches",
                                 line_no);
            Batch b;
            b.t = t;
            batches.push_back(std::move(b));
        }
        batches.back().points.push_back(std::move(x));
        batches.back().point_ids.push_back(id);
    }
    if (batches.empty()) throw ParseError("stream file contains no points");
    return batches;
}

std::vector<Batch> read_stream_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open stream file: " + path);
    return read_stream(in);
}

void write_stream(std::ostream& out, const std::vector<Batch>& batches) {
    for (const Batch& b : batches) {
        for (std::size_t i = 0; i < b.points.size(); ++i) {
            out << "{\"t\": " << b.t << ", \"id\": " << json(b.point_ids[i]).dump()
                << ", \"x\": [";
            for (int d = 0; d < b.points[i].size(); ++d) {
                if (d > 0) out << ", ";
                out << fmt_double(b.points[i](d));
            }
            out << "]}\n";
        }
    }
}

LabelFile read_labels_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open label file: " + path);
    LabelFile lf;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, line_no);
        if (!j.contains("t") || !j["t"].is_number_integer())
            throw ParseError("missing integer field 't'", line_no);
        if (!j.contains("cluster") || !j["cluster"].is_number_integer())
            throw ParseError("missing integer field 'cluster'", line_no);
        const int t = j["t"].get<int>();
        if (j.contains("id") && !j["id"].is_string())
            throw ParseError("field 'id' must be a string", line_no);
        const std::string id =
            j.contains("id") ? j["id"].get<std::string>() : std::to_string(line_no);
        if (lf.ts.empty() || lf.ts.back() != t) {
            if (!lf.ts.empty() && t <= lf.ts.back())
                throw ParseError("timestep 't' must be strictly increasing between batches",
                                 line_no);
            lf.ts.push_back(t);
            lf.rows.emplace_back();
        }
        lf.rows.back().emplace_back(id, j["cluster"].get<ClusterId>());
    }
    if (lf.ts.empty()) throw ParseError("label file contains no rows");
    return lf;
}

void write_labels(std::ostream& out,
                  const std::vector<Batch>& batches,
                  const std::vector<std::vector<ClusterId>>& labels) {
    for (std::size_t s = 0; s < batches.size(); ++s) {
        for (std::size_t i = 0; i < batches[s].points.size(); ++i) {
            const std::string pid = i < batches[s].point_ids.size()
                                        ? batches[s].point_ids[i]
                                        : std::to_string(i);
            out << "{\"t\": " << batches[s].t << ", \"id\": " << json(pid).dump()
                << ", \"cluster\": " << labels[s][i] << "}\n";
        }
    }
}

void write_metrics(std::ostream& out, const std::vector<StepMetrics>& metrics) {
    for (const StepMetrics& m : metrics) {
        out << "{\"t\": " << m.t << ", \"objective\": " << fmt_double(m.objective)
            << ", \"iters\": " << m.iters << ", \"k_active\": " << m.k_active
            << ", \"k_total\": " << m.k_total << ", \"seconds\": " << fmt_double(m.seconds)
            << "}\n";
    }
}

void write_state(std::ostream& out, const RunOutput& run, const RunConfig& rc) {
    json doc;
    doc["algorithm"] = algorithm_name(rc.algorithm);
    json clusters = json::array();
    if (rc.algorithm == Algorithm::DMeans) {
        for (const OldCluster& oc : run.final_state.old_clusters) {
            json c;
            c["id"] = oc.id;
            c["weight"] = oc.weight;
            c["staleness"] = oc.staleness;
            c["phi"] = std::vector<double>(oc.phi.data(), oc.phi.data() + oc.phi.size());
            clusters.push_back(std::move(c));
        }
        doc["next_id"] = run.final_state.next_id;
    } else {
        for (const SparseCenter& sc : run.final_kstate.centers) {
            json c;
            c["id"] = sc.id;
            c["weight"] = sc.weight;
            c["staleness"] = sc.staleness;
            json support = json::array();
            for (const SupportPoint& sp : sc.support) {
                json s;
                s["a"] = sp.coeff;
                s["v"] = std::vector<double>(sp.point.data(), sp.point.data() + sp.point.size());
                support.push_back(std::move(s));
            }
            c["support"] = std::move(support);
            clusters.push_back(std::move(c));
        }
        doc["next_id"] = run.final_kstate.next_id;
    }
    doc["clusters"] = std::move(clusters);
    out << doc.dump(2) << "\n";
}

RunConfig parse_run_config(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("config is not a JSON object");

    RunConfig rc;
    if (!j.contains("algorithm")) throw ConfigError("config missing 'algorithm'");
    rc.algorithm = algorithm_from_name(j["algorithm"].get<std::string>());

    if (!j.contains("lambda") || !j["lambda"].is_number())
        throw ConfigError("config missing numeric 'lambda'");
    const double lambda = j["lambda"].get<double>();

    const bool direct = j.contains("q") || j.contains("tau");
    const bool reparam = j.contains("t_q") || j.contains("k_tau");
    if (direct && reparam)
        throw ConfigError("give either (q, tau) or (t_q, k_tau), not both");
    if (reparam) {
        if (!j.contains("t_q") || !j.contains("k_tau"))
            throw ConfigError("reparameterized config needs both 't_q' and 'k_tau'");
        rc.params = DMeansConfig::from_reparam(lambda, j["t_q"].get<double>(),
                                               j["k_tau"].get<double>());
    } else if (direct) {
        if (!j.contains("q") || !j.contains("tau"))
            throw ConfigError("direct config needs both 'q' and 'tau'");
        rc.params.lambda = lambda;
        rc.params.q_penalty = j["q"].get<double>();
        if (j["tau"].is_string()) {
            if (j["tau"].get<std::string>() != "inf")
                throw ConfigError("'tau' must be a number or \"inf\"");
            rc.params.tau = kTauInfinite;
        } else {
            rc.params.tau = j["tau"].get<double>();
        }
    } else {
        throw ConfigError("config needs (q, tau) or (t_q, k_tau)");
    }

    if (j.contains("restarts")) rc.params.restarts = j["restarts"].get<int>();
    if (j.contains("max_iters")) rc.params.max_iters = j["max_iters"].get<int>();
    if (j.contains("seed")) rc.params.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("budget")) rc.params.budget = j["budget"].get<int>();

    if (j.contains("kernel")) {
        rc.has_kernel = true;
        const json& k = j["kernel"];
        if (k.is_string()) {
            if (k.get<std::string>() != "linear")
                throw ConfigError("string kernel spec must be \"linear\"");
            rc.kernel = KernelSpec::linear();
        } else if (k.is_object()) {
            const std::string variant = k.value("variant", "");
            if (variant == "linear") {
                rc.kernel = KernelSpec::linear();
            } else if (variant == "rbf" || variant == "mst_rbf") {
                if (!k.contains("omega")) throw ConfigError("kernel '" + variant + "' needs 'omega'");
                const double omega = k["omega"].get<double>();
                rc.kernel = variant == "rbf" ? KernelSpec::rbf(omega) : KernelSpec::mst_rbf(omega);
            } else {
                throw ConfigError("unknown kernel variant '" + variant + "'");
            }
        } else {
            throw ConfigError("kernel spec must be a string or object");
        }
    }
    rc.validate();
    return rc;
}

RunConfig read_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

AccuracyReport score_label_files(const LabelFile& pred, const LabelFile& truth) {
    if (pred.ts != truth.ts)
        throw ParseError("prediction and truth cover different timesteps");
    std::vector<std::vector<ClusterId>> pred_aligned, truth_aligned;
    for (std::size_t s = 0; s < truth.rows.size(); ++s) {
        std::map<std::string, ClusterId> by_id;
        for (const auto& [pid, cluster] : pred.rows[s]) by_id[pid] = cluster;
        std::vector<ClusterId> p, q;
        for (const auto& [pid, cluster] : truth.rows[s]) {
            const auto it = by_id.find(pid);
            if (it == by_id.end())
                throw ParseError("prediction missing point '" + pid + "' at step " +
                                 std::to_string(truth.ts[s]));
            p.push_back(it->second);
            q.push_back(cluster);
        }
        pred_aligned.push_back(std::move(p));
        truth_aligned.push_back(std::move(q));
    }
    return consistent_accuracy(pred_aligned, truth_aligned);
}

}  // namespace dynoclust
