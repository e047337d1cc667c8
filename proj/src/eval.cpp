#include "dynoclust/eval.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "dynoclust/hungarian.hpp"
#include "dynoclust/spectral.hpp"

namespace dynoclust {

AccuracyReport consistent_accuracy(const std::vector<std::vector<ClusterId>>& pred,
                                   const std::vector<std::vector<ClusterId>>& truth) {
    if (pred.size() != truth.size())
        throw ConfigError("prediction and truth have different step counts");

    AccuracyReport report;
    std::map<ClusterId, ClusterId> committed_pred;  // learned id -> true id
    std::map<ClusterId, ClusterId> committed_true;  // true id -> learned id
    long total_points = 0;
    long total_correct = 0;

    for (std::size_t t = 0; t < pred.size(); ++t) {
        if (pred[t].size() != truth[t].size())
            throw ConfigError("prediction and truth differ in size at step " + std::to_string(t));
        const int n = static_cast<int>(pred[t].size());

        std::vector<ClusterId> pred_ids, true_ids;
        std::map<ClusterId, int> pred_idx, true_idx;
        std::map<std::pair<int, int>, int> overlap;
        for (int i = 0; i < n; ++i) {
            if (!pred_idx.count(pred[t][i])) {
                pred_idx[pred[t][i]] = static_cast<int>(pred_ids.size());
                pred_ids.push_back(pred[t][i]);
            }
            if (!true_idx.count(truth[t][i])) {
                true_idx[truth[t][i]] = static_cast<int>(true_ids.size());
                true_ids.push_back(truth[t][i]);
            }
            overlap[{pred_idx[pred[t][i]], true_idx[truth[t][i]]}] += 1;
        }

        // Hungarian on negative overlaps maximizes the shared-point count;
        // zero-overlap pairings carry no weight and are dropped below.
        const int np = static_cast<int>(pred_ids.size());
        const int nt = static_cast<int>(true_ids.size());
        const int side = std::max(np, nt);
        Mat cost = Mat::Zero(side, side);
        for (const auto& [pq, c] : overlap)
            cost(pq.first, pq.second) = -static_cast<double>(c);
        const std::vector<int> assign = hungarian_min_assign(cost);

        std::vector<std::pair<ClusterId, ClusterId>> survivors;
        for (int p = 0; p < np; ++p) {
            const int q = assign[p];
            if (q >= nt) continue;
            if (!overlap.count({p, q})) continue;  // zero-overlap pairing is noise
            const ClusterId lp = pred_ids[p];
            const ClusterId lt = true_ids[q];
            const auto cp = committed_pred.find(lp);
            const auto ct = committed_true.find(lt);
            if ((cp != committed_pred.end() && cp->second != lt) ||
                (ct != committed_true.end() && ct->second != lp)) {
                report.consistency_removals += 1;
                continue;
            }
            committed_pred[lp] = lt;
            committed_true[lt] = lp;
            survivors.emplace_back(lp, lt);
        }

        long correct = 0;
        for (const auto& [lp, lt] : survivors) correct += overlap.at({pred_idx[lp], true_idx[lt]});
        report.per_step_accuracy.push_back(static_cast<double>(correct) / n);
        report.matching.push_back(std::move(survivors));
        total_points += n;
        total_correct += correct;
    }
    report.overall = total_points > 0 ? static_cast<double>(total_correct) / total_points : 0.0;
    return report;
}

AuditReport cost_audit(const std::vector<Batch>& batches,
                       const std::vector<std::vector<ClusterId>>& labels,
                       const RunConfig& rc) {
    rc.validate();
    if (batches.size() != labels.size())
        throw ConfigError("label steps do not match the stream");
    if (batches.empty()) throw ConfigError("stream contains no batches");
    const int dim = static_cast<int>(batches.front().points.front().size());

    AuditReport report;
    report.modified_variant_flagged = rc.algorithm == Algorithm::SdMeans;

    if (rc.algorithm == Algorithm::DMeans) {
        StreamState state = StreamState::empty(dim);
        for (std::size_t s = 0; s < batches.size(); ++s) {
            const Batch& batch = batches[s];
            if (labels[s].size() != batch.points.size())
                throw ConfigError("label count mismatch at step " + std::to_string(s));
            std::map<ClusterId, const OldCluster*> old_by_id;
            for (const OldCluster& oc : state.old_clusters) old_by_id[oc.id] = &oc;

            std::map<ClusterId, std::vector<Vec>> groups;
            for (std::size_t i = 0; i < labels[s].size(); ++i)
                groups[labels[s][i]].push_back(batch.points[i]);

            BatchResult res;
            res.labels = labels[s];
            for (const auto& [id, pts] : groups) {
                double gamma = 0.0;
                Vec phi = Vec::Zero(dim);
                auto it = old_by_id.find(id);
                if (it != old_by_id.end()) {
                    gamma = gamma_of(it->second->weight, it->second->staleness, rc.params.tau);
                    phi = it->second->phi;
                }
                res.centers[id] = update_center(phi, gamma, pts);
                res.active_set.push_back(id);
            }
            report.per_step_objective.push_back(
                batch_objective(batch, labels[s], res.centers, state, rc.params));
            report.per_step_modified.push_back(report.per_step_objective.back());
            state = advance_state(state, res, batch, rc.params);
        }
        return report;
    }

    KernelStreamState state = KernelStreamState::empty(dim);
    for (std::size_t s = 0; s < batches.size(); ++s) {
        const Batch& batch = batches[s];
        if (labels[s].size() != batch.points.size())
            throw ConfigError("label count mismatch at step " + std::to_string(s));

        EuclideanMst mst;
        const EuclideanMst* mst_ptr = nullptr;
        if (rc.kernel.needs_mst()) {
            mst = EuclideanMst::build(batch.points);
            mst_ptr = &mst;
        }
        const GramTables gram = build_gram_tables(batch.points, state.centers, rc.kernel, mst_ptr);
        report.per_step_objective.push_back(kd_objective(gram, labels[s], state, rc.params, false));
        report.per_step_modified.push_back(kd_objective(gram, labels[s], state, rc.params, true));

        // Re-run the deterministic sparse-center fold.
        std::map<ClusterId, int> col_of_id;
        for (std::size_t c = 0; c < state.centers.size(); ++c)
            col_of_id[state.centers[c].id] = static_cast<int>(c);
        std::map<ClusterId, std::vector<Vec>> groups;
        for (std::size_t i = 0; i < labels[s].size(); ++i)
            groups[labels[s][i]].push_back(batch.points[i]);

        KernelStreamState next = KernelStreamState::empty(dim);
        next.next_id = state.next_id;
        std::vector<bool> observed(state.centers.size(), false);
        for (const auto& [id, pts] : groups) {
            double gamma = 0.0;
            std::vector<SupportPoint> prior;
            auto it = col_of_id.find(id);
            if (it != col_of_id.end()) {
                observed[it->second] = true;
                const SparseCenter& sc = state.centers[it->second];
                gamma = gamma_of(sc.weight, sc.staleness, rc.params.tau);
                prior = sc.support;
            }
            SparseReduceResult red =
                sparse_reduce(dense_center_update(prior, gamma, pts), rc.params.budget,
                              rc.kernel, mst_ptr);
            SparseCenter sc;
            sc.id = id;
            sc.support = std::move(red.support);
            sc.weight = gamma + static_cast<double>(pts.size());
            sc.staleness = 1;
            next.centers.push_back(std::move(sc));
            next.next_id = std::max(next.next_id, id + 1);
        }
        for (std::size_t c = 0; c < state.centers.size(); ++c) {
            if (observed[c]) continue;
            SparseCenter aged = state.centers[c];
            aged.staleness += 1;
            next.centers.push_back(std::move(aged));
        }
        std::sort(next.centers.begin(), next.centers.end(),
                  [](const SparseCenter& a, const SparseCenter& b) { return a.id < b.id; });
        std::erase_if(next.centers, [&](const SparseCenter& sc) {
            return rc.params.q_penalty * sc.staleness > rc.params.lambda;
        });
        state = std::move(next);
    }
    return report;
}

std::vector<SweepRow> sweep(const RunConfig& base,
                            const GaussianStreamCfg& stream_cfg,
                            const std::vector<double>& lambdas,
                            const std::vector<double>& t_qs,
                            const std::vector<double>& k_taus,
                            int trials) {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (lambdas.empty() || t_qs.empty() || k_taus.empty())
        throw ConfigError("sweep grid axes must be nonempty");

    std::vector<SweepRow> rows;
    for (double lambda : lambdas) {
        for (double t_q : t_qs) {
            for (double k_tau : k_taus) {
                for (int trial = 0; trial < trials; ++trial) {
                    GaussianStreamCfg scfg = stream_cfg;
                    scfg.seed = stream_cfg.seed + static_cast<std::uint64_t>(trial);
                    const LabeledStream stream = gen_moving_gaussians(scfg);

                    RunConfig rc = base;
                    const DMeansConfig reparam = DMeansConfig::from_reparam(lambda, t_q, k_tau);
                    rc.params.lambda = reparam.lambda;
                    rc.params.q_penalty = reparam.q_penalty;
                    rc.params.tau = reparam.tau;

                    const auto start = std::chrono::steady_clock::now();
                    const RunOutput run = run_stream(stream.batches, rc);
                    const double secs =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count();
                    const AccuracyReport acc = consistent_accuracy(run.labels, stream.truth);
                    rows.push_back({lambda, t_q, k_tau, trial, acc.overall, secs});
                }
            }
        }
    }
    return rows;
}

}  // namespace dynoclust
