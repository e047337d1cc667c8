#include "dynoclust/kdmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dynoclust {

namespace {

constexpr int kRankActive = 0;
constexpr int kRankOld = 1;
constexpr int kRankNew = 2;

struct Candidate {
    double cost;
    int rank;
    ClusterId id;
    bool better_than(const Candidate& o) const {
        if (cost != o.cost) return cost < o.cost;
        if (rank != o.rank) return rank < o.rank;
        return id < o.id;
    }
};

struct KCluster {
    ClusterId id = 0;
    int old_idx = -1;  // column into gram tables / state.centers when revived
    std::vector<int> members;
    double gamma = 0.0;
    double k_phiphi = 0.0;
    double p_sum = 0.0;
    double t_sum = 0.0;
    bool alive = false;
    bool is_new() const { return old_idx < 0; }
    int n() const { return static_cast<int>(members.size()); }
};

// Shared descent state for one restart of KD-Means.
struct KdEngine {
    const Batch& batch;
    const KernelStreamState& state;
    const GramTables& gram;
    const DMeansConfig& cfg;
    const std::vector<double>& gammas;

    std::vector<KCluster> clusters;
    std::vector<int> cluster_of_point;
    std::vector<int> revived_by;
    ClusterId provisional_id;

    KdEngine(const Batch& b, const KernelStreamState& s, const GramTables& g,
             const DMeansConfig& c, const std::vector<double>& gs)
        : batch(b), state(s), gram(g), cfg(c), gammas(gs) {
        cluster_of_point.assign(b.points.size(), -1);
        revived_by.assign(s.centers.size(), -1);
        provisional_id = s.next_id;
    }

    double row_sum(int i, const std::vector<int>& members) const {
        double s = 0.0;
        for (int j : members) s += gram.k_yy(i, j);
        return s;
    }

    void add_point(int i, int c) {
        KCluster& k = clusters[c];
        k.t_sum += 2.0 * row_sum(i, k.members) + gram.k_yy(i, i);
        if (k.old_idx >= 0) k.p_sum += gram.k_yphi(i, k.old_idx);
        k.members.push_back(i);
        cluster_of_point[i] = c;
    }

    // Removes i from its cluster; an emptied new cluster dies, an emptied
    // revival reverts to the carried pool.
    void remove_point(int i) {
        const int c = cluster_of_point[i];
        if (c < 0) return;
        KCluster& k = clusters[c];
        k.members.erase(std::find(k.members.begin(), k.members.end(), i));
        k.t_sum -= 2.0 * row_sum(i, k.members) + gram.k_yy(i, i);
        if (k.old_idx >= 0) k.p_sum -= gram.k_yphi(i, k.old_idx);
        cluster_of_point[i] = -1;
        if (k.members.empty()) {
            if (k.old_idx >= 0) revived_by[k.old_idx] = -1;
            k.alive = false;
        }
    }

    AssignChoice best_choice(int i) const {
        std::vector<KdActiveView> act;
        for (const KCluster& k : clusters) {
            if (!k.alive) continue;
            act.push_back({k.id, k.gamma, k.k_phiphi, k.p_sum, k.t_sum, k.old_idx, &k.members});
        }
        std::vector<KdOldView> old;
        for (std::size_t j = 0; j < state.centers.size(); ++j) {
            if (revived_by[j] >= 0) continue;
            old.push_back({state.centers[j].id, state.centers[j].staleness, gammas[j],
                           static_cast<int>(j)});
        }
        return kd_assign(i, act, old, gram, cfg);
    }

    // Applies a choice for a currently unassigned point.
    void apply(int i, const AssignChoice& choice) {
        if (!choice.is_new()) {
            for (int c = 0; c < static_cast<int>(clusters.size()); ++c) {
                if (clusters[c].alive && clusters[c].id == choice.id) {
                    add_point(i, c);
                    return;
                }
            }
            for (std::size_t j = 0; j < state.centers.size(); ++j) {
                if (revived_by[j] < 0 && state.centers[j].id == choice.id) {
                    KCluster k;
                    k.id = choice.id;
                    k.old_idx = static_cast<int>(j);
                    k.gamma = gammas[j];
                    k.k_phiphi = gram.k_phiphi_diag(j);
                    k.alive = true;
                    clusters.push_back(std::move(k));
                    revived_by[j] = static_cast<int>(clusters.size()) - 1;
                    add_point(i, revived_by[j]);
                    return;
                }
            }
        }
        KCluster k;
        k.id = provisional_id++;
        k.alive = true;
        clusters.push_back(std::move(k));
        add_point(i, static_cast<int>(clusters.size()) - 1);
    }

    double objective() const {
        double j = gram.k_yy.trace();
        for (const KCluster& k : clusters) {
            if (!k.alive) continue;
            const double gn = k.gamma + k.n();
            if (k.is_new())
                j += cfg.lambda;
            else
                j += cfg.q_penalty * state.centers[k.old_idx].staleness;
            j += k.gamma * k.n() * k.k_phiphi / gn - (2.0 * k.gamma * k.p_sum + k.t_sum) / gn;
        }
        return j;
    }
};

struct KdRestartOutcome {
    std::vector<int> cluster_of_point;
    std::vector<KCluster> clusters;
    double objective = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

KdRestartOutcome run_kd_descent(const Batch& batch,
                                const KernelStreamState& state,
                                const GramTables& gram,
                                const std::vector<double>& gammas,
                                const DMeansConfig& cfg,
                                const std::vector<int>& sweep_order) {
    const int n_pts = static_cast<int>(batch.points.size());
    KdEngine eng(batch, state, gram, cfg, gammas);

    // Nearest-first first pass: the unassigned point with the cheapest
    // assignment against the current instantiated/old clusters goes next, so
    // new clusters open only when nothing existing can absorb a point.
    std::vector<bool> assigned(n_pts, false);
    for (int round = 0; round < n_pts; ++round) {
        int pick = -1;
        AssignChoice pick_choice;
        double pick_cost = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_pts; ++i) {
            if (assigned[i]) continue;
            const AssignChoice c = eng.best_choice(i);
            if (c.cost < pick_cost) {
                pick = i;
                pick_choice = c;
                pick_cost = c.cost;
            }
        }
        assigned[pick] = true;
        eng.apply(pick, pick_choice);
    }

    KdRestartOutcome out;
    double j = eng.objective();
    out.trace.push_back(j);
    out.iterations = 1;

    double j_prev = j;
    for (int iter = 2; iter <= cfg.max_iters; ++iter) {
        for (int oi = 0; oi < n_pts; ++oi) {
            const int i = sweep_order[oi];
            eng.remove_point(i);
            eng.apply(i, eng.best_choice(i));
        }
        j = eng.objective();
        out.trace.push_back(j);
        out.iterations = iter;
        if (std::abs(j - j_prev) <= 1e-12 * std::max(1.0, std::abs(j_prev))) {
            out.converged = true;
            break;
        }
        j_prev = j;
    }
    out.objective = j;
    out.cluster_of_point = std::move(eng.cluster_of_point);
    out.clusters = std::move(eng.clusters);
    return out;
}

}  // namespace

AssignChoice kd_assign(int i,
                       const std::vector<KdActiveView>& instantiated,
                       const std::vector<KdOldView>& old,
                       const GramTables& gram,
                       const DMeansConfig& cfg) {
    const double k_ii = gram.k_yy(i, i);
    Candidate best{cfg.lambda, kRankNew, std::numeric_limits<ClusterId>::max()};
    ClusterId best_id = -1;

    for (const KdActiveView& a : instantiated) {
        const double gn = a.gamma + static_cast<double>(a.members->size());
        double s_i = 0.0;
        for (int j : *a.members) s_i += gram.k_yy(i, j);
        const double k_yphi = a.col >= 0 ? gram.k_yphi(i, a.col) : 0.0;
        const double cost = gn * k_ii / (gn + 1.0)
                            - 2.0 * (a.gamma * k_yphi + s_i) / (gn + 1.0)
                            + (a.gamma * a.gamma * a.k_phiphi + 2.0 * a.gamma * a.p_sum + a.t_sum)
                              / (gn * (gn + 1.0));
        Candidate c{cost, kRankActive, a.id};
        if (c.better_than(best)) {
            best = c;
            best_id = a.id;
        }
    }
    for (const KdOldView& o : old) {
        const double cost = cfg.q_penalty * o.staleness
                            + o.gamma / (o.gamma + 1.0)
                              * (gram.k_phiphi_diag(o.col) - 2.0 * gram.k_yphi(i, o.col) + k_ii);
        Candidate c{cost, kRankOld, o.id};
        if (c.better_than(best)) {
            best = c;
            best_id = o.id;
        }
    }
    return AssignChoice{best_id, best.cost};
}

double kd_objective(const GramTables& gram,
                    const std::vector<ClusterId>& labels,
                    const KernelStreamState& state,
                    const DMeansConfig& cfg,
                    bool modified_penalty) {
    std::map<ClusterId, int> col_of_id;
    for (std::size_t j = 0; j < state.centers.size(); ++j) col_of_id[state.centers[j].id] = static_cast<int>(j);

    std::map<ClusterId, std::vector<int>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(static_cast<int>(i));

    double j = gram.k_yy.trace();
    for (const auto& [id, members] : groups) {
        const auto it = col_of_id.find(id);
        const int n = static_cast<int>(members.size());
        double gamma = 0.0;
        if (it != col_of_id.end()) {
            const SparseCenter& sc = state.centers[it->second];
            gamma = gamma_of(sc.weight, sc.staleness, cfg.tau);
            const double penalty = cfg.q_penalty * sc.staleness;
            j += modified_penalty ? n / (gamma + n) * penalty : penalty;
            j += gamma * n * gram.k_phiphi_diag(it->second) / (gamma + n);
            double p = 0.0;
            for (int m : members) p += gram.k_yphi(m, it->second);
            j -= 2.0 * gamma * p / (gamma + n);
        } else {
            j += cfg.lambda;
        }
        double t = 0.0;
        for (int a : members)
            for (int b : members) t += gram.k_yy(a, b);
        j -= t / (gamma + n);
    }
    return j;
}

KernelBatchOutput kd_cluster_batch(const Batch& batch,
                                   const KernelStreamState& state,
                                   const KernelSpec& kernel,
                                   const DMeansConfig& cfg) {
    cfg.validate();
    const int n_pts = static_cast<int>(batch.points.size());
    if (n_pts == 0) throw ConfigError("batch must contain at least one point");
    for (const Vec& p : batch.points)
        if (p.size() != state.dim) throw ConfigError("point dimension does not match stream state");

    EuclideanMst mst;
    const EuclideanMst* mst_ptr = nullptr;
    if (kernel.needs_mst()) {
        mst = EuclideanMst::build(batch.points);
        mst_ptr = &mst;
    }
    const GramTables gram = build_gram_tables(batch.points, state.centers, kernel, mst_ptr);

    std::vector<double> gammas(state.centers.size());
    for (std::size_t j = 0; j < state.centers.size(); ++j)
        gammas[j] = gamma_of(state.centers[j].weight, state.centers[j].staleness, cfg.tau);

    KernelBatchOutput out;
    out.gram_clamped = gram.clamped;
    KdRestartOutcome best;
    std::vector<int> natural(n_pts);
    for (int i = 0; i < n_pts; ++i) natural[i] = i;

    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<int> order = natural;
        if (r >= 1) {
            Rng rng(cfg.seed + static_cast<std::uint64_t>(r));
            order = rng.permutation(n_pts);
        }
        KdRestartOutcome o = run_kd_descent(batch, state, gram, gammas, cfg, order);
        out.result.sweep_traces.push_back(SweepTrace{r, o.trace});
        if (o.objective < best.objective) best = std::move(o);
    }

    // Final ids: revivals keep their carried id, new clusters are numbered
    // from state.next_id in order of first appearance.
    std::map<int, ClusterId> final_id;
    ClusterId fresh = state.next_id;
    out.result.labels.resize(n_pts);
    for (int i = 0; i < n_pts; ++i) {
        const int c = best.cluster_of_point[i];
        auto it = final_id.find(c);
        if (it == final_id.end()) {
            const ClusterId id = best.clusters[c].is_new() ? fresh++ : best.clusters[c].id;
            it = final_id.emplace(c, id).first;
        }
        out.result.labels[i] = it->second;
    }
    out.result.objective = best.objective;
    out.result.iterations = best.iterations;
    out.result.converged = best.converged;

    // Fold the carried state. Input-space member means stand in as reported
    // centers; the true kernel-space centers live in the sparse supports.
    out.state.dim = state.dim;
    out.state.next_id = std::max(state.next_id, fresh);
    for (const auto& [c, id] : final_id) {
        const KCluster& k = best.clusters[c];
        Vec mean = Vec::Zero(state.dim);
        std::vector<Vec> pts;
        pts.reserve(k.members.size());
        for (int m : k.members) {
            pts.push_back(batch.points[m]);
            mean += batch.points[m];
        }
        out.result.centers[id] = mean / static_cast<double>(k.n());
        out.result.active_set.push_back(id);

        const std::vector<SupportPoint> prior =
            k.old_idx >= 0 ? state.centers[k.old_idx].support : std::vector<SupportPoint>{};
        const std::vector<SupportPoint> dense = dense_center_update(prior, k.gamma, pts);
        SparseReduceResult red = sparse_reduce(dense, cfg.budget, kernel, mst_ptr);
        out.sparse_eps[id] = red.achieved_eps;

        SparseCenter sc;
        sc.id = id;
        sc.support = std::move(red.support);
        sc.weight = k.gamma + k.n();
        sc.staleness = 1;
        out.state.centers.push_back(std::move(sc));
    }
    std::sort(out.result.active_set.begin(), out.result.active_set.end());

    std::vector<bool> observed(state.centers.size(), false);
    for (const auto& [c, id] : final_id)
        if (best.clusters[c].old_idx >= 0) observed[best.clusters[c].old_idx] = true;
    for (std::size_t j = 0; j < state.centers.size(); ++j) {
        if (observed[j]) continue;
        SparseCenter aged = state.centers[j];
        aged.staleness += 1;
        out.state.centers.push_back(std::move(aged));
    }
    std::sort(out.state.centers.begin(), out.state.centers.end(),
              [](const SparseCenter& a, const SparseCenter& b) { return a.id < b.id; });
    std::erase_if(out.state.centers, [&](const SparseCenter& sc) {
        return cfg.q_penalty * sc.staleness > cfg.lambda;
    });
    return out;
}

}  // namespace dynoclust
