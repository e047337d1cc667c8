#include "dynoclust/dmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynoclust {

namespace {

// Branch ranks for tie-breaking: instantiated beats old beats new.
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

// Instantiated cluster during one restart's descent.
struct Slot {
    ClusterId id = 0;
    Vec theta;
    int n = 0;
    int old_idx = -1;  // index into the carried pool when revived, else -1
    bool alive = false;
    bool is_new() const { return old_idx < 0; }
};

struct RestartOutcome {
    std::vector<int> slot_of_point;
    std::vector<Slot> slots;
    double objective = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

double sq_dist(const Vec& a, const Vec& b) { return (a - b).squaredNorm(); }

RestartOutcome run_descent(const Batch& batch,
                           const StreamState& state,
                           const std::vector<double>& gammas,
                           const DMeansConfig& cfg,
                           const std::vector<int>& order) {
    const int n_pts = static_cast<int>(batch.points.size());
    const int n_old = static_cast<int>(state.old_clusters.size());

    RestartOutcome out;
    out.slot_of_point.assign(n_pts, -1);
    std::vector<Slot>& slots = out.slots;
    std::vector<int> revived_by(n_old, -1);
    ClusterId provisional_id = state.next_id;

    auto kill_slot = [&](int s) {
        if (slots[s].old_idx >= 0) revived_by[slots[s].old_idx] = -1;
        slots[s].alive = false;
    };

    double j_prev = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        // Label pass with centers held fixed; clusters created or revived
        // mid-pass become visible to later points immediately, and clusters
        // emptied mid-pass are destroyed immediately.
        for (int oi = 0; oi < n_pts; ++oi) {
            const int i = order[oi];
            const Vec& y = batch.points[i];

            Candidate best{cfg.lambda, kRankNew, std::numeric_limits<ClusterId>::max()};
            int best_slot = -1;
            int best_old = -1;
            for (int s = 0; s < static_cast<int>(slots.size()); ++s) {
                if (!slots[s].alive) continue;
                Candidate c{sq_dist(y, slots[s].theta), kRankActive, slots[s].id};
                if (c.better_than(best)) {
                    best = c;
                    best_slot = s;
                    best_old = -1;
                }
            }
            for (int j = 0; j < n_old; ++j) {
                if (revived_by[j] >= 0) continue;
                const OldCluster& oc = state.old_clusters[j];
                const double g = gammas[j];
                const double cost = cfg.q_penalty * oc.staleness + g / (g + 1.0) * sq_dist(y, oc.phi);
                Candidate c{cost, kRankOld, oc.id};
                if (c.better_than(best)) {
                    best = c;
                    best_slot = -1;
                    best_old = j;
                }
            }

            const int cur = out.slot_of_point[i];
            if (best_slot >= 0 && best_slot == cur) continue;

            if (cur >= 0) {
                slots[cur].n -= 1;
                if (slots[cur].n == 0) kill_slot(cur);
            }

            int target;
            if (best_slot >= 0) {
                target = best_slot;
            } else if (best_old >= 0) {
                const OldCluster& oc = state.old_clusters[best_old];
                const double g = gammas[best_old];
                Slot s;
                s.id = oc.id;
                s.theta = (g * oc.phi + y) / (g + 1.0);
                s.old_idx = best_old;
                s.alive = true;
                slots.push_back(std::move(s));
                target = static_cast<int>(slots.size()) - 1;
                revived_by[best_old] = target;
            } else {
                Slot s;
                s.id = provisional_id++;
                s.theta = y;
                s.old_idx = -1;
                s.alive = true;
                slots.push_back(std::move(s));
                target = static_cast<int>(slots.size()) - 1;
            }
            slots[target].n += 1;
            out.slot_of_point[i] = target;
        }

        // Center update.
        const int n_slots = static_cast<int>(slots.size());
        std::vector<Vec> sums(n_slots);
        for (int s = 0; s < n_slots; ++s)
            if (slots[s].alive) sums[s] = Vec::Zero(state.dim);
        for (int i = 0; i < n_pts; ++i) sums[out.slot_of_point[i]] += batch.points[i];
        for (int s = 0; s < n_slots; ++s) {
            if (!slots[s].alive) continue;
            if (slots[s].old_idx >= 0) {
                const double g = gammas[slots[s].old_idx];
                slots[s].theta =
                    (g * state.old_clusters[slots[s].old_idx].phi + sums[s]) / (g + slots[s].n);
            } else {
                slots[s].theta = sums[s] / slots[s].n;
            }
        }

        // Objective.
        double j = 0.0;
        for (int s = 0; s < n_slots; ++s) {
            if (!slots[s].alive) continue;
            if (slots[s].old_idx >= 0) {
                const OldCluster& oc = state.old_clusters[slots[s].old_idx];
                const double g = gammas[slots[s].old_idx];
                j += cfg.q_penalty * oc.staleness + g * sq_dist(slots[s].theta, oc.phi);
            } else {
                j += cfg.lambda;
            }
        }
        for (int i = 0; i < n_pts; ++i)
            j += sq_dist(batch.points[i], slots[out.slot_of_point[i]].theta);

        out.trace.push_back(j);
        out.iterations = iter;
        out.objective = j;
        if (iter > 1 && std::abs(j - j_prev) <= 1e-12 * std::max(1.0, std::abs(j_prev))) {
            out.converged = true;
            break;
        }
        j_prev = j;
    }
    return out;
}

}  // namespace

AssignChoice assign_point(const Vec& y,
                          const std::vector<ActiveView>& instantiated,
                          const std::vector<OldView>& old,
                          const DMeansConfig& cfg) {
    Candidate best{cfg.lambda, kRankNew, std::numeric_limits<ClusterId>::max()};
    ClusterId best_id = -1;
    for (const ActiveView& a : instantiated) {
        Candidate c{sq_dist(y, *a.theta), kRankActive, a.id};
        if (c.better_than(best)) {
            best = c;
            best_id = a.id;
        }
    }
    for (const OldView& o : old) {
        const double cost =
            cfg.q_penalty * o.staleness + o.gamma / (o.gamma + 1.0) * sq_dist(y, *o.phi);
        Candidate c{cost, kRankOld, o.id};
        if (c.better_than(best)) {
            best = c;
            best_id = o.id;
        }
    }
    return AssignChoice{best_id, best.cost};
}

Vec update_center(const Vec& phi, double gamma, const std::vector<Vec>& assigned) {
    Vec num = gamma * phi;
    for (const Vec& y : assigned) num += y;
    return num / (gamma + static_cast<double>(assigned.size()));
}

double batch_objective(const Batch& batch,
                       const std::vector<ClusterId>& labels,
                       const std::map<ClusterId, Vec>& centers,
                       const StreamState& state,
                       const DMeansConfig& cfg) {
    std::map<ClusterId, const OldCluster*> old_by_id;
    for (const OldCluster& oc : state.old_clusters) old_by_id[oc.id] = &oc;

    double j = 0.0;
    std::map<ClusterId, bool> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const ClusterId k = labels[i];
        const Vec& theta = centers.at(k);
        j += sq_dist(batch.points[i], theta);
        if (!seen[k]) {
            seen[k] = true;
            auto it = old_by_id.find(k);
            if (it != old_by_id.end()) {
                const OldCluster& oc = *it->second;
                const double g = gamma_of(oc.weight, oc.staleness, cfg.tau);
                j += cfg.q_penalty * oc.staleness + g * sq_dist(theta, oc.phi);
            } else {
                j += cfg.lambda;
            }
        }
    }
    return j;
}

BatchResult cluster_batch(const Batch& batch, const StreamState& state, const DMeansConfig& cfg) {
    cfg.validate();
    const int n_pts = static_cast<int>(batch.points.size());
    if (n_pts == 0) throw ConfigError("batch must contain at least one point");
    for (const Vec& p : batch.points)
        if (p.size() != state.dim) throw ConfigError("point dimension does not match stream state");

    std::vector<double> gammas(state.old_clusters.size());
    for (std::size_t j = 0; j < state.old_clusters.size(); ++j)
        gammas[j] =
            gamma_of(state.old_clusters[j].weight, state.old_clusters[j].staleness, cfg.tau);

    BatchResult result;
    RestartOutcome best;
    std::vector<int> natural(n_pts);
    for (int i = 0; i < n_pts; ++i) natural[i] = i;

    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<int> order = natural;
        if (r >= 1) {
            Rng rng(cfg.seed + static_cast<std::uint64_t>(r));
            order = rng.permutation(n_pts);
        }
        RestartOutcome o = run_descent(batch, state, gammas, cfg, order);
        result.sweep_traces.push_back(SweepTrace{r, o.trace});
        if (o.objective < best.objective) best = std::move(o);
    }

    // Renumber new clusters by first appearance so ids are dense and do not
    // depend on mid-descent churn.
    std::map<int, ClusterId> final_id;
    ClusterId fresh = state.next_id;
    result.labels.resize(n_pts);
    for (int i = 0; i < n_pts; ++i) {
        const int s = best.slot_of_point[i];
        auto it = final_id.find(s);
        if (it == final_id.end()) {
            const ClusterId id = best.slots[s].is_new() ? fresh++ : best.slots[s].id;
            it = final_id.emplace(s, id).first;
        }
        result.labels[i] = it->second;
    }
    for (const auto& [s, id] : final_id) result.centers[id] = best.slots[s].theta;
    for (const auto& [id, theta] : result.centers) result.active_set.push_back(id);
    result.objective = best.objective;
    result.iterations = best.iterations;
    result.converged = best.converged;
    return result;
}

StreamState advance_state(const StreamState& state,
                          const BatchResult& result,
                          const Batch& /*batch*/,
                          const DMeansConfig& cfg) {
    std::map<ClusterId, int> counts;
    for (ClusterId k : result.labels) counts[k] += 1;

    StreamState next;
    next.dim = state.dim;
    next.next_id = state.next_id;

    std::map<ClusterId, const OldCluster*> old_by_id;
    for (const OldCluster& oc : state.old_clusters) old_by_id[oc.id] = &oc;

    // Observed clusters: fresh memory. Order follows ascending id.
    for (const auto& [id, n] : counts) {
        OldCluster oc;
        oc.id = id;
        oc.phi = result.centers.at(id);
        oc.staleness = 1;
        auto it = old_by_id.find(id);
        const double g =
            it != old_by_id.end()
                ? gamma_of(it->second->weight, it->second->staleness, cfg.tau)
                : 0.0;
        oc.weight = g + n;
        next.old_clusters.push_back(std::move(oc));
        next.next_id = std::max(next.next_id, id + 1);
    }
    // Unobserved clusters age by one step.
    for (const OldCluster& oc : state.old_clusters) {
        if (counts.count(oc.id)) continue;
        OldCluster aged = oc;
        aged.staleness += 1;
        next.old_clusters.push_back(std::move(aged));
    }
    std::sort(next.old_clusters.begin(), next.old_clusters.end(),
              [](const OldCluster& a, const OldCluster& b) { return a.id < b.id; });

    // A cluster whose revival penalty exceeds lambda can never be revived.
    std::erase_if(next.old_clusters, [&](const OldCluster& oc) {
        return cfg.q_penalty * oc.staleness > cfg.lambda;
    });
    return next;
}

}  // namespace dynoclust
