#include "dynoclust/spectral.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dynoclust/hungarian.hpp"

namespace dynoclust {

SimilarityBlock build_similarity(const GramTables& gram,
                                 const KernelStreamState& state,
                                 const DMeansConfig& cfg) {
    const int n = static_cast<int>(gram.k_yy.rows());
    const int k = static_cast<int>(state.centers.size());
    SimilarityBlock block;
    block.n_data = n;
    block.n_old = k;
    block.gamma_diag.resize(k);
    block.omega_diag.resize(k);
    block.g = Mat::Zero(n + k, n + k);
    block.g.topLeftCorner(n, n) = gram.k_yy;
    for (int c = 0; c < k; ++c) {
        const SparseCenter& sc = state.centers[c];
        const double gamma = gamma_of(sc.weight, sc.staleness, cfg.tau);
        block.gamma_diag(c) = gamma;
        block.omega_diag(c) = cfg.q_penalty * sc.staleness;
        const double root = std::sqrt(gamma);
        for (int i = 0; i < n; ++i) {
            block.g(i, n + c) = gram.k_yphi(i, c) * root;
            block.g(n + c, i) = block.g(i, n + c);
        }
        block.g(n + c, n + c) = gamma * gram.k_phiphi_diag(c) + block.omega_diag(c);
    }
    // Assembly is symmetric by construction; enforce it exactly anyway.
    block.g = ((block.g + block.g.transpose()) * 0.5).eval();
    return block;
}

Mat select_relaxed_basis(const EigenDecomposition& eig, double lambda) {
    const int n = static_cast<int>(eig.values.size());
    int count = 0;
    while (count < n && eig.values(count) > lambda) ++count;
    if (count == 0) count = 1;  // fall back to the single top eigenvector
    return eig.vectors.leftCols(count);
}

RowNormalized normalize_data_rows(const Mat& v_star, int n_data) {
    if (v_star.rows() < n_data) throw ConfigError("normalize_data_rows: too few rows");
    RowNormalized out;
    out.v_bar = v_star.topRows(n_data);
    for (int i = 0; i < n_data; ++i) {
        const double norm = out.v_bar.row(i).norm();
        if (norm < 1e-12) {
            out.degenerate = true;
            int jmax = 0;
            out.v_bar.row(i).cwiseAbs().maxCoeff(&jmax);
            out.v_bar.row(i).setZero();
            out.v_bar(i, jmax) = 1.0;
        } else {
            out.v_bar.row(i) /= norm;
        }
    }
    return out;
}

Mat init_rotation(const Mat& v_bar, std::uint64_t seed) {
    const int n = static_cast<int>(v_bar.rows());
    const int a = static_cast<int>(v_bar.cols());
    Rng rng(seed);

    Mat u(a, a);
    std::vector<int> picked;
    picked.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n))));
    u.row(0) = v_bar.row(picked[0]);
    for (int r = 1; r < a; ++r) {
        int best = -1;
        double best_score = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double score = 0.0;
            for (int t = 0; t < r; ++t)
                score = std::max(score, std::abs(v_bar.row(i).dot(v_bar.row(picked[t]))));
            if (score < best_score) {
                best_score = score;
                best = i;
            }
        }
        picked.push_back(best);
        u.row(r) = v_bar.row(best);
    }

    // Gram-Schmidt the picked rows; degenerate picks fall back to canonical
    // basis completion. Each row's dominant entry is made positive so the
    // result is unique.
    for (int r = 0; r < a; ++r) {
        for (int t = 0; t < r; ++t) u.row(r) -= u.row(r).dot(u.row(t)) * u.row(t);
        double norm = u.row(r).norm();
        if (norm < 1e-8) {
            for (int j = 0; j < a; ++j) {
                Eigen::RowVectorXd cand = Eigen::RowVectorXd::Zero(a);
                cand(j) = 1.0;
                for (int t = 0; t < r; ++t) cand -= cand.dot(u.row(t)) * u.row(t);
                if (cand.norm() > 1e-8) {
                    u.row(r) = cand;
                    break;
                }
            }
            norm = u.row(r).norm();
        }
        u.row(r) /= norm;
        int jmax = 0;
        u.row(r).cwiseAbs().maxCoeff(&jmax);
        if (u(r, jmax) < 0.0) u.row(r) = -u.row(r);
    }
    return u;
}

Mat round_indicator(const Mat& v_bar, const Mat& u) {
    const Mat m = v_bar * u;
    Mat x = Mat::Zero(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i) {
        int jbest = 0;
        for (int j = 1; j < m.cols(); ++j)
            if (m(i, j) > m(i, jbest)) jbest = j;  // ties keep the lowest column
        x(i, jbest) = 1.0;
    }
    return x;
}

Mat refine_rotation(const Mat& x, const Mat& v_bar) {
    Eigen::JacobiSVD<Mat> svd(x.transpose() * v_bar, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixV() * svd.matrixU().transpose();
}

FeasibleRounding solve_feasible(const Mat& v_bar, std::uint64_t seed) {
    FeasibleRounding out;
    Mat u = init_rotation(v_bar, seed);
    double best = std::numeric_limits<double>::infinity();
    double prev = std::numeric_limits<double>::infinity();
    constexpr int kMaxRounds = 100;
    for (int round = 0; round < kMaxRounds; ++round) {
        const Mat x = round_indicator(v_bar, u);
        u = refine_rotation(x, v_bar);
        const double err = (x - v_bar * u).squaredNorm();
        out.frobenius_trace.push_back(err);
        if (err < best) {
            best = err;
            out.x = x;
            out.u = u;
        }
        if (err >= prev) break;
        prev = err;
    }
    return out;
}

MatchProblem build_match_costs(const std::vector<std::vector<int>>& partition,
                               const KernelStreamState& state,
                               const GramTables& gram,
                               const DMeansConfig& cfg) {
    const int a = static_cast<int>(partition.size());
    const int k = static_cast<int>(state.centers.size());
    MatchProblem mp;
    mp.costs.resize(a, k);
    mp.zeta.resize(a, k);
    mp.sizes.resize(a);
    for (int l = 0; l < a; ++l) {
        const auto& members = partition[l];
        const int nl = static_cast<int>(members.size());
        mp.sizes[l] = nl;
        double yy = 0.0;
        for (int i : members)
            for (int j : members) yy += gram.k_yy(i, j);
        for (int c = 0; c < k; ++c) {
            const SparseCenter& sc = state.centers[c];
            const double gamma = gamma_of(sc.weight, sc.staleness, cfg.tau);
            double yphi = 0.0;
            for (int i : members) yphi += gram.k_yphi(i, c);
            const double zeta = nl * gram.k_phiphi_diag(c) - 2.0 * yphi + yy / nl;
            mp.zeta(l, c) = zeta;
            mp.costs(l, c) =
                cfg.q_penalty * sc.staleness - cfg.lambda + gamma * zeta / (gamma + nl);
        }
    }
    return mp;
}

std::vector<int> solve_matching(const MatchProblem& problem) {
    const int a = static_cast<int>(problem.costs.rows());
    const int k = static_cast<int>(problem.costs.cols());
    const int n = a + k;
    std::vector<int> match(a, -1);
    if (a == 0 || k == 0) return match;

    // Zero-cost dummies encode "stay new" (rows) and "stay dormant"
    // (columns); a real pair enters the optimum only if it helps.
    Mat padded = Mat::Zero(n, n);
    padded.topLeftCorner(a, k) = problem.costs;
    const std::vector<int> row_to_col = hungarian_min_assign(padded);
    for (int l = 0; l < a; ++l)
        if (row_to_col[l] < k) match[l] = row_to_col[l];
    return match;
}

double relaxed_bound(const SimilarityBlock& block, const Vec& eigvals, double lambda) {
    double bound = block.g.trace() - lambda * block.n_old;
    double surplus = 0.0;
    bool any = false;
    for (int i = 0; i < eigvals.size(); ++i) {
        if (eigvals(i) > lambda) {
            surplus += eigvals(i) - lambda;
            any = true;
        }
    }
    if (!any && eigvals.size() > 0) surplus = eigvals(0) - lambda;
    return bound - surplus;
}

double relaxed_bound(const SimilarityBlock& block, double lambda) {
    return relaxed_bound(block, sym_eigendecomp(block.g).values, lambda);
}

KernelBatchOutput sdmeans_batch(const Batch& batch,
                                const KernelStreamState& state,
                                const KernelSpec& kernel,
                                const DMeansConfig& cfg,
                                SpectralWorkspace* workspace) {
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
    const SimilarityBlock block = build_similarity(gram, state, cfg);
    const EigenDecomposition eig = sym_eigendecomp(block.g);

    Mat v_star = select_relaxed_basis(eig, cfg.lambda);
    // More candidate clusters than datapoints cannot be rounded; keep the
    // strongest n_pts directions.
    if (v_star.cols() > n_pts) v_star = v_star.leftCols(n_pts).eval();
    const RowNormalized rn = normalize_data_rows(v_star, n_pts);

    struct RestartResult {
        std::vector<ClusterId> labels;
        double objective = std::numeric_limits<double>::infinity();
        FeasibleRounding rounding;
    };
    RestartResult best;

    for (int r = 0; r < cfg.restarts; ++r) {
        FeasibleRounding fr = solve_feasible(rn.v_bar, cfg.seed + static_cast<std::uint64_t>(r));

        std::vector<std::vector<int>> partition;
        for (int j = 0; j < fr.x.cols(); ++j) {
            std::vector<int> members;
            for (int i = 0; i < n_pts; ++i)
                if (fr.x(i, j) > 0.5) members.push_back(i);
            if (!members.empty()) partition.push_back(std::move(members));
        }

        const MatchProblem mp = build_match_costs(partition, state, gram, cfg);
        const std::vector<int> match = solve_matching(mp);

        std::vector<ClusterId> labels(n_pts, -1);
        ClusterId provisional = state.next_id;
        for (std::size_t l = 0; l < partition.size(); ++l) {
            const ClusterId id =
                match[l] >= 0 ? state.centers[match[l]].id : provisional++;
            for (int i : partition[l]) labels[i] = id;
        }
        const double obj = kd_objective(gram, labels, state, cfg);
        if (obj < best.objective) {
            best.labels = std::move(labels);
            best.objective = obj;
            best.rounding = std::move(fr);
        }
    }

    if (workspace != nullptr) {
        workspace->eigvals = eig.values;
        workspace->eigvecs = eig.vectors;
        workspace->v_star = v_star;
        workspace->v_bar = rn.v_bar;
        workspace->u = best.rounding.u;
        workspace->x = best.rounding.x;
        workspace->frobenius_trace = best.rounding.frobenius_trace;
        workspace->degenerate_rows = rn.degenerate;
    }

    // Assemble the output and fold the carried state, mirroring KD-Means.
    KernelBatchOutput out;
    out.gram_clamped = gram.clamped;
    out.result.iterations = static_cast<int>(best.rounding.frobenius_trace.size());
    out.result.converged = true;
    out.result.objective = best.objective;
    out.result.sweep_traces.push_back(SweepTrace{0, best.rounding.frobenius_trace});

    // Renumber new clusters by first appearance.
    std::map<ClusterId, ClusterId> remap;
    ClusterId fresh = state.next_id;
    std::map<ClusterId, int> old_col;
    for (std::size_t c = 0; c < state.centers.size(); ++c) old_col[state.centers[c].id] = static_cast<int>(c);
    out.result.labels.resize(n_pts);
    for (int i = 0; i < n_pts; ++i) {
        const ClusterId raw = best.labels[i];
        auto it = remap.find(raw);
        if (it == remap.end()) {
            const ClusterId id = old_col.count(raw) ? raw : fresh++;
            it = remap.emplace(raw, id).first;
        }
        out.result.labels[i] = it->second;
    }

    std::map<ClusterId, std::vector<int>> groups;
    for (int i = 0; i < n_pts; ++i) groups[out.result.labels[i]].push_back(i);

    out.state.dim = state.dim;
    out.state.next_id = std::max(state.next_id, fresh);
    std::vector<bool> observed(state.centers.size(), false);
    for (const auto& [id, members] : groups) {
        Vec mean = Vec::Zero(state.dim);
        std::vector<Vec> pts;
        pts.reserve(members.size());
        for (int m : members) {
            pts.push_back(batch.points[m]);
            mean += batch.points[m];
        }
        out.result.centers[id] = mean / static_cast<double>(members.size());
        out.result.active_set.push_back(id);

        double gamma = 0.0;
        std::vector<SupportPoint> prior;
        auto it = old_col.find(id);
        if (it != old_col.end()) {
            observed[it->second] = true;
            const SparseCenter& sc = state.centers[it->second];
            gamma = gamma_of(sc.weight, sc.staleness, cfg.tau);
            prior = sc.support;
        }
        const std::vector<SupportPoint> dense = dense_center_update(prior, gamma, pts);
        SparseReduceResult red = sparse_reduce(dense, cfg.budget, kernel, mst_ptr);
        out.sparse_eps[id] = red.achieved_eps;

        SparseCenter sc;
        sc.id = id;
        sc.support = std::move(red.support);
        sc.weight = gamma + static_cast<double>(members.size());
        sc.staleness = 1;
        out.state.centers.push_back(std::move(sc));
    }
    for (std::size_t c = 0; c < state.centers.size(); ++c) {
        if (observed[c]) continue;
        SparseCenter aged = state.centers[c];
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
