#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dynoclust/spectral.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dynoclust;
using dctest::v2;

namespace {

DMeansConfig basic_cfg(double lambda, double q = 0.0, double tau = 0.0) {
    DMeansConfig cfg;
    cfg.lambda = lambda;
    cfg.q_penalty = q;
    cfg.tau = tau;
    cfg.budget = 1 << 20;
    return cfg;
}

KernelStreamState one_center(double x, double y, double weight, int staleness) {
    KernelStreamState st = KernelStreamState::empty(2);
    SparseCenter sc;
    sc.id = 0;
    sc.support.push_back({1.0, v2(x, y)});
    sc.weight = weight;
    sc.staleness = staleness;
    st.centers.push_back(std::move(sc));
    st.next_id = 1;
    return st;
}

}  // namespace

TEST_CASE("jacobi eigendecomposition") {
    SUBCASE("diagonal matrix") {
        Mat g(2, 2);
        g << 3, 0, 0, 1;
        const EigenDecomposition e = sym_eigendecomp(g);
        CHECK(e.values(0) == doctest::Approx(3.0));
        CHECK(e.values(1) == doctest::Approx(1.0));
        CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(e.vectors(1, 1)) == doctest::Approx(1.0));
    }
    SUBCASE("2x2 exchange matrix has eigenvalues +-1") {
        Mat g(2, 2);
        g << 0, 1, 1, 0;
        const EigenDecomposition e = sym_eigendecomp(g);
        CHECK(e.values(0) == doctest::Approx(1.0));
        CHECK(e.values(1) == doctest::Approx(-1.0));
    }
    SUBCASE("random symmetric matrices reconstruct") {
        Rng rng(10);
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 3 + static_cast<int>(rng.uniform_int(30));
            const Mat g = dctest::random_symmetric(rng, n, 2.0);
            const EigenDecomposition e = sym_eigendecomp(g);
            const Mat rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
            CHECK((rec - g).norm() <= 1e-7 * g.norm());
            CHECK((e.vectors.transpose() * e.vectors - Mat::Identity(n, n)).norm() <= 1e-8);
            for (int i = 0; i < n; ++i)
                CHECK((g * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm() <=
                      1e-8 * g.norm());
            for (int i = 1; i < n; ++i) CHECK(e.values(i) <= e.values(i - 1));
        }
    }
}

TEST_CASE("build_similarity block structure") {
    Rng rng(3);
    std::vector<Vec> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(dctest::random_vec(rng, 2));
    const KernelSpec kernel = KernelSpec::rbf(0.8);

    SUBCASE("no old clusters -> G is the data gram") {
        const KernelStreamState st = KernelStreamState::empty(2);
        const GramTables gram = build_gram_tables(pts, st.centers, kernel);
        const SimilarityBlock block = build_similarity(gram, st, basic_cfg(1.0));
        CHECK(block.n_old == 0);
        CHECK((block.g - gram.k_yy).norm() == 0.0);
    }
    SUBCASE("one old cluster: corner entry is gamma*KPhiPhi + Q*dt") {
        const KernelStreamState st = one_center(0.2, 0.3, 2.0, 3);
        const DMeansConfig cfg = basic_cfg(1.0, 0.25, 0.5);
        const GramTables gram = build_gram_tables(pts, st.centers, kernel);
        const SimilarityBlock block = build_similarity(gram, st, cfg);
        const double gamma = gamma_of(2.0, 3, 0.5);
        CHECK(block.g(6, 6) ==
              doctest::Approx(gamma * gram.k_phiphi_diag(0) + 0.25 * 3).epsilon(1e-12));
        for (int i = 0; i < 6; ++i)
            CHECK(block.g(i, 6) ==
                  doctest::Approx(std::sqrt(gamma) * gram.k_yphi(i, 0)).epsilon(1e-12));
        CHECK((block.g - block.g.transpose()).norm() == 0.0);
    }
}

TEST_CASE("select_relaxed_basis keeps eigenvectors above lambda") {
    EigenDecomposition e;
    e.values = Vec(3);
    e.values << 3.0, 1.2, 0.4;
    e.vectors = Mat::Identity(3, 3);
    CHECK(select_relaxed_basis(e, 1.0).cols() == 2);
    CHECK(select_relaxed_basis(e, 5.0).cols() == 1);  // fallback to the top one
    CHECK(select_relaxed_basis(e, 0.1).cols() == 3);
}

TEST_CASE("normalize_data_rows") {
    SUBCASE("single column becomes all ones") {
        Mat v(4, 1);
        v << 0.3, -0.2, 0.9, 0.5;
        const RowNormalized rn = normalize_data_rows(v, 3);
        CHECK(rn.v_bar.rows() == 3);
        CHECK(rn.v_bar(0, 0) == doctest::Approx(1.0));
        CHECK(rn.v_bar(1, 0) == doctest::Approx(-1.0));
        CHECK(rn.v_bar(2, 0) == doctest::Approx(1.0));
    }
    SUBCASE("row (3,4) normalizes to (0.6, 0.8)") {
        Mat v(1, 2);
        v << 3, 4;
        const RowNormalized rn = normalize_data_rows(v, 1);
        CHECK(rn.v_bar(0, 0) == doctest::Approx(0.6));
        CHECK(rn.v_bar(0, 1) == doctest::Approx(0.8));
        CHECK(!rn.degenerate);
    }
    SUBCASE("zero row gets a deterministic indicator and a flag") {
        Mat v(2, 2);
        v << 0, 0, 1, 0;
        const RowNormalized rn = normalize_data_rows(v, 2);
        CHECK(rn.degenerate);
        CHECK(rn.v_bar(0, 0) == 1.0);
        CHECK(rn.v_bar(0, 1) == 0.0);
    }
}

TEST_CASE("init_rotation is orthogonal") {
    SUBCASE("single column gives [[1]]") {
        Mat v = Mat::Ones(5, 1);
        const Mat u = init_rotation(v, 7);
        REQUIRE(u.rows() == 1);
        CHECK(u(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("identity-like rows give a (signed) permutation") {
        Mat v(6, 3);
        v << 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1;
        const Mat u = init_rotation(v, 3);
        CHECK((u.transpose() * u - Mat::Identity(3, 3)).norm() <= 1e-8);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK((std::abs(u(i, j)) < 1e-9 || std::abs(std::abs(u(i, j)) - 1.0) < 1e-9));
    }
    SUBCASE("random inputs stay orthogonal") {
        Rng rng(99);
        for (int trial = 0; trial < 10; ++trial) {
            const int a = 2 + static_cast<int>(rng.uniform_int(4));
            Mat v(12, a);
            for (int i = 0; i < 12; ++i) {
                Vec row = dctest::random_vec(rng, a);
                v.row(i) = row.transpose() / row.norm();
            }
            const Mat u = init_rotation(v, trial);
            CHECK((u.transpose() * u - Mat::Identity(a, a)).norm() <= 1e-8);
        }
    }
}

TEST_CASE("round_indicator picks the row argmax") {
    Mat v(2, 2);
    v << 0.9, 0.1, 0.2, 0.8;
    const Mat x = round_indicator(v, Mat::Identity(2, 2));
    CHECK(x(0, 0) == 1.0);
    CHECK(x(0, 1) == 0.0);
    CHECK(x(1, 1) == 1.0);
    // Exactly one nonzero per row, ties to the lowest column.
    Mat tie(1, 2);
    tie << 0.5, 0.5;
    const Mat xt = round_indicator(tie, Mat::Identity(2, 2));
    CHECK(xt(0, 0) == 1.0);
    CHECK(xt(0, 1) == 0.0);
}

TEST_CASE("refine_rotation is an orthogonal Procrustes step") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int a = 2 + static_cast<int>(rng.uniform_int(3));
        const int n = 8;
        Mat v(n, a);
        for (int i = 0; i < n; ++i) {
            Vec row = dctest::random_vec(rng, a);
            v.row(i) = row.transpose() / row.norm();
        }
        const Mat u0 = init_rotation(v, trial * 11);
        const Mat x = round_indicator(v, u0);
        const Mat u = refine_rotation(x, v);
        CHECK((u.transpose() * u - Mat::Identity(a, a)).norm() <= 1e-8);
        // Frobenius error cannot increase relative to the pre-refit rotation.
        CHECK((x - v * u).squaredNorm() <= (x - v * u0).squaredNorm() + 1e-10);
    }
    SUBCASE("X equal to V_bar gives the identity") {
        Mat x(3, 3);
        x << 1, 0, 0, 0, 1, 0, 0, 0, 1;
        const Mat u = refine_rotation(x, x);
        CHECK((u - Mat::Identity(3, 3)).norm() <= 1e-10);
    }
}

TEST_CASE("solve_feasible recovers a planted block structure") {
    // Rows exactly on 3 orthogonal axes -> the partition must match planting.
    Mat v(9, 3);
    std::vector<int> planted = {0, 1, 2, 0, 1, 2, 0, 1, 2};
    for (int i = 0; i < 9; ++i) {
        v.row(i).setZero();
        v(i, planted[i]) = 1.0;
    }
    const FeasibleRounding fr = solve_feasible(v, 5);
    CHECK(fr.frobenius_trace.size() <= 2);
    CHECK(fr.x.rows() == 9);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            const bool same = (fr.x.row(i) - fr.x.row(j)).norm() == 0.0;
            CHECK(same == (planted[i] == planted[j]));
        }
    for (std::size_t s = 1; s < fr.frobenius_trace.size(); ++s)
        CHECK(fr.frobenius_trace[s] <= fr.frobenius_trace[s - 1] + 1e-12);
}

TEST_CASE("solve_feasible with a single column is the all-ones indicator") {
    Mat v(5, 1);
    v << 1, -1, 1, 1, -1;  // row-normalized single column
    const FeasibleRounding fr = solve_feasible(v, 9);
    REQUIRE(fr.x.cols() == 1);
    for (int i = 0; i < 5; ++i) CHECK(fr.x(i, 0) == 1.0);
}

TEST_CASE("solve_feasible trace is non-increasing on random inputs") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int a = 2 + static_cast<int>(rng.uniform_int(3));
        Mat v(10 + static_cast<int>(rng.uniform_int(10)), a);
        for (int i = 0; i < v.rows(); ++i) {
            Vec row = dctest::random_vec(rng, a);
            v.row(i) = row.transpose() / row.norm();
        }
        const FeasibleRounding fr = solve_feasible(v, trial);
        for (std::size_t s = 1; s < fr.frobenius_trace.size(); ++s)
            CHECK(fr.frobenius_trace[s] <= fr.frobenius_trace[s - 1] + 1e-12);
        for (int i = 0; i < fr.x.rows(); ++i) CHECK(fr.x.row(i).sum() == doctest::Approx(1.0));
    }
}

TEST_CASE("build_match_costs prices reinstantiation") {
    const DMeansConfig cfg = basic_cfg(1.0, 0.1, 0.0);
    SUBCASE("no old clusters -> empty problem") {
        const KernelStreamState st = KernelStreamState::empty(2);
        std::vector<Vec> pts = {v2(0, 0), v2(1, 1)};
        const GramTables gram = build_gram_tables(pts, st.centers, KernelSpec::linear());
        const MatchProblem mp = build_match_costs({{0, 1}}, st, gram, cfg);
        CHECK(mp.costs.cols() == 0);
        CHECK(solve_matching(mp) == std::vector<int>{-1});
    }
    SUBCASE("temp cluster on the old center is strongly negative") {
        // Two points whose mean embedding equals phi under the linear kernel.
        const KernelStreamState st = one_center(1.0, 0.0, 4.0, 1);
        std::vector<Vec> pts = {v2(1.2, 0.0), v2(0.8, 0.0)};
        const GramTables gram = build_gram_tables(pts, st.centers, KernelSpec::linear());
        const MatchProblem mp = build_match_costs({{0, 1}}, st, gram, cfg);
        // Under the linear kernel zeta reduces to n * ||mu - phi||^2, which
        // vanishes when the temp-cluster mean sits on the old center.
        CHECK(mp.zeta(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(mp.costs(0, 0) == doctest::Approx(0.1 - 1.0).epsilon(1e-9));
        CHECK(std::isfinite(mp.costs(0, 0)));

        // Shifting the pair off the center prices in n * ||mu - phi||^2.
        std::vector<Vec> shifted = {v2(1.7, 0.0), v2(1.3, 0.0)};
        const GramTables gram2 = build_gram_tables(shifted, st.centers, KernelSpec::linear());
        const MatchProblem mp2 = build_match_costs({{0, 1}}, st, gram2, cfg);
        CHECK(mp2.zeta(0, 0) == doctest::Approx(2.0 * 0.25).epsilon(1e-9));
    }
}

TEST_CASE("solve_matching equals brute force") {
    SUBCASE("all positive costs -> everything new") {
        MatchProblem mp;
        mp.costs = Mat(2, 2);
        mp.costs << 1.0, 2.0, 0.5, 3.0;
        CHECK(solve_matching(mp) == std::vector<int>{-1, -1});
    }
    SUBCASE("frozen 2x2 instance") {
        MatchProblem mp;
        mp.costs = Mat(2, 2);
        mp.costs << -1.0, -3.0, -2.0, -1.0;
        const std::vector<int> match = solve_matching(mp);
        CHECK(match == std::vector<int>{1, 0});  // value -5
    }
    SUBCASE("random instances up to 4x4") {
        Rng rng(67);
        for (int trial = 0; trial < 200; ++trial) {
            const int a = 1 + static_cast<int>(rng.uniform_int(4));
            const int k = 1 + static_cast<int>(rng.uniform_int(4));
            MatchProblem mp;
            mp.costs = Mat(a, k);
            for (int l = 0; l < a; ++l)
                for (int c = 0; c < k; ++c) mp.costs(l, c) = rng.uniform(-2.0, 1.0);
            const std::vector<int> match = solve_matching(mp);
            double value = 0.0;
            std::set<int> used;
            for (int l = 0; l < a; ++l) {
                if (match[l] < 0) continue;
                CHECK(used.insert(match[l]).second);  // injective
                value += mp.costs(l, match[l]);
            }
            const double best = oracle::brute_force_matching(mp.costs);
            CHECK(value == doctest::Approx(best).epsilon(1e-9));
        }
    }
}

TEST_CASE("relaxed_bound closed forms") {
    SUBCASE("scalar G = [g] with lambda below g") {
        SimilarityBlock block;
        block.g = Mat(1, 1);
        block.g << 2.5;
        block.n_data = 1;
        block.n_old = 0;
        Vec ev(1);
        ev << 2.5;
        CHECK(relaxed_bound(block, ev, 1.0) == doctest::Approx(1.0));
    }
    SUBCASE("lambda above the whole spectrum uses the fallback column") {
        Rng rng(5);
        std::vector<Vec> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(dctest::random_vec(rng, 2));
        const KernelStreamState st = KernelStreamState::empty(2);
        const GramTables gram = build_gram_tables(pts, st.centers, KernelSpec::rbf(0.5));
        const SimilarityBlock block = build_similarity(gram, st, basic_cfg(100.0));
        const EigenDecomposition e = sym_eigendecomp(block.g);
        const double expect = gram.k_yy.trace() - (e.values(0) - 100.0);
        CHECK(relaxed_bound(block, e.values, 100.0) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("relaxed_bound lower-bounds the modified-penalty cost") {
    Rng rng(83);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 6 + static_cast<int>(rng.uniform_int(10));
        std::vector<Vec> pts;
        for (int i = 0; i < n; ++i) pts.push_back(dctest::random_vec(rng, 2));
        KernelStreamState st = KernelStreamState::empty(2);
        const int n_old = static_cast<int>(rng.uniform_int(3));
        for (int k = 0; k < n_old; ++k) {
            SparseCenter sc;
            sc.id = k;
            sc.support.push_back({1.0, dctest::random_vec(rng, 2)});
            sc.weight = rng.uniform(0.5, 4.0);
            sc.staleness = 1 + static_cast<int>(rng.uniform_int(3));
            st.centers.push_back(std::move(sc));
        }
        st.next_id = n_old;
        const DMeansConfig cfg = basic_cfg(rng.uniform(0.3, 1.5), rng.uniform(0.0, 0.3),
                                           rng.uniform(0.1, 1.0));
        const KernelSpec kernel = KernelSpec::rbf(0.6);
        const GramTables gram = build_gram_tables(pts, st.centers, kernel);
        const SimilarityBlock block = build_similarity(gram, st, cfg);
        const double bound = relaxed_bound(block, cfg.lambda);

        for (int lab = 0; lab < 50; ++lab) {
            std::vector<ClusterId> labels(n);
            const int n_new = 1 + static_cast<int>(rng.uniform_int(3));
            for (int i = 0; i < n; ++i) {
                const int pick = static_cast<int>(rng.uniform_int(n_old + n_new));
                labels[i] = pick < n_old ? pick : 1000 + (pick - n_old);
            }
            const double cost = kd_objective(gram, labels, st, cfg, /*modified=*/true);
            CHECK(bound <= cost + 1e-8);
        }
    }
}

TEST_CASE("sdmeans_batch separates two blobs on the first batch") {
    Rng rng(2718);
    Batch b;
    b.t = 0;
    for (int i = 0; i < 12; ++i)
        b.points.push_back(v2(0.2 + 0.02 * rng.normal(), 0.2 + 0.02 * rng.normal()));
    for (int i = 0; i < 12; ++i)
        b.points.push_back(v2(0.8 + 0.02 * rng.normal(), 0.8 + 0.02 * rng.normal()));

    // rbf kernel: within-blob similarity ~1, across ~0. Eigenvalues near the
    // block sizes (12), so a lambda between selects two directions.
    DMeansConfig cfg = basic_cfg(5.0, 0.5, 1.0);
    const KernelBatchOutput out =
        sdmeans_batch(b, KernelStreamState::empty(2), KernelSpec::rbf(0.1), cfg);
    CHECK(out.result.active_set.size() == 2);
    for (int i = 1; i < 12; ++i) CHECK(out.result.labels[i] == out.result.labels[0]);
    for (int i = 13; i < 24; ++i) CHECK(out.result.labels[i] == out.result.labels[12]);
    CHECK(out.result.labels[0] != out.result.labels[12]);
}

TEST_CASE("sdmeans_batch keeps ids across a slow move") {
    Rng rng(555);
    DMeansConfig cfg = basic_cfg(5.0, 0.5, 1.0);
    cfg.budget = 16;
    KernelStreamState st = KernelStreamState::empty(2);
    std::vector<Vec> centers = {v2(0.2, 0.2), v2(0.8, 0.8)};
    std::set<ClusterId> step0_ids;
    for (int t = 0; t < 3; ++t) {
        Batch b;
        b.t = t;
        for (const Vec& c : centers)
            for (int i = 0; i < 10; ++i)
                b.points.push_back(c + 0.02 * dctest::random_vec(rng, 2));
        const KernelBatchOutput out = sdmeans_batch(b, st, KernelSpec::rbf(0.1), cfg);
        REQUIRE(out.result.active_set.size() == 2);
        if (t == 0) {
            step0_ids.insert(out.result.active_set.begin(), out.result.active_set.end());
        } else {
            for (ClusterId id : out.result.active_set) CHECK(step0_ids.count(id) == 1);
        }
        st = out.state;
        for (Vec& c : centers) c += 0.02 * dctest::random_vec(rng, 2);
    }
}

TEST_CASE("sdmeans workspace exposes orthogonal intermediates") {
    Rng rng(444);
    Batch b;
    b.t = 0;
    for (int i = 0; i < 10; ++i)
        b.points.push_back(v2(0.3 + 0.03 * rng.normal(), 0.3 + 0.03 * rng.normal()));
    for (int i = 0; i < 10; ++i)
        b.points.push_back(v2(0.7 + 0.03 * rng.normal(), 0.7 + 0.03 * rng.normal()));
    DMeansConfig cfg = basic_cfg(4.0, 0.5, 1.0);
    SpectralWorkspace ws;
    (void)sdmeans_batch(b, KernelStreamState::empty(2), KernelSpec::rbf(0.12), cfg, &ws);
    const int a = static_cast<int>(ws.v_star.cols());
    CHECK((ws.v_star.transpose() * ws.v_star - Mat::Identity(a, a)).norm() <= 1e-8);
    CHECK((ws.u.transpose() * ws.u - Mat::Identity(a, a)).norm() <= 1e-8);
    for (int i = 0; i < ws.x.rows(); ++i) CHECK(ws.x.row(i).sum() == doctest::Approx(1.0));
    for (std::size_t s = 1; s < ws.frobenius_trace.size(); ++s)
        CHECK(ws.frobenius_trace[s] <= ws.frobenius_trace[s - 1] + 1e-12);
}
