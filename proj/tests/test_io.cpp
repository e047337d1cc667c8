#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "dynoclust/io.hpp"
#include "helpers.hpp"

using namespace dynoclust;

TEST_CASE("stream round-trips through JSONL") {
    GaussianStreamCfg cfg;
    cfg.n_clusters = 2;
    cfg.pts_per_cluster = 4;
    cfg.steps = 3;
    cfg.seed = 77;
    const LabeledStream s = gen_moving_gaussians(cfg);

    std::ostringstream out;
    write_stream(out, s.batches);
    std::istringstream in(out.str());
    const std::vector<Batch> back = read_stream(in);

    REQUIRE(back.size() == s.batches.size());
    for (std::size_t t = 0; t < back.size(); ++t) {
        CHECK(back[t].t == s.batches[t].t);
        CHECK(back[t].point_ids == s.batches[t].point_ids);
        REQUIRE(back[t].points.size() == s.batches[t].points.size());
        for (std::size_t i = 0; i < back[t].points.size(); ++i)
            CHECK((back[t].points[i] - s.batches[t].points[i]).norm() == 0.0);
    }

    std::ostringstream out2;
    write_stream(out2, back);
    CHECK(out.str() == out2.str());
}

TEST_CASE("read_stream rejects malformed lines with their number") {
    SUBCASE("broken JSON") {
        std::istringstream in("{\"t\": 0, \"id\": \"a\", \"x\": [0.1]}\nnot json\n");
        try {
            read_stream(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("non-increasing t") {
        std::istringstream in(
            "{\"t\": 1, \"id\": \"a\", \"x\": [0.1]}\n{\"t\": 0, \"id\": \"b\", \"x\": [0.2]}\n");
        CHECK_THROWS_AS(read_stream(in), ParseError);
    }
    SUBCASE("dimension change mid-stream") {
        std::istringstream in(
            "{\"t\": 0, \"id\": \"a\", \"x\": [0.1]}\n{\"t\": 0, \"id\": \"b\", \"x\": [0.2, 0.3]}\n");
        CHECK_THROWS_AS(read_stream(in), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_stream_file("/nonexistent/path.jsonl"), ParseError);
    }
}

TEST_CASE("run config parsing") {
    SUBCASE("reparameterized dmeans") {
        const RunConfig rc = parse_run_config(
            R"({"algorithm": "dmeans", "lambda": 0.04, "t_q": 6.8, "k_tau": 1.01, "restarts": 3, "seed": 9})");
        CHECK(rc.algorithm == Algorithm::DMeans);
        CHECK(rc.params.q_penalty == doctest::Approx(0.04 / 6.8));
        CHECK(rc.params.restarts == 3);
        CHECK(!rc.has_kernel);
    }
    SUBCASE("direct kdmeans with kernel") {
        const RunConfig rc = parse_run_config(
            R"({"algorithm": "kdmeans", "lambda": 1.0, "q": 0.1, "tau": 0.5,
                "kernel": {"variant": "rbf", "omega": 0.2}, "budget": 16})");
        CHECK(rc.algorithm == Algorithm::KdMeans);
        CHECK(rc.kernel.kind == KernelKind::Rbf);
        CHECK(rc.params.budget == 16);
    }
    SUBCASE("tau inf sentinel") {
        const RunConfig rc =
            parse_run_config(R"({"algorithm": "dmeans", "lambda": 1.0, "q": 0.0, "tau": "inf"})");
        CHECK(std::isinf(rc.params.tau));
    }
    SUBCASE("both parameterizations at once are rejected") {
        CHECK_THROWS_AS(parse_run_config(R"({"algorithm": "dmeans", "lambda": 1.0, "q": 0.1,
                         "tau": 0.5, "t_q": 5.0, "k_tau": 1.1})"),
                        ConfigError);
    }
    SUBCASE("kernel required iff kernelized") {
        CHECK_THROWS_AS(
            parse_run_config(R"({"algorithm": "kdmeans", "lambda": 1.0, "q": 0.1, "tau": 0.5})"),
            ConfigError);
        CHECK_THROWS_AS(parse_run_config(
                            R"({"algorithm": "dmeans", "lambda": 1.0, "q": 0.1, "tau": 0.5,
                                "kernel": "linear"})"),
                        ConfigError);
    }
    SUBCASE("lambda <= 0 is rejected") {
        CHECK_THROWS_AS(
            parse_run_config(R"({"algorithm": "dmeans", "lambda": 0.0, "q": 0.1, "tau": 0.5})"),
            ConfigError);
        CHECK_THROWS_AS(
            parse_run_config(R"({"algorithm": "dmeans", "lambda": -1.0, "q": 0.1, "tau": 0.5})"),
            ConfigError);
    }
}

TEST_CASE("label files align by point id for scoring") {
    GaussianStreamCfg cfg;
    cfg.n_clusters = 2;
    cfg.pts_per_cluster = 3;
    cfg.steps = 2;
    cfg.seed = 5;
    const LabeledStream s = gen_moving_gaussians(cfg);

    std::ostringstream truth_os;
    write_labels(truth_os, s.batches, s.truth);
    // Write predictions in REVERSED point order within each step; alignment
    // by id must still give accuracy 1.
    std::ostringstream pred_os;
    for (const Batch& b : s.batches) {
        for (int i = static_cast<int>(b.points.size()) - 1; i >= 0; --i) {
            pred_os << "{\"t\": " << b.t << ", \"id\": \"" << b.point_ids[i]
                    << "\", \"cluster\": "
                    << s.truth[b.t][i] << "}\n";
        }
    }
    const std::string tf = "/tmp/dc_truth.jsonl", pf = "/tmp/dc_pred.jsonl";
    {
        std::ofstream t(tf), p(pf);
        t << truth_os.str();
        p << pred_os.str();
    }
    const AccuracyReport r = score_label_files(read_labels_file(pf), read_labels_file(tf));
    CHECK(r.overall == doctest::Approx(1.0));
}
