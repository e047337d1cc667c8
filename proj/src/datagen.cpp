#include "dynoclust/datagen.hpp"

#include <cmath>
#include <string>

namespace dynoclust {

namespace {

Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

}  // namespace

LabeledStream gen_moving_gaussians(const GaussianStreamCfg& cfg) {
    if (cfg.n_clusters < 1 || cfg.pts_per_cluster < 1 || cfg.steps < 1)
        throw ConfigError("gaussian stream needs at least one cluster, point, and step");
    if (cfg.death_prob < 0.0 || cfg.death_prob > 1.0)
        throw ConfigError("death_prob must lie in [0, 1]");
    if (!(cfg.noise_sd >= 0.0) || !(cfg.walk_sd >= 0.0))
        throw ConfigError("standard deviations must be nonnegative");

    Rng rng(cfg.seed);
    LabeledStream out;
    std::vector<Vec> centers(cfg.n_clusters);
    std::vector<ClusterId> ids(cfg.n_clusters);
    ClusterId next_id = 0;
    for (int c = 0; c < cfg.n_clusters; ++c) {
        centers[c] = vec2(rng.uniform01(), rng.uniform01());
        ids[c] = next_id++;
        out.events.push_back({0, true, ids[c]});
    }

    for (int t = 0; t < cfg.steps; ++t) {
        if (t > 0) {
            for (int c = 0; c < cfg.n_clusters; ++c) {
                centers[c](0) += cfg.walk_sd * rng.normal();
                centers[c](1) += cfg.walk_sd * rng.normal();
            }
            for (int c = 0; c < cfg.n_clusters; ++c) {
                if (rng.uniform01() < cfg.death_prob) {
                    out.events.push_back({t, false, ids[c]});
                    ids[c] = next_id++;
                    centers[c] = vec2(rng.uniform01(), rng.uniform01());
                    out.events.push_back({t, true, ids[c]});
                }
            }
        }
        Batch batch;
        batch.t = t;
        std::vector<ClusterId> truth;
        for (int c = 0; c < cfg.n_clusters; ++c) {
            for (int p = 0; p < cfg.pts_per_cluster; ++p) {
                Vec y = centers[c];
                y(0) += cfg.noise_sd * rng.normal();
                y(1) += cfg.noise_sd * rng.normal();
                batch.point_ids.push_back("t" + std::to_string(t) + "-" +
                                          std::to_string(batch.points.size()));
                batch.points.push_back(std::move(y));
                truth.push_back(ids[c]);
            }
        }
        out.batches.push_back(std::move(batch));
        out.truth.push_back(std::move(truth));
    }
    return out;
}

LabeledStream gen_moving_rings(const RingStreamCfg& cfg) {
    if (cfg.pts_per_step < 1 || cfg.steps < 1 || cfg.radii.empty())
        throw ConfigError("ring stream needs at least one ring, point, and step");
    if (!(cfg.noise_sd >= 0.0) || !(cfg.walk_sd >= 0.0))
        throw ConfigError("standard deviations must be nonnegative");

    Rng rng(cfg.seed);
    const int n_rings = static_cast<int>(cfg.radii.size());
    LabeledStream out;
    // Concentric rings stay concentric: the shared center random-walks as a
    // unit, so rings never cross each other.
    Vec center = vec2(0.5, 0.5);
    for (int r = 0; r < n_rings; ++r) out.events.push_back({0, true, r});

    const int base = cfg.pts_per_step / n_rings;
    const int rem = cfg.pts_per_step % n_rings;

    for (int t = 0; t < cfg.steps; ++t) {
        if (t > 0) {
            center(0) += cfg.walk_sd * rng.normal();
            center(1) += cfg.walk_sd * rng.normal();
        }
        Batch batch;
        batch.t = t;
        std::vector<ClusterId> truth;
        for (int r = 0; r < n_rings; ++r) {
            const int count = base + (r < rem ? 1 : 0);
            for (int p = 0; p < count; ++p) {
                const double angle = 6.283185307179586476925286766559 * rng.uniform01();
                Vec y = center;
                y(0) += cfg.radii[r] * std::cos(angle) + cfg.noise_sd * rng.normal();
                y(1) += cfg.radii[r] * std::sin(angle) + cfg.noise_sd * rng.normal();
                batch.point_ids.push_back("t" + std::to_string(t) + "-" +
                                          std::to_string(batch.points.size()));
                batch.points.push_back(std::move(y));
                truth.push_back(r);
            }
        }
        out.batches.push_back(std::move(batch));
        out.truth.push_back(std::move(truth));
    }
    return out;
}

}  // namespace dynoclust
