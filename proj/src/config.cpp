#include "dynoclust/config.hpp"

#include <cmath>
#include <string>

namespace dynoclust {

DMeansConfig DMeansConfig::from_reparam(double lambda, double t_q, double k_tau) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive, got " + std::to_string(lambda));
    if (!(t_q > 1.0)) throw ConfigError("t_q must exceed 1, got " + std::to_string(t_q));
    if (!(k_tau >= 1.0)) throw ConfigError("k_tau must be at least 1, got " + std::to_string(k_tau));
    DMeansConfig cfg;
    cfg.lambda = lambda;
    cfg.q_penalty = lambda / t_q;
    cfg.tau = (t_q * (k_tau - 1.0) + 1.0) / (t_q - 1.0);
    return cfg;
}

void DMeansConfig::validate() const {
    // lambda = 0 together with q_penalty = 0 degenerates to one free cluster
    // per point; we reject lambda <= 0 outright.
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive, got " + std::to_string(lambda));
    if (!(q_penalty >= 0.0)) throw ConfigError("q_penalty must be nonnegative");
    if (std::isnan(tau) || tau < 0.0) throw ConfigError("tau must be nonnegative (or infinity)");
    if (restarts < 1) throw ConfigError("restarts must be at least 1");
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (budget < 1) throw ConfigError("budget must be at least 1");
}

double gamma_of(double weight, int staleness, double tau) {
    if (weight <= 0.0) return 0.0;  // new cluster: no carried memory
    if (staleness <= 0) return weight;
    if (std::isinf(tau)) return 0.0;
    return 1.0 / (1.0 / weight + tau * static_cast<double>(staleness));
}

}  // namespace dynoclust
