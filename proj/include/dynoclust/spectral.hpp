#pragma once

#include <vector>

#include "dynoclust/jacobi.hpp"
#include "dynoclust/kdmeans.hpp"

namespace dynoclust {

// Similarity matrix over the batch plus carried clusters:
//
//   G = [ K^YY                 K^YPhi * Gamma^1/2            ]
//       [ Gamma^1/2 * K^YPhi'  Gamma*diag(K^PhiPhi) + Omega  ]
//
// with Gamma = diag(gamma_k) and Omega = diag(Q * dt_k), the diagonal that
// makes the trace objective reproduce the modified revival penalty
// n/(gamma+n) * Q * dt.
struct SimilarityBlock {
    Mat g;
    Vec gamma_diag;  // length K
    Vec omega_diag;  // length K, entries Q * dt_k
    int n_data = 0;
    int n_old = 0;
};

SimilarityBlock build_similarity(const GramTables& gram,
                                 const KernelStreamState& state,
                                 const DMeansConfig& cfg);

// Columns of the relaxed optimum: all unit eigenvectors with eigenvalue
// strictly above lambda; the single top eigenvector if none qualify.
Mat select_relaxed_basis(const EigenDecomposition& eig, double lambda);

struct RowNormalized {
    Mat v_bar;              // n_data rows, unit norm
    bool degenerate = false;  // some row had ~zero norm and was patched
};

// Drop the trailing old-cluster rows and normalize each remaining row.
// Rows with norm below 1e-12 become the indicator of their largest-magnitude
// entry (column 0 for exact zeros) and the result is flagged.
RowNormalized normalize_data_rows(const Mat& v_star, int n_data);

// Yu-Shi seeding: a seeded random first row, then rows that minimize the
// largest absolute cosine to the rows already picked, orthonormalized.
Mat init_rotation(const Mat& v_bar, std::uint64_t seed);

// Row-wise argmax indicator of v_bar * u (ties to the lowest column).
Mat round_indicator(const Mat& v_bar, const Mat& u);

// Orthogonal Procrustes refit: X' V_bar = R S W' gives U = W R'.
Mat refine_rotation(const Mat& x, const Mat& v_bar);

struct FeasibleRounding {
    Mat x;
    Mat u;
    std::vector<double> frobenius_trace;  // ||X - V_bar U||_F^2 after each refit
};

// Alternate rounding and refitting until the Frobenius error stops
// decreasing; returns the best indicator encountered.
FeasibleRounding solve_feasible(const Mat& v_bar, std::uint64_t seed);

// Matching LP data: costs(l, k) = Q*dt_k - lambda + gamma_k zeta_lk / (gamma_k + n_l).
struct MatchProblem {
    Mat costs;
    Mat zeta;
    std::vector<int> sizes;  // n_l per temporary cluster
};

MatchProblem build_match_costs(const std::vector<std::vector<int>>& partition,
                               const KernelStreamState& state,
                               const GramTables& gram,
                               const DMeansConfig& cfg);

// Exact optimum of the matching LP: the cost matrix is padded to a square
// with zero-cost dummies (the slack form), solved by the Hungarian method,
// and real pairs read back. Entry l of the result is the old-cluster index
// matched to temporary cluster l, or -1 for a new cluster.
std::vector<int> solve_matching(const MatchProblem& problem);

// Value of the relaxed problem: tr(G) - lambda*K minus the spectral surplus
// sum_{sigma_i > lambda} (sigma_i - lambda), or sigma_max - lambda if no
// eigenvalue clears lambda. Lower-bounds the modified-penalty cost of every
// feasible labeling.
double relaxed_bound(const SimilarityBlock& block, const Vec& eigvals, double lambda);
double relaxed_bound(const SimilarityBlock& block, double lambda);

// Intermediates of one SD-Means timestep (winning restart).
struct SpectralWorkspace {
    Vec eigvals;
    Mat eigvecs;
    Mat v_star;
    Mat v_bar;
    Mat u;
    Mat x;
    std::vector<double> frobenius_trace;
    bool degenerate_rows = false;
};

// One SD-Means timestep: similarity, eigendecomposition, basis selection,
// rounding to a feasible partition, the old-cluster matching LP, then the
// same sparse-center fold as KD-Means. Restarts redo the rounding from
// different seeds; the labeling with the lowest kernelized cost wins.
KernelBatchOutput sdmeans_batch(const Batch& batch,
                                const KernelStreamState& state,
                                const KernelSpec& kernel,
                                const DMeansConfig& cfg,
                                SpectralWorkspace* workspace = nullptr);

}  // namespace dynoclust
