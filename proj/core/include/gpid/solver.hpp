#pragma once

#include "gpid/model.hpp"

#include <vector>

namespace gpid {

/// RProp schedule for the projected gradient descent.
struct SolverConfig {
    double eta0 = 1e-3;      // initial per-element step
    double beta = 0.9;       // step adaptation factor
    double alpha = 0.999;    // global decay base, step scaled by alpha^i
    double epsilon = 1e-7;   // Schur-complement regularizer
    double tol = 1e-6;       // objective-change threshold (bits)
    int patience = 20;       // consecutive iterations below tol
    int max_iter = 10000;

    /// Throws InvalidInput when a field is out of range.
    void validate() const;
};

struct SolverResult {
    Matrix sigma_opt;                  // optimal Sigma_{X,Y|M} of Q
    double union_info = 0.0;           // bits
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // bits, one entry per iteration
};

/// Union-information objective f(Sigma) in bits:
/// 1/2 log det(I + H_Y^T H_Y + B^T S^{-1} B), B = H_X - Sigma H_Y,
/// S = (1 + epsilon) I - Sigma Sigma^T.
[[nodiscard]] double objective(const Matrix& sigma, const WhitenedSystem& w, double epsilon);

/// Gradient of the objective in nats with respect to Sigma.
[[nodiscard]] Matrix gradient(const Matrix& sigma, const WhitenedSystem& w, double epsilon);

struct ObjectiveAndGradient {
    double value_bits = 0.0;
    Matrix grad_nats;
};

/// Shares the factorizations between the objective and its gradient.
[[nodiscard]] ObjectiveAndGradient evaluate(const Matrix& sigma, const WhitenedSystem& w,
                                            double epsilon);

/// Maps any d_x x d_y matrix onto the set where [[I, Sigma], [Sigma^T, I]] is
/// PSD: clamp negative eigenvalues, then re-whiten the diagonal blocks.
/// Feasible inputs are returned unchanged.
[[nodiscard]] Matrix project(const Matrix& sigma);

/// Proj(H_X H_Y^+).
[[nodiscard]] Matrix init_sigma(const WhitenedSystem& w);

/// Minimizes the objective with RProp from init_sigma. Reports the best
/// iterate seen; non-convergence is flagged, never thrown.
[[nodiscard]] SolverResult solve_union_information(const WhitenedSystem& w,
                                                   const SolverConfig& config = {});

}  // namespace gpid
