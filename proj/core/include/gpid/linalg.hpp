#pragma once

#include <Eigen/Dense>

namespace gpid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr double kLn2 = 0.69314718055994530942;

namespace linalg {

/// (A + A^T) / 2
[[nodiscard]] Matrix symmetrize(const Matrix& a);

/// Smallest and largest eigenvalue of a symmetric matrix.
struct EigenRange {
    double min = 0.0;
    double max = 0.0;
};
[[nodiscard]] EigenRange eigen_range(const Matrix& sym);

/// V diag(sqrt(max(lambda, 0))) V^T.
[[nodiscard]] Matrix sqrtm_psd(const Matrix& sym);

/// V diag(1 / sqrt(lambda)) V^T. Returns false in `ok` when the smallest
/// eigenvalue is not above `rel_threshold * lambda_max`.
[[nodiscard]] Matrix inv_sqrtm_spd(const Matrix& sym, double rel_threshold, bool& ok);

/// log det of a symmetric positive definite matrix (natural log). Returns
/// false in `ok` when the Cholesky factorization fails.
[[nodiscard]] double logdet_spd(const Matrix& sym, bool& ok);

/// Moore-Penrose pseudoinverse via SVD with cutoff rel_cutoff * sigma_max.
[[nodiscard]] Matrix pinv(const Matrix& a, double rel_cutoff = 1e-10);

}  // namespace linalg
}  // namespace gpid
