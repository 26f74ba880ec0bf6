#pragma once

#include "gpid/linalg.hpp"

#include <cstddef>

namespace gpid {

/// Block sizes of the message M and the two constituents X and Y.
struct Dims {
    int d_m = 1;
    int d_x = 1;
    int d_y = 1;

    [[nodiscard]] int total() const noexcept { return d_m + d_x + d_y; }
    [[nodiscard]] bool valid() const noexcept { return d_m > 0 && d_x > 0 && d_y > 0; }

    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Relative tolerances shared by validation and canonicalization.
inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kInvertibleThreshold = 1e-10;
inline constexpr double kSymmetryTolerance = 1e-6;

/// Joint covariance of (M, X, Y) in that block order. Instances are only
/// produced by validate_covariance, so every live value is symmetric and PSD.
class GaussianSystem {
public:
    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] const Matrix& sigma() const noexcept { return sigma_; }

    // Sub-blocks; a comma denotes a cross-covariance.
    [[nodiscard]] Matrix sigma_m() const;
    [[nodiscard]] Matrix sigma_x() const;
    [[nodiscard]] Matrix sigma_y() const;
    [[nodiscard]] Matrix sigma_x_m() const;   // d_x x d_m
    [[nodiscard]] Matrix sigma_y_m() const;   // d_y x d_m
    [[nodiscard]] Matrix sigma_x_y() const;   // d_x x d_y
    [[nodiscard]] Matrix sigma_xy() const;    // joint (X, Y)
    [[nodiscard]] Matrix sigma_xy_m() const;  // (d_x + d_y) x d_m

private:
    GaussianSystem(Dims dims, Matrix sigma) : dims_(dims), sigma_(std::move(sigma)) {}
    friend GaussianSystem validate_covariance(const Matrix& raw, const Dims& dims);

    Dims dims_;
    Matrix sigma_;
};

/// Canonical channel form X = H_X M + N_X, Y = H_Y M + N_Y with
/// Sigma_M = Sigma_{X|M} = Sigma_{Y|M} = I.
struct WhitenedSystem {
    Dims dims;
    Matrix h_x;          // d_x x d_m
    Matrix h_y;          // d_y x d_m
    Matrix sigma_cross;  // d_x x d_y, Sigma_{X,Y|M}
};

/// Mutual informations in bits.
struct InfoTriple {
    double i_mx = 0.0;
    double i_my = 0.0;
    double i_mxy = 0.0;
};

/// Symmetrizes and validates a raw covariance. Throws DimensionMismatch,
/// NotSymmetric or NotPositiveSemidefinite.
[[nodiscard]] GaussianSystem validate_covariance(const Matrix& raw, const Dims& dims);

/// Sigma_{XY|M} = Sigma_{XY} - Sigma_{XY,M} Sigma_M^{-1} Sigma_{XY,M}^T.
[[nodiscard]] Matrix conditional_covariance(const GaussianSystem& system);

/// Whitens M, then X and Y by their conditional covariances given M.
/// Mutual informations are unchanged by these invertible transforms.
[[nodiscard]] WhitenedSystem whiten(const GaussianSystem& system);

/// I(M;X), I(M;Y) and I(M;(X,Y)) of a whitened system, in bits.
///
/// The X-channel noise is taken as (1 + epsilon) I in all three quantities,
/// matching the Schur-complement regularization used by the solver, so that
/// the triple describes one well-defined Gaussian system and the union
/// information bounds hold exactly. Pass epsilon = 0 for the unregularized
/// values.
[[nodiscard]] InfoTriple mutual_informations(const WhitenedSystem& w, double epsilon = 1e-7);

/// Assembles the joint covariance of a whitened system.
[[nodiscard]] GaussianSystem to_system(const WhitenedSystem& w);

}  // namespace gpid
