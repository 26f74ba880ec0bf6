#pragma once

#include "gpid/estimate.hpp"
#include "gpid/model.hpp"
#include "gpid/pid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace gpid::canonical {

// Scalar-message families (d_m = d_x = d_y = 1), channel notation
// X = h_x M + N_X, Y = h_y M + N_Y, M ~ N(0, 1).

/// X = M + N_X, Y = N_Y, independent unit noises.
struct PureUnique {};
/// X = M + N_X, Y = M + N_Y with Corr(N_X, N_Y) = rho_cap < 1; the finite
/// stand-in for X = Y.
struct PureRedundant {
    double rho_cap = 0.9;
};
/// X = M + N_X, Y = N_Y, noises of variance sigma2 with correlation 0.8; the
/// finite stand-in for X - Y = M.
struct PureSynergy {
    double sigma2 = 1.0;
};
/// X = M + N_X, Y = X + N_Y' with Var(N_Y') = sigma_yx^2 (Markov chain M-X-Y).
struct UiRi {
    double sigma_yx = 1.0;
};
/// X = M + N_X, Y = N_Y, noises of variance sigma2 with correlation rho.
struct UiSi {
    double sigma2 = 1.0;
    double rho = 0.0;
};
/// X = M + N_X, Y = M + N_Y, unit noises with correlation rho.
struct RiSi {
    double rho = 0.0;
};

// Two-dimensional families built from independent scalar pieces.

/// H_X = diag(alpha, 1), H_Y = diag(1, 3), independent unit noises.
struct GainSweep {
    double alpha = 1.0;
};
/// H_X = diag(3, 1) R(theta), H_Y = diag(1, 3), independent unit noises.
struct AngleSweep {
    double theta = 0.0;
};

// Random-connectivity setups with d_m = d_x = d_y = d and Bernoulli(0.1) gains.

struct BothUnique {
    int d = 10;
    std::uint64_t seed = 0;
};
struct FullyRedundant {
    int d = 10;
    std::uint64_t seed = 0;
};
struct HighSynergy {
    int d = 10;
    std::uint64_t seed = 0;
};
struct ZeroSynergy {
    int d = 10;
    std::uint64_t seed = 0;
};
/// HighSynergy(d - d/2) stacked with ZeroSynergy(d/2) whose X and Y are swapped.
struct BitOfAll {
    int d = 10;
    std::uint64_t seed = 0;
};

using CanonicalSpec = std::variant<PureUnique, PureRedundant, PureSynergy, UiRi, UiSi, RiSi,
                                   GainSweep, AngleSweep, BothUnique, FullyRedundant, HighSynergy,
                                   ZeroSynergy, BitOfAll>;

enum class TruthSource { ScalarMMI, Additivity, Analytic };

[[nodiscard]] std::string_view to_string(TruthSource source) noexcept;

struct GroundTruth {
    std::optional<PidComponents> components;  // empty when unknown
    TruthSource source = TruthSource::ScalarMMI;
};

/// Exact joint covariance of a family, assembled from its gains and noise
/// covariances. Throws InfeasibleParameters.
[[nodiscard]] GaussianSystem build(const CanonicalSpec& spec);

/// Known decomposition of a family, computed from closed-form mutual
/// informations (never through the solver).
[[nodiscard]] GroundTruth ground_truth(const CanonicalSpec& spec);

/// 2^k independent copies of base stacked block-diagonally, regrouped as
/// (all M, all X, all Y).
[[nodiscard]] GaussianSystem doubling(const GaussianSystem& base, int k);

/// Independent systems stacked with blocks regrouped as (M..., X..., Y...).
[[nodiscard]] GaussianSystem stack(const std::vector<GaussianSystem>& parts);

/// Multivariate Poisson spike-count model with dims (2, 1, 1):
/// M1, M2 ~ Poiss(2); X = Bin(M1, alpha) + Bin(M2, 0.5) + Poiss(1);
/// Y = Bin(M1, 0.5) + Bin(M2, 0.5) + Poiss(1).
[[nodiscard]] Dataset poisson_sample(double alpha, long long n, std::uint64_t seed);

/// Lower-case snake names used on the command line, e.g. "gain_sweep".
[[nodiscard]] std::string_view name_of(const CanonicalSpec& spec);

/// Parameters that a sweep may vary, keyed by CLI flag name.
struct SpecParams {
    std::optional<double> alpha;
    std::optional<double> rho;
    std::optional<double> theta;
    std::optional<double> sigma;
    std::optional<int> d;
    std::optional<std::uint64_t> seed;
};

/// Looks up a family by name and applies the given parameters on top of its
/// defaults. Throws InvalidInput for unknown names.
[[nodiscard]] CanonicalSpec spec_from_name(std::string_view name, const SpecParams& params);

/// Name of the scalar parameter a sweep over this family varies
/// ("alpha", "rho", "theta" or "sigma"), or empty if it has none.
[[nodiscard]] std::string_view sweep_parameter(std::string_view name);

}  // namespace gpid::canonical
