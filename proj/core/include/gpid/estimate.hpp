#pragma once

#include "gpid/bias.hpp"
#include "gpid/model.hpp"
#include "gpid/pid.hpp"
#include "gpid/solver.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace gpid {

/// Seeded generator used by every stochastic routine in the library.
using Rng = std::mt19937_64;

/// n i.i.d. samples of (M, X, Y), one row per sample, columns in block order.
struct Dataset {
    Matrix data;
    Dims dims;

    [[nodiscard]] long long n() const noexcept { return data.rows(); }
    /// Throws DimensionMismatch / InsufficientSamples.
    void validate() const;
};

struct ComponentStats {
    double mean = 0.0;
    double sd = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

struct BootstrapSummary {
    int b = 0;
    std::uint64_t seed = 0;
    int used = 0;
    int skipped = 0;
    // ui_x, ui_y, ri, si of the bias-corrected estimates
    std::array<ComponentStats, 4> per_component{};
    std::vector<PidComponents> resamples;
};

/// Column-centered covariance with 1/(n-1) normalization.
[[nodiscard]] GaussianSystem sample_covariance(const Dataset& ds);

/// Plug-in PID of the sample covariance; optionally bias-corrected with the
/// dataset's n. When bias_correct is false, corrected == raw.
[[nodiscard]] BiasReport estimate_pid(const Dataset& ds, const SolverConfig& config,
                                      bool bias_correct);

/// The same pipeline starting from an already-estimated covariance.
[[nodiscard]] BiasReport estimate_pid(const GaussianSystem& covariance, long long n,
                                      const SolverConfig& config, bool bias_correct);

/// b resamples with replacement; each is bias-corrected with its number of
/// distinct rows as n. Resamples with too few distinct rows are skipped.
/// threads == 0 uses the hardware concurrency; the result does not depend on
/// the thread count.
[[nodiscard]] BootstrapSummary bootstrap_pid(const Dataset& ds, int b, std::uint64_t seed,
                                             const SolverConfig& config, unsigned threads = 0);

/// Number of distinct rows under exact bitwise equality.
[[nodiscard]] long long count_unique_rows(const Matrix& data);

/// Summary statistics with linearly interpolated quartiles.
[[nodiscard]] ComponentStats summarize(std::vector<double> values);

/// Projects column-centered data onto its top-k principal axes, ordered by
/// descending variance; each axis is signed so its largest-magnitude loading
/// is positive.
[[nodiscard]] Matrix pca_reduce(const Matrix& data, int k);

/// Applies pca_reduce to the X and Y blocks separately (blocks already at or
/// below k columns are left alone). M is never reduced.
[[nodiscard]] Dataset pca_reduce_blocks(const Dataset& ds, int k);

/// n draws from N(0, system.sigma()).
[[nodiscard]] Dataset sample_gaussian(const GaussianSystem& system, long long n, std::uint64_t seed);

}  // namespace gpid
