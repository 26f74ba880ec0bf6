#pragma once

#include "gpid/model.hpp"
#include "gpid/solver.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gpid {

enum class PidMethod { TildeG, MMI };

[[nodiscard]] std::string_view to_string(PidMethod method) noexcept;

/// The four partial information components (bits) together with the mutual
/// informations they decompose. By construction
///   ui_x + ri = i_mx,  ui_y + ri = i_my,  ui_x + ui_y + ri + si = i_mxy.
struct PidComponents {
    double ui_x = 0.0;
    double ui_y = 0.0;
    double ri = 0.0;
    double si = 0.0;
    InfoTriple infos;
    PidMethod method = PidMethod::TildeG;
    bool converged = true;
    int iterations = 0;
    std::vector<std::string> warnings;

    /// ui_x + ui_y + ri
    [[nodiscard]] double union_info() const noexcept { return ui_x + ui_y + ri; }
};

/// Pre-clamp deficits at or below this size are silently absorbed.
inline constexpr double kSilentClampLimit = 1e-6;

/// [max(i_mx, i_my), min(i_mx + i_my, i_mxy)] in bits.
[[nodiscard]] std::pair<double, double> union_bounds(const InfoTriple& infos) noexcept;

/// Builds components from a union information value. The value is first
/// clamped into union_bounds (lower bound first, then upper), so every
/// component is nonnegative and the three consistency equations hold. A
/// clamp larger than kSilentClampLimit adds a warning and clears `converged`.
[[nodiscard]] PidComponents components_from_union(double union_info, const InfoTriple& infos,
                                                  PidMethod method, bool converged = true);

/// Gaussian-restricted tilde-PID of a system via whitening and the union
/// information solver.
[[nodiscard]] PidComponents decompose(const GaussianSystem& system,
                                      const SolverConfig& config = {});

/// Same as decompose, but also hands back the raw solver output.
[[nodiscard]] PidComponents decompose(const GaussianSystem& system, const SolverConfig& config,
                                      SolverResult& solver_out);

/// Minimum-mutual-information PID: ri = min(i_mx, i_my).
[[nodiscard]] PidComponents mmi_pid(const GaussianSystem& system, double epsilon = 1e-7);

/// Max absolute residual of the three consistency equations.
[[nodiscard]] double consistency_residual(const PidComponents& p) noexcept;

}  // namespace gpid
