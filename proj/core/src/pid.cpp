#include "gpid/pid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gpid {

std::string_view to_string(PidMethod method) noexcept {
    return method == PidMethod::MMI ? "MMI" : "TildeG";
}

std::pair<double, double> union_bounds(const InfoTriple& infos) noexcept {
    const double lower = std::max(infos.i_mx, infos.i_my);
    const double upper = std::min(infos.i_mx + infos.i_my, infos.i_mxy);
    return {lower, upper};
}

PidComponents components_from_union(double union_info, const InfoTriple& infos,
                                    PidMethod method, bool converged) {
    PidComponents p;
    p.infos = infos;
    p.method = method;
    p.converged = converged;

    const auto [lower, upper] = union_bounds(infos);
    const double clamped = std::min(std::max(union_info, lower), upper);
    const double shift = std::abs(clamped - union_info);
    if (shift > kSilentClampLimit) {
        std::ostringstream msg;
        msg << "union information " << union_info << " clamped to [" << lower << ", " << upper
            << "] (shift " << shift << " bits)";
        p.warnings.push_back(msg.str());
        p.converged = false;
    }

    p.ui_x = clamped - infos.i_my;
    p.ui_y = clamped - infos.i_mx;
    p.ri = infos.i_mx + infos.i_my - clamped;
    p.si = infos.i_mxy - clamped;
    return p;
}

PidComponents decompose(const GaussianSystem& system, const SolverConfig& config,
                        SolverResult& solver_out) {
    const WhitenedSystem w = whiten(system);
    const InfoTriple infos = mutual_informations(w, config.epsilon);
    solver_out = solve_union_information(w, config);
    PidComponents p =
        components_from_union(solver_out.union_info, infos, PidMethod::TildeG, solver_out.converged);
    p.iterations = solver_out.iterations;
    if (!solver_out.converged) {
        p.warnings.insert(p.warnings.begin(), "solver reached max_iter without converging");
    }
    return p;
}

PidComponents decompose(const GaussianSystem& system, const SolverConfig& config) {
    SolverResult unused;
    return decompose(system, config, unused);
}

PidComponents mmi_pid(const GaussianSystem& system, double epsilon) {
    const InfoTriple infos = mutual_informations(whiten(system), epsilon);
    // min redundancy <=> union = max(i_mx, i_my)
    return components_from_union(std::max(infos.i_mx, infos.i_my), infos, PidMethod::MMI);
}

double consistency_residual(const PidComponents& p) noexcept {
    const double r1 = p.ui_x + p.ui_y + p.ri + p.si - p.infos.i_mxy;
    const double r2 = p.ui_x + p.ri - p.infos.i_mx;
    const double r3 = p.ui_y + p.ri - p.infos.i_my;
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
}

}  // namespace gpid
