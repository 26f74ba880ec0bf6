#include "gpid/bias.hpp"
#include "gpid/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gpid {

double entropy_bias(int d, long long n) {
    if (d <= 0) {
        throw Error(ErrorCode::InvalidInput, "entropy_bias needs a positive dimension");
    }
    if (n <= d) {
        std::ostringstream msg;
        msg << "need more than " << d << " samples, got " << n;
        throw Error(ErrorCode::InsufficientSamples, msg.str());
    }
    const double nn = static_cast<double>(n);
    double acc = 0.0;
    for (int k = 1; k <= d; ++k) {
        acc += std::log1p(-static_cast<double>(k) / nn);
    }
    return 0.5 * acc / kLn2;
}

double mi_bias(int d_a, int d_b, long long n) {
    return entropy_bias(d_a, n) + entropy_bias(d_b, n) - entropy_bias(d_a + d_b, n);
}

BiasReport correct(const PidComponents& raw, const Dims& dims, long long n) {
    if (n <= dims.total()) {
        std::ostringstream msg;
        msg << "bias correction needs more than " << dims.total() << " samples, got " << n;
        throw Error(ErrorCode::InsufficientSamples, msg.str());
    }
    if (!(raw.infos.i_mxy > 0.0)) {
        throw Error(ErrorCode::DegenerateInformation, "plug-in I(M;(X,Y)) is not positive");
    }

    BiasReport report;
    report.n = n;
    report.raw = raw;
    report.bias_i_mx = mi_bias(dims.d_m, dims.d_x, n);
    report.bias_i_my = mi_bias(dims.d_m, dims.d_y, n);
    report.bias_i_mxy = mi_bias(dims.d_m, dims.d_x + dims.d_y, n);

    InfoTriple c;
    c.i_mx = std::max(0.0, raw.infos.i_mx - report.bias_i_mx);
    c.i_my = std::max(0.0, raw.infos.i_my - report.bias_i_my);
    // Monotonicity of MI: the joint term never drops below either marginal.
    c.i_mxy = std::max({0.0, raw.infos.i_mxy - report.bias_i_mxy, c.i_mx, c.i_my});
    if (!(c.i_mxy > 0.0)) {
        throw Error(ErrorCode::DegenerateInformation,
                    "bias-corrected I(M;(X,Y)) is not positive");
    }

    const double scaled = raw.union_info() * (1.0 - report.bias_i_mxy / raw.infos.i_mxy);
    const double step1 = std::max({scaled, c.i_mx, c.i_my});
    const double step2 = std::min({step1, c.i_mx + c.i_my, c.i_mxy});
    report.rectified = step2 != scaled;

    report.corrected = components_from_union(step2, c, raw.method, raw.converged);
    report.corrected.iterations = raw.iterations;
    report.corrected.warnings.insert(report.corrected.warnings.begin(), raw.warnings.begin(),
                                     raw.warnings.end());
    return report;
}

}  // namespace gpid
