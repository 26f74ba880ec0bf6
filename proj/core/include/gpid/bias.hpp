#pragma once

#include "gpid/model.hpp"
#include "gpid/pid.hpp"

namespace gpid {

/// Finite-sample bias of the plug-in Gaussian entropy 1/2 log det(2 pi e S),
/// in bits, for a d-dimensional sample covariance S from n samples:
///   1/2 * sum_{k=1}^{d} log2(1 - k/n).
/// Throws InsufficientSamples when n <= d.
[[nodiscard]] double entropy_bias(int d, long long n);

/// Bias of the plug-in I(A;B) in bits:
/// entropy_bias(d_a) + entropy_bias(d_b) - entropy_bias(d_a + d_b).
[[nodiscard]] double mi_bias(int d_a, int d_b, long long n);

struct BiasReport {
    long long n = 0;
    double bias_i_mx = 0.0;
    double bias_i_my = 0.0;
    double bias_i_mxy = 0.0;
    PidComponents raw;
    PidComponents corrected;
    bool rectified = false;
};

/// Bias-corrects a plug-in decomposition. The three mutual informations are
/// corrected by their biases (floored at zero); the union information is
/// scaled by (1 - bias_mxy / raw_i_mxy), then rectified into
/// [max(i_mx, i_my), min(i_mx + i_my, i_mxy)] of the corrected triple, and
/// the components are reassembled.
[[nodiscard]] BiasReport correct(const PidComponents& raw, const Dims& dims, long long n);

}  // namespace gpid
