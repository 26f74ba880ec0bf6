#include "gpid/canonical.hpp"
#include "gpid/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace gpid::canonical {

namespace {

constexpr double kEndpointTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

[[noreturn]] void infeasible(const std::string& what) {
    throw Error(ErrorCode::InfeasibleParameters, what);
}

void require(bool cond, const char* what) {
    if (!cond) {
        infeasible(what);
    }
}

/// Sigma_M = I, X = H_X M + N_X, Y = H_Y M + N_Y, Cov(N_X, N_Y) = w.
[[nodiscard]] GaussianSystem channel_system(const Matrix& hx, const Matrix& hy, const Matrix& nx,
                                            const Matrix& ny, const Matrix& w) {
    const Dims d{static_cast<int>(hx.cols()), static_cast<int>(hx.rows()),
                 static_cast<int>(hy.rows())};
    const int mx = d.d_m + d.d_x;
    Matrix s(d.total(), d.total());
    s.topLeftCorner(d.d_m, d.d_m).setIdentity();
    s.block(d.d_m, 0, d.d_x, d.d_m) = hx;
    s.block(mx, 0, d.d_y, d.d_m) = hy;
    s.block(0, d.d_m, d.d_m, d.d_x) = hx.transpose();
    s.block(0, mx, d.d_m, d.d_y) = hy.transpose();
    s.block(d.d_m, d.d_m, d.d_x, d.d_x) = hx * hx.transpose() + nx;
    s.block(mx, mx, d.d_y, d.d_y) = hy * hy.transpose() + ny;
    s.block(d.d_m, mx, d.d_x, d.d_y) = hx * hy.transpose() + w;
    s.block(mx, d.d_m, d.d_y, d.d_x) = s.block(d.d_m, mx, d.d_x, d.d_y).transpose();
    return validate_covariance(s, d);
}

[[nodiscard]] Matrix scalar(double v) {
    return Matrix::Constant(1, 1, v);
}

[[nodiscard]] GaussianSystem scalar_channel(double hx, double hy, double var_x, double var_y,
                                            double cov_xy) {
    return channel_system(scalar(hx), scalar(hy), scalar(var_x), scalar(var_y), scalar(cov_xy));
}

[[nodiscard]] double half_log2(double v) {
    return 0.5 * std::log2(v);
}

/// Closed-form MMI decomposition for scalar M from its three MIs.
[[nodiscard]] PidComponents scalar_mmi(double i_mx, double i_my, double i_mxy) {
    return components_from_union(std::max(i_mx, i_my), InfoTriple{i_mx, i_my, i_mxy},
                                 PidMethod::MMI);
}

/// Scalar M with independent unit noises and gains a (to X) and b (to Y).
[[nodiscard]] PidComponents independent_gains_truth(double a, double b) {
    return scalar_mmi(half_log2(1.0 + a * a), half_log2(1.0 + b * b),
                      half_log2(1.0 + a * a + b * b));
}

[[nodiscard]] PidComponents add(const PidComponents& p, const PidComponents& q) {
    PidComponents s;
    s.ui_x = p.ui_x + q.ui_x;
    s.ui_y = p.ui_y + q.ui_y;
    s.ri = p.ri + q.ri;
    s.si = p.si + q.si;
    s.infos = {p.infos.i_mx + q.infos.i_mx, p.infos.i_my + q.infos.i_my,
               p.infos.i_mxy + q.infos.i_mxy};
    s.method = p.method;
    return s;
}

[[nodiscard]] PidComponents ri_si_truth(double rho) {
    return scalar_mmi(half_log2(2.0), half_log2(2.0), half_log2(1.0 + 2.0 / (1.0 + rho)));
}

[[nodiscard]] PidComponents ui_si_truth(double sigma2, double rho) {
    return scalar_mmi(half_log2(1.0 + 1.0 / sigma2), 0.0,
                      half_log2(1.0 + 1.0 / (sigma2 * (1.0 - rho * rho))));
}

void check_rho(double rho) {
    require(std::isfinite(rho) && rho >= 0.0 && rho < 1.0, "rho must lie in [0, 1)");
}

void check_sigma2(double sigma2) {
    require(std::isfinite(sigma2) && sigma2 > 0.0, "noise variance must be positive and finite");
}

void check_d(int d) {
    require(d >= 1, "dimension must be positive");
}

/// Bernoulli(0.1) gain matrix, redrawn until it has at least one nonzero entry.
[[nodiscard]] Matrix bernoulli_gains(Rng& rng, int rows, int cols) {
    std::bernoulli_distribution coin(0.1);
    Matrix h(rows, cols);
    do {
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                h(i, j) = coin(rng) ? 1.0 : 0.0;
            }
        }
    } while (h.isZero(0.0));
    return h;
}

[[nodiscard]] GaussianSystem zero_synergy(int d, std::uint64_t seed) {
    Rng rng(seed);
    const Matrix hx = bernoulli_gains(rng, d, d);
    const Matrix hy_prime = bernoulli_gains(rng, d, d);
    const Matrix hy = hy_prime * hx;
    const Matrix id = Matrix::Identity(d, d);
    const Matrix sx = hx * hx.transpose() + id;

    Matrix s(3 * d, 3 * d);
    s.block(0, 0, d, d) = id;
    s.block(d, 0, d, d) = hx;
    s.block(2 * d, 0, d, d) = hy;
    s.block(0, d, d, d) = hx.transpose();
    s.block(0, 2 * d, d, d) = hy.transpose();
    s.block(d, d, d, d) = sx;
    s.block(d, 2 * d, d, d) = sx * hy_prime.transpose();
    s.block(2 * d, d, d, d) = hy_prime * sx;
    s.block(2 * d, 2 * d, d, d) = hy_prime * sx * hy_prime.transpose() + id;
    return validate_covariance(s, Dims{d, d, d});
}

[[nodiscard]] GaussianSystem swap_constituents(const GaussianSystem& sys) {
    const Dims& d = sys.dims();
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(d.total()));
    for (int i = 0; i < d.d_m; ++i) order.push_back(i);
    for (int i = 0; i < d.d_y; ++i) order.push_back(d.d_m + d.d_x + i);
    for (int i = 0; i < d.d_x; ++i) order.push_back(d.d_m + i);
    Matrix s(d.total(), d.total());
    for (int i = 0; i < d.total(); ++i) {
        for (int j = 0; j < d.total(); ++j) {
            s(i, j) = sys.sigma()(order[static_cast<std::size_t>(i)],
                                  order[static_cast<std::size_t>(j)]);
        }
    }
    return validate_covariance(s, Dims{d.d_m, d.d_y, d.d_x});
}

[[nodiscard]] bool near(double a, double b) {
    return std::abs(a - b) <= kEndpointTolerance;
}

}  // namespace

std::string_view to_string(TruthSource source) noexcept {
    switch (source) {
        case TruthSource::ScalarMMI: return "ScalarMMI";
        case TruthSource::Additivity: return "Additivity";
        case TruthSource::Analytic: return "Analytic";
    }
    return "Unknown";
}

GaussianSystem stack(const std::vector<GaussianSystem>& parts) {
    Dims total{0, 0, 0};
    for (const auto& p : parts) {
        total.d_m += p.dims().d_m;
        total.d_x += p.dims().d_x;
        total.d_y += p.dims().d_y;
    }
    Matrix s = Matrix::Zero(total.total(), total.total());
    int om = 0;
    int ox = total.d_m;
    int oy = total.d_m + total.d_x;
    for (const auto& p : parts) {
        const Dims& d = p.dims();
        std::vector<int> map;
        map.reserve(static_cast<std::size_t>(d.total()));
        for (int i = 0; i < d.d_m; ++i) map.push_back(om + i);
        for (int i = 0; i < d.d_x; ++i) map.push_back(ox + i);
        for (int i = 0; i < d.d_y; ++i) map.push_back(oy + i);
        for (int i = 0; i < d.total(); ++i) {
            for (int j = 0; j < d.total(); ++j) {
                s(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) =
                    p.sigma()(i, j);
            }
        }
        om += d.d_m;
        ox += d.d_x;
        oy += d.d_y;
    }
    return validate_covariance(s, total);
}

GaussianSystem doubling(const GaussianSystem& base, int k) {
    if (k < 0) {
        throw Error(ErrorCode::InvalidInput, "doubling count must be nonnegative");
    }
    GaussianSystem current = base;
    for (int i = 0; i < k; ++i) {
        current = stack({current, current});
    }
    return current;
}

GaussianSystem build(const CanonicalSpec& spec) {
    return std::visit(
        overloaded{
            [](const PureUnique&) { return scalar_channel(1.0, 0.0, 1.0, 1.0, 0.0); },
            [](const PureRedundant& s) {
                check_rho(s.rho_cap);
                return scalar_channel(1.0, 1.0, 1.0, 1.0, s.rho_cap);
            },
            [](const PureSynergy& s) {
                check_sigma2(s.sigma2);
                return scalar_channel(1.0, 0.0, s.sigma2, s.sigma2, 0.8 * s.sigma2);
            },
            [](const UiRi& s) {
                require(std::isfinite(s.sigma_yx) && s.sigma_yx >= 0.0,
                        "sigma_yx must be nonnegative and finite");
                // Y = M + N_X + N_Y': Sigma_{Y|M} = 1 + s^2, Cov(N_X, N_X + N_Y') = 1.
                return scalar_channel(1.0, 1.0, 1.0, 1.0 + s.sigma_yx * s.sigma_yx, 1.0);
            },
            [](const UiSi& s) {
                check_sigma2(s.sigma2);
                check_rho(s.rho);
                return scalar_channel(1.0, 0.0, s.sigma2, s.sigma2, s.rho * s.sigma2);
            },
            [](const RiSi& s) {
                check_rho(s.rho);
                return scalar_channel(1.0, 1.0, 1.0, 1.0, s.rho);
            },
            [](const GainSweep& s) {
                require(std::isfinite(s.alpha) && s.alpha >= 0.0,
                        "alpha must be nonnegative and finite");
                const Matrix hx = Vector{{s.alpha, 1.0}}.asDiagonal();
                const Matrix hy = Vector{{1.0, 3.0}}.asDiagonal();
                const Matrix id = Matrix::Identity(2, 2);
                return channel_system(hx, hy, id, id, Matrix::Zero(2, 2));
            },
            [](const AngleSweep& s) {
                require(std::isfinite(s.theta) && s.theta >= -kEndpointTolerance &&
                            s.theta <= std::numbers::pi / 2 + kEndpointTolerance,
                        "theta must lie in [0, pi/2]");
                Matrix rot(2, 2);
                rot << std::cos(s.theta), -std::sin(s.theta), std::sin(s.theta), std::cos(s.theta);
                const Matrix hx = Vector{{3.0, 1.0}}.asDiagonal() * rot;
                const Matrix hy = Vector{{1.0, 3.0}}.asDiagonal();
                const Matrix id = Matrix::Identity(2, 2);
                return channel_system(hx, hy, id, id, Matrix::Zero(2, 2));
            },
            [](const BothUnique& s) {
                check_d(s.d);
                Rng rng(s.seed);
                const Matrix hx = bernoulli_gains(rng, s.d, s.d);
                const Matrix hy = bernoulli_gains(rng, s.d, s.d);
                const Matrix id = Matrix::Identity(s.d, s.d);
                return channel_system(hx, hy, id, id, Matrix::Zero(s.d, s.d));
            },
            [](const FullyRedundant& s) {
                check_d(s.d);
                Rng rng(s.seed);
                const Matrix hx = bernoulli_gains(rng, s.d, s.d);
                const Matrix id = Matrix::Identity(s.d, s.d);
                return channel_system(hx, hx, id, id, 0.9 * id);
            },
            [](const HighSynergy& s) {
                check_d(s.d);
                Rng rng(s.seed);
                const Matrix hx = bernoulli_gains(rng, s.d, s.d);
                const Matrix id = Matrix::Identity(s.d, s.d);
                return channel_system(hx, Matrix::Zero(s.d, s.d), id, id, 0.8 * id);
            },
            [](const ZeroSynergy& s) {
                check_d(s.d);
                return zero_synergy(s.d, s.seed);
            },
            [](const BitOfAll& s) {
                require(s.d >= 2, "bit_of_all needs d >= 2");
                const GaussianSystem syn = build(HighSynergy{s.d - s.d / 2, s.seed});
                const GaussianSystem chain = swap_constituents(zero_synergy(s.d / 2, s.seed + 1));
                return stack({syn, chain});
            },
        },
        spec);
}

GroundTruth ground_truth(const CanonicalSpec& spec) {
    return std::visit(
        overloaded{
            [](const PureUnique&) {
                return GroundTruth{scalar_mmi(half_log2(2.0), 0.0, half_log2(2.0)),
                                   TruthSource::ScalarMMI};
            },
            [](const PureRedundant& s) {
                return GroundTruth{ri_si_truth(s.rho_cap), TruthSource::ScalarMMI};
            },
            [](const PureSynergy& s) {
                return GroundTruth{ui_si_truth(s.sigma2, 0.8), TruthSource::ScalarMMI};
            },
            [](const UiRi& s) {
                const double i_mx = half_log2(2.0);
                const double i_my = half_log2(1.0 + 1.0 / (1.0 + s.sigma_yx * s.sigma_yx));
                return GroundTruth{scalar_mmi(i_mx, i_my, i_mx), TruthSource::ScalarMMI};
            },
            [](const UiSi& s) {
                return GroundTruth{ui_si_truth(s.sigma2, s.rho), TruthSource::ScalarMMI};
            },
            [](const RiSi& s) { return GroundTruth{ri_si_truth(s.rho), TruthSource::ScalarMMI}; },
            [](const GainSweep& s) {
                return GroundTruth{
                    add(independent_gains_truth(s.alpha, 1.0), independent_gains_truth(1.0, 3.0)),
                    TruthSource::Additivity};
            },
            [](const AngleSweep& s) {
                if (near(s.theta, 0.0)) {
                    return GroundTruth{add(independent_gains_truth(3.0, 1.0),
                                           independent_gains_truth(1.0, 3.0)),
                                       TruthSource::Additivity};
                }
                if (near(s.theta, std::numbers::pi / 2)) {
                    // X_2 = M_1 + N, X_1 = -3 M_2 + N: pairs (1, 1) and (3, 3).
                    return GroundTruth{add(independent_gains_truth(1.0, 1.0),
                                           independent_gains_truth(3.0, 3.0)),
                                       TruthSource::Additivity};
                }
                return GroundTruth{std::nullopt, TruthSource::Additivity};
            },
            [](const auto&) { return GroundTruth{std::nullopt, TruthSource::Analytic}; },
        },
        spec);
}

Dataset poisson_sample(double alpha, long long n, std::uint64_t seed) {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    require(n >= 1, "sample count must be positive");
    Rng rng(seed);
    std::poisson_distribution<int> rate2(2.0);
    std::poisson_distribution<int> rate1(1.0);
    Dataset ds{Matrix(n, 4), Dims{2, 1, 1}};
    for (long long r = 0; r < n; ++r) {
        const int m1 = rate2(rng);
        const int m2 = rate2(rng);
        const int x = std::binomial_distribution<int>(m1, alpha)(rng) +
                      std::binomial_distribution<int>(m2, 0.5)(rng) + rate1(rng);
        const int y = std::binomial_distribution<int>(m1, 0.5)(rng) +
                      std::binomial_distribution<int>(m2, 0.5)(rng) + rate1(rng);
        ds.data.row(r) << m1, m2, x, y;
    }
    return ds;
}

std::string_view name_of(const CanonicalSpec& spec) {
    return std::visit(overloaded{
                          [](const PureUnique&) { return std::string_view("pure_unique"); },
                          [](const PureRedundant&) { return std::string_view("pure_redundant"); },
                          [](const PureSynergy&) { return std::string_view("pure_synergy"); },
                          [](const UiRi&) { return std::string_view("ui_ri"); },
                          [](const UiSi&) { return std::string_view("ui_si"); },
                          [](const RiSi&) { return std::string_view("ri_si"); },
                          [](const GainSweep&) { return std::string_view("gain_sweep"); },
                          [](const AngleSweep&) { return std::string_view("angle_sweep"); },
                          [](const BothUnique&) { return std::string_view("both_unique"); },
                          [](const FullyRedundant&) { return std::string_view("fully_redundant"); },
                          [](const HighSynergy&) { return std::string_view("high_synergy"); },
                          [](const ZeroSynergy&) { return std::string_view("zero_synergy"); },
                          [](const BitOfAll&) { return std::string_view("bit_of_all"); },
                      },
                      spec);
}

CanonicalSpec spec_from_name(std::string_view name, const SpecParams& p) {
    const int d = p.d.value_or(10);
    const std::uint64_t seed = p.seed.value_or(0);
    if (name == "pure_unique") return PureUnique{};
    if (name == "pure_redundant") return PureRedundant{p.rho.value_or(0.9)};
    if (name == "pure_synergy") return PureSynergy{p.sigma.value_or(1.0)};
    if (name == "ui_ri") return UiRi{p.sigma.value_or(1.0)};
    if (name == "ui_si") return UiSi{p.sigma.value_or(1.0), p.rho.value_or(0.0)};
    if (name == "ri_si") return RiSi{p.rho.value_or(0.0)};
    if (name == "gain_sweep") return GainSweep{p.alpha.value_or(1.0)};
    if (name == "angle_sweep") return AngleSweep{p.theta.value_or(0.0)};
    if (name == "both_unique") return BothUnique{d, seed};
    if (name == "fully_redundant") return FullyRedundant{d, seed};
    if (name == "high_synergy") return HighSynergy{d, seed};
    if (name == "zero_synergy") return ZeroSynergy{d, seed};
    if (name == "bit_of_all") return BitOfAll{d, seed};
    throw Error(ErrorCode::InvalidInput, "unknown example name: " + std::string(name));
}

std::string_view sweep_parameter(std::string_view name) {
    if (name == "pure_redundant" || name == "ui_si" || name == "ri_si") return "rho";
    if (name == "pure_synergy" || name == "ui_ri") return "sigma";
    if (name == "gain_sweep") return "alpha";
    if (name == "angle_sweep") return "theta";
    return {};
}

}  // namespace gpid::canonical
