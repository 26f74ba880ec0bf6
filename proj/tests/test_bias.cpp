#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace gpid;

namespace {

/// Exact expected error of 1/2 log2 det of the 1/(n-1) sample covariance.
double exact_entropy_bias(int d, long long n) {
    double s = 0.0;
    for (int i = 1; i <= d; ++i) {
        s += oracle::digamma((static_cast<double>(n) - i) / 2.0);
    }
    s += d * std::log(2.0 / static_cast<double>(n - 1));
    return 0.5 * s / std::log(2.0);
}

}  // namespace

TEST_CASE("entropy_bias examples") {
    CHECK(entropy_bias(1, 2) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(entropy_bias(2, 4) == doctest::Approx(0.5 * (std::log2(0.75) + std::log2(0.5))));
    for (long long n : {1000LL, 100000LL, 10000000LL}) {
        const double asym = -1.0 / (2.0 * static_cast<double>(n) * std::log(2.0));
        CHECK(entropy_bias(1, n) == doctest::Approx(asym).epsilon(2.0 / static_cast<double>(n)));
    }
    CHECK_THROWS_AS((void)entropy_bias(3, 2), Error);
    CHECK_THROWS_AS((void)entropy_bias(3, 3), Error);
    CHECK_THROWS_AS((void)entropy_bias(0, 10), Error);
}

TEST_CASE("entropy_bias tracks the exact Wishart expectation") {
    for (int d : {1, 3, 5}) {
        for (long long n : {50LL, 200LL, 1000LL}) {
            const double exact = exact_entropy_bias(d, n);
            CHECK(std::abs(entropy_bias(d, n) - exact) <= 0.03 * std::abs(exact));
        }
    }
}

TEST_CASE("entropy_bias monotonicity") {
    for (long long n : {20LL, 100LL, 1000LL}) {
        for (int d = 1; d < 10; ++d) {
            CHECK(entropy_bias(d, n) < 0.0);
            CHECK(entropy_bias(d + 1, n) < entropy_bias(d, n));
            CHECK(entropy_bias(d, n + 1) > entropy_bias(d, n));
        }
    }
}

TEST_CASE("mi_bias examples") {
    CHECK(mi_bias(1, 1, 100) == doctest::Approx(0.5 * std::log2(0.99 / 0.98)).epsilon(1e-12));
    CHECK(mi_bias(1, 1, 100) == doctest::Approx(0.00732).epsilon(1e-3));
    CHECK(std::abs(mi_bias(3, 7, 100000000)) < 1e-6);
    CHECK_THROWS_AS((void)mi_bias(10, 20, 25), Error);
    CHECK_THROWS_AS((void)mi_bias(10, 20, 30), Error);
    CHECK(mi_bias(10, 20, 31) > 0.0);
}

TEST_CASE("correct: vanishing bias leaves the estimate alone") {
    const PidComponents raw = decompose(canonical::build(canonical::GainSweep{2.0}));
    REQUIRE(raw.ui_x > 0.01);
    REQUIRE(raw.ui_y > 0.01);
    REQUIRE(raw.si > 0.01);
    const BiasReport rep = correct(raw, Dims{2, 2, 2}, 1000000000000LL);
    CHECK_FALSE(rep.rectified);
    CHECK(rep.corrected.ui_x == doctest::Approx(raw.ui_x).epsilon(1e-9));
    CHECK(rep.corrected.ri == doctest::Approx(raw.ri).epsilon(1e-9));
    CHECK(rep.corrected.si == doctest::Approx(raw.si).epsilon(1e-9));
}

TEST_CASE("correct: hand-computed interior case") {
    const InfoTriple t{0.8, 0.7, 1.4};
    const PidComponents raw = components_from_union(1.0, t, PidMethod::TildeG);
    const Dims d{1, 1, 1};
    const long long n = 200;
    const BiasReport rep = correct(raw, d, n);
    const double bx = mi_bias(1, 1, n);
    const double bxy = mi_bias(1, 2, n);
    CHECK(rep.bias_i_mx == doctest::Approx(bx));
    CHECK(rep.bias_i_my == doctest::Approx(bx));
    CHECK(rep.bias_i_mxy == doctest::Approx(bxy));
    CHECK(rep.corrected.infos.i_mx == doctest::Approx(0.8 - bx));
    CHECK(rep.corrected.infos.i_my == doctest::Approx(0.7 - bx));
    CHECK(rep.corrected.infos.i_mxy == doctest::Approx(1.4 - bxy));
    CHECK(rep.corrected.union_info() == doctest::Approx(1.0 * (1.0 - bxy / 1.4)));
    CHECK_FALSE(rep.rectified);
    CHECK(rep.n == n);
}

TEST_CASE("correct: the rectified union information reaches the joint information") {
    // U = i_mxy; the small Y information vanishes after correction, so the
    // corrected joint information is floored at I(M;X) and rectification
    // lifts U onto it.
    const InfoTriple t{0.3, 0.05, 0.32};
    const PidComponents raw = components_from_union(0.32, t, PidMethod::TildeG);
    const BiasReport rep = correct(raw, Dims{1, 1, 1}, 10);
    CHECK(rep.rectified);
    CHECK(rep.corrected.infos.i_my == 0.0);
    CHECK(rep.corrected.union_info() == doctest::Approx(rep.corrected.infos.i_mxy).epsilon(1e-14));
    CHECK(rep.corrected.infos.i_mxy == doctest::Approx(0.3 - mi_bias(1, 1, 10)));
}

TEST_CASE("correct: errors") {
    const PidComponents raw = components_from_union(0.5, {0.5, 0.0, 0.5}, PidMethod::TildeG);
    CHECK_THROWS_AS((void)correct(raw, Dims{1, 1, 1}, 3), Error);
    const PidComponents zero = components_from_union(0.0, {0.0, 0.0, 0.0}, PidMethod::TildeG);
    try {
        (void)correct(zero, Dims{1, 1, 1}, 100);
        FAIL("expected DegenerateInformation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateInformation);
    }
}

TEST_CASE("corrected components stay in bounds and consistent") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        const double imx = 2.0 * unit(rng);
        const double imy = 2.0 * unit(rng);
        const double imxy = std::max(imx, imy) + 2.0 * unit(rng);
        const InfoTriple tr{imx, imy, imxy};
        const auto [lo, hi] = union_bounds(tr);
        const PidComponents raw = components_from_union(lo + (hi - lo) * unit(rng), tr, PidMethod::TildeG);
        const long long n = 4 + static_cast<long long>(500 * unit(rng));
        BiasReport rep;
        try {
            rep = correct(raw, Dims{1, 1, 1}, n);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DegenerateInformation);
            continue;
        }
        const PidComponents& c = rep.corrected;
        const auto [clo, chi] = union_bounds(c.infos);
        CHECK(c.union_info() >= clo - 1e-15);
        CHECK(c.union_info() <= chi + 1e-15);
        CHECK(consistency_residual(c) <= 4e-16 * std::max(1.0, c.infos.i_mxy));
        CHECK(c.ui_x >= 0.0);
        CHECK(c.ui_y >= 0.0);
        CHECK(c.ri >= 0.0);
        CHECK(c.si >= 0.0);
    }
}

// Known failure: the spurious unique information of the plug-in estimate is
// not removed by scaling the union information, so the corrected redundancy
// stays biased low. Kept as an expected failure so a fix is noticed.
TEST_CASE("fully-redundant setup: corrected redundancy is closer to the truth" *
          doctest::should_fail()) {
    const GaussianSystem sys = canonical::build(canonical::FullyRedundant{10, 0});
    const double truth = decompose(sys).ri;
    int closer = 0;
    for (int r = 1; r <= 100; ++r) {
        const BiasReport rep =
            estimate_pid(sample_gaussian(sys, 5000, static_cast<std::uint64_t>(r)), SolverConfig{}, true);
        closer += std::abs(rep.corrected.ri - truth) < std::abs(rep.raw.ri - truth) ? 1 : 0;
    }
    MESSAGE("corrected ri closer in " << closer << " of 100 draws");
    CHECK(closer >= 80);
}
