#include "drcvar/errors.hpp"
#include "drcvar/risk_core.hpp"
#include "support/oracles.hpp"

#include <doctest.h>
#include <numeric>
#include <random>

using namespace drcvar::risk;

namespace {

EmpiricalSamples1D range_1_to(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 1.0);
    return EmpiricalSamples1D(std::move(v));
}

} // namespace

TEST_CASE("alpha must lie strictly inside the unit interval") {
    CHECK_THROWS_AS(Alpha(0.0), drcvar::InputError);
    CHECK_THROWS_AS(Alpha(1.0), drcvar::InputError);
    CHECK_THROWS_AS(Alpha(-0.2), drcvar::InputError);
    CHECK_THROWS_AS(Alpha(std::nan("")), drcvar::InputError);
    CHECK(Alpha(0.9).tail_scale() == doctest::Approx(10.0));
}

TEST_CASE("samples reject empty and non-finite input") {
    CHECK_THROWS_AS(EmpiricalSamples1D({}), drcvar::InputError);
    CHECK_THROWS_AS(EmpiricalSamples1D({1.0, std::numeric_limits<double>::infinity()}), drcvar::InputError);
}

TEST_CASE("empirical VaR order statistic") {
    CHECK(empirical_var(EmpiricalSamples1D({5, 5, 5, 5}), Alpha(0.9)) == 5.0);
    CHECK(empirical_var(range_1_to(10), Alpha(0.85)) == 9.0);
    CHECK(empirical_var(EmpiricalSamples1D({0, 10}), Alpha(0.75)) == 10.0);
    // 0.5 * 10 is an exact rank: the 5th value, not the 6th.
    CHECK(empirical_var(range_1_to(10), Alpha(0.5)) == 5.0);
    CHECK(empirical_var(EmpiricalSamples1D({3, 1, 2}), Alpha(0.1)) == 1.0);
}

TEST_CASE("empirical VaR agrees with a scan of the empirical distribution function") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> size(1, 60);
    std::uniform_int_distribution<int> level(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (double& x : v) x = level(rng); // many ties
        for (double a : {0.05, 0.3, 0.5, 0.75, 0.9, 0.95}) {
            const EmpiricalSamples1D s(v);
            CHECK(empirical_var(s, Alpha(a)) == oracle::var_by_cdf_scan(v, a));
        }
    }
}

TEST_CASE("empirical CVaR examples") {
    const auto c = empirical_cvar(EmpiricalSamples1D({4.5, 4.5, 4.5}), Alpha(0.95));
    CHECK(c.cvar == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(c.var == 4.5);

    const auto two = empirical_cvar(EmpiricalSamples1D({0, 10}), Alpha(0.75));
    CHECK(two.cvar == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(two.var == 10.0);

    const auto ten = empirical_cvar(range_1_to(10), Alpha(0.5));
    CHECK(ten.cvar == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(ten.var == 5.0);
}

TEST_CASE("empirical CVaR matches the sorted-tail oracle with fractional boundary weight") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> size(1, 500);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (double& x : v) x = trial % 3 == 0 ? std::round(normal(rng)) : normal(rng);
        const EmpiricalSamples1D s(v);
        for (double a : {0.5, 0.9, 0.95, 0.37}) {
            const auto r = empirical_cvar(s, Alpha(a));
            CHECK(std::abs(r.cvar - oracle::cvar_sorted_tail(v, a)) <= 1e-9);
            CHECK(r.var == empirical_var(s, Alpha(a)));
            CHECK(r.cvar >= r.var - 1e-12);
        }
    }
}

TEST_CASE("empirical CVaR is translation equivariant and positively homogeneous") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(40 + static_cast<std::size_t>(trial));
        for (double& x : v) x = u(rng);
        const double shift = u(rng);
        const double scale = 0.1 + std::abs(u(rng));
        std::vector<double> shifted(v), scaled(v);
        for (double& x : shifted) x += shift;
        for (double& x : scaled) x *= scale;
        const Alpha a(0.9);
        const double base = empirical_cvar(EmpiricalSamples1D(v), a).cvar;
        CHECK(std::abs(empirical_cvar(EmpiricalSamples1D(shifted), a).cvar - (base + shift)) <= 1e-9);
        CHECK(std::abs(empirical_cvar(EmpiricalSamples1D(scaled), a).cvar - scale * base) <= 1e-9 * scale);
    }
}

TEST_CASE("CVaR pieces evaluate as a pointwise maximum") {
    const auto loss = PwlLoss::cvar(Alpha(0.5));
    REQUIRE(loss.pieces().size() == 2);
    CHECK(loss.pieces()[0].a == 0.0);
    CHECK(loss.pieces()[0].b == 1.0);
    CHECK(loss.pieces()[1].a == doctest::Approx(2.0));
    CHECK(loss.pieces()[1].b == doctest::Approx(-1.0));
    CHECK(pwl_max_eval(loss, 0.0, 0.0) == 0.0);
    CHECK(pwl_max_eval(loss, 4.0, 2.0) == doctest::Approx(6.0));
    CHECK(pwl_max_eval(loss, 2.0, 4.0) == doctest::Approx(4.0));
    for (double a : {0.1, 0.5, 0.9, 0.99})
        for (double z : {-3.0, 0.0, 7.0}) CHECK(pwl_max_eval(PwlLoss::cvar(Alpha(a)), z, z) == doctest::Approx(z));
    CHECK_THROWS_AS(PwlLoss({}), drcvar::InputError);
}
