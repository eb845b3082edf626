#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "mlfrac/heat.hpp"
#include "oracle/frozen_oracles.inc"
#include "oracle/quad_oracle.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace mlfrac;

namespace {

heat::HeatShellSpec unit_shell(double alpha, double r1, double r2, double q) {
    heat::HeatShellSpec s;
    s.r1 = r1;
    s.r2 = r2;
    s.length = 1.0;
    s.k = 1.0 / (2.0 * std::numbers::pi);
    s.q_dot = q;
    s.alpha = alpha;
    return s;
}

}  // namespace

TEST_CASE("no heat, no drop") {
    CHECK(heat::shell_temperature_drop(unit_shell(0.5, 1.0, 2.0, 0.0)) == 0.0);
}

TEST_CASE("temperature drop at alpha = 1/2") {
    const double dt = heat::shell_temperature_drop(unit_shell(0.5, 1.0, 2.0, 1.0));
    CHECK_THAT(dt, WithinAbs(1.4929, 1e-3));
    CHECK_THAT(dt, WithinRel(oracle::shell_drop(1.0, 1.0, 2.0, 0.5), 1e-12));
}

TEST_CASE("temperature drop matches tabulated values") {
    for (const auto& row : oracle::kShellDrop) {
        INFO("alpha = " << row.a << ", r1 = " << row.b);
        CHECK_THAT(heat::shell_bracket(row.a, row.b, row.c), WithinRel(row.value, 1e-8));
        CHECK_THAT(heat::shell_temperature_drop(unit_shell(row.a, row.b, row.c, 1.0)), WithinRel(row.value, 1e-8));
    }
}

TEST_CASE("temperature drop against the extended-precision oracle") {
    for (double alpha : {0.05, 0.25, 0.45, 0.65, 0.85, 0.95}) {
        for (double r1 : {0.01, 0.3, 2.5}) {
            for (double r2 : {3.0, 10.0}) {
                INFO("alpha = " << alpha << ", r1 = " << r1 << ", r2 = " << r2);
                CHECK_THAT(heat::shell_bracket(alpha, r1, r2), WithinRel(oracle::shell_drop(1.0, r1, r2, alpha), 1e-8));
            }
        }
    }
}

TEST_CASE("temperature drop is homogeneous in the heat rate") {
    for (double q : {-3.0, 0.5, 2.0, 1e6}) {
        auto s = unit_shell(0.4, 0.5, 1.5, 1.0);
        const double base = heat::shell_temperature_drop(s);
        s.q_dot = q;
        CHECK_THAT(heat::shell_temperature_drop(s), WithinRel(q * base, 1e-15));
    }
    auto s = unit_shell(0.4, 0.5, 1.5, 1.0);
    const double base = heat::shell_temperature_drop(s);
    s.q_dot = 2.0;
    CHECK(heat::shell_temperature_drop(s) == 2.0 * base);
}

TEST_CASE("temperature drop ignores the normalization") {
    auto s = unit_shell(0.6, 1.0, 4.0, 3.0);
    const double a = heat::shell_temperature_drop(s);
    s.norm = Normalization::gamma_corrected;
    CHECK(heat::shell_temperature_drop(s) == a);
}

TEST_CASE("shell parameters are validated") {
    CHECK_THROWS_AS(heat::shell_temperature_drop(unit_shell(0.5, 2.0, 1.0, 1.0)), DomainError);
    CHECK_THROWS_AS(heat::shell_temperature_drop(unit_shell(0.5, 1.0, 1.0, 1.0)), DomainError);
    CHECK_THROWS_AS(heat::shell_temperature_drop(unit_shell(0.5, 0.0, 1.0, 1.0)), DomainError);
    CHECK_THROWS_AS(heat::shell_temperature_drop(unit_shell(0.995, 1.0, 2.0, 1.0)), RangeError);
    CHECK_THROWS_AS(heat::shell_temperature_drop(unit_shell(0.0, 1.0, 2.0, 1.0)), DomainError);
    auto s = unit_shell(0.5, 1.0, 2.0, 1.0);
    s.k = 0.0;
    CHECK_THROWS_AS(heat::shell_temperature_drop(s), DomainError);
}

TEST_CASE("flux of a uniform temperature") {
    heat::RadialProfile prof;
    const std::size_t n = 256;
    for (std::size_t i = 0; i <= n; ++i) {
        prof.r.push_back(SampledFunction::grid_point(1.0, 2.0, n, i));
        prof.temperature.push_back(300.0);
    }
    prof.alpha = 0.5;
    prof.k = 2.0;
    prof.area = 0.5;
    const auto q = heat::heat_flux(prof);
    for (std::size_t i = 0; i <= n; i += 16) {
        const double s = prof.r[i] - 1.0;
        const double want = -2.0 * 0.5 * 2.0 * 300.0 * oracle::scaled_erfc(std::sqrt(s));
        CHECK_THAT(q.values()[i], WithinAbs(want, 1e-9 * 600.0));
    }
}

TEST_CASE("flux is the scaled Riemann-Liouville type derivative") {
    heat::RadialProfile prof;
    const std::size_t n = 200;
    for (std::size_t i = 0; i <= n; ++i) {
        const double r = SampledFunction::grid_point(0.5, 3.0, n, i);
        prof.r.push_back(r);
        prof.temperature.push_back(400.0 - 30.0 * std::log(r));
    }
    prof.alpha = 0.3;
    prof.k = 15.0;
    prof.area = 2.0;
    prof.norm = Normalization::gamma_corrected;
    const auto q = heat::heat_flux(prof);
    const auto d = ab_core::abr_derivative(heat::as_sampled(prof), AlphaParam(0.3, Normalization::gamma_corrected));
    for (std::size_t i = 0; i <= n; ++i) CHECK(q.values()[i] == -15.0 * 2.0 * d.values[i]);

    auto doubled = prof;
    for (auto& t : doubled.temperature) t *= 2.0;
    const auto q2 = heat::heat_flux(doubled);
    for (std::size_t i = 0; i <= n; ++i) CHECK_THAT(q2.values()[i], WithinAbs(2.0 * q.values()[i], 1e-9));
}

TEST_CASE("flux rejects malformed profiles") {
    heat::RadialProfile prof;
    prof.r = {1.0, 1.1, 1.3, 1.4};
    prof.temperature = {1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(heat::heat_flux(prof), DomainError);
    prof.r = {1.0, 1.1, 1.2};
    CHECK_THROWS_AS(heat::heat_flux(prof), DomainError);
    prof.r = {1.0, 1.1, 1.2, 1.3};
    prof.k = -1.0;
    CHECK_THROWS_AS(heat::heat_flux(prof), DomainError);
}
