#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "mlfrac/ab_core.hpp"
#include "mlfrac/catalog.hpp"
#include "oracle/quad_oracle.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace mlfrac;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double sup(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// ABC of t^2 in closed form: 2 B/(1-alpha) t^2 E_{alpha,3}(-a t^alpha), from the quad series.
double abc_t2(const AlphaParam& p, double t) {
    const double z = -p.ratio() * std::pow(t, p.alpha());
    return 2.0 * p.prefactor() * t * t * oracle::ml_series(p.alpha(), 3.0, z).value();
}

SampledFunction random_samples(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n + 1);
    for (auto& x : v) x = d(rng);
    return SampledFunction(0.0, 1.0, std::move(v));
}

const Normalization kNorms[] = {Normalization::unit, Normalization::gamma_corrected};

}  // namespace

TEST_CASE("AlphaParam normalizations") {
    CHECK(AlphaParam(0.0, Normalization::gamma_corrected).b() == 1.0);
    CHECK(AlphaParam(1.0, Normalization::gamma_corrected).b() == 1.0);
    CHECK(AlphaParam(0.3).b() == 1.0);
    CHECK_THAT(AlphaParam(0.5, Normalization::gamma_corrected).b(),
               WithinRel(0.5 + 0.5 / oracle::gamma(0.5), 1e-14));
    CHECK_THAT(AlphaParam(0.5).ratio(), WithinAbs(1.0, 1e-15));
    CHECK_THROWS_AS(AlphaParam(-0.1), DomainError);
    CHECK_THROWS_AS(AlphaParam(1.5), DomainError);
    CHECK_THROWS_AS(AlphaParam(std::nan("")), DomainError);
}

TEST_CASE("SampledFunction invariants") {
    CHECK_THROWS_AS(SampledFunction(0.0, 1.0, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(SampledFunction(1.0, 1.0, {1.0, 2.0, 3.0}), DomainError);
    CHECK_THROWS_AS(SampledFunction(0.0, 1.0, {1.0, 2.0, 3.0}, std::vector<double>{1.0}), DomainError);
    const SampledFunction f(0.0, 2.0, {0.0, 1.0, 2.0, 3.0, 4.0});
    CHECK(f.n() == 4);
    CHECK(f.step() == 0.5);
    CHECK(f.time(4) == 2.0);
    CHECK(f.coarsened().values() == std::vector<double>{0.0, 2.0, 4.0});
}

TEST_CASE("abc_derivative of a constant vanishes") {
    for (auto norm : kNorms) {
        for (double alpha : {0.1, 0.5, 0.9}) {
            const auto r = ab_core::abc_derivative(CatalogFunction::constant(7.0).sample(0.0, 1.0, 1024, false),
                                                   AlphaParam(alpha, norm));
            CHECK(sup(r.values) <= 1e-12);
            CHECK(r.values.size() == r.grid.size());
        }
    }
}

TEST_CASE("abc_derivative of t") {
    const auto f = CatalogFunction::polynomial({0.0, 1.0}).sample(0.0, 1.0, 1024, false);
    const auto r = ab_core::abc_derivative(f, AlphaParam(0.5));
    CHECK(r.values[0] == 0.0);
    CHECK_THAT(r.values.back(), WithinAbs(1.1119134, 1e-4));
    CHECK_THAT(r.values.back(), WithinAbs(2.0 * oracle::ml_series(0.5, 2.0, -1.0).value(), 1e-12));

    const AlphaParam near_one(0.999);
    const auto c = ab_core::abc_derivative(f, near_one);
    CHECK_THAT(c.values.back(), WithinAbs(1.0, 2e-2));
}

TEST_CASE("abc_derivative close to alpha = 0") {
    const AlphaParam p(0.001);
    const auto f = CatalogFunction::polynomial({0.0, 1.0}).sample(0.0, 1.0, 256, false);
    const auto r = ab_core::abc_derivative(f, p);
    for (std::size_t i = 1; i <= f.n(); i += 17) {
        const double t = f.time(i);
        const double want = p.prefactor() * t * oracle::ml_series(0.001, 2.0, -p.ratio() * std::pow(t, 0.001)).value();
        CHECK_THAT(r.values[i], WithinAbs(want, 1e-12));
    }
}

TEST_CASE("abc_derivative converges at second order") {
    for (auto norm : kNorms) {
        for (double alpha : {0.1, 0.5, 0.9}) {
            const AlphaParam p(alpha, norm);
            const auto g = CatalogFunction::polynomial({0.0, 0.0, 1.0});
            auto error = [&](std::size_t n) {
                const auto f = g.sample(0.0, 1.0, n, false);
                const auto r = ab_core::abc_derivative(f, p);
                double e = 0.0;
                for (std::size_t i = 0; i <= n; ++i) e = std::max(e, std::abs(r.values[i] - abc_t2(p, f.time(i))));
                return e;
            };
            const double order = std::log2(error(256) / error(4096)) / 4.0;
            INFO("alpha = " << alpha);
            CHECK(order >= 1.8);

            // Against the refined-grid solution instead of the closed form.
            const auto fine = ab_core::abc_derivative(g.sample(0.0, 1.0, 8192, false), p);
            auto gap = [&](std::size_t n) {
                const auto r = ab_core::abc_derivative(g.sample(0.0, 1.0, n, false), p);
                double e = 0.0;
                for (std::size_t i = 0; i <= n; ++i) e = std::max(e, std::abs(r.values[i] - fine.values[i * (8192 / n)]));
                return e;
            };
            CHECK(std::log2(gap(256) / gap(4096)) / 4.0 >= 1.8);
        }
    }
}

TEST_CASE("error estimates track the actual error") {
    const AlphaParam p(0.5);
    const auto f = CatalogFunction::polynomial({0.0, 0.0, 1.0}).sample(0.0, 1.0, 1024, false);
    const auto r = ab_core::abc_derivative(f, p);
    REQUIRE(r.est_error);
    double actual = 0.0;
    for (std::size_t i = 0; i <= f.n(); ++i) actual = std::max(actual, std::abs(r.values[i] - abc_t2(p, f.time(i))));
    CHECK(actual <= 3.0 * r.max_error_estimate());
    CHECK(r.max_error_estimate() <= 3.0 * actual);
    CHECK_FALSE(ab_core::abc_derivative(CatalogFunction::sine(1.0).sample(0.0, 1.0, 10, false), p).est_error);
}

TEST_CASE("derivative operators validate their input") {
    const auto f = CatalogFunction::sine(1.0).sample(0.0, 1.0, 7, false);
    const auto fd = CatalogFunction::sine(1.0).sample(0.0, 1.0, 7, true);
    const AlphaParam p(0.5);
    CHECK_THROWS_AS(ab_core::abc_derivative(f, p), InsufficientResolution);
    CHECK_THROWS_AS(ab_core::abr_derivative(f, p), InsufficientResolution);
    CHECK_THROWS_AS(ab_core::abr_derivative_direct(f, p), InsufficientResolution);
    CHECK_THROWS_AS(ab_core::cf_derivative(f, p), InsufficientResolution);
    CHECK_NOTHROW(ab_core::abc_derivative(fd, p));
    const auto g = CatalogFunction::sine(1.0).sample(0.0, 1.0, 64, false);
    for (double alpha : {0.0, 1.0}) {
        CHECK_THROWS_AS(ab_core::abc_derivative(g, AlphaParam(alpha)), DomainError);
        CHECK_THROWS_AS(ab_core::abr_derivative(g, AlphaParam(alpha)), DomainError);
        CHECK_THROWS_AS(ab_core::cf_derivative(g, AlphaParam(alpha)), DomainError);
    }
}

TEST_CASE("abr_derivative examples") {
    const AlphaParam p(0.5);
    const auto one = ab_core::abr_derivative(CatalogFunction::constant(1.0).sample(0.0, 1.0, 512, false), p);
    CHECK_THAT(one.values.back(), WithinAbs(0.8551672, 1e-4));
    CHECK_THAT(one.values.back(), WithinAbs(2.0 * oracle::scaled_erfc(1.0), 1e-12));

    const auto zero = ab_core::abr_derivative(CatalogFunction::constant(0.0).sample(0.0, 1.0, 512, false), p);
    CHECK(sup(zero.values) == 0.0);

    for (double alpha : {0.2, 0.5, 0.8}) {
        const auto t = CatalogFunction::polynomial({0.0, 1.0}).sample(0.0, 1.0, 512, false);
        const AlphaParam q(alpha);
        CHECK(max_abs_diff(ab_core::abr_derivative(t, q).values, ab_core::abc_derivative(t, q).values) <= 1e-12);
    }
}

TEST_CASE("relation_term examples") {
    for (double alpha : {0.2, 0.5, 0.9}) {
        for (double t : {0.0, 0.3, 2.0}) CHECK(ab_core::relation_term(0.0, AlphaParam(alpha), t) == 0.0);
    }
    CHECK(ab_core::relation_term(1.0, AlphaParam(0.5), 0.0) == 2.0);
    CHECK_THAT(ab_core::relation_term(1.0, AlphaParam(0.5), 1.0), WithinAbs(0.8551672, 1e-6));
    const AlphaParam g(0.5, Normalization::gamma_corrected);
    CHECK_THAT(ab_core::relation_term(1.0, g, 0.0), WithinRel(g.b() / 0.5, 1e-15));
    CHECK_THROWS_AS(ab_core::relation_term(1.0, AlphaParam(0.5), -1.0), DomainError);
}

TEST_CASE("relation between the two derivatives holds within the error estimate") {
    for (auto norm : kNorms) {
        for (double alpha : {0.1, 0.5, 0.9}) {
            const AlphaParam p(alpha, norm);
            for (const auto& g : verification_catalog()) {
                const auto f = g.sample(0.0, 1.0, 1024, true);
                const auto abc = ab_core::abc_derivative(f, p);
                const auto direct = ab_core::abr_derivative_direct(f, p);
                double res = 0.0;
                double est = 0.0;
                for (std::size_t i = 0; i <= f.n(); ++i) {
                    const double rel = ab_core::relation_term(f.values()[0], p, f.time(i));
                    res = std::max(res, std::abs(direct.values[i] - abc.values[i] - rel));
                    est = std::max(est, (*abc.est_error)[i] + (*direct.est_error)[i]);
                }
                INFO(g.name() << " alpha = " << alpha);
                CHECK(res <= 10.0 * est);
            }
        }
    }
}

TEST_CASE("both Riemann-Liouville paths agree at second order") {
    for (double alpha : {0.1, 0.5, 0.9}) {
        const AlphaParam p(alpha);
        auto gap = [&](std::size_t n) {
            const auto f = CatalogFunction::polynomial({0.0, 0.0, 1.0}).sample(0.0, 1.0, n, false);
            return max_abs_diff(ab_core::abr_derivative(f, p).values, ab_core::abr_derivative_direct(f, p).values);
        };
        INFO("alpha = " << alpha);
        CHECK(std::log2(gap(256) / gap(4096)) / 4.0 >= 1.8);
    }
}

TEST_CASE("Riemann-Liouville type derivative is bounded by B/(1-alpha) max|f|") {
    for (auto norm : kNorms) {
        for (double alpha : {0.1, 0.5, 0.9}) {
            const AlphaParam p(alpha, norm);
            for (const auto& g : verification_catalog()) {
                const auto f = g.sample(0.0, 1.0, 1024, true);
                const double bound = p.prefactor() * sup(f.values());
                INFO(g.name() << " alpha = " << alpha);
                CHECK(sup(ab_core::abr_derivative(f, p).values) <= bound * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("Lipschitz ratio is finite and stable under refinement") {
    const auto cat = verification_catalog();
    for (double alpha : {0.1, 0.5, 0.9}) {
        const AlphaParam p(alpha);
        for (std::size_t a = 0; a < cat.size(); ++a) {
            for (std::size_t b = a + 1; b < cat.size(); b += 3) {
                auto ratio = [&](std::size_t n, auto op) {
                    const auto f = cat[a].sample(0.0, 1.0, n, true);
                    const auto h = cat[b].sample(0.0, 1.0, n, true);
                    std::vector<double> diff(n + 1);
                    for (std::size_t i = 0; i <= n; ++i) diff[i] = f.values()[i] - h.values()[i];
                    return max_abs_diff(op(f, p).values, op(h, p).values) / sup(diff);
                };
                for (auto op : {&ab_core::abc_derivative, &ab_core::abr_derivative}) {
                    const double coarse = ratio(256, op);
                    const double fine = ratio(2048, op);
                    INFO(cat[a].name() << " vs " << cat[b].name() << " alpha = " << alpha);
                    CHECK(std::isfinite(fine));
                    CHECK_THAT(fine, WithinRel(coarse, 0.02));
                }
            }
        }
    }
}

TEST_CASE("operators are linear") {
    std::mt19937_64 rng(7);
    const std::size_t n = 256;
    const auto f = random_samples(rng, n);
    const auto g = random_samples(rng, n);
    const double c1 = 1.7;
    const double c2 = -0.4;
    std::vector<double> mix(n + 1);
    for (std::size_t i = 0; i <= n; ++i) mix[i] = c1 * f.values()[i] + c2 * g.values()[i];
    const SampledFunction h(0.0, 1.0, mix);
    for (auto norm : kNorms) {
        const AlphaParam p(0.6, norm);
        for (auto op : {&ab_core::abc_derivative, &ab_core::abr_derivative, &ab_core::abr_derivative_direct,
                        &ab_core::cf_derivative, &ab_core::ab_integral}) {
            const auto rf = op(f, p);
            const auto rg = op(g, p);
            const auto rh = op(h, p);
            double worst = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                worst = std::max(worst, std::abs(rh.values[i] - (c1 * rf.values[i] + c2 * rg.values[i])));
            }
            INFO(rf.scheme);
            CHECK(worst <= 1e-10);
        }
    }
}

TEST_CASE("cf_derivative examples") {
    const auto t = CatalogFunction::polynomial({0.0, 1.0}).sample(0.0, 1.0, 512, false);
    CHECK_THAT(ab_core::cf_derivative(t, AlphaParam(0.5)).values.back(), WithinAbs(1.2642411, 1e-5));
    CHECK_THAT(ab_core::cf_derivative(t, AlphaParam(0.5)).values.back(), WithinAbs(2.0 * (1.0 - std::exp(-1.0)), 1e-13));
    CHECK_THAT(ab_core::cf_derivative(t, AlphaParam(0.999)).values.back(), WithinAbs(1.0, 2e-2));
    const auto c = CatalogFunction::constant(-2.5).sample(0.0, 1.0, 512, false);
    CHECK(sup(ab_core::cf_derivative(c, AlphaParam(0.3)).values) == 0.0);
}

TEST_CASE("cf_derivative of t^2 matches the exponential-kernel closed form") {
    const AlphaParam p(0.4, Normalization::gamma_corrected);
    const double a = p.ratio();
    const auto f = CatalogFunction::polynomial({0.0, 0.0, 1.0}).sample(0.0, 2.0, 2048, true);
    const auto r = ab_core::cf_derivative(f, p);
    for (std::size_t i = 0; i <= f.n(); i += 97) {
        const double t = f.time(i);
        // int_0^t 2x e^{-a(t-x)} dx
        const double want = p.prefactor() * 2.0 * (a * t - 1.0 + std::exp(-a * t)) / (a * a);
        CHECK_THAT(r.values[i], WithinAbs(want, 1e-6));
    }
}

TEST_CASE("ab_integral examples") {
    std::mt19937_64 rng(3);
    const auto f = random_samples(rng, 100);
    const auto r0 = ab_core::ab_integral(f, AlphaParam(0.0, Normalization::gamma_corrected));
    CHECK(std::memcmp(r0.values.data(), f.values().data(), f.values().size() * sizeof(double)) == 0);

    const auto one = CatalogFunction::constant(1.0).sample(0.0, 2.0, 64, false);
    CHECK_THAT(ab_core::ab_integral(one, AlphaParam(1.0)).values.back(), WithinAbs(2.0, 1e-14));

    const auto unit = CatalogFunction::constant(1.0).sample(0.0, 1.0, 64, false);
    CHECK_THAT(ab_core::ab_integral(unit, AlphaParam(0.5)).values.back(), WithinAbs(1.0641896, 1e-6));
    CHECK_THAT(ab_core::ab_integral(unit, AlphaParam(0.5)).values.back(),
               WithinAbs(0.5 + 0.5 / oracle::gamma(1.5), 1e-14));
}

TEST_CASE("ab_integral is exact for linear functions") {
    for (auto norm : kNorms) {
        for (double alpha : {0.05, 0.3, 0.7, 0.95}) {
            const AlphaParam p(alpha, norm);
            const auto f = CatalogFunction::polynomial({0.5, 2.0}).sample(0.0, 3.0, 600, false);
            const auto r = ab_core::ab_integral(f, p);
            for (std::size_t i = 0; i <= f.n(); i += 37) {
                const double t = f.time(i);
                const double rl = 0.5 * std::pow(t, alpha) / oracle::gamma(alpha + 1.0) +
                                  2.0 * std::pow(t, alpha + 1.0) / oracle::gamma(alpha + 2.0);
                const double want = (1.0 - alpha) / p.b() * f.values()[i] + alpha / p.b() * rl;
                INFO("alpha = " << alpha << ", t = " << t);
                CHECK_THAT(r.values[i], WithinAbs(want, 1e-12));
            }
        }
    }
}

TEST_CASE("ab_integral converges for smooth data") {
    const AlphaParam p(0.5);
    auto error = [&](std::size_t n) {
        const auto f = CatalogFunction::exponential(-1.0).sample(0.0, 1.0, n, false);
        const auto r = ab_core::ab_integral(f, p);
        // RL integral of e^{-t}: t^alpha E_{1,1+alpha}(-t)
        const double t = 1.0;
        const double want = 0.5 * std::exp(-t) + 0.5 * oracle::ml_series(1.0, 1.5, -t).value();
        return std::abs(r.values.back() - want);
    };
    CHECK(std::log2(error(64) / error(1024)) / 4.0 >= 1.8);
}

TEST_CASE("kernel_moment examples and errors") {
    const AlphaParam p(0.5);
    CHECK(ab_core::kernel_moment(0.3, 0.3, 1.0, p) == 0.0);
    CHECK(ab_core::kernel_moment(0.2, 0.7, 1.0, AlphaParam(0.0)) == 0.7 - 0.2);
    CHECK_THAT(ab_core::kernel_moment(0.0, 1.0, 1.0, p), WithinAbs(oracle::ml_series(0.5, 2.0, -1.0).value(), 1e-13));
    CHECK_THAT(ab_core::kernel_moment(0.0, 1.0, 1.0, p), WithinAbs(0.5559627, 1e-6));
    CHECK_THROWS_AS(ab_core::kernel_moment(0.5, 0.4, 1.0, p), DomainError);
    CHECK_THROWS_AS(ab_core::kernel_moment(0.0, 1.5, 1.0, p), DomainError);
}

TEST_CASE("kernel_moment matches quadrature of the kernel") {
    boost::math::quadrature::tanh_sinh<double> integrator;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 40; ++k) {
        const double alpha = 0.1 + 0.85 * u(rng);
        const double t = 0.1 + 2.0 * u(rng);
        double lo = t * u(rng);
        double hi = t * u(rng);
        if (lo > hi) std::swap(lo, hi);
        const AlphaParam p(alpha);
        const double a = p.ratio();
        auto kernel = [&](double x) {
            const double s = t - x;
            return s <= 0.0 ? 1.0 : oracle::ml_series(alpha, 1.0, -a * std::pow(s, alpha)).value();
        };
        const double want = integrator.integrate(kernel, lo, hi);
        INFO("alpha = " << alpha << " [" << lo << ", " << hi << "] t = " << t);
        CHECK_THAT(ab_core::kernel_moment(lo, hi, t, p), WithinAbs(want, 1e-9));
    }
}

TEST_CASE("operator output does not depend on the thread count") {
    const auto f = CatalogFunction::sine(2.0).sample(0.0, 1.0, 777, false);
    const AlphaParam p(0.35);
    const int saved = thread_count();
    set_thread_cap(1);
    const auto a = ab_core::abr_derivative_direct(f, p);
    const auto ai = ab_core::ab_integral(f, p);
    set_thread_cap(4);
    const auto b = ab_core::abr_derivative_direct(f, p);
    const auto bi = ab_core::ab_integral(f, p);
    set_thread_cap(saved);
    CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(ai.values.data(), bi.values.data(), ai.values.size() * sizeof(double)) == 0);
}
