#pragma once

// The numbered verification suite shared by `mlfrac verify` and the
// acceptance test binary. Every check returns a VerificationReport whose
// fields are deterministic, so serialized reports can be diffed byte for byte.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mlfrac/ab_core.hpp"
#include "mlfrac/catalog.hpp"
#include "mlfrac/csv.hpp"
#include "mlfrac/detail/parallel.hpp"
#include "mlfrac/fode.hpp"
#include "mlfrac/heat.hpp"
#include "mlfrac/specfun.hpp"
#include "mlfrac/transforms.hpp"
#include "mlfrac/types.hpp"

namespace mlfrac::acceptance {

struct SuiteConfig {
    Normalization norm = Normalization::unit;
    /// Replaces the per-check alpha sets when present.
    std::optional<double> alpha;
    /// Reference for the shell temperature drop bracket (alpha, r1, r2);
    /// defaults to a long double term-by-term evaluation.
    std::function<double(double, double, double)> shell_reference;
};

struct Criterion {
    int id;
    const char* slug;
    const char* title;
    VerificationReport (*run)(const SuiteConfig&);
};

namespace detail {

inline std::vector<double> alphas(const SuiteConfig& cfg, std::vector<double> defaults) {
    if (cfg.alpha) return {*cfg.alpha};
    return defaults;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

/// Li2(x) by its power series, |x| <= 0.9.
inline double dilog(double x) {
    double sum = 0.0;
    double p = x;
    for (int k = 1; k < 5000; ++k) {
        const double term = p / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-20) break;
        p *= x;
    }
    return sum;
}

/// Errors are recorded scaled by max(1, |want|); relative errors only where
/// |want| >= 1e-6, since identities near a zero carry no relative accuracy.
struct Tally {
    double max_abs = 0.0;
    double max_rel = 0.0;
    bool ok = true;
    void add(double got, double want, double tol_abs) {
        const double e = std::abs(got - want);
        max_abs = std::max(max_abs, e / std::max(1.0, std::abs(want)));
        if (std::abs(want) >= 1e-6) max_rel = std::max(max_rel, e / std::abs(want));
        if (!(e <= tol_abs)) ok = false;
    }
};

/// Shell bracket evaluated term by term in long double, with the harmonic
/// number from its defining series.
inline double shell_bracket_long_double(double alpha, double r1, double r2) {
    using ld = long double;
    const ld a = alpha;
    const ld x = static_cast<ld>(r1) / r2;
    ld term = 1, f32 = 1;
    for (int k = 0; k < 100000; ++k) {
        term *= (1 + k) * (1 + k) * (1 - a + k) / ((2 + static_cast<ld>(k)) * (2 + k) * (1 + k)) * x;
        f32 += term;
        if (std::fabs(term) < 1e-22L * std::fabs(f32)) break;
    }
    // H(alpha) = sum_k (1/k - 1/(k + alpha)) with an Euler-Maclaurin tail.
    constexpr int n = 4000;
    ld h = 0;
    for (int k = n; k >= 1; --k) h += a / (static_cast<ld>(k) * (k + a));
    const ld N = n;
    const ld g0 = 1 / N - 1 / (N + a);
    const ld g1 = -1 / (N * N) + 1 / ((N + a) * (N + a));
    h += std::log((N + a) / N) - g0 / 2 - g1 / 12;
    const ld inner = a * f32 * r1 - (h + std::log(x)) * r2;
    return static_cast<double>(1 + a / (1 - a) * std::pow(static_cast<ld>(r2), a - 1) * inner);
}

inline VerificationReport make(const char* name, std::vector<std::size_t> grids, double tol) {
    VerificationReport r;
    r.name = name;
    r.grid_sizes = std::move(grids);
    r.tolerance = tol;
    return r;
}

}  // namespace detail

/// Closed-form identities and recurrences of the special functions.
inline VerificationReport check_special_functions(const SuiteConfig&) {
    auto rep = detail::make("special-functions", {}, 1e-9);
    detail::Tally t;
    std::size_t count = 0;
    for (int i = 0; i <= 220; ++i) {
        const double z = -50.0 + 0.25 * i;
        const double e = std::exp(z);
        t.add(specfun::mittag_leffler(1.0, z), e, 1e-9 * std::max(1.0, e));
        if (z != 0.0) t.add(specfun::mittag_leffler2(1.0, 2.0, z), std::expm1(z) / z, 1e-9 * std::max(1.0, e));
        count += 2;
    }
    for (int i = 0; i <= 100; ++i) {
        const double x = 0.1 * i;
        t.add(specfun::mittag_leffler(0.5, -x), std::exp(x * x) * std::erfc(x), 1e-9);
        ++count;
    }
    t.add(specfun::harmonic_number(0.5), 2.0 - 2.0 * std::numbers::ln2, 1e-9);
    for (int i = -9; i <= 9; ++i) {
        if (i == 0) continue;
        const double x = 0.1 * i;
        t.add(specfun::hyper_3f2({{1.0, 1.0, 1.0}, {2.0, 2.0}, x}), detail::dilog(x) / x, 1e-9);
        ++count;
    }
    t.add(specfun::gamma_fn(5.0), 24.0, 1e-12);
    t.add(specfun::gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-12);
    for (int i = 0; i < 200; ++i) {
        const double x = 0.1 + 0.245 * i;
        const double g = specfun::gamma_fn(x);
        t.add(specfun::gamma_fn(x + 1.0) / (x * g), 1.0, 1e-12);
        ++count;
    }
    for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        for (double beta : {1.0, 1.5, 2.0}) {
            for (int i = 0; i <= 55; ++i) {
                const double z = -50.0 + i;
                if (z > 0.0 && std::pow(z, 1.0 / alpha) > 600.0) continue;  // value overflows
                const double lhs = specfun::mittag_leffler2(alpha, beta, z);
                const double rhs = z * specfun::mittag_leffler2(alpha, alpha + beta, z) + specfun::rgamma(beta);
                t.add(lhs, rhs, 1e-9 * std::max(1.0, std::abs(lhs)));
                ++count;
            }
        }
    }
    rep.max_abs_err = t.max_abs;
    rep.max_rel_err = t.max_rel;
    rep.passed = t.ok;
    rep.detail = std::to_string(count + 3) + " identity evaluations";
    return rep;
}

inline VerificationReport check_constant_kill(const SuiteConfig& cfg) {
    auto rep = detail::make("constant-kill", {1024}, 1e-12);
    for (double alpha : detail::alphas(cfg, {0.1, 0.5, 0.9})) {
        const AlphaParam p(alpha, cfg.norm);
        for (double c : {0.0, 1.0, -3.7}) {
            const auto g = CatalogFunction::constant(c);
            for (bool with_derivs : {false, true}) {
                const auto r = ab_core::abc_derivative(g.sample(0.0, 1.0, 1024, with_derivs), p);
                for (double v : r.values) rep.max_abs_err = std::max(rep.max_abs_err, std::abs(v));
            }
        }
    }
    rep.max_rel_err = rep.max_abs_err;
    rep.passed = rep.max_abs_err <= rep.tolerance;
    rep.detail = "max |ABC(c)| over c in {0, 1, -3.7}";
    return rep;
}

/// ABR by direct differentiation against ABC plus the initial-value term.
inline VerificationReport check_relation(const SuiteConfig& cfg) {
    constexpr std::size_t n = 2048;
    auto rep = detail::make("relation", {n}, 10.0);
    double worst_ratio = 0.0;
    double eq_path = 0.0;
    std::string worst;
    for (double alpha : detail::alphas(cfg, {0.1, 0.5, 0.9})) {
        const AlphaParam p(alpha, cfg.norm);
        for (const auto& g : verification_catalog()) {
            const auto f = g.sample(0.0, 1.0, n, true);
            const auto abc = ab_core::abc_derivative(f, p);
            const auto direct = ab_core::abr_derivative_direct(f, p);
            const auto via = ab_core::abr_derivative(f, p);
            double res = 0.0;
            double est = 0.0;
            double peak = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                const double rel = ab_core::relation_term(f.values()[0], p, f.time(i));
                res = std::max(res, std::abs(direct.values[i] - abc.values[i] - rel));
                eq_path = std::max(eq_path, std::abs(via.values[i] - abc.values[i] - rel));
                est = std::max(est, (*abc.est_error)[i] + (*direct.est_error)[i]);
                peak = std::max(peak, std::abs(direct.values[i]));
            }
            rep.max_abs_err = std::max(rep.max_abs_err, res);
            rep.max_rel_err = std::max(rep.max_rel_err, res / std::max(peak, 1e-300));
            const double ratio = est > 0.0 ? res / est : (res == 0.0 ? 0.0 : HUGE_VAL);
            if (ratio >= worst_ratio) {
                worst_ratio = ratio;
                worst = g.name() + " alpha=" + csv::format_double(alpha);
            }
        }
    }
    rep.passed = worst_ratio <= rep.tolerance;
    rep.detail = "worst residual/estimate " + detail::fmt(worst_ratio) + " (" + worst +
                 "); assembled path residual " + detail::fmt(eq_path);
    return rep;
}

inline VerificationReport check_laplace(const SuiteConfig& cfg) {
    constexpr std::size_t n = 4096;
    auto rep = detail::make("laplace", {n}, 5e-3);
    std::vector<transforms::TransformCase> cases;
    for (const auto& g : {CatalogFunction::constant(1.0), CatalogFunction::polynomial({0.0, 1.0}),
                          CatalogFunction::polynomial({0.0, 0.0, 1.0}), CatalogFunction::exponential(-1.0)}) {
        cases.push_back(transforms::transform_case(g));
    }
    transforms::TransformOptions opts;
    opts.n = n;
    for (double alpha : detail::alphas(cfg, {0.3, 0.5, 0.7})) {
        const auto r = transforms::verify_transforms(cases, AlphaParam(alpha, cfg.norm), transforms::default_p_grid(),
                                                     opts);
        rep.max_abs_err = std::max(rep.max_abs_err, r.max_abs_err);
        rep.max_rel_err = std::max(rep.max_rel_err, r.max_rel_err);
    }
    // f(t) = t at alpha = 0.5, p = 1: the closed side is B(0.5) exactly.
    const AlphaParam half(0.5, cfg.norm);
    std::vector<transforms::TransformSample> rows;
    transforms::verify_transforms({cases[1]}, half, {1.0}, opts, &rows);
    const double closed = rows.at(0).closed;
    const double gap = std::abs(rows.at(0).numeric - closed);
    const bool point_ok = closed == half.b() && gap <= 1e-3;
    rep.passed = rep.max_rel_err <= rep.tolerance && point_ok;
    rep.detail = "f=t alpha=0.5 p=1: closed " + csv::format_double(closed) + ", |numeric - closed| " + detail::fmt(gap);
    return rep;
}

inline VerificationReport check_integral_endpoints(const SuiteConfig& cfg) {
    constexpr std::size_t n = 1024;
    auto rep = detail::make("integral-endpoints", {n}, 1e-6);
    const auto g = CatalogFunction::sine(3.0);
    const auto f = g.sample(0.0, 2.0, n, false);

    const auto zero = ab_core::ab_integral(f, AlphaParam(0.0, cfg.norm));
    const bool identity = std::memcmp(zero.values.data(), f.values().data(), f.values().size() * sizeof(double)) == 0;

    const auto one = ab_core::ab_integral(f, AlphaParam(1.0, cfg.norm));
    double trap_err = 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        acc += 0.5 * f.step() * (f.values()[i - 1] + f.values()[i]);
        trap_err = std::max(trap_err, std::abs(one.values[i] - acc));
    }

    const AlphaParam half(0.5, cfg.norm);
    const auto ones = ab_core::ab_integral(CatalogFunction::constant(1.0).sample(0.0, 1.0, n, false), half);
    const double want = (1.0 - 0.5) / half.b() + 0.5 * specfun::rgamma(1.5) / half.b();
    const double mid_err = std::abs(ones.values.back() - want);

    rep.max_abs_err = std::max(trap_err, mid_err);
    rep.max_rel_err = mid_err / want;
    rep.passed = identity && trap_err <= 1e-10 && mid_err <= 1e-6;
    rep.detail = std::string("alpha=0 identity ") + (identity ? "exact" : "BROKEN") + ", alpha=1 vs trapezoid " +
                 detail::fmt(trap_err) + ", alpha=0.5 f=1 t=1 error " + detail::fmt(mid_err);
    return rep;
}

/// Max over t in [0.1, T] of |ABC(solve(u)) - u| and of |ABR(solve(u)) - u|.
struct RoundTrip {
    double abc_err = 0.0;
    double abr_err = 0.0;
};

inline RoundTrip round_trip(const CatalogFunction& u, const AlphaParam& p, std::size_t n) {
    const auto samples = u.sample(0.0, 1.0, n, false);
    const auto f = fode::solve_abc_ode({samples, p});
    const auto abc = ab_core::abc_derivative(f, p);
    const auto abr = ab_core::abr_derivative(f, p);
    RoundTrip r;
    for (std::size_t i = 0; i <= n; ++i) {
        if (samples.time(i) < 0.1) continue;
        r.abc_err = std::max(r.abc_err, std::abs(abc.values[i] - samples.values()[i]));
        r.abr_err = std::max(r.abr_err, std::abs(abr.values[i] - samples.values()[i]));
    }
    return r;
}

inline VerificationReport check_round_trip(const SuiteConfig& cfg) {
    const std::vector<std::size_t> grids = {512, 1024, 2048, 4096};
    auto rep = detail::make("round-trip", grids, 5e-3);
    rep.passed = true;
    std::ostringstream os;
    for (double alpha : detail::alphas(cfg, {0.5})) {
        const AlphaParam p(alpha, cfg.norm);
        for (const auto& u : {CatalogFunction::constant(1.0), CatalogFunction::polynomial({0.0, 1.0}),
                              CatalogFunction::sine(1.0)}) {
            std::vector<RoundTrip> errs;
            for (std::size_t n : grids) errs.push_back(round_trip(u, p, n));
            const double last = errs.back().abc_err;
            const double order = std::log2(errs.front().abc_err / last) / std::log2(double(grids.back() / grids.front()));
            const bool ok = last <= rep.tolerance && order >= 1.0;
            rep.passed = rep.passed && ok;
            rep.max_abs_err = std::max(rep.max_abs_err, last);
            const double peak = u.kind() == CatalogFunction::Kind::constant ? std::abs(u.params()[0]) : 1.0;
            rep.max_rel_err = std::max(rep.max_rel_err, last / peak);
            os << u.name() << ": " << detail::fmt(last) << " order " << detail::fmt(order) << " (ABR "
               << detail::fmt(errs.back().abr_err) << "); ";
        }
    }
    rep.detail = os.str();
    if (!rep.detail.empty()) rep.detail.resize(rep.detail.size() - 2);
    return rep;
}

inline VerificationReport check_commutation(const SuiteConfig& cfg) {
    const std::vector<std::size_t> grids = {512, 1024, 2048, 4096};
    auto rep = detail::make("commutation", grids, 1e-2);
    rep.passed = true;
    std::ostringstream os;
    const auto g = CatalogFunction::polynomial({0.0, 0.0, 1.0});
    for (double alpha : detail::alphas(cfg, {0.5})) {
        const AlphaParam p(alpha, cfg.norm);
        std::vector<double> disc;
        bool within_estimate = true;
        for (std::size_t n : grids) {
            const auto f = g.sample(0.0, 1.0, n, true);
            std::vector<double> second(n + 1);
            for (std::size_t i = 0; i <= n; ++i) second[i] = g.derivative(f.time(i), 2);
            const auto r = fode::commutation_check(f, second, p);
            disc.push_back(r.max_abs_err);
            within_estimate = within_estimate && r.passed;
            rep.max_rel_err = r.max_rel_err;
        }
        const double order = std::log2(disc.front() / disc.back()) / std::log2(double(grids.back() / grids.front()));
        rep.passed = rep.passed && order >= 1.0 && disc.back() <= rep.tolerance;
        rep.max_abs_err = std::max(rep.max_abs_err, disc.back());
        os << "alpha=" << alpha << ": " << detail::fmt(disc.back()) << " order " << detail::fmt(order)
           << (within_estimate ? ", within 10x estimate" : ", exceeds 10x estimate");
    }
    rep.detail = os.str();
    return rep;
}

inline VerificationReport check_boundedness(const SuiteConfig& cfg) {
    constexpr std::size_t n = 2048;
    auto rep = detail::make("boundedness", {n}, 1e-12);
    double worst = -HUGE_VAL;
    std::string where;
    for (double alpha : detail::alphas(cfg, {0.1, 0.5, 0.9})) {
        const AlphaParam p(alpha, cfg.norm);
        for (const auto& g : verification_catalog()) {
            const auto f = g.sample(0.0, 1.0, n, true);
            const auto r = ab_core::abr_derivative(f, p);
            double fmax = 0.0;
            double dmax = 0.0;
            for (double v : f.values()) fmax = std::max(fmax, std::abs(v));
            for (double v : r.values) dmax = std::max(dmax, std::abs(v));
            const double bound = p.prefactor() * fmax;
            // Positive margin means the inequality is violated.
            const double margin = (dmax - bound) / bound;
            if (margin > worst) {
                worst = margin;
                where = g.name() + " alpha=" + csv::format_double(alpha);
            }
        }
    }
    rep.max_abs_err = std::max(0.0, worst);
    rep.max_rel_err = rep.max_abs_err;
    rep.passed = worst <= rep.tolerance;
    rep.detail = "max (|ABR f| - B K/(1-alpha)) / bound = " + detail::fmt(worst) + " at " + where;
    return rep;
}

inline VerificationReport check_shell(const SuiteConfig& cfg) {
    auto rep = detail::make("shell", {20}, 1e-8);
    const auto reference = cfg.shell_reference ? cfg.shell_reference : detail::shell_bracket_long_double;
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (double ratio : {0.2, 0.4, 0.6, 0.8}) {
            heat::HeatShellSpec s{ratio * 2.0, 2.0, 1.0, 1.0, 2.0 * std::numbers::pi, alpha, cfg.norm};
            const double got = heat::shell_temperature_drop(s);
            const double want = reference(alpha, s.r1, s.r2);
            const double e = std::abs(got - want);
            rep.max_abs_err = std::max(rep.max_abs_err, e);
            rep.max_rel_err = std::max(rep.max_rel_err, e / std::abs(want));
        }
    }
    heat::HeatShellSpec s{1.0, 2.0, 1.0, 1.0, 2.0 * std::numbers::pi, 0.5, cfg.norm};
    const double unit_scale = heat::shell_temperature_drop(s);
    const double point_err = std::abs(unit_scale - 1.4929);
    auto doubled = s;
    doubled.q_dot *= 2.0;
    const bool homogeneous = heat::shell_temperature_drop(doubled) == 2.0 * unit_scale;
    rep.passed = rep.max_rel_err <= rep.tolerance && point_err <= 1e-3 && homogeneous;
    rep.detail = "alpha=0.5 r1=1 r2=2: " + csv::format_double(unit_scale) + (homogeneous ? ", Q-homogeneous" : ", NOT Q-homogeneous");
    return rep;
}

/// Operator outputs computed with 1 and with 8 worker threads must agree bitwise.
inline VerificationReport check_thread_independence(const SuiteConfig& cfg) {
    constexpr std::size_t n = 2048;
    auto rep = detail::make("thread-independence", {n}, 0.0);
    const AlphaParam p(cfg.alpha.value_or(0.5), cfg.norm);
    const auto f = CatalogFunction::sine(3.0).sample(0.0, 1.0, n, false);
    auto snapshot = [&] {
        std::vector<double> all;
        for (const auto& r : {ab_core::abc_derivative(f, p), ab_core::abr_derivative(f, p),
                              ab_core::abr_derivative_direct(f, p), ab_core::cf_derivative(f, p),
                              ab_core::ab_integral(f, p)}) {
            all.insert(all.end(), r.values.begin(), r.values.end());
            if (r.est_error) all.insert(all.end(), r.est_error->begin(), r.est_error->end());
        }
        return all;
    };
    const int saved = thread_count();
    set_thread_cap(1);
    const auto serial = snapshot();
    set_thread_cap(8);
    const auto parallel = snapshot();
    set_thread_cap(saved);
    rep.passed = serial.size() == parallel.size() &&
                 std::memcmp(serial.data(), parallel.data(), serial.size() * sizeof(double)) == 0;
    for (std::size_t i = 0; i < std::min(serial.size(), parallel.size()); ++i) {
        rep.max_abs_err = std::max(rep.max_abs_err, std::abs(serial[i] - parallel[i]));
    }
    rep.detail = rep.passed ? "bitwise identical" : "outputs differ";
    return rep;
}

inline const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "special-functions", "special-function identities", check_special_functions},
        {2, "constant-kill", "Caputo-type derivative of constants", check_constant_kill},
        {3, "relation", "Riemann-Liouville vs Caputo-type relation", check_relation},
        {4, "laplace", "Laplace transform identities", check_laplace},
        {5, "integral-endpoints", "fractional integral at alpha = 0, 1/2, 1", check_integral_endpoints},
        {6, "round-trip", "ODE solution round trip", check_round_trip},
        {7, "commutation", "commutation with d/dt", check_commutation},
        {8, "boundedness", "boundedness of the Riemann-Liouville type derivative", check_boundedness},
        {9, "shell", "cylindrical shell temperature drop", check_shell},
        {10, "thread-independence", "thread-count independence", check_thread_independence},
    };
    return all;
}

inline const Criterion* find_criterion(int id) {
    for (const auto& c : criteria()) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

/// One CSV row per report: check,norm,passed,max_abs_err,max_rel_err,tolerance,grid_sizes,detail
inline void write_reports_csv(std::ostream& os, const std::vector<std::pair<Normalization, VerificationReport>>& rows) {
    os << "check,norm,passed,max_abs_err,max_rel_err,tolerance,grid_sizes,detail\n";
    for (const auto& [norm, r] : rows) {
        std::string grids;
        for (std::size_t i = 0; i < r.grid_sizes.size(); ++i) grids += (i ? ";" : "") + std::to_string(r.grid_sizes[i]);
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), '"', '\'');
        os << r.name << ',' << to_string(norm) << ',' << (r.passed ? "PASS" : "FAIL") << ','
           << csv::format_double(r.max_abs_err) << ',' << csv::format_double(r.max_rel_err) << ','
           << csv::format_double(r.tolerance) << ',' << grids << ",\"" << detail << "\"\n";
    }
}

}  // namespace mlfrac::acceptance
