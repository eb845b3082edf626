#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mlfrac/ab_core.hpp"
#include "mlfrac/errors.hpp"
#include "mlfrac/types.hpp"

namespace mlfrac::fode {

/// Right-hand side u of  ABC D^alpha f = u  on u's grid.
struct ForcingSpec {
    SampledFunction u;
    AlphaParam prm;
};

/// Solves ABC D^alpha f = u by
///   f(t) = (1 - alpha)/B u(t) + alpha/(B Gamma(alpha)) int_{t0}^t u(y) (t - y)^{alpha - 1} dy.
/// The formula has no free initial value: f(t0) = (1 - alpha)/B u(t0).
inline SampledFunction solve_abc_ode(const ForcingSpec& spec) {
    spec.prm.require_open("solve_abc_ode");
    const auto& u = spec.u;
    auto f = ab_core::detail::ab_integral_values(u.values(), u.step(), spec.prm);
    const double f0 = (1.0 - spec.prm.alpha()) / spec.prm.b() * u.values()[0];
    if (f[0] != f0) throw std::logic_error("solve_abc_ode: initial value inconsistent with the forcing");
    return SampledFunction(u.t0(), u.t_end(), std::move(f));
}

namespace detail {

/// d/dt of the Riemann-Liouville-type derivative: the centered difference of
/// its half-node values, i.e. the second difference of the convolution with
/// the kernel.
inline std::vector<double> outer_derivative(const SampledFunction& f, const AlphaParam& prm) {
    const auto tab = ab_core::detail::kernel_table(prm, ab_core::KernelKind::mittag_leffler, f.step(), f.n(), false, true);
    auto d = ab_core::detail::second_difference(ab_core::detail::convolution_values(f, tab, 1), f.step());
    for (double& x : d) x *= prm.prefactor();
    return d;
}

}  // namespace detail

/// Compares ABC D^alpha (f') with d/dt ABR D^alpha f for f(t0) = f'(t0) = 0.
/// f carries f' samples; second_derivs holds f'' on the same grid.
inline VerificationReport commutation_check(const SampledFunction& f, const std::vector<double>& second_derivs,
                                            const AlphaParam& prm) {
    prm.require_open("commutation_check");
    if (!f.has_derivs()) throw PreconditionError("commutation_check: f' samples are required");
    if (second_derivs.size() != f.values().size()) {
        throw PreconditionError("commutation_check: f'' samples do not match the grid");
    }
    const auto& v = f.values();
    const auto& d = *f.derivs();
    double scale = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) scale = std::max({scale, std::abs(v[i]), std::abs(d[i])});
    if (std::abs(v[0]) > 1e-12 * scale || std::abs(d[0]) > 1e-12 * scale) {
        std::ostringstream os;
        os << "commutation_check: needs f(t0) = f'(t0) = 0, got f(t0) = " << v[0] << ", f'(t0) = " << d[0];
        throw PreconditionError(os.str());
    }

    const SampledFunction df(f.t0(), f.t_end(), d, second_derivs);
    const auto lhs = ab_core::abc_derivative(df, prm);
    const auto rhs = detail::outer_derivative(f, prm);

    VerificationReport rep;
    rep.name = "commutation";
    rep.grid_sizes = {f.n()};
    double peak = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        rep.max_abs_err = std::max(rep.max_abs_err, std::abs(lhs.values[i] - rhs[i]));
        peak = std::max(peak, std::abs(lhs.values[i]));
    }
    rep.max_rel_err = peak > 0.0 ? rep.max_abs_err / peak : rep.max_abs_err;

    double est = lhs.max_error_estimate();
    if (ab_core::detail::can_refine(f.n())) {
        const auto c1 = f.coarsened();
        const auto c2 = c1.coarsened();
        const auto e = ab_core::detail::richardson_estimate(rhs, detail::outer_derivative(c1, prm),
                                                            detail::outer_derivative(c2, prm));
        est += *std::max_element(e.begin(), e.end());
    }
    rep.tolerance = 10.0 * est;
    rep.passed = rep.max_abs_err <= rep.tolerance;
    std::ostringstream os;
    os.precision(3);
    os << "max |ABC(f') - d/dt ABR(f)| = " << rep.max_abs_err << ", combined estimate " << est;
    rep.detail = os.str();
    return rep;
}

}  // namespace mlfrac::fode
