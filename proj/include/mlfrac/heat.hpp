#pragma once

// Fractional Fourier law in a cylindrical shell.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "mlfrac/ab_core.hpp"
#include "mlfrac/errors.hpp"
#include "mlfrac/specfun.hpp"
#include "mlfrac/types.hpp"

namespace mlfrac::heat {

/// Cylindrical shell geometry and load. SI units.
struct HeatShellSpec {
    double r1 = 0.0;      ///< inner radius (m)
    double r2 = 0.0;      ///< outer radius (m)
    double length = 1.0;  ///< L (m)
    double k = 1.0;       ///< thermal conductivity (W/m K)
    double q_dot = 0.0;   ///< heat rate (W)
    double alpha = 0.5;
    Normalization norm = Normalization::unit;
};

inline void validate(const HeatShellSpec& s) {
    if (!(s.r1 > 0.0) || !std::isfinite(s.r2)) throw DomainError("shell: inner radius must be positive");
    if (!(s.r1 < s.r2)) {
        std::ostringstream os;
        os << "shell: need r1 < r2, got r1 = " << s.r1 << ", r2 = " << s.r2;
        throw DomainError(os.str());
    }
    if (!(s.length > 0.0) || !(s.k > 0.0) || !std::isfinite(s.length) || !std::isfinite(s.k)) {
        throw DomainError("shell: length and conductivity must be positive");
    }
    if (!std::isfinite(s.q_dot)) throw DomainError("shell: heat rate must be finite");
    if (!(s.alpha > 0.0)) throw DomainError("shell: alpha must lie in (0, 0.99)");
    if (!(s.alpha < 0.99)) {
        std::ostringstream os;
        os << "shell: alpha = " << s.alpha << " too close to 1; the alpha/(1 - alpha) prefactor is singular";
        throw RangeError(os.str());
    }
}

/// The braced factor of the temperature drop:
///   1 + alpha/(1-alpha) r2^{alpha-1} [alpha 3F2({1,1,1-alpha},{2,2}; r1/r2) r1 - (H(alpha) + ln(r1/r2)) r2]
inline double shell_bracket(double alpha, double r1, double r2) {
    const double x = r1 / r2;
    const double f32 = specfun::hyper_3f2({{1.0, 1.0, 1.0 - alpha}, {2.0, 2.0}, x});
    const double h = specfun::harmonic_number(alpha);
    const double inner = alpha * f32 * r1 - (h + std::log(x)) * r2;
    return 1.0 + alpha / (1.0 - alpha) * std::pow(r2, alpha - 1.0) * inner;
}

/// T1 - T2 = Q / (2 pi L k) * shell_bracket(alpha, r1, r2). The normalization
/// choice does not enter.
inline double shell_temperature_drop(const HeatShellSpec& s) {
    validate(s);
    const double scale = s.q_dot / (2.0 * std::numbers::pi * s.length * s.k);
    return scale * shell_bracket(s.alpha, s.r1, s.r2);
}

/// Temperature sampled on a uniform radial grid.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> temperature;
    double alpha = 0.5;
    double k = 1.0;
    double area = 1.0;
    Normalization norm = Normalization::unit;
};

inline SampledFunction as_sampled(const RadialProfile& prof) {
    const auto& r = prof.r;
    if (r.size() != prof.temperature.size()) throw DomainError("profile: r and T lengths differ");
    if (r.size() < 3) throw DomainError("profile: at least three radii are required");
    const double h = (r.back() - r.front()) / static_cast<double>(r.size() - 1);
    if (!(h > 0.0)) throw DomainError("profile: radii must be ascending");
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double expect = SampledFunction::grid_point(r.front(), r.back(), r.size() - 1, i);
        if (std::abs(r[i] - expect) > 1e-9 * h) throw DomainError("profile: radii must be uniformly spaced");
    }
    return SampledFunction(r.front(), r.back(), prof.temperature);
}

/// dQ/dt(r) = -k A ABR D_r^alpha T, lower terminal at the inner radius.
inline SampledFunction heat_flux(const RadialProfile& prof) {
    if (!(prof.k > 0.0) || !(prof.area > 0.0)) throw DomainError("profile: k and A must be positive");
    const auto temp = as_sampled(prof);
    const auto d = ab_core::abr_derivative(temp, AlphaParam(prof.alpha, prof.norm));
    std::vector<double> flux(d.values.size());
    const double c = -prof.k * prof.area;
    for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = c * d.values[i];
    return SampledFunction(temp.t0(), temp.t_end(), std::move(flux));
}

}  // namespace mlfrac::heat
