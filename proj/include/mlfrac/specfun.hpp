#pragma once

// Special functions behind the Mittag-Leffler kernels and the shell solution:
// Gamma, fractional harmonic numbers, one- and two-parameter Mittag-Leffler
// functions and the generalized hypergeometric 3F2 series.
//
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "mlfrac/detail/quadrature.hpp"
#include "mlfrac/errors.hpp"

namespace mlfrac::specfun {

namespace detail {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

/// sin(pi x), exact zeros at the integers.
inline double sinpi(double x) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
    double r = std::fmod(x, 2.0);  // exact, r in (-2, 2)
    if (r > 1.0) r -= 2.0;
    if (r < -1.0) r += 2.0;
    if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
    if (r > 0.5) r = 1.0 - r;
    if (r < -0.5) r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

/// cos(pi x) = sin(pi (x + 1/2)).
inline double cospi(double x) {
    double r = std::fmod(std::abs(x), 2.0);
    if (r == 0.5 || r == 1.5) return 0.0;
    return sinpi(r + 0.5);
}

/// log |1/Gamma(x)| and the sign of 1/Gamma(x); sign 0 at the poles.
struct LogReciprocalGamma {
    double log_magnitude;
    int sign;
};

inline LogReciprocalGamma log_rgamma(double x) {
    if (is_nonpositive_integer(x)) return {-std::numeric_limits<double>::infinity(), 0};
    if (x > 0.0) return {-std::lgamma(x), 1};
    // Reflection: 1/Gamma(x) = Gamma(1 - x) sin(pi x) / pi.
    const double s = sinpi(x);
    if (s == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    return {std::lgamma(1.0 - x) + std::log(std::abs(s)) - std::log(std::numbers::pi), s > 0.0 ? 1 : -1};
}

}  // namespace detail

/// Gamma function. Accepts x > 0 and negative non-integers; poles are
/// domain errors and overflow is a range error.
inline double gamma_fn(double x) {
    if (std::isnan(x) || detail::is_nonpositive_integer(x)) {
        std::ostringstream os;
        os << "gamma_fn: argument " << x << " is a pole";
        throw DomainError(os.str());
    }
    const double g = std::tgamma(x);
    if (!std::isfinite(g)) {
        std::ostringstream os;
        os << "gamma_fn: Gamma(" << x << ") overflows";
        throw RangeError(os.str());
    }
    return g;
}

/// 1/Gamma(x), an entire function: zero at the poles of Gamma, never throws.
inline double rgamma(double x) {
    if (detail::is_nonpositive_integer(x)) return 0.0;
    if (x > 0.0 && x < 170.0) return 1.0 / std::tgamma(x);
    if (x > 0.0) return std::exp(-std::lgamma(x));
    if (x > -170.0) {
        const double g = std::tgamma(x);
        return 1.0 / g;
    }
    const auto r = detail::log_rgamma(x);
    return r.sign * std::exp(r.log_magnitude);
}

/// Digamma psi(x) for x > 0: upward recurrence to x >= 8, then the
/// asymptotic series in 1/x^2.
inline double digamma(double x) {
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "digamma: argument " << x << " must be positive";
        throw DomainError(os.str());
    }
    detail::CompensatedSum shift;
    while (x < 8.0) {
        shift.add(-1.0 / x);
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    // B_{2k} / (2k) for k = 1..8
    constexpr std::array<double, 8> coeff{
        1.0 / 12.0,          -1.0 / 120.0,         1.0 / 252.0,      -1.0 / 240.0,
        1.0 / 132.0,         -691.0 / 32760.0,     1.0 / 12.0,       -3617.0 / 8160.0,
    };
    double series = 0.0;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) series = series * inv2 + *it;
    series *= inv2;
    return std::log(x) - 0.5 / x - series + shift.value();
}

/// Fractional harmonic number H(alpha) = psi(alpha + 1) + gamma_E, alpha > -1.
inline double harmonic_number(double alpha) {
    if (!(alpha > -1.0)) {
        std::ostringstream os;
        os << "harmonic_number: alpha = " << alpha << " must exceed -1";
        throw DomainError(os.str());
    }
    if (alpha == 0.0) return 0.0;
    return digamma(alpha + 1.0) + std::numbers::egamma;
}

// ---------------------------------------------------------------------------
// Mittag-Leffler functions

struct MLParams {
    double alpha = 1.0;
    double beta = 1.0;
    double z = 0.0;
};

/// Which evaluation route produced a Mittag-Leffler value.
enum class MlStrategy { origin, closed_form, series, asymptotic, integral, kummer };

inline const char* to_string(MlStrategy s) {
    switch (s) {
        case MlStrategy::origin: return "origin";
        case MlStrategy::closed_form: return "closed_form";
        case MlStrategy::series: return "series";
        case MlStrategy::asymptotic: return "asymptotic";
        case MlStrategy::integral: return "integral";
        case MlStrategy::kummer: return "kummer";
    }
    return "unknown";
}

struct MlEvaluation {
    double value;
    MlStrategy strategy;
};

namespace detail {

// Largest |term| the double-precision power series may carry when z < 0;
// the cancellation error is about max_term * 1e-15.
inline constexpr double kSeriesMaxTerm = 1.0e3;
// Envelope level at which the asymptotic expansion is truncated.
inline constexpr double kAsymptoticCut = 1.0e-17;
// Worst quadrature error estimate accepted from the integral representation.
inline constexpr double kIntegralMaxError = 1.0e-11;

inline std::string describe(double alpha, double beta, double z) {
    std::ostringstream os;
    os.precision(17);
    os << "(alpha=" << alpha << ", beta=" << beta << ", z=" << z << ")";
    return os.str();
}

inline double ml_term(double alpha, double beta, double z, int k) {
    const double arg = alpha * k + beta;
    if (is_nonpositive_integer(arg)) return 0.0;
    const double log_abs_z = std::log(std::abs(z));
    if (arg < 170.0 && k * log_abs_z < 700.0) return std::pow(z, k) / std::tgamma(arg);
    const double mag = std::exp(k * log_abs_z - std::lgamma(arg));
    return (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
}

/// Power series sum_k z^k / Gamma(alpha k + beta). Returns nullopt when the
/// cancellation for z < 0 would exceed the error budget.
inline std::optional<double> ml_series(double alpha, double beta, double z) {
    const double growth = std::pow(std::abs(z), 1.0 / alpha);
    // Terms grow until alpha k + beta passes |z|^(1/alpha).
    const double k_peak = std::max(0.0, (growth - beta) / alpha);
    constexpr int k_cap = 20000;
    if (k_peak > k_cap) return std::nullopt;
    CompensatedSum sum;
    double max_term = 0.0;
    for (int k = 0; k <= k_cap; ++k) {
        const double term = ml_term(alpha, beta, z, k);
        if (!std::isfinite(term)) return std::nullopt;
        max_term = std::max(max_term, std::abs(term));
        if (z < 0.0 && max_term > kSeriesMaxTerm) return std::nullopt;
        sum.add(term);
        if (k > k_peak + 2) {
            const double scale = z < 0.0 ? 1.0 : std::max(1.0, std::abs(sum.value()));
            if (std::abs(term) < 1e-17 * scale) return sum.value();
        }
    }
    return std::nullopt;
}

/// Optimally truncated expansion E ~ -sum_k z^-k / Gamma(beta - alpha k),
/// z < 0, 0 < alpha <= 1. Stops once the term envelope Gamma(1-arg)/pi |z|^-k
/// drops below kAsymptoticCut; gives up if that never happens.
inline std::optional<double> ml_asymptotic(double alpha, double beta, double z) {
    const double x = -z;
    const double log_x = std::log(x);
    const double log_cut = std::log(kAsymptoticCut);
    CompensatedSum sum;
    double max_term = 0.0;
    for (int k = 1; k <= 600; ++k) {
        const double arg = beta - alpha * k;
        const double log_env = -k * log_x + (arg < 1.0 ? std::lgamma(1.0 - arg) - std::log(std::numbers::pi)
                                                       : -std::lgamma(arg));
        if (log_env < log_cut) return max_term > kSeriesMaxTerm ? std::nullopt : std::optional<double>(sum.value());
        if (log_env > 700.0) return std::nullopt;
        const auto r = log_rgamma(arg);
        if (r.sign == 0) continue;
        const double mag = std::exp(-k * log_x + r.log_magnitude);
        // -z^{-k} = -(-1)^k x^{-k}
        const double sign = (k % 2 == 0 ? -1.0 : 1.0) * r.sign;
        max_term = std::max(max_term, mag);
        sum.add(sign * mag);
    }
    return std::nullopt;
}

/// Integral representation for 0 < alpha < 1, z < 0 and beta < 1 + alpha:
///   E(z) = int_0^inf s^(alpha-beta) e^-s [s^alpha sin(pi(1-beta)) - z sin(pi(1-beta+alpha))]
///          / (pi (s^(2 alpha) - 2 s^alpha z cos(alpha pi) + z^2)) ds.
/// The endpoint power is removed with u = s^(alpha-beta+1).
inline double ml_integral_core(double alpha, double beta, double z) {
    const double e = alpha - beta;
    const double ep1 = e + 1.0;
    const double sin_a = sinpi(1.0 - beta);
    const double sin_b = sinpi(1.0 - beta + alpha);
    const double cos_ap = cospi(alpha);
    const double z2 = z * z;
    const double pref = 1.0 / (std::numbers::pi * ep1);
    auto integrand = [&](double u) {
        if (u <= 0.0) {
            // s -> 0: s^alpha -> 0
            return pref * (-z * sin_b) / z2;
        }
        const double s = std::pow(u, 1.0 / ep1);
        const double sa = std::pow(s, alpha);
        return pref * std::exp(-s) * (sa * sin_a - z * sin_b) / (sa * sa - 2.0 * sa * z * cos_ap + z2);
    };

    constexpr double s_max = 60.0;
    std::array<double, 16> s_breaks{};
    std::size_t nb = 0;
    s_breaks[nb++] = 0.0;
    for (double b : {0.25, 1.0, 4.0, 12.0, 30.0}) s_breaks[nb++] = b;
    if (alpha > 0.5) {
        // Denominator minimum at s^alpha = -z cos(alpha pi), width ~ |z| sin(alpha pi).
        const double centre = z * cos_ap;
        const double width = std::abs(z) * sinpi(alpha);
        for (double k : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
            const double level = centre + k * width;
            if (level <= 0.0) continue;
            const double s = std::pow(level, 1.0 / alpha);
            if (s < s_max) s_breaks[nb++] = s;
        }
    }
    s_breaks[nb++] = s_max;
    std::sort(s_breaks.begin(), s_breaks.begin() + static_cast<std::ptrdiff_t>(nb));

    CompensatedSum total;
    double err_total = 0.0;
    for (std::size_t i = 0; i + 1 < nb; ++i) {
        if (!(s_breaks[i + 1] > s_breaks[i])) continue;
        const double u0 = std::pow(s_breaks[i], ep1);
        const double u1 = std::pow(s_breaks[i + 1], ep1);
        if (!(u1 > u0)) continue;
        const auto piece = mlfrac::detail::integrate_adaptive(integrand, u0, u1, 1e-15, 1e-14);
        total.add(piece.value);
        err_total += piece.error;
    }
    if (!(err_total <= kIntegralMaxError)) {
        throw RangeError("mittag_leffler: quadrature could not certify " + describe(alpha, beta, z));
    }
    return total.value();
}

/// Integral route for any beta >= 0: shift beta down into (1 - alpha, 1]
/// and climb back with E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z.
inline double ml_integral(double alpha, double beta, double z) {
    int steps = 0;
    double base = beta;
    if (beta > 1.0) {
        steps = static_cast<int>(std::ceil((beta - 1.0) / alpha - 1e-12));
        base = beta - steps * alpha;
    }
    double value = ml_integral_core(alpha, base, z);
    for (int j = 1; j <= steps; ++j) {
        const double below = base + (j - 1) * alpha;
        value = (value - rgamma(below)) / z;
    }
    return value;
}

/// alpha = 1, z < 0: E_{1,beta}(-x) = e^-x / Gamma(beta) 1F1(beta-1; beta; x), positive terms.
inline double ml_kummer(double beta, double z) {
    const double x = -z;
    if (beta < 1.0) return rgamma(beta) + z * ml_kummer(beta + 1.0, z);
    CompensatedSum sum;
    double power = 1.0;  // x^k / k!
    for (int k = 0; k < 5000; ++k) {
        if (k > 0) power *= x / k;
        const double term = power * (beta - 1.0) / (beta - 1.0 + k);
        sum.add(term);
        if (k > x && term < 1e-17 * sum.value()) break;
    }
    return std::exp(-x) * sum.value() * rgamma(beta);
}

}  // namespace detail

/// Two-parameter Mittag-Leffler function with the route that produced it.
///
/// For real z: power series where its cancellation stays below ~1e-12, the
/// asymptotic expansion where its envelope certifies 1e-17, and otherwise
/// (0 < alpha < 1, z < 0) the integral representation. alpha = 1 uses exp,
/// the Kummer form or the expansion. Arguments no route can certify raise
/// RangeError instead of returning an inaccurate value.
inline MlEvaluation mittag_leffler_eval(double alpha, double beta, double z) {
    using detail::describe;
    if (!(alpha > 0.0) || !(alpha <= 2.0)) {
        throw DomainError("mittag_leffler: alpha must lie in (0, 2] " + describe(alpha, beta, z));
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw DomainError("mittag_leffler: beta must be finite and >= 0 " + describe(alpha, beta, z));
    }
    if (std::isnan(z)) throw DomainError("mittag_leffler: z is NaN");
    if (std::isinf(z)) throw RangeError("mittag_leffler: infinite argument " + describe(alpha, beta, z));

    auto finish = [&](double v, MlStrategy s) {
        if (!std::isfinite(v)) throw RangeError("mittag_leffler: value not representable " + describe(alpha, beta, z));
        return MlEvaluation{v, s};
    };

    if (z == 0.0) return {rgamma(beta), MlStrategy::origin};
    if (alpha == 1.0 && beta == 1.0) return finish(std::exp(z), MlStrategy::closed_form);

    if (z > 0.0) {
        if (auto v = detail::ml_series(alpha, beta, z)) return finish(*v, MlStrategy::series);
        throw RangeError("mittag_leffler: series does not converge within its term budget " + describe(alpha, beta, z));
    }

    if (std::pow(-z, 1.0 / alpha) <= 12.0) {
        if (auto v = detail::ml_series(alpha, beta, z)) return finish(*v, MlStrategy::series);
    }
    if (alpha > 1.0) {
        throw RangeError("mittag_leffler: alpha > 1 is only certified where the series is " + describe(alpha, beta, z));
    }
    if (alpha < 1.0 || z < -40.0) {
        if (auto v = detail::ml_asymptotic(alpha, beta, z)) return finish(*v, MlStrategy::asymptotic);
    }
    if (alpha == 1.0) {
        if (z < -700.0) throw RangeError("mittag_leffler: argument out of range " + describe(alpha, beta, z));
        return finish(detail::ml_kummer(beta, z), MlStrategy::kummer);
    }
    return finish(detail::ml_integral(alpha, beta, z), MlStrategy::integral);
}

/// E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta).
inline double mittag_leffler2(double alpha, double beta, double z) {
    return mittag_leffler_eval(alpha, beta, z).value;
}

inline double mittag_leffler2(const MLParams& p) { return mittag_leffler2(p.alpha, p.beta, p.z); }

/// One-parameter Mittag-Leffler function E_alpha(z) = E_{alpha,1}(z).
inline double mittag_leffler(double alpha, double z) { return mittag_leffler2(alpha, 1.0, z); }

// ---------------------------------------------------------------------------
// Generalized hypergeometric 3F2

struct HyperParams {
    std::array<double, 3> upper{};
    std::array<double, 2> lower{};
    double x = 0.0;
};

/// 3F2(a1, a2, a3; b1, b2; x) by its power series, |x| < 1.
inline double hyper_3f2(const HyperParams& p) {
    for (double b : p.lower) {
        if (detail::is_nonpositive_integer(b) || !std::isfinite(b)) {
            std::ostringstream os;
            os << "hyper_3f2: lower parameter " << b << " is zero or a negative integer";
            throw DomainError(os.str());
        }
    }
    if (!(std::abs(p.x) < 1.0)) {
        std::ostringstream os;
        os << "hyper_3f2: |x| = " << std::abs(p.x) << " is outside the unit disc";
        throw RangeError(os.str());
    }
    if (p.x == 0.0) return 1.0;
    const auto [a1, a2, a3] = p.upper;
    const auto [b1, b2] = p.lower;
    const double tail_factor = 1.0 / (1.0 - std::abs(p.x));
    detail::CompensatedSum sum;
    double term = 1.0;
    sum.add(term);
    for (int k = 0; k < 2000000; ++k) {
        const double kk = k;
        const double ratio = (a1 + kk) * (a2 + kk) * (a3 + kk) / ((b1 + kk) * (b2 + kk) * (kk + 1.0)) * p.x;
        term *= ratio;
        if (term == 0.0) return sum.value();
        sum.add(term);
        if (!std::isfinite(sum.value())) throw RangeError("hyper_3f2: series overflow");
        // Past the point where the ratio is below 1 the tail is bounded geometrically.
        if (std::abs(ratio) < 1.0 && std::abs(term) * tail_factor <= 1e-17 * std::abs(sum.value())) {
            return sum.value();
        }
    }
    throw RangeError("hyper_3f2: series did not converge");
}

}  // namespace mlfrac::specfun
