#pragma once

// Fractional derivatives with Mittag-Leffler and exponential kernels, and the
// associated fractional integral, acting on uniformly sampled functions.
//
// The derivative operators integrate the kernel exactly against a piecewise
// representation of f. On the uniform grid every cell moment depends only on
// the lag m = i - j, so one table of primitives per operator call suffices:
//
//   P0(s) = K(s)
//   P1(s) = int_0^s K            = s   E_{alpha,2}(-a s^alpha)
//   P2(s) = int_0^s (s - x) K(x) = s^2 E_{alpha,3}(-a s^alpha)
//
// with K(s) = E_alpha(-a s^alpha) and a = alpha / (1 - alpha).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mlfrac/detail/parallel.hpp"
#include "mlfrac/errors.hpp"
#include "mlfrac/specfun.hpp"
#include "mlfrac/types.hpp"

namespace mlfrac::ab_core {

enum class KernelKind { mittag_leffler, exponential };

namespace detail {

struct KernelTable {
    double h = 0.0;
    std::vector<double> p0;
    std::vector<double> p1;
    std::vector<double> p2;
};

struct KernelPrimitives {
    double p0;
    double p1;
    double p2;
};

inline KernelPrimitives exponential_primitives(double a, double s) {
    const double x = a * s;
    const double em1 = std::expm1(-x);
    double p2;
    if (x < 0.5) {
        // sum_k (-a)^k s^{k+2} / (k+2)!
        double term = 0.5 * s * s;
        p2 = term;
        for (int k = 1; k < 40; ++k) {
            term *= -x / (k + 2);
            p2 += term;
            if (std::abs(term) < 1e-17 * std::abs(p2)) break;
        }
    } else {
        p2 = (x + em1) / (a * a);
    }
    return {std::exp(-x), -em1 / a, p2};
}

inline KernelPrimitives ml_primitives(double alpha, double a, double s, bool with_p0, bool with_p2) {
    if (s == 0.0) return {1.0, 0.0, 0.0};
    const double z = -a * std::pow(s, alpha);
    KernelPrimitives out{0.0, 0.0, 0.0};
    if (with_p0) out.p0 = specfun::mittag_leffler(alpha, z);
    out.p1 = s * specfun::mittag_leffler2(alpha, 2.0, z);
    if (with_p2) out.p2 = s * s * specfun::mittag_leffler2(alpha, 3.0, z);
    return out;
}

/// Primitives at s = m h, m = 0..n.
inline KernelTable kernel_table(const AlphaParam& p, KernelKind kind, double h, std::size_t n, bool with_p0,
                                bool with_p2) {
    KernelTable tab;
    tab.h = h;
    tab.p0.assign(with_p0 ? n + 1 : 0, 0.0);
    tab.p1.assign(n + 1, 0.0);
    tab.p2.assign(with_p2 ? n + 1 : 0, 0.0);
    const double alpha = p.alpha();
    const double a = p.ratio();
    mlfrac::detail::parallel_for(n + 1, [&](std::size_t m) {
        const double s = h * static_cast<double>(m);
        const KernelPrimitives k = kind == KernelKind::exponential ? exponential_primitives(a, s)
                                                                   : ml_primitives(alpha, a, s, with_p0, with_p2);
        if (with_p0) tab.p0[m] = k.p0;
        tab.p1[m] = k.p1;
        if (with_p2) tab.p2[m] = k.p2;
    });
    return tab;
}

/// M0[m] = int over the cell at lag m of K, for a grid with step stride*h.
inline std::vector<double> cell_moments(const KernelTable& tab, std::size_t stride, std::size_t count) {
    std::vector<double> m0(count + 1, 0.0);
    for (std::size_t m = 1; m <= count; ++m) m0[m] = tab.p1[m * stride] - tab.p1[(m - 1) * stride];
    return m0;
}

/// M1[m] = int over the cell at lag m of (s - s_lo) K(s) ds.
inline std::vector<double> first_moments(const KernelTable& tab, std::size_t stride, std::size_t count) {
    const double step = tab.h * static_cast<double>(stride);
    std::vector<double> m1(count + 1, 0.0);
    for (std::size_t m = 1; m <= count; ++m) {
        m1[m] = step * tab.p1[m * stride] - (tab.p2[m * stride] - tab.p2[(m - 1) * stride]);
    }
    return m1;
}

/// out[i] = sum_{j < i} cells[j] * moments[i - j], summed in increasing j.
inline std::vector<double> lag_convolve(const std::vector<double>& cells, const std::vector<double>& moments) {
    const std::size_t n = cells.size();
    std::vector<double> out(n + 1, 0.0);
    mlfrac::detail::parallel_for(n, [&](std::size_t k) {
        const std::size_t i = k + 1;
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) acc += cells[j] * moments[i - j];
        out[i] = acc;
    });
    return out;
}

/// Per-cell value of f' used by the Caputo-type operators.
inline std::vector<double> cell_slopes(const SampledFunction& f) {
    const std::size_t n = f.n();
    std::vector<double> slope(n);
    const auto& v = f.values();
    if (f.has_derivs()) {
        const auto& d = *f.derivs();
        for (std::size_t j = 0; j < n; ++j) slope[j] = 0.5 * (d[j] + d[j + 1]);
    } else {
        const double h = f.step();
        for (std::size_t j = 0; j < n; ++j) slope[j] = (v[j + 1] - v[j]) / h;
    }
    return slope;
}

inline bool can_refine(std::size_t n) { return n >= 8 && n % 4 == 0; }

/// Per-node Richardson error estimate from results on steps h, 2h and 4h:
/// |D_h - D_2h| / (2^q - 1) with q the observed order in the max norm,
/// clamped to [0.05, 2]. Nodes not shared with the 2h grid take the larger
/// neighbouring estimate.
inline std::vector<double> richardson_estimate(const std::vector<double>& fine, const std::vector<double>& coarse,
                                               const std::vector<double>& coarser) {
    const std::size_t n = fine.size() - 1;
    std::vector<double> est(n + 1, 0.0);
    double d1 = 0.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i <= n; i += 2) {
        est[i] = std::abs(fine[i] - coarse[i / 2]);
        d1 = std::max(d1, est[i]);
    }
    for (std::size_t i = 0; i <= n; i += 4) d2 = std::max(d2, std::abs(coarse[i / 2] - coarser[i / 4]));
    double scale = 1.0;
    if (d1 > 0.0 && d2 > 0.0) {
        const double q = std::clamp(std::log2(d2 / d1), 0.05, 2.0);
        scale = 1.0 / (std::exp2(q) - 1.0);
    }
    for (std::size_t i = 0; i <= n; i += 2) est[i] *= scale;
    for (std::size_t i = 1; i < n; i += 2) est[i] = std::max(est[i - 1], est[i + 1]);
    return est;
}

/// eval(stride, samples) evaluates the operator on every stride-th node.
template <class Eval>
std::optional<std::vector<double>> estimate_error(const SampledFunction& f, const std::vector<double>& fine, Eval&& eval) {
    if (!can_refine(f.n())) return std::nullopt;
    const auto c1 = f.coarsened();
    const auto c2 = c1.coarsened();
    return richardson_estimate(fine, eval(std::size_t{2}, c1), eval(std::size_t{4}, c2));
}

inline void require_derivative_input(const SampledFunction& f, const AlphaParam& p, const char* who) {
    p.require_open(who);
    if (!f.has_derivs() && f.n() < 8) {
        std::ostringstream os;
        os << who << ": n = " << f.n() << " intervals; at least 8 are needed to estimate f' without derivative samples";
        throw InsufficientResolution(os.str());
    }
}

inline std::vector<double> caputo_values(const SampledFunction& f, const KernelTable& tab, std::size_t stride,
                                         double prefactor) {
    const auto slope = cell_slopes(f);
    auto out = lag_convolve(slope, cell_moments(tab, stride, f.n()));
    for (double& v : out) v *= prefactor;
    return out;
}

inline OperatorResult caputo_type(const SampledFunction& f, const AlphaParam& p, KernelKind kind, const char* scheme) {
    const std::size_t n = f.n();
    const auto tab = kernel_table(p, kind, f.step(), n, false, false);
    OperatorResult r;
    r.grid = f.grid();
    r.scheme = scheme;
    r.values = caputo_values(f, tab, 1, p.prefactor());
    r.est_error = estimate_error(f, r.values, [&](std::size_t stride, const SampledFunction& g) {
        return caputo_values(g, tab, stride, p.prefactor());
    });
    return r;
}

/// int_{t0}^{t_i} f(x) K(t_i - x) dx with f piecewise linear, on every stride-th node.
inline std::vector<double> convolution_values(const SampledFunction& f, const KernelTable& tab, std::size_t stride) {
    const std::size_t n = f.n();
    const double step = tab.h * static_cast<double>(stride);
    const auto& v = f.values();
    std::vector<double> upper(n);
    std::vector<double> ramp(n);
    for (std::size_t j = 0; j < n; ++j) {
        upper[j] = v[j + 1];
        ramp[j] = (v[j] - v[j + 1]) / step;
    }
    const auto c0 = lag_convolve(upper, cell_moments(tab, stride, n));
    const auto c1 = lag_convolve(ramp, first_moments(tab, stride, n));
    std::vector<double> conv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) conv[i] = c0[i] + c1[i];
    return conv;
}

/// Second-order first derivative; one-sided three-point stencils at the ends.
inline std::vector<double> first_difference(const std::vector<double>& v, double h) {
    const std::size_t n = v.size() - 1;
    std::vector<double> d(n + 1);
    const double inv = 1.0 / (2.0 * h);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv;
    for (std::size_t i = 1; i < n; ++i) d[i] = (v[i + 1] - v[i - 1]) * inv;
    d[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) * inv;
    return d;
}

/// Second-order second derivative; one-sided four-point stencils at the ends.
inline std::vector<double> second_difference(const std::vector<double>& v, double h) {
    const std::size_t n = v.size() - 1;
    std::vector<double> d(n + 1);
    const double inv = 1.0 / (h * h);
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) * inv;
    for (std::size_t i = 1; i < n; ++i) d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv;
    d[n] = (2.0 * v[n] - 5.0 * v[n - 1] + 4.0 * v[n - 2] - v[n - 3]) * inv;
    return d;
}

inline std::vector<double> convolution_derivative(const SampledFunction& f, const KernelTable& tab,
                                                  std::size_t stride, double prefactor) {
    auto d = first_difference(convolution_values(f, tab, stride), tab.h * static_cast<double>(stride));
    for (double& x : d) x *= prefactor;
    return d;
}

inline double binomial_coefficient_step(double c_prev, double beta, int k) { return c_prev * (beta - (k - 1)) / k; }

/// (1 + x)^beta + (1 - x)^beta - 2 for 0 < x <= 1/4 without cancellation.
inline double even_binomial_tail(double beta, double x) {
    double c = 1.0;
    double sum = 0.0;
    const double x2 = x * x;
    double xp = 1.0;
    for (int k = 1; k < 400; ++k) {
        c = binomial_coefficient_step(c, beta, k);
        if (k % 2 == 1) continue;
        xp *= x2;
        const double term = c * xp;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return 2.0 * sum;
}

/// (1 - x)^beta - 1 + beta x for 0 < x <= 1/4 without cancellation.
inline double second_order_binomial_tail(double beta, double x) {
    double c = 1.0;
    double sum = 0.0;
    double xp = 1.0;
    for (int k = 1; k < 400; ++k) {
        c = binomial_coefficient_step(c, beta, k);
        xp *= -x;
        if (k == 1) continue;
        const double term = c * xp;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

/// Product-trapezoid weights for int_0^{t_i} (t_i - y)^{alpha - 1} f(y) dy, in units of
/// h^alpha / (alpha (alpha + 1)): interior[m] for lag m >= 1, first[i] for node 0.
struct RiemannLiouvilleWeights {
    std::vector<double> interior;
    std::vector<double> first;
};

inline RiemannLiouvilleWeights rl_weights(double alpha, std::size_t n) {
    const double beta = alpha + 1.0;
    RiemannLiouvilleWeights w;
    w.interior.assign(n + 1, 0.0);
    w.first.assign(n + 1, 0.0);
    for (std::size_t m = 1; m <= n; ++m) {
        const double md = static_cast<double>(m);
        if (m < 4) {
            w.interior[m] = std::pow(md + 1.0, beta) - 2.0 * std::pow(md, beta) + std::pow(md - 1.0, beta);
            w.first[m] = std::pow(md - 1.0, beta) - (md - beta) * std::pow(md, alpha);
        } else {
            const double scale = std::pow(md, beta);
            w.interior[m] = scale * even_binomial_tail(beta, 1.0 / md);
            w.first[m] = scale * second_order_binomial_tail(beta, 1.0 / md);
        }
    }
    return w;
}

/// Riemann-Liouville product-trapezoid sums (without the h^alpha/(alpha(alpha+1)) factor).
inline std::vector<double> rl_sums(const std::vector<double>& v, double alpha) {
    const std::size_t n = v.size() - 1;
    const auto w = rl_weights(alpha, n);
    std::vector<double> out(n + 1, 0.0);
    mlfrac::detail::parallel_for(n, [&](std::size_t k) {
        const std::size_t i = k + 1;
        double acc = w.first[i] * v[0];
        for (std::size_t j = 1; j < i; ++j) acc += w.interior[i - j] * v[j];
        out[i] = acc + v[i];
    });
    return out;
}

/// (1 - alpha)/B f_i + alpha/(B Gamma(alpha)) int_{t0}^{t_i} f(y) (t_i - y)^{alpha - 1} dy.
inline std::vector<double> ab_integral_values(const std::vector<double>& v, double h, const AlphaParam& p) {
    const double alpha = p.alpha();
    const double b = p.b();
    const std::size_t n = v.size() - 1;
    if (alpha == 0.0) return v;
    std::vector<double> out(n + 1, 0.0);
    if (alpha == 1.0) {
        for (std::size_t i = 1; i <= n; ++i) out[i] = out[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
        if (b != 1.0) {
            for (double& x : out) x /= b;
        }
        return out;
    }
    const auto s = rl_sums(v, alpha);
    const double local = (1.0 - alpha) / b;
    // alpha/(B Gamma(alpha)) * h^alpha/(alpha(alpha+1)) = alpha h^alpha / (B Gamma(alpha + 2))
    const double c = alpha * std::pow(h, alpha) * specfun::rgamma(alpha + 2.0) / b;
    for (std::size_t i = 0; i <= n; ++i) out[i] = local * v[i] + c * s[i];
    return out;
}

}  // namespace detail

/// Exact integral of the kernel E_alpha(-a (t - x)^alpha) over [x_lo, x_hi].
inline double kernel_moment(double x_lo, double x_hi, double t, const AlphaParam& p) {
    if (!(x_lo <= x_hi && x_hi <= t) || !std::isfinite(x_lo) || !std::isfinite(t)) {
        std::ostringstream os;
        os << "kernel_moment: need x_lo <= x_hi <= t, got " << x_lo << ", " << x_hi << ", " << t;
        throw DomainError(os.str());
    }
    if (p.alpha() == 1.0) throw DomainError("kernel_moment: alpha = 1 gives an infinite kernel rate");
    if (x_lo == x_hi) return 0.0;
    if (p.alpha() == 0.0) return x_hi - x_lo;
    const double a = p.ratio();
    const double alpha = p.alpha();
    return detail::ml_primitives(alpha, a, t - x_lo, false, false).p1 -
           detail::ml_primitives(alpha, a, t - x_hi, false, false).p1;
}

/// B/(1 - alpha) f0 E_alpha(-a t^alpha): the gap between the Riemann-Liouville
/// and Caputo type derivatives at elapsed time t.
inline double relation_term(double f0, const AlphaParam& p, double t) {
    p.require_open("relation_term");
    if (!(t >= 0.0)) throw DomainError("relation_term: t must be non-negative");
    if (f0 == 0.0) return 0.0;
    const double k = t == 0.0 ? 1.0 : specfun::mittag_leffler(p.alpha(), -p.ratio() * std::pow(t, p.alpha()));
    return p.prefactor() * f0 * k;
}

/// Caputo-type derivative with Mittag-Leffler kernel.
inline OperatorResult abc_derivative(const SampledFunction& f, const AlphaParam& p) {
    detail::require_derivative_input(f, p, "abc_derivative");
    return detail::caputo_type(f, p, KernelKind::mittag_leffler, "abc:product-ml");
}

/// Caputo-Fabrizio derivative (exponential kernel); the normalization of p plays M(alpha).
inline OperatorResult cf_derivative(const SampledFunction& f, const AlphaParam& p) {
    detail::require_derivative_input(f, p, "cf_derivative");
    return detail::caputo_type(f, p, KernelKind::exponential, "cf:product-exp");
}

/// Riemann-Liouville-type derivative, assembled as the Caputo-type derivative
/// plus the initial-value term.
inline OperatorResult abr_derivative(const SampledFunction& f, const AlphaParam& p) {
    detail::require_derivative_input(f, p, "abr_derivative");
    const std::size_t n = f.n();
    const double f0 = f.values()[0];
    const auto tab = detail::kernel_table(p, KernelKind::mittag_leffler, f.step(), n, f0 != 0.0, false);
    OperatorResult r;
    r.grid = f.grid();
    r.scheme = "abr:caputo-plus-initial";
    r.values = detail::caputo_values(f, tab, 1, p.prefactor());
    r.est_error = detail::estimate_error(f, r.values, [&](std::size_t stride, const SampledFunction& g) {
        return detail::caputo_values(g, tab, stride, p.prefactor());
    });
    if (f0 != 0.0) {
        const double c = p.prefactor() * f0;
        for (std::size_t i = 0; i <= n; ++i) r.values[i] += c * tab.p0[i];
    }
    return r;
}

/// Riemann-Liouville-type derivative by numerically differentiating the
/// convolution of f with the kernel. Independent of the initial-value identity.
inline OperatorResult abr_derivative_direct(const SampledFunction& f, const AlphaParam& p) {
    detail::require_derivative_input(f, p, "abr_derivative_direct");
    const std::size_t n = f.n();
    const auto tab = detail::kernel_table(p, KernelKind::mittag_leffler, f.step(), n, false, true);
    OperatorResult r;
    r.grid = f.grid();
    r.scheme = "abr:direct-difference";
    r.values = detail::convolution_derivative(f, tab, 1, p.prefactor());
    r.est_error = detail::estimate_error(f, r.values, [&](std::size_t stride, const SampledFunction& g) {
        return detail::convolution_derivative(g, tab, stride, p.prefactor());
    });
    return r;
}

/// Fractional integral: (1 - alpha)/B f + alpha/B times the Riemann-Liouville integral.
/// alpha = 0 returns f; alpha = 1 the cumulative trapezoidal integral.
inline OperatorResult ab_integral(const SampledFunction& f, const AlphaParam& p) {
    const std::size_t n = f.n();
    const double h = f.step();
    OperatorResult r;
    r.grid = f.grid();
    r.values = detail::ab_integral_values(f.values(), h, p);
    if (p.alpha() == 0.0) {
        r.scheme = "ab-integral:identity";
        return r;
    }
    r.scheme = p.alpha() == 1.0 ? "ab-integral:trapezoid" : "ab-integral:product-trapezoid";
    r.est_error = detail::estimate_error(f, r.values, [&](std::size_t stride, const SampledFunction& g) {
        return detail::ab_integral_values(g.values(), h * static_cast<double>(stride), p);
    });
    return r;
}

}  // namespace mlfrac::ab_core
