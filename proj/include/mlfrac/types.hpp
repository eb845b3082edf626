#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlfrac/errors.hpp"
#include "mlfrac/specfun.hpp"

namespace mlfrac {

/// Choice of the normalization function B(alpha) (M(alpha) for the
/// exponential kernel). Both satisfy B(0) = B(1) = 1.
enum class Normalization {
    unit,             ///< B(alpha) = 1
    gamma_corrected,  ///< B(alpha) = 1 - alpha + alpha / Gamma(alpha)
};

inline std::string_view to_string(Normalization n) {
    return n == Normalization::unit ? "unit" : "gamma-corrected";
}

inline std::optional<Normalization> parse_normalization(std::string_view s) {
    if (s == "unit") return Normalization::unit;
    if (s == "gamma-corrected" || s == "gamma") return Normalization::gamma_corrected;
    return std::nullopt;
}

inline double normalization_value(Normalization n, double alpha) {
    if (n == Normalization::unit) return 1.0;
    // alpha / Gamma(alpha) = alpha^2 / Gamma(alpha + 1), finite at alpha = 0.
    return 1.0 - alpha + alpha * alpha * specfun::rgamma(alpha + 1.0);
}

/// Fractional order together with its normalization.
class AlphaParam {
public:
    explicit AlphaParam(double alpha, Normalization norm = Normalization::unit) : alpha_(alpha), norm_(norm) {
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            std::ostringstream os;
            os << "fractional order alpha = " << alpha << " must lie in [0, 1]";
            throw DomainError(os.str());
        }
        b_ = normalization_value(norm, alpha);
    }

    double alpha() const { return alpha_; }
    Normalization normalization() const { return norm_; }

    /// B(alpha)
    double b() const { return b_; }

    /// a = alpha / (1 - alpha); infinite at alpha = 1.
    double ratio() const {
        return alpha_ == 1.0 ? std::numeric_limits<double>::infinity() : alpha_ / (1.0 - alpha_);
    }

    /// B(alpha) / (1 - alpha), the derivative prefactor.
    double prefactor() const { return b_ / (1.0 - alpha_); }

    /// Derivative operators need the open interval.
    void require_open(std::string_view who) const {
        if (!(alpha_ > 0.0 && alpha_ < 1.0)) {
            std::ostringstream os;
            os << who << ": alpha = " << alpha_ << " must lie in (0, 1)";
            throw DomainError(os.str());
        }
    }

private:
    double alpha_;
    Normalization norm_;
    double b_;
};

/// Real function tabulated on the uniform grid t_i = t0 + i (T - t0) / n,
/// i = 0..n, optionally with exact derivative samples.
class SampledFunction {
public:
    SampledFunction(double t0, double t_end, std::vector<double> values,
                    std::optional<std::vector<double>> derivs = std::nullopt)
        : t0_(t0), t_end_(t_end), values_(std::move(values)), derivs_(std::move(derivs)) {
        if (values_.size() < 3) throw DomainError("SampledFunction: need n >= 2 intervals");
        if (!(t_end_ > t0_) || !std::isfinite(t0_) || !std::isfinite(t_end_)) {
            throw DomainError("SampledFunction: interval must satisfy T > t0");
        }
        if (derivs_ && derivs_->size() != values_.size()) {
            throw DomainError("SampledFunction: derivative samples do not match the grid");
        }
    }

    template <class F>
    static SampledFunction tabulate(F&& f, double t0, double t_end, std::size_t n) {
        std::vector<double> v(n + 1);
        for (std::size_t i = 0; i <= n; ++i) v[i] = f(grid_point(t0, t_end, n, i));
        return SampledFunction(t0, t_end, std::move(v));
    }

    template <class F, class D>
    static SampledFunction tabulate(F&& f, D&& df, double t0, double t_end, std::size_t n) {
        std::vector<double> v(n + 1);
        std::vector<double> d(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = grid_point(t0, t_end, n, i);
            v[i] = f(t);
            d[i] = df(t);
        }
        return SampledFunction(t0, t_end, std::move(v), std::move(d));
    }

    static double grid_point(double t0, double t_end, std::size_t n, std::size_t i) {
        return i == n ? t_end : t0 + (t_end - t0) * (static_cast<double>(i) / static_cast<double>(n));
    }

    double t0() const { return t0_; }
    double t_end() const { return t_end_; }
    /// Number of intervals.
    std::size_t n() const { return values_.size() - 1; }
    double step() const { return (t_end_ - t0_) / static_cast<double>(n()); }
    double time(std::size_t i) const { return grid_point(t0_, t_end_, n(), i); }

    const std::vector<double>& values() const { return values_; }
    const std::optional<std::vector<double>>& derivs() const { return derivs_; }
    bool has_derivs() const { return derivs_.has_value(); }

    std::vector<double> grid() const {
        std::vector<double> g(values_.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = time(i);
        return g;
    }

    /// Every second sample; n must be even.
    SampledFunction coarsened() const {
        std::vector<double> v;
        std::optional<std::vector<double>> d;
        v.reserve(n() / 2 + 1);
        for (std::size_t i = 0; i <= n(); i += 2) v.push_back(values_[i]);
        if (derivs_) {
            d.emplace();
            for (std::size_t i = 0; i <= n(); i += 2) d->push_back((*derivs_)[i]);
        }
        return SampledFunction(t0_, t_end_, std::move(v), std::move(d));
    }

private:
    double t0_;
    double t_end_;
    std::vector<double> values_;
    std::optional<std::vector<double>> derivs_;
};

/// Operator output on the input grid.
struct OperatorResult {
    std::vector<double> grid;
    std::vector<double> values;
    std::string scheme;
    std::optional<std::vector<double>> est_error;

    /// Largest per-point error estimate, or 0 without one.
    double max_error_estimate() const {
        double m = 0.0;
        if (est_error) {
            for (double e : *est_error) m = std::max(m, e);
        }
        return m;
    }
};

/// Outcome of one named numerical check.
struct VerificationReport {
    std::string name;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    std::vector<std::size_t> grid_sizes;
    double tolerance = 0.0;
    bool passed = true;
    std::string detail;
};

}  // namespace mlfrac
