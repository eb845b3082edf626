#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlfrac/errors.hpp"
#include "mlfrac/types.hpp"

namespace mlfrac {

/// Builtin test functions with closed-form derivatives and Laplace transforms.
///
///   const:c          f(t) = c
///   poly:c0,c1,...   f(t) = c0 + c1 t + c2 t^2 + ...
///   exp:l            f(t) = exp(l t)
///   sin:w            f(t) = sin(w t)
class CatalogFunction {
public:
    enum class Kind { constant, polynomial, exponential, sine };

    static CatalogFunction constant(double c) { return CatalogFunction(Kind::constant, {c}); }
    static CatalogFunction polynomial(std::vector<double> coeffs) {
        if (coeffs.empty()) throw DomainError("poly: at least one coefficient is required");
        return CatalogFunction(Kind::polynomial, std::move(coeffs));
    }
    static CatalogFunction exponential(double lambda) { return CatalogFunction(Kind::exponential, {lambda}); }
    static CatalogFunction sine(double omega) { return CatalogFunction(Kind::sine, {omega}); }

    /// Parses the selector syntax above. Throws DomainError on malformed input.
    static CatalogFunction parse(std::string_view spec) {
        const auto colon = spec.find(':');
        if (colon == std::string_view::npos) {
            throw DomainError("function selector '" + std::string(spec) + "' must look like kind:args");
        }
        const auto kind = spec.substr(0, colon);
        const auto args = parse_list(spec.substr(colon + 1), spec);
        if (kind == "poly") return polynomial(args);
        if (args.size() != 1) {
            throw DomainError("function selector '" + std::string(spec) + "' takes exactly one number");
        }
        if (kind == "const") return constant(args[0]);
        if (kind == "exp") return exponential(args[0]);
        if (kind == "sin") return sine(args[0]);
        throw DomainError("unknown function kind '" + std::string(kind) + "'");
    }

    Kind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }

    double value(double t) const { return derivative(t, 0); }

    /// order-th derivative, order >= 0.
    double derivative(double t, int order = 1) const {
        switch (kind_) {
            case Kind::constant:
                return order == 0 ? params_[0] : 0.0;
            case Kind::polynomial: {
                double acc = 0.0;
                for (std::size_t k = params_.size(); k-- > static_cast<std::size_t>(order);) {
                    double falling = 1.0;
                    for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - static_cast<std::size_t>(j));
                    acc = acc * t + falling * params_[k];
                }
                return acc;
            }
            case Kind::exponential:
                return std::pow(params_[0], order) * std::exp(params_[0] * t);
            case Kind::sine: {
                const double w = params_[0];
                const double scale = std::pow(w, order);
                switch (order % 4) {
                    case 0: return scale * std::sin(w * t);
                    case 1: return scale * std::cos(w * t);
                    case 2: return -scale * std::sin(w * t);
                    default: return -scale * std::cos(w * t);
                }
            }
        }
        return 0.0;
    }

    /// Laplace transform from 0 at p, when the integral converges.
    std::optional<double> laplace(double p) const {
        if (!(p > 0.0)) return std::nullopt;
        switch (kind_) {
            case Kind::constant:
                return params_[0] / p;
            case Kind::polynomial: {
                double acc = 0.0;
                double fact_over_pow = 1.0 / p;  // k! / p^{k+1}
                for (std::size_t k = 0; k < params_.size(); ++k) {
                    acc += params_[k] * fact_over_pow;
                    fact_over_pow *= static_cast<double>(k + 1) / p;
                }
                return acc;
            }
            case Kind::exponential:
                if (!(p > params_[0])) return std::nullopt;
                return 1.0 / (p - params_[0]);
            case Kind::sine: {
                const double w = params_[0];
                return w / (p * p + w * w);
            }
        }
        return std::nullopt;
    }

    /// Samples on the uniform grid of [t0, T] with n intervals.
    SampledFunction sample(double t0, double t_end, std::size_t n, bool with_derivs = true) const {
        auto f = [this](double t) { return value(t); };
        if (!with_derivs) return SampledFunction::tabulate(f, t0, t_end, n);
        return SampledFunction::tabulate(f, [this](double t) { return derivative(t, 1); }, t0, t_end, n);
    }

    std::string name() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind_) {
            case Kind::constant: os << "const:"; break;
            case Kind::polynomial: os << "poly:"; break;
            case Kind::exponential: os << "exp:"; break;
            case Kind::sine: os << "sin:"; break;
        }
        for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
        return os.str();
    }

private:
    CatalogFunction(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {
        for (double v : params_) {
            if (!std::isfinite(v)) throw DomainError("function parameters must be finite");
        }
    }

    static std::vector<double> parse_list(std::string_view list, std::string_view whole) {
        std::vector<double> out;
        std::size_t pos = 0;
        while (pos <= list.size()) {
            const auto comma = list.find(',', pos);
            const auto item = list.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
            double v = 0.0;
            const auto* first = item.data();
            const auto* last = item.data() + item.size();
            if (!item.empty() && *first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (item.empty() || ec != std::errc() || ptr != last) {
                throw DomainError("malformed number '" + std::string(item) + "' in '" + std::string(whole) + "'");
            }
            out.push_back(v);
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        return out;
    }

    Kind kind_;
    std::vector<double> params_;
};

/// The smooth functions exercised by the verification suites.
inline std::vector<CatalogFunction> verification_catalog() {
    return {
        CatalogFunction::constant(1.0),
        CatalogFunction::constant(-3.7),
        CatalogFunction::polynomial({0.0, 1.0}),
        CatalogFunction::polynomial({0.0, 0.0, 1.0}),
        CatalogFunction::polynomial({2.0, -1.0, 0.5}),
        CatalogFunction::exponential(-1.0),
        CatalogFunction::exponential(0.5),
        CatalogFunction::sine(3.0),
    };
}

}  // namespace mlfrac
