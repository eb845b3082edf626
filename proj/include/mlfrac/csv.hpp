#pragma once

// Locale-independent CSV output (17 significant digits, LF line endings) and
// input of uniformly sampled functions.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mlfrac/errors.hpp"
#include "mlfrac/types.hpp"

namespace mlfrac::csv {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline void write_series(std::ostream& os, const std::vector<double>& t, const std::vector<double>& values,
                         const std::optional<std::vector<double>>& est_error = std::nullopt) {
    os << (est_error ? "t,value,est_error\n" : "t,value\n");
    for (std::size_t i = 0; i < t.size(); ++i) {
        os << format_double(t[i]) << ',' << format_double(values[i]);
        if (est_error) os << ',' << format_double((*est_error)[i]);
        os << '\n';
    }
}

inline void write_result(std::ostream& os, const OperatorResult& r) { write_series(os, r.grid, r.values, r.est_error); }

inline void write_sampled(std::ostream& os, const SampledFunction& f) { write_series(os, f.grid(), f.values()); }

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace detail

/// Reads "t,value" rows (further columns ignored, one optional header line)
/// and checks that t is a uniform ascending grid.
inline SampledFunction read_sampled(std::istream& is) {
    std::vector<double> t;
    std::vector<double> v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto row = detail::trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos) {
            throw DomainError("csv line " + std::to_string(lineno) + ": expected at least two columns");
        }
        const auto rest = row.substr(comma + 1);
        const auto x = detail::parse_number(row.substr(0, comma));
        const auto y = detail::parse_number(rest.substr(0, rest.find(',')));
        if (!x || !y) {
            if (t.empty() && lineno == 1) continue;  // header
            throw DomainError("csv line " + std::to_string(lineno) + ": malformed number");
        }
        t.push_back(*x);
        v.push_back(*y);
    }
    if (t.size() < 3) throw DomainError("csv: at least three rows are required");
    const std::size_t n = t.size() - 1;
    const double h = (t.back() - t.front()) / static_cast<double>(n);
    if (!(h > 0.0)) throw DomainError("csv: t must be ascending");
    for (std::size_t i = 0; i <= n; ++i) {
        const double expect = SampledFunction::grid_point(t.front(), t.back(), n, i);
        if (std::abs(t[i] - expect) > 1e-9 * h) {
            throw DomainError("csv: grid is not uniform near t = " + format_double(t[i]));
        }
    }
    return SampledFunction(t.front(), t.back(), std::move(v));
}

}  // namespace mlfrac::csv
