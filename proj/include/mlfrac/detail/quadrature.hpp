#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mlfrac::detail {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
};

/// One Gauss-Kronrod (10, 21) panel on [a, b]; nodes and weights come from Boost.
template <class F>
QuadResult gauss_kronrod_panel(F& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& x = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    // Gauss order 10 is even: the Gauss nodes are the odd-indexed Kronrod nodes.
    const double f0 = f(mid);
    double kronrod_sum = f0 * wk[0];
    double gauss_sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double pair = f(mid + half * x[i]) + f(mid - half * x[i]);
        kronrod_sum += pair * wk[i];
        if (i % 2 == 1) gauss_sum += pair * wg[i / 2];
    }
    const double value = half * kronrod_sum;
    const double err = std::max(std::abs(half * (kronrod_sum - gauss_sum)), 4.0 * 2.2e-16 * std::abs(value));
    return {value, err};
}

/// Globally adaptive Gauss-Kronrod: bisects the panel with the largest error
/// estimate until the summed estimate meets max(abs_tol, rel_tol |I|).
/// Panels are processed in a fixed order, so the result is deterministic.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol, int max_panels = 4000) {
    struct Panel {
        double a, b;
        QuadResult r;
        bool operator<(const Panel& o) const { return r.error < o.r.error; }
    };
    if (!(b > a)) return {};
    std::priority_queue<Panel> heap;
    Panel first{a, b, gauss_kronrod_panel(f, a, b)};
    double value = first.r.value;
    double error = first.r.error;
    heap.push(first);
    int panels = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && panels < max_panels) {
        const Panel worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {
            heap.push(worst);
            break;
        }
        Panel left{worst.a, m, gauss_kronrod_panel(f, worst.a, m)};
        Panel right{m, worst.b, gauss_kronrod_panel(f, m, worst.b)};
        value += left.r.value + right.r.value - worst.r.value;
        error += left.r.error + right.r.error - worst.r.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    // Re-add from the panels to shed the drift of the running updates.
    double v = 0.0;
    double e = 0.0;
    std::vector<Panel> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    for (const auto& p : all) {
        v += p.r.value;
        e += p.r.error;
    }
    return {v, e};
}

}  // namespace mlfrac::detail
