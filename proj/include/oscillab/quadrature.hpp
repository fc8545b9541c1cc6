#ifndef OSCILLAB_QUADRATURE_HPP
#define OSCILLAB_QUADRATURE_HPP

/*
 * Adaptive Gauss-Kronrod panel quadrature for oscillatory integrands.
 *
 * Panels are first refined until each one spans at most a fixed fraction of
 * the local wavelength 2 pi / omega, where omega bounds the phase derivative
 * on the panel. Each panel is then integrated with the 31-point Kronrod rule
 * and its embedded 15-point Gauss rule; panels whose |K - G| exceeds their
 * share of the tolerance are bisected. Accepted panels are summed pairwise in
 * position order so the result does not depend on refinement order.
 */

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace oscillab {

using Complex = std::complex<double>;

class QuadratureBudgetExceeded : public std::runtime_error
{
public:
    explicit QuadratureBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureOptions
{
    double tol = 1e-10;               ///< absolute tolerance on the integral
    double wavelength_fraction = 2.0; ///< max initial panel width in local wavelengths
    std::size_t max_panels = 1000000; ///< per one-dimensional integral
    int max_depth = 60;
    double phase_scale = 0.0;         ///< bound on |phase| in radians; sets the rounding floor
};

/// Integrand value with an attached absolute error (nested integrals).
struct ValueWithError
{
    Complex value;
    double error = 0.0;
};

struct QuadratureResult
{
    Complex value;
    double error = 0.0;        ///< heuristic: sum of |K - G|, propagated errors and rounding
    double l1 = 0.0;           ///< Kronrod estimate of the integral of |F|
    std::size_t panels = 0;
    std::size_t evaluations = 0;
    bool converged = true;
};

/// Pairwise (tree) summation in index order.
template <typename T>
T pairwise_sum(const T* data, std::size_t n)
{
    if (n == 0) return T(0);
    if (n <= 8) {
        T s = data[0];
        for (std::size_t i = 1; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v)
{
    return pairwise_sum(v.data(), v.size());
}

namespace detail {

/// 31-point Kronrod rule on [-1,1] with its embedded 15-point Gauss rule.
struct KronrodRule
{
    std::array<double, 31> nodes{};
    std::array<double, 31> kronrod{};
    std::array<double, 31> gauss{};

    KronrodRule()
    {
        using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
        using G = boost::math::quadrature::gauss<double, 15>;
        const auto& x = GK::abscissa();
        const auto& wk = GK::weights();
        const auto& wg = G::weights();
        // x[0] = 0; even indices are shared with the Gauss rule.
        nodes[15] = 0.0;
        kronrod[15] = wk[0];
        gauss[15] = wg[0];
        for (std::size_t i = 1; i < x.size(); ++i) {
            nodes[15 + i] = x[i];
            nodes[15 - i] = -x[i];
            kronrod[15 + i] = kronrod[15 - i] = wk[i];
            const double g = (i % 2 == 0) ? wg[i / 2] : 0.0;
            gauss[15 + i] = gauss[15 - i] = g;
        }
    }

    static const KronrodRule& get()
    {
        static const KronrodRule rule;
        return rule;
    }
};

template <typename F>
ValueWithError call_integrand(F& f, double x)
{
    using R = std::invoke_result_t<F&, double>;
    if constexpr (std::is_same_v<R, ValueWithError>)
        return f(x);
    else
        return {Complex(f(x)), 0.0};
}

struct PanelEstimate
{
    double lo, hi;
    Complex kronrod;
    double diff;      ///< |K - G|
    double propagated;
    double l1;
    int depth;
};

template <typename F>
PanelEstimate evaluate_panel(F& f, double lo, double hi, int depth)
{
    const auto& rule = KronrodRule::get();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    Complex k(0.0), g(0.0);
    double prop = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const ValueWithError v = call_integrand(f, mid + half * rule.nodes[i]);
        k += rule.kronrod[i] * v.value;
        g += rule.gauss[i] * v.value;
        prop += rule.kronrod[i] * v.error;
        l1 += rule.kronrod[i] * std::abs(v.value);
    }
    return {lo, hi, half * k, half * std::abs(k - g), half * prop, half * l1, depth};
}

} // namespace detail

/**
 * Integrates F over [a,b].
 *
 * `omega(lo, hi)` must bound |d phase / dx| on [lo,hi] (radians per unit
 * length; return 0 for non-oscillatory integrands). `breakpoints` are extra
 * panel boundaries, e.g. where the amplitude changes regime. F returns either
 * a complex/real value or a ValueWithError.
 */
template <typename F, typename Omega>
QuadratureResult integrate_panels(F&& f, double a, double b, std::vector<double> breakpoints, Omega&& omega,
                                  const QuadratureOptions& opts)
{
    QuadratureResult res;
    if (!(b > a)) {
        res.value = 0.0;
        return res;
    }
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    breakpoints.erase(std::remove_if(breakpoints.begin(), breakpoints.end(), [&](double x) { return x < a || x > b; }),
                      breakpoints.end());

    const double length = b - a;
    std::vector<std::pair<double, double>> work;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) work.emplace_back(breakpoints[i], breakpoints[i + 1]);

    // Wavelength-limited initial partition.
    std::vector<std::pair<double, double>> initial;
    while (!work.empty()) {
        auto [lo, hi] = work.back();
        work.pop_back();
        const double w = omega(lo, hi);
        const double cap = w > 0.0 ? opts.wavelength_fraction * 2.0 * M_PI / w : std::numeric_limits<double>::infinity();
        if (hi - lo > cap) {
            const double mid = 0.5 * (lo + hi);
            work.emplace_back(mid, hi);
            work.emplace_back(lo, mid);
            if (work.size() + initial.size() > opts.max_panels)
                throw QuadratureBudgetExceeded("panel budget of " + std::to_string(opts.max_panels) + " exceeded");
        } else {
            initial.emplace_back(lo, hi);
        }
    }

    std::vector<detail::PanelEstimate> accepted;
    std::vector<std::pair<std::pair<double, double>, int>> pending;
    pending.reserve(initial.size());
    for (auto it = initial.rbegin(); it != initial.rend(); ++it) pending.push_back({*it, 0});
    const double eps = std::numeric_limits<double>::epsilon();
    while (!pending.empty()) {
        auto [iv, depth] = pending.back();
        pending.pop_back();
        auto est = detail::evaluate_panel(f, iv.first, iv.second, depth);
        res.evaluations += 31;
        const double share = opts.tol * (iv.second - iv.first) / length;
        const double rounding = eps * (50.0 + 2.0 * opts.phase_scale) * est.l1;
        if (est.diff <= std::max({share, rounding, est.propagated})) {
            accepted.push_back(est);
        } else if (depth >= opts.max_depth || iv.second - iv.first < 1e-14 * std::max(1.0, std::abs(iv.first))) {
            res.converged = false;
            accepted.push_back(est);
        } else {
            const double mid = 0.5 * (iv.first + iv.second);
            pending.push_back({{mid, iv.second}, depth + 1});
            pending.push_back({{iv.first, mid}, depth + 1});
        }
        if (accepted.size() + pending.size() > opts.max_panels)
            throw QuadratureBudgetExceeded("panel budget of " + std::to_string(opts.max_panels) + " exceeded");
    }

    std::sort(accepted.begin(), accepted.end(),
              [](const detail::PanelEstimate& x, const detail::PanelEstimate& y) { return x.lo < y.lo; });
    std::vector<Complex> values;
    std::vector<double> errors, l1s;
    values.reserve(accepted.size());
    for (const auto& p : accepted) {
        values.push_back(p.kronrod);
        errors.push_back(p.diff + p.propagated + eps * (50.0 + 2.0 * opts.phase_scale) * p.l1);
        l1s.push_back(p.l1);
    }
    res.value = pairwise_sum(values);
    res.error = pairwise_sum(errors);
    res.l1 = pairwise_sum(l1s);
    res.panels = accepted.size();
    return res;
}

/// Non-oscillatory convenience overload.
template <typename F>
QuadratureResult integrate_panels(F&& f, double a, double b, std::vector<double> breakpoints,
                                  const QuadratureOptions& opts)
{
    return integrate_panels(std::forward<F>(f), a, b, std::move(breakpoints), [](double, double) { return 0.0; }, opts);
}

/// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return {x, w};
}

} // namespace oscillab

#endif // OSCILLAB_QUADRATURE_HPP
