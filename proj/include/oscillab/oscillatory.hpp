#ifndef OSCILLAB_OSCILLATORY_HPP
#define OSCILLAB_OSCILLATORY_HPP

/*
 * Numerical evaluation of I(tau, phi) = int exp(i tau f(x)) phi(x) dx.
 *
 * Every path bottoms out in integrate_panels() with the phase derivative bound
 * driving the panel widths:
 *   - separable:  f = c + sum_i g_i(x_i) and a product-shaped phi factor into
 *                 one-dimensional integrals;
 *   - tensor:     iterated Cartesian quadrature, n <= 3 (cost grows like
 *                 (tau * |grad f|)^n, so this is the low-tau cross-check);
 *   - radial:     homogeneous f with radial phi reduces to sphere integrals of
 *                 R(tau, c) = int_0^oo exp(i tau c r^d) r^m eta(r) dr;
 *   - polar:      homogeneous f in two variables with an arbitrary amplitude,
 *                 used for the pushed-down blowup cutoff;
 *   - chart:      the double integrals over blowup charts, signed or absolute
 *                 Jacobian.
 */

#include "oscillab/cutoff.hpp"
#include "oscillab/polynomial.hpp"
#include "oscillab/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscillab {

struct OscillatorySample
{
    double tau = 0.0;
    Complex value;
    double error = 0.0;
    bool converged = true;
    std::string method;
};

enum class EvalStrategy { automatic, separable, tensor };

struct OscillatoryOptions
{
    EvalStrategy strategy = EvalStrategy::automatic;
    QuadratureOptions quadrature;            ///< tol is overridden per call
    std::size_t total_panel_budget = 50000000;
    int max_sphere_nodes = 8192;
};

enum class JacobianConvention { signed_form, absolute_measure };

inline const char* to_string(JacobianConvention c)
{
    return c == JacobianConvention::signed_form ? "signed" : "absolute";
}

namespace detail {

/// Bound on |g'| over [lo,hi] for g given by ascending coefficients.
inline double derivative_bound(const std::vector<double>& coeffs, double lo, double hi)
{
    const double m = std::max(std::abs(lo), std::abs(hi));
    double s = 0.0;
    for (std::size_t k = 1; k < coeffs.size(); ++k) s += k * std::abs(coeffs[k]) * std::pow(m, static_cast<double>(k - 1));
    return s;
}

/// Bound on |g| over [lo,hi].
inline double phase_bound(const std::vector<double>& coeffs, double lo, double hi)
{
    const double m = std::max(std::abs(lo), std::abs(hi));
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += std::abs(coeffs[k]) * std::pow(m, static_cast<double>(k));
    return s;
}

/// Bound on |d f / d x_axis| for x_axis in [lo,hi] and |x_j| <= box otherwise.
inline double partial_bound(const Polynomial& f, int axis, double lo, double hi, double box)
{
    const double m = std::max(std::abs(lo), std::abs(hi));
    double s = 0.0;
    for (const auto& t : f.numeric_terms()) {
        const int e = t.exponent[axis];
        if (e == 0) continue;
        double v = std::abs(t.coeff) * e * std::pow(m, e - 1);
        for (int j = 0; j < f.dimension(); ++j)
            if (j != axis) v *= std::pow(box, t.exponent[j]);
        s += v;
    }
    return s;
}

inline double int_power(double x, int e)
{
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= x;
    return r;
}

/// int_lo^hi exp(i tau g(x)) A(x) dx for univariate polynomial g.
template <typename Amp>
QuadratureResult oscillatory_1d(const std::vector<double>& g, double tau, Amp amplitude, double lo, double hi,
                                std::vector<double> breaks, const QuadratureOptions& q)
{
    auto f = [&](double x) { return std::polar(amplitude(x), tau * horner(g, x)); };
    auto omega = [&](double a, double b) { return tau * derivative_bound(g, a, b); };
    QuadratureOptions qq = q;
    qq.phase_scale = tau * phase_bound(g, lo, hi);
    return integrate_panels(f, lo, hi, std::move(breaks), omega, qq);
}

class PanelCounter
{
public:
    explicit PanelCounter(std::size_t budget) : budget_(budget) {}
    void add(std::size_t panels)
    {
        used_ += panels;
        if (used_ > budget_)
            throw QuadratureBudgetExceeded("total panel budget of " + std::to_string(budget_) + " exceeded");
    }
    std::size_t used() const { return used_; }

private:
    std::size_t budget_;
    std::size_t used_ = 0;
};

inline std::vector<double> univariate_part(const Polynomial& f, int axis)
{
    std::vector<double> g(1, 0.0);
    for (const auto& t : f.numeric_terms()) {
        int nonzero = 0;
        for (int j = 0; j < f.dimension(); ++j)
            if (t.exponent[j] != 0) ++nonzero;
        if (nonzero != 1 || t.exponent[axis] == 0) continue;
        const int e = t.exponent[axis];
        if (static_cast<int>(g.size()) <= e) g.resize(e + 1, 0.0);
        g[e] += t.coeff;
    }
    return g;
}

} // namespace detail

/// True when every non-constant term involves a single variable.
inline bool is_separable(const Polynomial& f)
{
    for (const auto& [nu, c] : f.terms()) {
        int nonzero = 0;
        for (int e : nu)
            if (e != 0) ++nonzero;
        if (nonzero > 1) return false;
    }
    return true;
}

namespace detail {

inline OscillatorySample eval_separable(const Polynomial& f, const TestFunction& phi, double tau, double tol,
                                        const OscillatoryOptions& opts)
{
    const int n = f.dimension();
    const double a = phi.cutoff().plateau(), b = phi.cutoff().support();
    const double c0 = to_double(f.coefficient(ExponentVector(n, 0)));
    std::vector<Complex> factors(n);
    std::vector<double> errs(n);
    bool converged = true;
    PanelCounter counter(opts.total_panel_budget);
    for (int i = 0; i < n; ++i) {
        double others = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) others *= 2.0 * b * std::pow(b, phi.exponent()[j]);
        QuadratureOptions q = opts.quadrature;
        q.tol = tol / (n * others);
        const auto g = univariate_part(f, i);
        auto r = oscillatory_1d(g, tau, [&](double x) { return phi.axis_factor(i, x); }, -b, b, {-a, 0.0, a}, q);
        counter.add(r.panels);
        factors[i] = r.value;
        errs[i] = r.error;
        converged = converged && r.converged;
    }
    OscillatorySample s;
    s.tau = tau;
    s.method = "separable";
    s.converged = converged;
    Complex prod = std::polar(1.0, tau * c0);
    for (const auto& fct : factors) prod *= fct;
    s.value = prod;
    for (int i = 0; i < n; ++i) {
        double e = errs[i];
        for (int j = 0; j < n; ++j)
            if (j != i) e *= std::abs(factors[j]) + errs[j];
        s.error += e;
    }
    return s;
}

inline OscillatorySample eval_tensor(const Polynomial& f, const TestFunction& phi, double tau, double tol,
                                     const OscillatoryOptions& opts)
{
    const int n = f.dimension();
    const double a = phi.cutoff().plateau(), b = phi.cutoff().support();
    const bool radial = phi.shape() == CutoffShape::radial;
    PanelCounter counter(opts.total_panel_budget);
    std::vector<double> point(n, 0.0);
    bool converged = true;

    std::function<QuadratureResult(int, double, double)> integrate_axis = [&](int k, double used_r2,
                                                                              double axis_tol) -> QuadratureResult {
        const double rho = radial ? std::sqrt(std::max(0.0, b * b - used_r2)) : b;
        std::vector<double> breaks{0.0};
        if (radial) {
            if (a * a > used_r2) {
                const double s = std::sqrt(a * a - used_r2);
                breaks.push_back(-s);
                breaks.push_back(s);
            }
        } else {
            breaks.push_back(-a);
            breaks.push_back(a);
        }
        QuadratureOptions q = opts.quadrature;
        q.tol = axis_tol;
        QuadratureResult r;
        if (k == n - 1) {
            const auto g = f.collapse_to_axis(k, point);
            r = oscillatory_1d(g, tau,
                               [&](double x) {
                                   point[k] = x;
                                   return phi(point);
                               },
                               -rho, rho, breaks, q);
        } else {
            const double inner_tol = axis_tol / (4.0 * b);
            auto inner = [&](double x) {
                point[k] = x;
                const auto ri = integrate_axis(k + 1, used_r2 + x * x, inner_tol);
                point[k] = x;
                return ValueWithError{ri.value, ri.error};
            };
            auto omega = [&](double lo, double hi) { return tau * partial_bound(f, k, lo, hi, b); };
            r = integrate_panels(inner, -rho, rho, breaks, omega, q);
        }
        counter.add(r.panels);
        converged = converged && r.converged;
        return r;
    };

    const auto r = integrate_axis(0, 0.0, tol / 2.0);
    OscillatorySample s;
    s.tau = tau;
    s.value = r.value;
    s.error = r.error;
    s.converged = converged;
    s.method = "tensor";
    return s;
}

} // namespace detail

/// I(tau, phi) for n <= 3 with the requested (or automatically chosen) strategy.
inline OscillatorySample eval_oscillatory(const Polynomial& f, const TestFunction& phi, double tau, double tol,
                                          const OscillatoryOptions& opts = {})
{
    const int n = f.dimension();
    if (n < 1 || n > 3) throw std::invalid_argument("eval_oscillatory: dimension must be 1, 2 or 3");
    if (phi.dimension() != n) throw std::invalid_argument("eval_oscillatory: test function dimension mismatch");
    if (!(tau >= 0.0)) throw std::invalid_argument("eval_oscillatory: tau must be nonnegative");
    if (!(tol > 0.0)) throw std::invalid_argument("eval_oscillatory: tol must be positive");
    const bool separable_ok = is_separable(f) && (phi.shape() == CutoffShape::product || n == 1);
    switch (opts.strategy) {
    case EvalStrategy::separable:
        if (!separable_ok) throw std::invalid_argument("eval_oscillatory: phase/test function are not separable");
        return detail::eval_separable(f, phi, tau, tol, opts);
    case EvalStrategy::tensor: return detail::eval_tensor(f, phi, tau, tol, opts);
    case EvalStrategy::automatic: break;
    }
    return separable_ok ? detail::eval_separable(f, phi, tau, tol, opts) : detail::eval_tensor(f, phi, tau, tol, opts);
}

/// Leading term (1/d) Gamma(b/d) exp(sign(c) i pi b/(2d)) |c|^{-b/d} tau^{-b/d} of
/// int_0^oo exp(i tau c u^d) u^{b-1} eta(u) du.
inline Complex erdelyi_leading(double b, int d, double c, double tau)
{
    if (c == 0.0) throw std::invalid_argument("erdelyi_leading: c must be nonzero");
    if (!(b > 0.0) || d < 1 || !(tau > 0.0)) throw std::invalid_argument("erdelyi_leading: need b > 0, d >= 1, tau > 0");
    const double s = b / d;
    const double sign = c > 0.0 ? 1.0 : -1.0;
    return std::polar(std::tgamma(s) / d * std::pow(std::abs(c), -s) * std::pow(tau, -s), sign * M_PI * s / 2.0);
}

/// Analytic leading term C tau^alpha for f = sum_i c_i x_i^{d_i} with x^nu times a
/// product bump equal to 1 near 0; nullopt when f is not of that form.
struct SeparableLeading
{
    double alpha = 0.0;
    Complex coeff;
};

inline std::optional<SeparableLeading> separable_leading(const Polynomial& f, const ExponentVector& nu)
{
    const int n = f.dimension();
    if (static_cast<int>(nu.size()) != n) throw std::invalid_argument("separable_leading: dimension mismatch");
    SeparableLeading out;
    out.coeff = 1.0;
    for (int i = 0; i < n; ++i) {
        int count = 0, d = 0;
        double c = 0.0;
        for (const auto& t : f.numeric_terms()) {
            int nonzero = 0;
            for (int j = 0; j < n; ++j)
                if (t.exponent[j] != 0) ++nonzero;
            if (nonzero == 0) return std::nullopt;
            if (nonzero > 1) return std::nullopt;
            if (t.exponent[i] != 0) {
                ++count;
                d = t.exponent[i];
                c = t.coeff;
            }
        }
        if (count != 1) return std::nullopt;
        const double bexp = nu[i] + 1.0;
        // int_R = int_0^oo [exp(i tau c u^d) + (-1)^nu exp(i tau c (-1)^d u^d)] u^nu eta(u) du
        const Complex plus = erdelyi_leading(bexp, d, c, 1.0);
        const Complex minus = erdelyi_leading(bexp, d, d % 2 == 0 ? c : -c, 1.0);
        out.coeff *= plus + (nu[i] % 2 == 0 ? 1.0 : -1.0) * minus;
        out.alpha -= bexp / d;
    }
    return out;
}

/// R(tau, c) = int_0^b exp(i tau c r^d) r^m eta(r) dr.
inline QuadratureResult radial_profile(double tau, double c, int m, int d, const CutoffFunction& eta,
                                       const QuadratureOptions& q)
{
    std::vector<double> g(d + 1, 0.0);
    g[d] = c;
    return detail::oscillatory_1d(g, tau, [&](double r) { return detail::int_power(r, m) * eta(r); }, 0.0,
                                  eta.support(), {eta.plateau()}, q);
}

namespace detail {

/// Zeros of a periodic function on [lo,hi) located by sampling and bisection.
template <typename H>
std::vector<double> bracket_zeros(H h, double lo, double hi, int samples)
{
    std::vector<double> zeros;
    double x0 = lo, h0 = h(lo);
    for (int k = 1; k <= samples; ++k) {
        const double x1 = lo + (hi - lo) * k / samples;
        const double h1 = h(x1);
        if (h0 == 0.0) {
            zeros.push_back(x0);
        } else if ((h0 < 0.0) != (h1 < 0.0) && h1 != 0.0) {
            boost::uintmax_t iters = 200;
            auto tol = [](double a, double b) { return std::abs(b - a) < 1e-15 * std::max(1.0, std::abs(a)); };
            try {
                auto [za, zb] = boost::math::tools::bisect(h, x0, x1, tol, iters);
                zeros.push_back(0.5 * (za + zb));
            } catch (const std::exception& e) {
                throw std::runtime_error(std::string("failed to bracket a sign change of h on the sphere: ") +
                                         e.what());
            }
        }
        x0 = x1;
        h0 = h1;
    }
    return zeros;
}

} // namespace detail

/// I(tau, phi) for homogeneous f and radial phi = x^nu eta(|x|), via sphere integrals.
inline OscillatorySample radial_reduce(const Polynomial& f, const TestFunction& phi, double tau, double tol,
                                       const OscillatoryOptions& opts = {})
{
    const int n = f.dimension();
    if (n != 2 && n != 3) throw std::invalid_argument("radial_reduce: dimension must be 2 or 3");
    if (phi.dimension() != n || phi.shape() != CutoffShape::radial)
        throw std::invalid_argument("radial_reduce: needs a radial test function of matching dimension");
    if (f.is_zero()) throw std::invalid_argument("radial_reduce: zero phase");
    const auto deg = f.homogeneous_degree();
    if (!deg) throw std::invalid_argument("radial_reduce: phase is not homogeneous");
    const int d = *deg;
    const auto& nu = phi.exponent();
    const int m = n - 1 + total_degree(nu);
    const auto& eta = phi.cutoff();

    detail::PanelCounter counter(opts.total_panel_budget);
    bool converged = true;
    const double sphere_area = n == 2 ? 2.0 * M_PI : 4.0 * M_PI;
    QuadratureOptions rq = opts.quadrature;
    rq.tol = tol / (4.0 * sphere_area);

    auto angular = [&](std::span<const double> omega) -> ValueWithError {
        double mono = 1.0;
        for (int i = 0; i < n; ++i) mono *= detail::int_power(omega[i], nu[i]);
        if (mono == 0.0) return {0.0, 0.0};
        const double c = f.value<double>(omega);
        const auto r = radial_profile(tau, c, m, d, eta, rq);
        counter.add(r.panels);
        converged = converged && r.converged;
        return {mono * r.value, std::abs(mono) * r.error};
    };

    OscillatorySample s;
    s.tau = tau;
    s.method = "radial";

    if (n == 2) {
        auto h = [&](double psi) {
            const double w[2] = {std::cos(psi), std::sin(psi)};
            return f.value<double>(std::span<const double>(w, 2));
        };
        double hmin = std::numeric_limits<double>::infinity(), hmax = 0.0;
        bool pos = false, neg = false;
        for (int k = 0; k < 1440; ++k) {
            const double v = h(2.0 * M_PI * k / 1440);
            hmin = std::min(hmin, std::abs(v));
            hmax = std::max(hmax, std::abs(v));
            pos = pos || v > 0.0;
            neg = neg || v < 0.0;
        }
        auto at = [&](double psi) {
            const double w[2] = {std::cos(psi), std::sin(psi)};
            return angular(std::span<const double>(w, 2));
        };
        if (!(pos && neg) && hmin > 1e-3 * hmax) {
            // Periodic and smooth: trapezoid with doubling.
            int nodes = 32;
            Complex sum = 0.0;
            double err = 0.0;
            for (int k = 0; k < nodes; ++k) {
                const auto v = at(2.0 * M_PI * k / nodes);
                sum += v.value;
                err += v.error;
            }
            Complex prev = sum * (2.0 * M_PI / nodes);
            for (;;) {
                Complex add = 0.0;
                for (int k = 0; k < nodes; ++k) {
                    const auto v = at(2.0 * M_PI * (k + 0.5) / nodes);
                    add += v.value;
                    err += v.error;
                }
                sum += add;
                nodes *= 2;
                const Complex cur = sum * (2.0 * M_PI / nodes);
                const double diff = std::abs(cur - prev);
                prev = cur;
                if (diff <= tol / 2.0 || nodes >= opts.max_sphere_nodes) {
                    if (diff > tol / 2.0) converged = false;
                    s.value = cur;
                    s.error = diff + err * (2.0 * M_PI / nodes);
                    break;
                }
            }
        } else {
            auto zeros = detail::bracket_zeros(h, 0.0, 2.0 * M_PI, 1440);
            QuadratureOptions aq = opts.quadrature;
            aq.tol = tol / 2.0;
            const auto r = integrate_panels(at, 0.0, 2.0 * M_PI, zeros, aq);
            s.value = r.value;
            s.error = r.error;
            converged = converged && r.converged;
        }
    } else {
        // S^2 with t = cos(theta), azimuth p: d sigma = dt dp.
        auto omega_of = [](double t, double p) {
            const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
            return std::array<double, 3>{st * std::cos(p), st * std::sin(p), t};
        };
        bool pos = false, neg = false;
        for (int i = 0; i <= 120; ++i)
            for (int j = 0; j < 240; ++j) {
                const auto w = omega_of(-1.0 + 2.0 * i / 120, 2.0 * M_PI * j / 240);
                const double v = f.value<double>(std::span<const double>(w.data(), 3));
                pos = pos || v > 0.0;
                neg = neg || v < 0.0;
            }
        if (!(pos && neg)) {
            Complex prev = 0.0;
            bool have_prev = false;
            for (int nt = 16;; nt *= 2) {
                const auto [tx, tw] = gauss_legendre(nt);
                const int np = 2 * nt;
                Complex sum = 0.0;
                double err = 0.0;
                for (int i = 0; i < nt; ++i)
                    for (int j = 0; j < np; ++j) {
                        const auto w = omega_of(tx[i], 2.0 * M_PI * j / np);
                        const auto v = angular(std::span<const double>(w.data(), 3));
                        const double wt = tw[i] * 2.0 * M_PI / np;
                        sum += wt * v.value;
                        err += wt * v.error;
                    }
                if (have_prev && (std::abs(sum - prev) <= tol / 2.0 || 2 * nt * nt > opts.max_sphere_nodes * 16)) {
                    if (std::abs(sum - prev) > tol / 2.0) converged = false;
                    s.value = sum;
                    s.error = std::abs(sum - prev) + err;
                    break;
                }
                prev = sum;
                have_prev = true;
            }
        } else {
            QuadratureOptions aq = opts.quadrature;
            aq.tol = tol / (4.0 * 2.0 * M_PI);
            auto meridian = [&](double p) -> ValueWithError {
                auto hm = [&](double t) {
                    const auto w = omega_of(t, p);
                    return f.value<double>(std::span<const double>(w.data(), 3));
                };
                const auto zeros = detail::bracket_zeros(hm, -1.0, 1.0, 256);
                const auto r = integrate_panels(
                    [&](double t) {
                        const auto w = omega_of(t, p);
                        return angular(std::span<const double>(w.data(), 3));
                    },
                    -1.0, 1.0, zeros, aq);
                converged = converged && r.converged;
                return {r.value, r.error};
            };
            int nodes = 32;
            Complex sum = 0.0;
            double err = 0.0;
            for (int k = 0; k < nodes; ++k) {
                const auto v = meridian(2.0 * M_PI * k / nodes);
                sum += v.value;
                err += v.error;
            }
            Complex prev = sum * (2.0 * M_PI / nodes);
            for (;;) {
                for (int k = 0; k < nodes; ++k) {
                    const auto v = meridian(2.0 * M_PI * (k + 0.5) / nodes);
                    sum += v.value;
                    err += v.error;
                }
                nodes *= 2;
                const Complex cur = sum * (2.0 * M_PI / nodes);
                const double diff = std::abs(cur - prev);
                prev = cur;
                if (diff <= tol / 2.0 || nodes >= opts.max_sphere_nodes) {
                    if (diff > tol / 2.0) converged = false;
                    s.value = cur;
                    s.error = diff + err * (2.0 * M_PI / nodes);
                    break;
                }
            }
        }
    }
    s.converged = converged;
    return s;
}

/// Weight theta on a chart's affine coordinates y_hat (n - 1 of them).
using ChartWeight = std::function<double(std::span<const double>)>;

/**
 * int_{|y_hat_j| < R} int_R exp(i tau y^d h(y_hat)) w(y) eta(y) theta(y_hat) dy dy_hat
 * with w(y) = y^{n-1} (signed form pullback) or |y|^{n-1} (measure).
 */
inline OscillatorySample chart_parity_integral(int d, int n, const Polynomial& h, const ChartWeight& theta,
                                               const CutoffFunction& eta, double chart_radius,
                                               JacobianConvention mode, double tau, double tol,
                                               const OscillatoryOptions& opts = {})
{
    if (n != 2 && n != 3) throw std::invalid_argument("chart_parity_integral: n must be 2 or 3");
    if (h.dimension() != n - 1) throw std::invalid_argument("chart_parity_integral: h must have n - 1 variables");
    if (d < 1) throw std::invalid_argument("chart_parity_integral: degree must be positive");
    if (!(chart_radius > 0.0)) throw std::invalid_argument("chart_parity_integral: chart radius must be positive");
    const double a = eta.plateau(), b = eta.support();
    detail::PanelCounter counter(opts.total_panel_budget);
    bool converged = true;
    const double outer_measure = std::pow(2.0 * chart_radius, n - 1);

    QuadratureOptions iq = opts.quadrature;
    iq.tol = tol / (4.0 * outer_measure);
    std::vector<double> yhat(n - 1, 0.0);
    auto inner = [&]() -> ValueWithError {
        const double th = theta(yhat);
        if (th == 0.0) return {0.0, 0.0};
        const double c = h.value<double>(yhat);
        std::vector<double> g(d + 1, 0.0);
        g[d] = c;
        const auto r = detail::oscillatory_1d(
            g, tau,
            [&](double y) {
                const double w = mode == JacobianConvention::signed_form ? detail::int_power(y, n - 1)
                                                                          : detail::int_power(std::abs(y), n - 1);
                return w * eta(y);
            },
            -b, b, {-a, 0.0, a}, iq);
        counter.add(r.panels);
        converged = converged && r.converged;
        return {th * r.value, std::abs(th) * r.error};
    };

    const std::vector<double> breaks{-chart_radius, -1.0, 0.0, 1.0, chart_radius};
    QuadratureOptions oq = opts.quadrature;
    QuadratureResult r;
    if (n == 2) {
        oq.tol = tol / 2.0;
        r = integrate_panels(
            [&](double v) {
                yhat[0] = v;
                return inner();
            },
            -chart_radius, chart_radius, breaks, oq);
    } else {
        oq.tol = tol / 2.0;
        QuadratureOptions mq = opts.quadrature;
        mq.tol = tol / (4.0 * 2.0 * chart_radius);
        r = integrate_panels(
            [&](double v0) -> ValueWithError {
                const auto ri = integrate_panels(
                    [&](double v1) {
                        yhat[0] = v0;
                        yhat[1] = v1;
                        return inner();
                    },
                    -chart_radius, chart_radius, breaks, mq);
                converged = converged && ri.converged;
                return {ri.value, ri.error};
            },
            -chart_radius, chart_radius, breaks, oq);
    }
    converged = converged && r.converged;
    OscillatorySample s;
    s.tau = tau;
    s.value = r.value;
    s.error = r.error;
    s.converged = converged;
    s.method = std::string("chart-") + to_string(mode);
    return s;
}

/// I(tau, A) for homogeneous f in two variables and an amplitude A supported in
/// the disc of radius rmax, in polar coordinates.
/// `radial_extent(psi)`, when given, bounds the support along each ray.
template <typename Amp>
OscillatorySample eval_polar_2d(const Polynomial& f, Amp amplitude, double rmax, std::vector<double> angular_breaks,
                                std::function<std::vector<double>(double)> radial_breaks, double tau, double tol,
                                const OscillatoryOptions& opts = {},
                                std::function<double(double)> radial_extent = {})
{
    if (f.dimension() != 2) throw std::invalid_argument("eval_polar_2d: phase must have two variables");
    const auto deg = f.homogeneous_degree();
    if (!deg) throw std::invalid_argument("eval_polar_2d: phase is not homogeneous");
    const int d = *deg;
    auto h = [&](double psi) {
        const double w[2] = {std::cos(psi), std::sin(psi)};
        return f.value<double>(std::span<const double>(w, 2));
    };
    for (double z : detail::bracket_zeros(h, 0.0, 2.0 * M_PI, 1440)) angular_breaks.push_back(z);
    detail::PanelCounter counter(opts.total_panel_budget);
    bool converged = true;
    QuadratureOptions rq = opts.quadrature;
    rq.tol = tol / (4.0 * 2.0 * M_PI);
    auto ray = [&](double psi) -> ValueWithError {
        const double c = std::cos(psi), s = std::sin(psi);
        std::vector<double> g(d + 1, 0.0);
        g[d] = h(psi);
        const auto r = detail::oscillatory_1d(
            g, tau,
            [&](double rr) {
                const double x[2] = {rr * c, rr * s};
                return rr * amplitude(std::span<const double>(x, 2));
            },
            0.0, radial_extent ? std::min(rmax, radial_extent(psi)) : rmax,
            radial_breaks ? radial_breaks(psi) : std::vector<double>{}, rq);
        counter.add(r.panels);
        converged = converged && r.converged;
        return {r.value, r.error};
    };
    QuadratureOptions aq = opts.quadrature;
    aq.tol = tol / 2.0;
    const auto r = integrate_panels(ray, 0.0, 2.0 * M_PI, angular_breaks, aq);
    OscillatorySample s;
    s.tau = tau;
    s.value = r.value;
    s.error = r.error;
    s.converged = converged && r.converged;
    s.method = "polar";
    return s;
}

/// I(tau, chi') for the pushed-down blowup cutoff, computed in polar coordinates.
inline OscillatorySample eval_symmetric_cutoff(const Polynomial& f, const SymmetricCutoff& chi, double tau, double tol,
                                               const OscillatoryOptions& opts = {})
{
    std::vector<double> breaks;
    for (double t : {1.0 / chi.chart_radius(), 1.0, chi.chart_radius()}) {
        const double p = std::atan(t);
        for (double base : {0.0, M_PI}) {
            breaks.push_back(base + p);
            breaks.push_back(base + M_PI - p);
        }
    }
    const double a = chi.eta().plateau(), b = chi.eta().support();
    auto radial_breaks = [a, b](double psi) {
        std::vector<double> out;
        for (double comp : {std::abs(std::cos(psi)), std::abs(std::sin(psi))})
            if (comp > 1e-12)
                for (double level : {a, b}) out.push_back(level / comp);
        return out;
    };
    auto extent = [&chi, b](double psi) {
        const double c = std::abs(std::cos(psi)), s = std::abs(std::sin(psi));
        double r = 0.0;
        // chi' at r*omega and at -r*omega (symmetrized) share these chart weights.
        if (chi.weight(0, c, s) > 0.0 && c > 0.0) r = std::max(r, b / c);
        if (chi.weight(1, c, s) > 0.0 && s > 0.0) r = std::max(r, b / s);
        return r;
    };
    auto s = eval_polar_2d(f, [&](std::span<const double> x) { return chi(x); }, chi.support_radius(), breaks,
                           radial_breaks, tau, tol, opts, extent);
    s.method = "polar-chi-prime";
    return s;
}

} // namespace oscillab

#endif // OSCILLAB_OSCILLATORY_HPP
