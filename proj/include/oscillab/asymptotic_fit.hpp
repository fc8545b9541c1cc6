#ifndef OSCILLAB_ASYMPTOTIC_FIT_HPP
#define OSCILLAB_ASYMPTOTIC_FIT_HPP

/*
 * Leading-term extraction from sampled I(tau).
 *
 * The model is I(tau) ~ C tau^alpha (log tau)^k. For each candidate k the
 * exponent comes from ordinary least squares of log|I| - k log log tau on
 * log tau; k is chosen by RMS residual plus 2 * noise * k, ties going to the
 * smaller k. "noise" is the RMS relative quadrature error of the samples used,
 * i.e. the log-space noise level. Samples with |I| <= 3 err are dropped.
 */

#include "oscillab/newton_polytope.hpp"
#include "oscillab/oscillatory.hpp"
#include "oscillab/rational.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscillab {

struct AsymptoticTerm
{
    double alpha = -1.0;
    int k = 0;
    Complex coeff;
    double coeff_error = 0.0;

    Complex operator()(double tau) const
    {
        return coeff * std::pow(tau, alpha) * std::pow(std::log(tau), static_cast<double>(k));
    }
};

enum class FitOutcome { exponent, consistent_with_zero, insufficient };

inline const char* to_string(FitOutcome o)
{
    switch (o) {
    case FitOutcome::exponent: return "exponent";
    case FitOutcome::consistent_with_zero: return "consistent-with-zero";
    case FitOutcome::insufficient: return "insufficient";
    }
    return "?";
}

struct FitOptions
{
    int max_log_power = 1;              ///< n - 1
    double residual_threshold = 1e-2;   ///< RMS log residual for convergence
    double stability_threshold = 2e-2;  ///< |alpha(lower half) - alpha(upper half)|
    double noise_multiple = 3.0;        ///< samples with |I| <= this * err are dropped
    std::size_t min_samples = 8;
};

struct ExponentEstimate
{
    FitOutcome outcome = FitOutcome::exponent;
    double alpha_hat = 0.0;
    int k_hat = 0;
    Complex coeff_hat;
    double residual = 0.0;
    double noise_floor = 0.0;
    bool converged = false;
    double tau_min = 0.0, tau_max = 0.0;
    std::size_t samples_used = 0;
    std::optional<double> alpha_lower_half, alpha_upper_half;
};

/// Geometric grid of `count` points from tau_min to tau_max.
inline std::vector<double> geometric_grid(double tau_min, double tau_max, int count)
{
    if (!(tau_min >= 1.0) || !(tau_max > tau_min)) throw std::invalid_argument("tau grid needs 1 <= tau_min < tau_max");
    if (count < 2) throw std::invalid_argument("tau grid needs at least two points");
    std::vector<double> t(count);
    const double l0 = std::log(tau_min), l1 = std::log(tau_max);
    for (int j = 0; j < count; ++j) t[j] = std::exp(l0 + (l1 - l0) * j / (count - 1));
    t.front() = tau_min;
    t.back() = tau_max;
    return t;
}

/// d log|I| / d log tau by centered differences (one-sided at the ends);
/// nullopt where a value involved is zero.
inline std::vector<std::optional<double>> local_slopes(const std::vector<double>& tau, const std::vector<double>& abs)
{
    if (tau.size() != abs.size()) throw std::invalid_argument("local_slopes: size mismatch");
    const std::size_t m = tau.size();
    std::vector<std::optional<double>> s(m);
    if (m < 2) return s;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t lo = j == 0 ? 0 : j - 1;
        const std::size_t hi = j + 1 == m ? m - 1 : j + 1;
        if (!(abs[lo] > 0.0) || !(abs[hi] > 0.0)) continue;
        s[j] = (std::log(abs[hi]) - std::log(abs[lo])) / (std::log(tau[hi]) - std::log(tau[lo]));
    }
    return s;
}

struct SlopeSchedule
{
    std::vector<double> tau;
    std::vector<OscillatorySample> samples;
    std::vector<std::optional<double>> slopes;
};

/// Evaluates `eval(tau)` on the geometric grid and attaches local slopes.
inline SlopeSchedule schedule_and_slope(double tau_min, double tau_max, int count,
                                        const std::function<OscillatorySample(double)>& eval)
{
    if (count < 8) throw std::invalid_argument("schedule_and_slope: count must be at least 8");
    SlopeSchedule out;
    out.tau = geometric_grid(tau_min, tau_max, count);
    std::vector<double> abs;
    for (double t : out.tau) {
        out.samples.push_back(eval(t));
        abs.push_back(std::abs(out.samples.back().value));
    }
    out.slopes = local_slopes(out.tau, abs);
    return out;
}

namespace detail {

struct LineFit
{
    double intercept = 0.0, slope = 0.0, rms = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t m = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        mx += x[j];
        my += y[j];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        sxx += (x[j] - mx) * (x[j] - mx);
        sxy += (x[j] - mx) * (y[j] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double r = y[j] - f.intercept - f.slope * x[j];
        ss += r * r;
    }
    f.rms = std::sqrt(ss / m);
    return f;
}

inline bool above_noise(const OscillatorySample& s, double multiple)
{
    const double a = std::abs(s.value);
    return a > 0.0 && a > multiple * s.error && std::isfinite(a);
}

inline LineFit fit_with_power(const std::vector<OscillatorySample>& s, int k)
{
    std::vector<double> x, y;
    for (const auto& p : s) {
        x.push_back(std::log(p.tau));
        y.push_back(std::log(std::abs(p.value)) - k * std::log(std::log(p.tau)));
    }
    return least_squares_line(x, y);
}

} // namespace detail

/// Fits C tau^alpha (log tau)^k to the samples.
inline ExponentEstimate fit_leading(const std::vector<OscillatorySample>& samples, const FitOptions& opts = {})
{
    if (samples.size() < opts.min_samples)
        throw std::invalid_argument("fit_leading: need at least " + std::to_string(opts.min_samples) + " samples");
    std::vector<OscillatorySample> used;
    for (const auto& s : samples) {
        if (!(s.tau > 1.0)) throw std::invalid_argument("fit_leading: tau must exceed 1");
        if (detail::above_noise(s, opts.noise_multiple)) used.push_back(s);
    }
    std::sort(used.begin(), used.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });

    ExponentEstimate est;
    est.tau_min = samples.front().tau;
    est.tau_max = samples.front().tau;
    for (const auto& s : samples) {
        est.tau_min = std::min(est.tau_min, s.tau);
        est.tau_max = std::max(est.tau_max, s.tau);
    }
    est.samples_used = used.size();
    if (used.empty()) {
        est.outcome = FitOutcome::consistent_with_zero;
        est.converged = true;
        return est;
    }
    if (used.size() < opts.min_samples) {
        est.outcome = FitOutcome::insufficient;
        return est;
    }

    double noise2 = 0.0;
    for (const auto& s : used) noise2 += std::pow(s.error / std::abs(s.value), 2);
    est.noise_floor = std::sqrt(noise2 / used.size());

    double best_score = std::numeric_limits<double>::infinity();
    detail::LineFit best;
    for (int k = 0; k <= opts.max_log_power; ++k) {
        const auto fit = detail::fit_with_power(used, k);
        const double score = fit.rms + 2.0 * est.noise_floor * k;
        // Strict improvement required: ties stay with the smaller k.
        if (score < best_score - 1e-15) {
            best_score = score;
            best = fit;
            est.k_hat = k;
        }
    }
    est.alpha_hat = best.slope;
    est.residual = best.rms;

    const std::size_t half = used.size() / 2;
    if (half >= 3) {
        const std::vector<OscillatorySample> lower(used.begin(), used.begin() + half);
        const std::vector<OscillatorySample> upper(used.end() - half, used.end());
        est.alpha_lower_half = detail::fit_with_power(lower, est.k_hat).slope;
        est.alpha_upper_half = detail::fit_with_power(upper, est.k_hat).slope;
    }

    Complex c = 0.0;
    std::size_t count = 0;
    for (std::size_t j = used.size() - std::max<std::size_t>(half, 1); j < used.size(); ++j) {
        const auto& s = used[j];
        c += s.value * std::pow(s.tau, -est.alpha_hat) * std::pow(std::log(s.tau), -static_cast<double>(est.k_hat));
        ++count;
    }
    est.coeff_hat = c / static_cast<double>(count);

    const bool stable = est.alpha_lower_half && est.alpha_upper_half &&
                        std::abs(*est.alpha_lower_half - *est.alpha_upper_half) <= opts.stability_threshold;
    est.converged = est.residual <= opts.residual_threshold && stable;
    return est;
}

/// Subtracts a term from every sample; the coefficient uncertainty is added to the errors.
inline std::vector<OscillatorySample> deflate(const std::vector<OscillatorySample>& samples, const AsymptoticTerm& term)
{
    std::vector<OscillatorySample> out = samples;
    for (auto& s : out) {
        if (term.coeff == Complex(0.0) && term.coeff_error == 0.0) continue;
        const double scale = std::pow(s.tau, term.alpha) * std::pow(std::log(s.tau), static_cast<double>(term.k));
        s.value -= term.coeff * scale;
        s.error += term.coeff_error * scale;
    }
    return out;
}

struct CoefficientProbe
{
    double alpha = 0.0;
    int k = 0;
    Complex coeff;
    double noise = 0.0;  ///< mean propagated quadrature error of the scaled samples
    double spread = 0.0; ///< max |c_j - c_l| over the window
    bool consistent_with_zero = false;
    std::size_t samples_used = 0;
    double tau_min = 0.0, tau_max = 0.0;
};

/// C_hat = mean of I tau^{-alpha} (log tau)^{-k} over the top decade of tau.
inline CoefficientProbe coefficient_at(const std::vector<OscillatorySample>& samples, double alpha, int k)
{
    if (samples.empty()) throw std::invalid_argument("coefficient_at: no samples");
    double tmax = 0.0;
    for (const auto& s : samples) tmax = std::max(tmax, s.tau);
    std::vector<const OscillatorySample*> window;
    for (const auto& s : samples)
        if (s.tau >= tmax / 10.0 * (1.0 - 1e-12) && s.tau > 1.0) window.push_back(&s);
    if (window.size() < 2) throw std::invalid_argument("coefficient_at: need at least two samples in the top decade");

    CoefficientProbe p;
    p.alpha = alpha;
    p.k = k;
    p.samples_used = window.size();
    p.tau_min = window.front()->tau;
    p.tau_max = window.front()->tau;
    std::vector<Complex> c;
    for (const auto* s : window) {
        const double scale = std::pow(s->tau, -alpha) * std::pow(std::log(s->tau), -static_cast<double>(k));
        c.push_back(s->value * scale);
        p.noise += s->error * scale;
        p.tau_min = std::min(p.tau_min, s->tau);
        p.tau_max = std::max(p.tau_max, s->tau);
    }
    p.noise /= window.size();
    p.coeff = pairwise_sum(c) / static_cast<double>(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) p.spread = std::max(p.spread, std::abs(c[i] - c[j]));
    p.consistent_with_zero = std::abs(p.coeff) <= 3.0 * (p.noise + p.spread);
    return p;
}

enum class BoundStatus { pass, fail, indeterminate };

inline const char* to_string(BoundStatus s)
{
    switch (s) {
    case BoundStatus::pass: return "pass";
    case BoundStatus::fail: return "fail";
    case BoundStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

struct Theorem2Check
{
    ExponentEstimate fit;
    Rational distance;        ///< d(f, phi)
    Rational r, r_prime;
    double bound = 0.0;       ///< -1/d(f, phi)
    double sandwich = 0.0;    ///< -(r' + n)/r
    bool sandwich_holds = false; ///< d(f, phi) <= r/(r' + n), exact
    double slack = 0.0;       ///< bound - alpha_hat
    double tolerance = 0.05;
    BoundStatus status = BoundStatus::indeterminate;
    bool vacuous = false;     ///< every sample was below the noise floor
};

/// Compares the measured exponent with -1/d(f, phi) for phi = x^nu * bump.
inline Theorem2Check check_theorem2(const Polynomial& f, const ExponentVector& nu,
                                    const std::vector<OscillatorySample>& samples, double tolerance = 0.05,
                                    const FitOptions& fit_opts = {})
{
    const auto pf = build_polytope(f);
    require_convenient(pf, "check_theorem2");
    const auto pphi = build_polytope(std::vector<ExponentVector>{nu});
    const auto pd = pair_distance_and_radii(pf, pphi);
    Theorem2Check rep;
    rep.distance = pd.distance;
    rep.r = pd.r;
    rep.r_prime = pd.r_prime;
    rep.bound = -1.0 / to_double(pd.distance);
    rep.sandwich = -to_double((pd.r_prime + f.dimension()) / pd.r);
    rep.sandwich_holds = pd.distance <= pd.r / (pd.r_prime + f.dimension());
    rep.tolerance = tolerance;
    rep.fit = fit_leading(samples, fit_opts);
    if (rep.fit.outcome == FitOutcome::consistent_with_zero) {
        rep.vacuous = true;
        rep.status = BoundStatus::pass;
        return rep;
    }
    if (rep.fit.outcome != FitOutcome::exponent || !rep.fit.converged) {
        rep.status = BoundStatus::indeterminate;
        rep.slack = rep.bound - rep.fit.alpha_hat;
        return rep;
    }
    rep.slack = rep.bound - rep.fit.alpha_hat;
    rep.status = rep.fit.alpha_hat <= rep.bound + tolerance ? BoundStatus::pass : BoundStatus::fail;
    return rep;
}

struct CutoffIndependenceReport
{
    std::vector<OscillatorySample> difference;
    std::optional<double> slope;
    double threshold = -2.0;
    std::size_t samples_used = 0;
    bool pass = false;
    bool vacuous = false;
};

/// Decay of I(tau, x^nu eta_1) - I(tau, x^nu eta_2) (product cutoffs).
inline CutoffIndependenceReport cutoff_independence_check(const Polynomial& f, const ExponentVector& nu,
                                                          const CutoffFunction& first, const CutoffFunction& second,
                                                          const std::vector<double>& tau, double tol,
                                                          double threshold = -2.0,
                                                          const OscillatoryOptions& opts = {})
{
    CutoffIndependenceReport rep;
    rep.threshold = threshold;
    const TestFunction phi1(nu, first, CutoffShape::product), phi2(nu, second, CutoffShape::product);
    std::vector<double> x, y;
    for (double t : tau) {
        OscillatorySample d;
        d.tau = t;
        d.method = "difference";
        if (!(first == second)) {
            const auto a = eval_oscillatory(f, phi1, t, tol, opts);
            const auto b = eval_oscillatory(f, phi2, t, tol, opts);
            d.value = a.value - b.value;
            d.error = a.error + b.error;
            d.converged = a.converged && b.converged;
        }
        rep.difference.push_back(d);
        if (detail::above_noise(d, 3.0)) {
            x.push_back(std::log(t));
            y.push_back(std::log(std::abs(d.value)));
        }
    }
    rep.samples_used = x.size();
    if (x.size() < 2) {
        // Below the noise floor everywhere (or at all but one point).
        rep.vacuous = true;
        rep.pass = true;
        return rep;
    }
    rep.slope = detail::least_squares_line(x, y).slope;
    rep.pass = *rep.slope <= threshold;
    return rep;
}

} // namespace oscillab

#endif // OSCILLAB_ASYMPTOTIC_FIT_HPP
