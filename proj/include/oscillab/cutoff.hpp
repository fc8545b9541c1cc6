#ifndef OSCILLAB_CUTOFF_HPP
#define OSCILLAB_CUTOFF_HPP

#include "oscillab/polynomial.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscillab {

namespace detail {

inline double flat_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

inline double flat_exp_derivative(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t)
{
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double p = flat_exp(t), q = flat_exp(1.0 - t);
    return p / (p + q);
}

inline double smooth_step_derivative(double t)
{
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double p = flat_exp(t), q = flat_exp(1.0 - t);
    const double dp = flat_exp_derivative(t), dq = -flat_exp_derivative(1.0 - t);
    return (dp * q - p * dq) / ((p + q) * (p + q));
}

} // namespace detail

/// Even bump: 1 on [-a,a], 0 outside (-b,b), smooth in between.
class CutoffFunction
{
public:
    CutoffFunction(double plateau, double support) : a_(plateau), b_(support)
    {
        if (!(plateau > 0.0) || !(support > plateau))
            throw std::invalid_argument("cutoff requires 0 < a < b (got a=" + std::to_string(plateau) +
                                        ", b=" + std::to_string(support) + ")");
    }

    double plateau() const { return a_; }
    double support() const { return b_; }

    double operator()(double y) const { return detail::smooth_step((b_ - std::abs(y)) / (b_ - a_)); }

    double derivative(double y) const
    {
        const double s = y < 0.0 ? 1.0 : -1.0;
        return s * detail::smooth_step_derivative((b_ - std::abs(y)) / (b_ - a_)) / (b_ - a_);
    }

    /// sup |eta'|, attained in the middle of the transition.
    double max_derivative() const { return detail::smooth_step_derivative(0.5) / (b_ - a_); }

    friend bool operator==(const CutoffFunction& x, const CutoffFunction& y) { return x.a_ == y.a_ && x.b_ == y.b_; }

private:
    double a_, b_;
};

inline CutoffFunction make_cutoff(double a, double b) { return CutoffFunction(a, b); }

enum class CutoffShape { product, radial };

inline const char* to_string(CutoffShape s) { return s == CutoffShape::product ? "product" : "radial"; }

inline CutoffShape parse_shape(const std::string& s)
{
    if (s == "product") return CutoffShape::product;
    if (s == "radial") return CutoffShape::radial;
    throw std::invalid_argument("unknown cutoff shape '" + s + "'");
}

/// phi(x) = x^nu * prod_i eta(x_i)  or  x^nu * eta(|x|).
class TestFunction
{
public:
    TestFunction(ExponentVector nu, CutoffFunction eta, CutoffShape shape)
        : nu_(std::move(nu)), eta_(eta), shape_(shape)
    {
        if (nu_.empty()) throw std::invalid_argument("test function needs dimension >= 1");
        for (int e : nu_)
            if (e < 0) throw std::invalid_argument("test function exponent must be nonnegative");
    }

    static TestFunction bump(int n, CutoffFunction eta = CutoffFunction(1.0, 2.0),
                             CutoffShape shape = CutoffShape::product)
    {
        return TestFunction(ExponentVector(n, 0), eta, shape);
    }

    int dimension() const { return static_cast<int>(nu_.size()); }
    const ExponentVector& exponent() const { return nu_; }
    const CutoffFunction& cutoff() const { return eta_; }
    CutoffShape shape() const { return shape_; }
    double support_radius() const { return eta_.support(); }

    double operator()(std::span<const double> x) const
    {
        double mono = 1.0;
        for (std::size_t i = 0; i < nu_.size(); ++i) mono *= std::pow(x[i], nu_[i]);
        if (shape_ == CutoffShape::product) {
            for (double xi : x) mono *= eta_(xi);
            return mono;
        }
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        return mono * eta_(std::sqrt(r2));
    }

    /// Factor along one axis for product-shaped functions.
    double axis_factor(int i, double xi) const { return std::pow(xi, nu_[i]) * eta_(xi); }

    /// Newton polytope support of the Taylor expansion at 0: the single point nu.
    std::vector<ExponentVector> taylor_support() const { return {nu_}; }

private:
    ExponentVector nu_;
    CutoffFunction eta_;
    CutoffShape shape_;
};

/**
 * Cutoff chi' on R^2 pushed down from the blowup:
 *
 *     chi'(x) = eta(x_1) theta_1(x_2/x_1) + eta(x_2) theta_2(x_1/x_2),
 *
 * with theta_i a partition of unity on the exceptional P^1 subordinate to the
 * chart covers {|y_hat| < 1 + eps}. Since theta_i only depends on the line
 * through x and eta is even, chi' is invariant under x -> -x.
 */
class SymmetricCutoff
{
public:
    SymmetricCutoff(int n, double overlap, CutoffFunction eta, bool symmetrized = true)
        : n_(n), eps_(overlap), eta_(eta), symmetrized_(symmetrized)
    {
        if (n != 2) throw std::invalid_argument("symmetric cutoff is implemented for n = 2 only (got n=" +
                                                std::to_string(n) + ")");
        if (!(overlap > 0.0) || !(overlap < 0.5)) throw std::invalid_argument("overlap must lie in (0, 1/2)");
    }

    int dimension() const { return n_; }
    double overlap() const { return eps_; }
    double chart_radius() const { return 1.0 + eps_; }
    const CutoffFunction& eta() const { return eta_; }
    bool symmetrized() const { return symmetrized_; }

    /// Radius of a disc containing supp chi'.
    double support_radius() const { return eta_.support() * std::sqrt(1.0 + chart_radius() * chart_radius()); }

    /// theta_i in the affine coordinate y_hat of chart i (i = 0 or 1).
    double theta(int /*chart*/, double yhat) const
    {
        const double p = rho(std::abs(yhat));
        const double q = yhat == 0.0 ? 0.0 : rho(1.0 / std::abs(yhat));
        return p / (p + q);
    }

    /// theta_0 + theta_1 at the direction (cos psi, sin psi).
    double partition_sum(double psi) const
    {
        const double c = std::cos(psi), s = std::sin(psi);
        return weight(0, c, s) + weight(1, c, s);
    }

    double raw(std::span<const double> x) const
    {
        if (x[0] == 0.0 && x[1] == 0.0) return 1.0;
        return eta_(x[0]) * weight(0, x[0], x[1]) + eta_(x[1]) * weight(1, x[0], x[1]);
    }

    double operator()(std::span<const double> x) const
    {
        if (!symmetrized_) return raw(x);
        const double m[2] = {-x[0], -x[1]};
        return 0.5 * (raw(x) + raw(m));
    }

    /// theta of chart i at the line through (x0, x1).
    double weight(int chart, double x0, double x1) const
    {
        const double own = chart == 0 ? x0 : x1, other = chart == 0 ? x1 : x0;
        if (own == 0.0) return 0.0;
        return theta(chart, other / own);
    }

private:
    int n_;
    double eps_;
    CutoffFunction eta_;
    bool symmetrized_;

    /// 1 for t <= 1, 0 for t >= 1 + eps.
    double rho(double t) const { return detail::smooth_step((1.0 + eps_ - t) / eps_); }
};

inline SymmetricCutoff build_symmetric_cutoff(int n, double overlap, const CutoffFunction& eta)
{
    return SymmetricCutoff(n, overlap, eta, true);
}

} // namespace oscillab

#endif // OSCILLAB_CUTOFF_HPP
