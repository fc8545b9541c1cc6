#include "oscillab/cutoff.hpp"
#include "oscillab/oscillatory.hpp"
#include "oscillab/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace oscillab;

namespace {

/// Composite Simpson on [a, b] with 2m panels.
template <typename F>
Complex simpson(F f, double a, double b, long m)
{
    const long n = 2 * m;
    const double h = (b - a) / n;
    Complex s = f(a) + f(b);
    for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * Complex(f(a + i * h));
    return s * h / 3.0;
}

/// int_0^b exp(i tau c u^d) u^{b-1} eta(u) du by brute force.
Complex half_line(double bexp, int d, double c, double tau, const CutoffFunction& eta, long m)
{
    return simpson(
        [&](double u) {
            return std::polar(std::pow(u, bexp - 1.0) * eta(u), tau * c * std::pow(u, d));
        },
        0.0, eta.support(), m);
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

const CutoffFunction kEta(1.0, 2.0);

} // namespace

TEST(Cutoff, PlateauSupportAndSymmetry)
{
    const auto eta = make_cutoff(1.0, 2.0);
    EXPECT_EQ(eta(0.5), 1.0);
    EXPECT_EQ(eta(3.0), 0.0);
    EXPECT_GT(eta(1.5), 0.0);
    EXPECT_LT(eta(1.5), 1.0);
    EXPECT_EQ(eta(-1.5), eta(1.5));
    const double h = 1e-4;
    EXPECT_NEAR((eta(2.0 + h) - eta(2.0 - h)) / (2 * h), 0.0, 1e-6);
    for (double y = -2.5; y <= 2.5; y += 0.01) {
        EXPECT_GE(eta(y), 0.0);
        EXPECT_LE(eta(y), 1.0);
        EXPECT_NEAR(eta.derivative(y), (eta(y + 1e-6) - eta(y - 1e-6)) / 2e-6, 1e-5);
        EXPECT_LE(std::abs(eta.derivative(y)), eta.max_derivative() * (1 + 1e-9));
    }
    EXPECT_THROW(make_cutoff(2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(make_cutoff(0.0, 1.0), std::invalid_argument);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly)
{
    const auto [x, w] = gauss_legendre(8);
    for (int k = 0; k <= 15; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
        EXPECT_NEAR(s, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-14);
    }
}

TEST(Quadrature, PanelsMatchSimpsonOnOscillatoryIntegrand)
{
    const double tau = 300.0;
    auto g = [&](double x) { return std::polar(kEta(x), tau * x * x * x); };
    QuadratureOptions q;
    q.tol = 1e-11;
    const auto r = integrate_panels(g, -2.0, 2.0, {-1.0, 1.0}, [&](double lo, double hi) {
        const double m = std::max(std::abs(lo), std::abs(hi));
        return 3.0 * tau * m * m;
    }, q);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(std::abs(r.value - simpson(g, -2.0, 2.0, 2000000)), 1e-9);
    EXPECT_LT(r.error, 1e-9);
}

TEST(EvalOscillatory, TauZeroIsTheMass)
{
    const auto s = eval_oscillatory(parse("x1^4 + x2^4", 2), TestFunction::bump(2), 0.0, 1e-10);
    const Complex mass = simpson([](double x) { return Complex(kEta(x)); }, -2.0, 2.0, 200000);
    EXPECT_NEAR(s.value.real(), (mass * mass).real(), 1e-9);
    EXPECT_NEAR(s.value.imag(), 0.0, 1e-10);
    const auto t = eval_oscillatory(parse("x1^2*x2 + x2^3", 2), TestFunction::bump(2), 0.0, 1e-10,
                                    {EvalStrategy::tensor});
    EXPECT_NEAR(t.value.real(), (mass * mass).real(), 1e-8);
}

TEST(EvalOscillatory, FresnelOneVariable)
{
    const double tau = 1e3;
    const auto s = eval_oscillatory(parse("x1^2", 1), TestFunction::bump(1), tau, 1e-10);
    EXPECT_TRUE(s.converged);
    EXPECT_LT(rel(s.value, std::polar(std::sqrt(M_PI / tau), M_PI / 4)), 1e-2);
    EXPECT_LT(std::abs(s.value - 2.0 * half_line(1, 2, 1, tau, kEta, 400000)), 1e-9);
}

TEST(EvalOscillatory, SeparableQuarticMatchesOracle)
{
    const double tau = 1e4;
    const auto s = eval_oscillatory(parse("x1^4 + x2^4", 2), TestFunction::bump(2), tau, 1e-10);
    const Complex oracle = std::polar(0.25 * std::pow(std::tgamma(0.25), 2), M_PI / 4) / std::sqrt(tau);
    EXPECT_TRUE(s.converged);
    EXPECT_LT(rel(s.value, oracle), 1e-6);
    const auto lead = separable_leading(parse("x1^4 + x2^4", 2), {0, 0});
    ASSERT_TRUE(lead.has_value());
    EXPECT_DOUBLE_EQ(lead->alpha, -0.5);
    EXPECT_LT(rel(lead->coeff, oracle * std::sqrt(tau)), 1e-14);
}

TEST(EvalOscillatory, SeparableAndTensorPathsAgree)
{
    const auto f = parse("x1^4 + x2^4", 2);
    for (double tau : {1.0, 10.0, 100.0}) {
        const auto a = eval_oscillatory(f, TestFunction::bump(2), tau, 1e-10, {EvalStrategy::separable});
        const auto b = eval_oscillatory(f, TestFunction::bump(2), tau, 1e-10, {EvalStrategy::tensor});
        EXPECT_LT(std::abs(a.value - b.value), 2 * (a.error + b.error) + 1e-12) << tau;
    }
}

TEST(EvalOscillatory, ConjugationSymmetry)
{
    for (const char* text : {"x1^4 + x2^4", "x1^2*x2 + x2^3 + x1^4"}) {
        const auto f = parse(text, 2);
        const double tau = 30.0;
        const auto a = eval_oscillatory(f, TestFunction::bump(2), tau, 1e-10);
        const auto b = eval_oscillatory(-f, TestFunction::bump(2), tau, 1e-10);
        EXPECT_LT(std::abs(a.value - std::conj(b.value)), 2e-10) << text;
    }
}

TEST(EvalOscillatory, ScalingInvariance)
{
    const auto f = parse("x1^4 + 2*x2^4", 2);
    const double lambda = 8.0, tau = 50.0;
    const auto a = eval_oscillatory(f, TestFunction::bump(2), tau, 1e-10);
    const auto b = eval_oscillatory(f.scaled(Rational(1, 8)), TestFunction::bump(2), lambda * tau, 1e-10);
    EXPECT_LT(std::abs(a.value - b.value), 2e-10);
}

TEST(EvalOscillatory, BudgetExceededIsExplicit)
{
    OscillatoryOptions o;
    o.strategy = EvalStrategy::tensor;
    o.total_panel_budget = 50;
    EXPECT_THROW(eval_oscillatory(parse("x1^2*x2 + x2^3", 2), TestFunction::bump(2), 100.0, 1e-10, o),
                 QuadratureBudgetExceeded);
}

TEST(EvalOscillatory, RejectsBadInput)
{
    EXPECT_THROW(eval_oscillatory(parse("x1^2", 1), TestFunction::bump(2), 1.0, 1e-10), std::invalid_argument);
    EXPECT_THROW(eval_oscillatory(parse("x1^2", 1), TestFunction::bump(1), -1.0, 1e-10), std::invalid_argument);
    EXPECT_THROW(eval_oscillatory(parse("x1^2", 1), TestFunction::bump(1), 1.0, 0.0), std::invalid_argument);
}

TEST(RadialReduce, QuadraticStationaryPhase)
{
    const double tau = 1e3;
    const auto s = radial_reduce(parse("x1^2 + x2^2", 2), TestFunction::bump(2, kEta, CutoffShape::radial), tau, 1e-10);
    EXPECT_NEAR(tau * std::abs(s.value), M_PI, 0.01 * M_PI);
    const auto p = eval_oscillatory(parse("x1^2 + x2^2", 2), TestFunction::bump(2), tau, 1e-10);
    EXPECT_NEAR(tau * std::abs(p.value), M_PI, 0.01 * M_PI);
    EXPECT_LT(rel(p.value * tau, Complex(0.0, M_PI)), 1e-6);
}

TEST(RadialReduce, AgreesWithTensorQuadrature)
{
    const auto phi = TestFunction::bump(2, kEta, CutoffShape::radial);
    for (const char* text : {"x1^4 + x2^4", "x1^2 - x2^2", "x1^4 + x1^2*x2^2 + x2^4"}) {
        const auto f = parse(text, 2);
        for (double tau : {10.0, 100.0}) {
            const auto a = radial_reduce(f, phi, tau, 1e-10);
            const auto b = eval_oscillatory(f, phi, tau, 1e-10);
            EXPECT_TRUE(a.converged && b.converged);
            EXPECT_LT(std::abs(a.value - b.value), 2 * (a.error + b.error) + 1e-11) << text << " " << tau;
        }
    }
}

TEST(RadialReduce, AgreesWithPolarQuadratureAtHigherTau)
{
    const auto f = parse("x1^4 + x2^4", 2);
    const auto phi = TestFunction::bump(2, kEta, CutoffShape::radial);
    const double tau = 1e3;
    const auto a = radial_reduce(f, phi, tau, 1e-10);
    const auto b = eval_polar_2d(f, phi, 2.0, {}, {}, tau, 1e-10);
    EXPECT_LT(std::abs(a.value - b.value), 2 * (a.error + b.error) + 1e-11);
}

TEST(RadialReduce, ThreeDimensionsAgreeWithTensor)
{
    const auto f = parse("x1^2 + x2^2 + 2*x3^2", 3);
    const auto phi = TestFunction::bump(3, kEta, CutoffShape::radial);
    const auto a = radial_reduce(f, phi, 5.0, 1e-8);
    const auto b = eval_oscillatory(f, phi, 5.0, 1e-8);
    EXPECT_LT(std::abs(a.value - b.value), 2 * (a.error + b.error) + 1e-9);
}

TEST(RadialReduce, RejectsNonRadialOrInhomogeneous)
{
    EXPECT_THROW(radial_reduce(parse("x1^4 + x2^4", 2), TestFunction::bump(2), 1.0, 1e-8), std::invalid_argument);
    EXPECT_THROW(radial_reduce(parse("x1^2 + x2^4", 2), TestFunction::bump(2, kEta, CutoffShape::radial), 1.0, 1e-8),
                 std::invalid_argument);
}

TEST(Erdelyi, ClosedFormExamples)
{
    const double tau = 1e3;
    EXPECT_LT(rel(erdelyi_leading(1, 1, 1, tau), Complex(0.0, 1.0 / tau)), 1e-14);
    EXPECT_LT(rel(half_line(1, 1, 1, tau, kEta, 400000), erdelyi_leading(1, 1, 1, tau)), 1e-2);
    EXPECT_LT(rel(2.0 * erdelyi_leading(1, 2, 1, tau), std::polar(std::sqrt(M_PI / tau), M_PI / 4)), 1e-14);
    const Complex neg = erdelyi_leading(2, 4, -1, tau);
    EXPECT_LT(rel(neg, std::polar(0.25 * std::sqrt(M_PI / tau), -M_PI / 4)), 1e-14);
    EXPECT_LT(rel(neg, std::conj(erdelyi_leading(2, 4, 1, tau))), 1e-14);
    EXPECT_LT(rel(half_line(2, 4, -1, tau, kEta, 400000), neg), 1e-2);
    EXPECT_THROW(erdelyi_leading(1, 2, 0.0, tau), std::invalid_argument);
}

TEST(Erdelyi, BruteForceAtHighTau)
{
    const double tau = 1e4;
    for (const auto& [b, d] : std::vector<std::pair<double, int>>{{1, 2}, {1, 4}, {2, 4}, {3, 4}}) {
        const Complex brute = half_line(b, d, 1.0, tau, kEta, 3000000);
        EXPECT_LT(rel(brute, erdelyi_leading(b, d, 1.0, tau)), 1e-3) << b << "," << d;
    }
}

TEST(ChartParity, SignedFormVanishesForEvenDegree)
{
    const auto h = parse("1 + x1^4", 1);
    const auto chi = build_symmetric_cutoff(2, 0.25, kEta);
    ChartWeight theta = [&](std::span<const double> y) { return chi.theta(0, y[0]); };
    for (double tau : {1.0, 10.0, 100.0}) {
        const auto s = chart_parity_integral(4, 2, h, theta, kEta, chi.chart_radius(), JacobianConvention::signed_form,
                                             tau, 1e-10);
        const auto a = chart_parity_integral(4, 2, h, theta, kEta, chi.chart_radius(),
                                             JacobianConvention::absolute_measure, tau, 1e-10);
        EXPECT_LT(std::abs(s.value), 1e-10 * std::abs(a.value)) << tau;
        EXPECT_GT(std::abs(a.value), 1e-3);
    }
}

TEST(ChartParity, AbsoluteFormReducesToOneDimensionalProfile)
{
    const auto h = Polynomial::constant(1, 1);
    ChartWeight one = [](std::span<const double>) { return 1.0; };
    const double radius = 1.25;
    for (double tau : {10.0, 100.0}) {
        const auto a = chart_parity_integral(4, 2, h, one, kEta, radius, JacobianConvention::absolute_measure, tau,
                                             1e-10);
        const Complex profile = half_line(2, 4, 1.0, tau, kEta, 1000000);
        EXPECT_LT(std::abs(a.value - 2.0 * radius * 2.0 * profile), 1e-8) << tau;
    }
    const double tau = 1e3;
    const auto a = chart_parity_integral(4, 2, h, one, kEta, radius, JacobianConvention::absolute_measure, tau, 1e-10);
    EXPECT_LT(rel(a.value, 2.0 * radius * 2.0 * erdelyi_leading(2, 4, 1.0, tau)), 1e-6);
}

TEST(ChartParity, OddDegreeRealPartVanishes)
{
    const auto h = parse("1 + x1^3", 1);
    const auto chi = build_symmetric_cutoff(2, 0.25, kEta);
    ChartWeight theta = [&](std::span<const double> y) { return chi.theta(0, y[0]); };
    for (double tau : {1.0, 10.0, 100.0}) {
        const auto s = chart_parity_integral(3, 2, h, theta, kEta, chi.chart_radius(), JacobianConvention::signed_form,
                                             tau, 1e-10);
        EXPECT_LT(std::abs(s.value.real()), 1e-10 * std::abs(s.value) + 1e-12) << tau;
        EXPECT_GT(std::abs(s.value.imag()), 1e-6);
    }
}

TEST(SymmetricCutoff, Construction)
{
    const auto chi = build_symmetric_cutoff(2, 0.25, kEta);
    const double zero[2] = {0.0, 0.0};
    EXPECT_EQ(chi(std::span<const double>(zero, 2)), 1.0);
    const double near[2] = {0.3, -0.2};
    EXPECT_EQ(chi(std::span<const double>(near, 2)), 1.0);
    for (int k = 0; k < 360; ++k) EXPECT_NEAR(chi.partition_sum(2 * M_PI * k / 360), 1.0, 1e-12);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double x[2] = {u(rng), u(rng)}, m[2] = {-x[0], -x[1]};
        EXPECT_EQ(chi(std::span<const double>(x, 2)), chi(std::span<const double>(m, 2)));
        EXPECT_LE(std::hypot(x[0], x[1]) > chi.support_radius() ? chi(std::span<const double>(x, 2)) : 0.0, 0.0);
    }
    EXPECT_THROW(build_symmetric_cutoff(3, 0.25, kEta), std::invalid_argument);
    EXPECT_THROW(build_symmetric_cutoff(2, 0.6, kEta), std::invalid_argument);
}

TEST(SymmetricCutoff, PolarValueMatchesTensorQuadrature)
{
    const auto chi = build_symmetric_cutoff(2, 0.25, kEta);
    const auto f = parse("x1^4 + x2^4", 2);
    const double tau = 10.0;
    const auto polar = eval_symmetric_cutoff(f, chi, tau, 1e-9);
    // brute-force 2D Simpson over the support box
    const double R = chi.support_radius();
    const long m = 600;
    const Complex brute = simpson(
        [&](double x) {
            return simpson(
                [&](double y) {
                    const double p[2] = {x, y};
                    return std::polar(chi(std::span<const double>(p, 2)), tau * (std::pow(x, 4) + std::pow(y, 4)));
                },
                -R, R, m);
        },
        -R, R, m);
    EXPECT_LT(std::abs(polar.value - brute), 1e-6);
}
