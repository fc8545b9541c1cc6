#include "oscillab/asymptotic_fit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace oscillab;

namespace {

std::vector<OscillatorySample> synthetic(const std::vector<AsymptoticTerm>& terms, const std::vector<double>& grid,
                                         double rel_noise = 0.0, std::uint64_t seed = 1)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<OscillatorySample> out;
    for (double t : grid) {
        OscillatorySample s;
        s.tau = t;
        for (const auto& term : terms) s.value += term(t);
        const double scale = std::abs(s.value);
        s.value += Complex(u(rng), u(rng)) * (rel_noise * scale / std::sqrt(2.0));
        s.error = std::max(rel_noise * scale, 1e-300);
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST(Slopes, PurePowerLaw)
{
    const auto grid = geometric_grid(1e2, 1e4, 16);
    std::vector<double> a;
    for (double t : grid) a.push_back(std::pow(t, -0.5));
    for (const auto& s : local_slopes(grid, a)) {
        ASSERT_TRUE(s.has_value());
        EXPECT_NEAR(*s, -0.5, 1e-12);
    }
}

TEST(Slopes, LogCorrectionApproachesFromAbove)
{
    const auto grid = geometric_grid(1e2, 1e4, 16);
    std::vector<double> a;
    for (double t : grid) a.push_back(std::log(t) / t);
    const auto s = local_slopes(grid, a);
    for (std::size_t j = 1; j + 1 < grid.size(); ++j) {
        EXPECT_NEAR(*s[j], -1.0 + 1.0 / std::log(grid[j]), 2e-3);
        EXPECT_LT(*s[j + 1], *s[j]);
        EXPECT_GT(*s[j], -1.0);
    }
}

TEST(Slopes, ZeroSampleIsFlagged)
{
    const auto grid = geometric_grid(1e2, 1e4, 9);
    std::vector<double> a;
    for (double t : grid) a.push_back(1.0 / t);
    a[4] = 0.0;
    const auto s = local_slopes(grid, a);
    EXPECT_FALSE(s[3].has_value());
    EXPECT_FALSE(s[5].has_value());
    EXPECT_TRUE(s[4].has_value());
    EXPECT_TRUE(s[0].has_value());
}

TEST(Slopes, ScheduleValidatesInput)
{
    auto eval = [](double t) {
        OscillatorySample s;
        s.tau = t;
        s.value = std::pow(t, -0.5);
        return s;
    };
    const auto sched = schedule_and_slope(1e2, 1e4, 8, eval);
    EXPECT_EQ(sched.tau.size(), 8u);
    EXPECT_DOUBLE_EQ(sched.tau.front(), 1e2);
    EXPECT_DOUBLE_EQ(sched.tau.back(), 1e4);
    EXPECT_NEAR(*sched.slopes[3], -0.5, 1e-12);
    EXPECT_THROW(schedule_and_slope(1e2, 1e4, 7, eval), std::invalid_argument);
    EXPECT_THROW(schedule_and_slope(0.0, 1e4, 8, eval), std::invalid_argument);
    EXPECT_THROW(schedule_and_slope(1e4, 1e2, 8, eval), std::invalid_argument);
}

TEST(FitLeading, PowerLaw)
{
    const auto s = synthetic({{-0.5, 0, Complex(1, 1)}}, geometric_grid(1e2, 1e4, 16));
    const auto e = fit_leading(s);
    EXPECT_EQ(e.outcome, FitOutcome::exponent);
    EXPECT_TRUE(e.converged);
    EXPECT_NEAR(e.alpha_hat, -0.5, 1e-3);
    EXPECT_EQ(e.k_hat, 0);
    EXPECT_LT(std::abs(e.coeff_hat - Complex(1, 1)), 1e-6);
}

TEST(FitLeading, LogPower)
{
    const auto e = fit_leading(synthetic({{-1.0, 1, Complex(2, 0)}}, geometric_grid(1e2, 1e4, 16)));
    EXPECT_NEAR(e.alpha_hat, -1.0, 5e-2);
    EXPECT_EQ(e.k_hat, 1);
}

TEST(FitLeading, BelowNoiseIsConsistentWithZero)
{
    std::vector<OscillatorySample> s;
    for (double t : geometric_grid(1e2, 1e4, 12)) s.push_back({t, Complex(1e-14, 0), 1e-12, true, "synthetic"});
    const auto e = fit_leading(s);
    EXPECT_EQ(e.outcome, FitOutcome::consistent_with_zero);
    EXPECT_EQ(e.samples_used, 0u);
}

TEST(FitLeading, TooFewSamplesIsInsufficient)
{
    auto s = synthetic({{-0.5, 0, 1.0}}, geometric_grid(1e2, 1e4, 12));
    for (std::size_t j = 5; j < s.size(); ++j) s[j].error = 1.0;
    EXPECT_EQ(fit_leading(s).outcome, FitOutcome::insufficient);
    s.resize(5);
    EXPECT_THROW(fit_leading(s), std::invalid_argument);
}

TEST(FitLeading, RandomizedRecovery)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> alpha(-2.0, -0.25), phase(-M_PI, M_PI), mag(0.1, 10.0);
    int ok = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const AsymptoticTerm term{alpha(rng), static_cast<int>(rng() % 2), std::polar(mag(rng), phase(rng))};
        const auto e = fit_leading(synthetic({term}, geometric_grid(1e2, 1e4, 24), 1e-4, rng()));
        if (std::abs(e.alpha_hat - term.alpha) < 1e-2 && e.k_hat == term.k) ++ok;
    }
    EXPECT_GE(ok, 48);
}

TEST(Deflate, ExposesTheNextExponent)
{
    const AsymptoticTerm lead{-0.5, 0, Complex(1, 0)};
    const auto s = synthetic({lead, {-1.0, 0, Complex(0, 1)}}, geometric_grid(1e2, 1e4, 24));
    const auto e = fit_leading(deflate(s, lead));
    EXPECT_NEAR(e.alpha_hat, -1.0, 1e-2);
}

TEST(Deflate, ZeroTermIsIdentity)
{
    const auto s = synthetic({{-0.5, 0, Complex(1, 2)}}, geometric_grid(1e2, 1e4, 10));
    const auto d = deflate(s, {-0.5, 0, Complex(0, 0)});
    for (std::size_t j = 0; j < s.size(); ++j) {
        EXPECT_EQ(d[j].value, s[j].value);
        EXPECT_EQ(d[j].error, s[j].error);
    }
}

TEST(Deflate, PropagatesCoefficientUncertainty)
{
    const auto s = synthetic({{-0.5, 0, Complex(1, 0)}}, geometric_grid(1e2, 1e4, 10));
    const auto d = deflate(s, {-0.5, 0, Complex(1, 0), 1e-3});
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_NEAR(d[j].error, s[j].error + 1e-3 * std::pow(s[j].tau, -0.5), 1e-15);
}

TEST(Deflate, FresnelRemainderDecaysFast)
{
    const auto f = parse("x1^2", 1);
    std::vector<OscillatorySample> s;
    for (double t : geometric_grid(1e2, 1e4, 16)) s.push_back(eval_oscillatory(f, TestFunction::bump(1), t, 1e-12));
    const auto lead = separable_leading(f, {0});
    ASSERT_TRUE(lead.has_value());
    const auto r = deflate(s, {lead->alpha, 0, lead->coeff});
    // the bump is flat at 0, so the remainder decays faster than any power until it hits the noise floor
    const double r0 = std::abs(r.front().value);
    EXPECT_GT(r0, 3.0 * r.front().error);
    for (const auto& x : r)
        EXPECT_LE(std::abs(x.value), std::max(3.0 * x.error, r0 * std::pow(x.tau / r.front().tau, -1.4))) << x.tau;
    EXPECT_NE(fit_leading(r).outcome, FitOutcome::exponent);
}

TEST(CoefficientAt, PlantedCoefficient)
{
    const Complex c(0.3, -1.7);
    const auto s = synthetic({{-0.75, 0, c}}, geometric_grid(1e2, 1e4, 24));
    const auto p = coefficient_at(s, -0.75, 0);
    EXPECT_LT(std::abs(p.coeff - c) / std::abs(c), 1e-3);
    EXPECT_FALSE(p.consistent_with_zero);
    const auto q = coefficient_at(synthetic({{-1.0, 1, c}}, geometric_grid(1e2, 1e4, 24)), -1.0, 1);
    EXPECT_LT(std::abs(q.coeff - c) / std::abs(c), 1e-3);
}

TEST(CoefficientAt, SuperDecayIsConsistentWithZero)
{
    const auto p = coefficient_at(synthetic({{-0.75, 0, 1.0}}, geometric_grid(1e2, 1e4, 24)), -0.5, 0);
    EXPECT_TRUE(p.consistent_with_zero);
    std::vector<OscillatorySample> zero;
    for (double t : geometric_grid(1e2, 1e4, 12)) zero.push_back({t, 0.0, 1e-12, true, "zero"});
    const auto z = coefficient_at(zero, -0.5, 0);
    EXPECT_EQ(z.coeff, Complex(0.0));
    EXPECT_TRUE(z.consistent_with_zero);
    EXPECT_THROW(coefficient_at({zero.back()}, -0.5, 0), std::invalid_argument);
}

TEST(CoefficientAt, FresnelProductIsNotZero)
{
    const auto f = parse("x1^2 + x2^2", 2);
    std::vector<OscillatorySample> s;
    for (double t : geometric_grid(1e2, 1e4, 24)) s.push_back(eval_oscillatory(f, TestFunction::bump(2), t, 1e-10));
    const auto p = coefficient_at(s, -1.0, 0);
    EXPECT_FALSE(p.consistent_with_zero);
    EXPECT_LT(std::abs(p.coeff - Complex(0, M_PI)), 1e-6);
}

namespace {

std::vector<OscillatorySample> series(const std::string& text, int n, const ExponentVector& nu, double lo = 1e2,
                                      double hi = 1e4, int count = 24)
{
    const auto f = parse(text, n);
    std::vector<OscillatorySample> s;
    for (double t : geometric_grid(lo, hi, count))
        s.push_back(eval_oscillatory(f, TestFunction(nu, CutoffFunction(1, 2), CutoffShape::product), t, 1e-10));
    return s;
}

} // namespace

TEST(Theorem2Check, QuarticBump)
{
    const auto f = parse("x1^4 + x2^4", 2);
    const auto rep = check_theorem2(f, {0, 0}, series("x1^4 + x2^4", 2, {0, 0}));
    EXPECT_EQ(rep.distance, 2);
    EXPECT_EQ(rep.r, 4);
    EXPECT_EQ(rep.r_prime, 0);
    EXPECT_DOUBLE_EQ(rep.bound, -0.5);
    EXPECT_DOUBLE_EQ(rep.sandwich, -0.5);
    EXPECT_TRUE(rep.sandwich_holds);
    EXPECT_EQ(rep.status, BoundStatus::pass);
    EXPECT_NEAR(rep.slack, 0.0, 1e-3);
    EXPECT_FALSE(rep.vacuous);
}

TEST(Theorem2Check, QuadraticBump)
{
    const auto rep = check_theorem2(parse("x1^2 + x2^2", 2), {0, 0}, series("x1^2 + x2^2", 2, {0, 0}));
    EXPECT_DOUBLE_EQ(rep.bound, -1.0);
    EXPECT_EQ(rep.status, BoundStatus::pass);
    EXPECT_NEAR(rep.fit.alpha_hat, -1.0, 1e-3);
}

TEST(Theorem2Check, OddMonomialWeightVanishesIdentically)
{
    // x1 x2 times an even bump integrates to zero against an even phase
    const auto rep = check_theorem2(parse("x1^4 + x2^4", 2), {1, 1}, series("x1^4 + x2^4", 2, {1, 1}));
    EXPECT_DOUBLE_EQ(rep.bound, -1.0);
    EXPECT_TRUE(rep.vacuous);
    EXPECT_EQ(rep.status, BoundStatus::pass);
    EXPECT_EQ(rep.fit.outcome, FitOutcome::consistent_with_zero);
}

TEST(Theorem2Check, EvenMonomialWeight)
{
    const auto rep = check_theorem2(parse("x1^4 + x2^4", 2), {2, 2}, series("x1^4 + x2^4", 2, {2, 2}));
    EXPECT_EQ(rep.distance, Rational(2, 3));
    EXPECT_DOUBLE_EQ(rep.bound, -1.5);
    EXPECT_EQ(rep.status, BoundStatus::pass);
    EXPECT_NEAR(rep.slack, 0.0, 1e-2);
    const auto lead = separable_leading(parse("x1^4 + x2^4", 2), {2, 2});
    EXPECT_DOUBLE_EQ(lead->alpha, -1.5);
}

TEST(Theorem2Check, UnconvergedFitIsIndeterminate)
{
    auto s = series("x1^4 + x2^4", 2, {0, 0}, 1e2, 1e3, 8);
    for (std::size_t j = 0; j < s.size(); ++j) s[j].value *= (j % 2 ? 1.5 : 0.5);
    const auto rep = check_theorem2(parse("x1^4 + x2^4", 2), {0, 0}, s);
    EXPECT_EQ(rep.status, BoundStatus::indeterminate);
}

TEST(CutoffIndependence, QuarticAndQuadratic)
{
    const auto grid = geometric_grid(1e2, 1e4, 16);
    for (const char* text : {"x1^4 + x2^4", "x1^2 + x2^2"}) {
        const auto rep = cutoff_independence_check(parse(text, 2), {0, 0}, CutoffFunction(1, 2),
                                                   CutoffFunction(0.5, 1.5), grid, 1e-10);
        EXPECT_TRUE(rep.pass) << text;
        if (rep.slope) EXPECT_LE(*rep.slope, -2.0) << text;
    }
    const auto same = cutoff_independence_check(parse("x1^4 + x2^4", 2), {0, 0}, CutoffFunction(1, 2),
                                                CutoffFunction(1, 2), grid, 1e-10);
    EXPECT_TRUE(same.vacuous);
    EXPECT_TRUE(same.pass);
}

TEST(MonotoneConsistency, UpperHalfIsCloserToOracle)
{
    for (const auto& [text, nu] : std::vector<std::pair<std::string, ExponentVector>>{
             {"x1^4 + x2^4", {0, 0}}, {"x1^2 + x2^4", {0, 0}}, {"x1^4 + x2^4", {2, 2}}}) {
        const auto f = parse(text, 2);
        const auto e = fit_leading(series(text, 2, nu));
        const auto lead = separable_leading(f, nu);
        ASSERT_TRUE(e.alpha_lower_half && e.alpha_upper_half);
        EXPECT_LE(std::abs(*e.alpha_upper_half - lead->alpha), std::abs(*e.alpha_lower_half - lead->alpha) + 1e-9)
            << text;
    }
}
