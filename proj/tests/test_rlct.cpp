#include "oscillab/json_io.hpp"
#include "oscillab/rlct.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace oscillab;

namespace {

const char* kSquaredQuadric = "(x1^2+x2^2+x3^2)^2 + x1^6+x2^6+x3^6";

Rational brute_min(const ResolutionDatum& data)
{
    Rational best(1000000);
    for (const auto& c : data) best = std::min(best, Rational(c.k + 1, c.m));
    return best;
}

} // namespace

TEST(GammaFromResolution, Examples)
{
    EXPECT_EQ(gamma_from_resolution({{4, 1}}), Rational(1, 2));
    EXPECT_EQ(gamma_from_resolution({{2, 0}}), Rational(1, 2));
    EXPECT_EQ(gamma_from_resolution({{1, 0}, {3, 2}}), 1);
    EXPECT_THROW(gamma_from_resolution({}), std::invalid_argument);
}

TEST(GammaFromResolution, PermutationInvariantAndMonotone)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> m(1, 12), k(0, 6);
    for (int trial = 0; trial < 100; ++trial) {
        ResolutionDatum data;
        for (int j = 0; j < 1 + trial % 5; ++j) data.push_back({m(rng), k(rng)});
        const auto g = gamma_from_resolution(data);
        EXPECT_EQ(g, brute_min(data));
        auto shuffled = data;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(gamma_from_resolution(shuffled), g);
        data.push_back({m(rng), k(rng)});
        EXPECT_LE(gamma_from_resolution(data), g);
    }
}

TEST(GammaFromResolution, JsonFileFormat)
{
    const auto data = resolution_from_json(Json::parse(R"([{"m": 4, "k": 1}, {"m": 2, "k": 3}])"));
    ASSERT_EQ(data.size(), 2u);
    EXPECT_EQ(gamma_from_resolution(data), Rational(1, 2));
    EXPECT_EQ(to_json(data).dump(), R"([{"m":4,"k":1},{"m":2,"k":3}])");
    EXPECT_THROW(resolution_from_json(Json::parse(R"([{"m": 0, "k": 1}])")), std::invalid_argument);
}

TEST(RlctHomogeneous, Examples)
{
    const auto a = rlct_homogeneous(parse("x1^4 + x2^4", 2));
    EXPECT_EQ(a.value, Rational(1, 2));
    EXPECT_EQ(a.method, RlctMethod::homogeneous);
    EXPECT_TRUE(a.convenient);
    EXPECT_TRUE(a.homogeneous);
    EXPECT_EQ(a.likely_R_nondegenerate, true);
    EXPECT_TRUE(a.principal_faces.empty());
    EXPECT_EQ(rlct_homogeneous(parse("x1^2 + x2^2", 2)).value, 1);
    EXPECT_EQ(rlct_homogeneous(parse("x1^6 + x2^6 + x3^6", 3)).value, Rational(1, 2));
    EXPECT_THROW(rlct_homogeneous(parse("x1^2 + x2^4", 2)), std::invalid_argument);
    EXPECT_THROW(rlct_homogeneous(parse("x1^3*x2 + x1*x2^3", 2)), std::invalid_argument);
}

TEST(RlctNewtonCandidate, Examples)
{
    const auto r = rlct_newton_candidate(parse(kSquaredQuadric, 3));
    EXPECT_EQ(r.value, Rational(3, 4));
    EXPECT_TRUE(r.candidate_only);
    EXPECT_FALSE(r.homogeneous);

    const auto q = rlct_newton_candidate(parse("x1^4 + x2^4", 2));
    EXPECT_EQ(q.value, Rational(1, 2));
    ASSERT_EQ(q.principal_faces.size(), 1u);
    EXPECT_EQ(q.principal_faces[0].d, 4);
    EXPECT_EQ(q.principal_faces[0].r, 2);
    EXPECT_TRUE(q.principal_faces[0].d_even);
    EXPECT_FALSE(q.principal_faces[0].r_odd);

    const auto m = rlct_newton_candidate(parse("x1^2 + x2^4", 2));
    EXPECT_EQ(m.value, Rational(3, 4));
    ASSERT_EQ(m.principal_faces.size(), 1u);
    EXPECT_EQ(m.principal_faces[0].weights, (RationalVector{Rational(1, 2), Rational(1, 4)}));
    EXPECT_EQ(m.principal_faces[0].d, 4);
    EXPECT_EQ(m.principal_faces[0].r, 3);
    EXPECT_TRUE(m.principal_faces[0].d_even);
    EXPECT_TRUE(m.principal_faces[0].r_odd);
    EXPECT_EQ(m.likely_nonnegative, true);
    EXPECT_EQ(m.below_one_strict, true);

    EXPECT_THROW(rlct_newton_candidate(parse("x1*x2", 2)), std::invalid_argument);
}

TEST(RlctNewtonCandidate, ReportsTiedPrincipalFaces)
{
    // the diagonal meets Gamma_+ at the vertex (2,2), shared by two facets
    const auto r = rlct_newton_candidate(parse("x1^6 + x1^2*x2^2 + x2^6", 2));
    EXPECT_EQ(r.value, Rational(1, 2));
    ASSERT_EQ(r.principal_faces.size(), 2u);
    EXPECT_LT(r.principal_faces[0].weights, r.principal_faces[1].weights);
}

TEST(BlowupCharts, Examples)
{
    const auto q = blowup_charts(parse("x1^4 + x2^4", 2));
    ASSERT_EQ(q.size(), 2u);
    EXPECT_EQ(q[0].h, parse("1 + x1^4", 1));
    EXPECT_EQ(q[0].f_multiplicity, 4);
    EXPECT_EQ(q[0].jacobian_multiplicity, 1);
    const auto s = blowup_charts(parse("x1^2 + x2^2", 2));
    EXPECT_EQ(s[1].h, parse("x1^2 + 1", 1));
    EXPECT_EQ(s[1].f_multiplicity, 2);
    const auto c = blowup_charts(parse("x1^3 + x2^3", 2));
    EXPECT_EQ(c[0].h, parse("1 + x1^3", 1));
    EXPECT_EQ(gamma_from_resolution({{c[0].f_multiplicity, c[0].jacobian_multiplicity}}), Rational(2, 3));
    EXPECT_THROW(blowup_charts(parse("x1^2 + x2^4", 2)), std::invalid_argument);
}

TEST(BlowupCharts, ChartPolynomialsMatchDirectSubstitution)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const char* text : {"x1^4 + x2^4 + x3^4", "x1^2*x2^2 + x1^4 - 3*x2^3*x3 + x3^4"}) {
        const auto f = parse(text, 3);
        for (const auto& chart : blowup_charts(f)) {
            for (int k = 0; k < 100; ++k) {
                std::vector<double> yhat{u(rng), u(rng)}, x(3);
                for (int i = 0, j = 0; i < 3; ++i) x[i] = i == chart.index ? 1.0 : yhat[j++];
                const double direct = f.value<double>(std::span<const double>(x));
                const double via = chart.h.value<double>(std::span<const double>(yhat));
                EXPECT_NEAR(via, direct, 1e-10 * (1.0 + std::abs(direct)));
            }
        }
    }
}

TEST(Consistency, HomogeneousCandidateAndChartsAgree)
{
    for (const auto& [text, n] : std::vector<std::pair<std::string, int>>{{"x1^4 + x2^4", 2},
                                                                         {"x1^2 + x2^2", 2},
                                                                         {"x1^6 + x2^6", 2},
                                                                         {"x1^2 + x2^2 + x3^2", 3},
                                                                         {"x1^6 + x2^6 + x3^6", 3}}) {
        const auto f = parse(text, n);
        const auto h = rlct_homogeneous(f).value;
        EXPECT_EQ(h, rlct_newton_candidate(f).value) << text;
        EXPECT_EQ(h, gamma_from_resolution(resolution_from_charts(blowup_charts(f)))) << text;
        EXPECT_EQ(rlct_from_resolution(resolution_from_charts(blowup_charts(f)), n).value, h);
    }
}

TEST(RlctReportJson, CarriesMethodAndFlags)
{
    const auto j = to_json(rlct_newton_candidate(parse("x1^2 + x2^4", 2)));
    EXPECT_EQ(j.at("value"), "3/4");
    EXPECT_EQ(j.at("method"), "newton-candidate");
    EXPECT_EQ(j.at("principal_faces").size(), 1u);
}
