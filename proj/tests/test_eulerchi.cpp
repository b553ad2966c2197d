#include <gtest/gtest.h>

#include "stablemaps/eulerchi.hpp"

using namespace stablemaps;

TEST(Xseries, ProjectiveSpacesGiveConstantCoefficients) {
    for (int n = 1; n <= 4; ++n) {
        const MultiSeries x = xseries(projective_space(n), {4});
        EXPECT_TRUE(x.coeff(0, {0}).is_zero());
        for (int d = 1; d <= 4; ++d) EXPECT_EQ(x.coeff(0, {d}), RatFunc(n)) << n << " " << d;
    }
}

TEST(Xseries, PoleAtUnity) {
    const auto bad = target_from_json(nlohmann::json{
        {"name", "bad"}, {"rank", 1}, {"pw", {"1", "1"}}, {"classes", {{{"beta", {1}}, {"value", {"1"}}}}}});
    try {
        (void)xseries(bad, {1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(std::string(e.what()).rfind("pole at unity", 0), 0u);
    }
    const auto chi_zero = target_from_json(
        nlohmann::json{{"name", "z"}, {"rank", 1}, {"pw", {"-1", "1"}}, {"classes", nlohmann::json::array()}});
    EXPECT_THROW(xseries(chi_zero, {0}), Error);
}

TEST(EulerLimit, LowOrderCoefficients) {
    const MultiSeries phi = solve_phi0_chi(point_target(), 5, {0});
    EXPECT_EQ(phi.coeff(2, {0}), RatFunc(make_rat(1, 2)));
    EXPECT_TRUE(phi.coeff(1, {0}).is_zero());
    const MultiSeries phi1 = solve_phi0_chi(projective_space(1), 3, {2});
    EXPECT_EQ(phi1.coeff(0, {1}), RatFunc(1));
}

// Coefficients of the solver's phi0 that are regular at u = 1 specialise to the limit solution.
TEST(EulerLimit, MatchesSolverAtUnity) {
    const auto w = projective_space(2);
    const auto phi = solve_phi0(w, 4, {2});
    const auto chi = solve_phi0_chi(w, 4, {2});
    for (int k = 0; k <= 4; ++k)
        for (int d = 0; d <= 2; ++d) {
            const RatFunc c = phi.coeff(k, {d});
            if (c.den().eval(1) == 0) continue;
            EXPECT_EQ(RatFunc(c.eval(1)), chi.coeff(k, {d})) << k << " " << d;
        }
}

TEST(ChiTable, Values) {
    const auto pt = chi_table(chi_potential(point_target(), solve_phi0_chi(point_target(), 6, {0})));
    EXPECT_EQ(pt.at(ClassKey{3, {0}}), 1);
    EXPECT_EQ(pt.at(ClassKey{4, {0}}), 2);
    EXPECT_EQ(pt.at(ClassKey{5, {0}}), 7);
    EXPECT_EQ(pt.at(ClassKey{6, {0}}), 34);
    const auto p1 = chi_table(chi_potential(projective_space(1), solve_phi0_chi(projective_space(1), 4, {2})));
    EXPECT_EQ(p1.at(ClassKey{4, {0}}), 4);
    EXPECT_EQ(p1.at(ClassKey{0, {1}}), 1);
}

TEST(Crosscheck, AgreesWithClassTable) {
    EXPECT_TRUE(crosscheck_chi(projective_space(1), 4, {2}));
    EXPECT_TRUE(crosscheck_chi(projective_space(2), 3, {2}));
    EXPECT_TRUE(crosscheck_chi(point_target(), 6, {0}));
}

TEST(Crosscheck, PerturbedXIsDetected) {
    const auto w = projective_space(1);
    MultiSeries x = xseries(w, {2});
    x.add_to(0, {2}, RatFunc(1));
    const auto table = compute_classes(w, 3, {2});
    EXPECT_FALSE(crosscheck_chi(table, chi_potential(w, solve_phi0_chi(x, 3))));
}
