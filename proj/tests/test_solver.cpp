#include <gtest/gtest.h>

#include "stablemaps/solver.hpp"
#include "stablemaps/trees.hpp"

using namespace stablemaps;

namespace {

/// [m choose r]_u from the product formula, by exact polynomial division.
UPoly gaussian_binomial(int m, int r) {
    UPoly num(1), den(1);
    for (int i = 0; i < r; ++i) {
        num = num * (UPoly(1) - UPoly::monomial(1, static_cast<std::size_t>(m - i)));
        den = den * (UPoly(1) - UPoly::monomial(1, static_cast<std::size_t>(i + 1)));
    }
    auto [q, rem] = divmod(num, den);
    EXPECT_TRUE(rem.is_zero());
    return q;
}

RatFunc kfact(int k) { return RatFunc(BigRat(factorial(static_cast<unsigned>(k)))); }

}  // namespace

TEST(SolvePhi0, LowOrderCoefficients) {
    for (const auto& w : {point_target(), projective_space(1), projective_space(2)}) {
        const MultiSeries phi = solve_phi0(w, 4, {2});
        EXPECT_TRUE(phi.coeff(0, {0}).is_zero());
        EXPECT_TRUE(phi.coeff(1, {0}).is_zero());
        EXPECT_EQ(phi.coeff(2, {0}), RatFunc(make_rat(1, 2))) << w.name();
        EXPECT_TRUE(functional_equation_residual(w, phi).is_zero());
    }
}

TEST(SolvePhi0, LinearInZCoefficient) {
    for (int n = 1; n <= 3; ++n) {
        const auto w = projective_space(n);
        const MultiSeries phi = solve_phi0(w, 2, {2});
        EXPECT_EQ(phi.coeff(0, {1}), RatFunc(UPoly{1, 1}) * nclass(w, {1})) << n;
    }
}

TEST(SolvePhi0, PerturbedStartConvergesToSameRoot) {
    const auto w = projective_space(1);
    const MultiSeries phi = solve_phi0(w, 4, {2});
    MultiSeries start(w.grading(), 4, {2});
    start.set(1, {0}, RatFunc(7));
    start.set(0, {1}, RatFunc(UPoly{1, 2}, UPoly{3, 1}));
    start.set(3, {1}, RatFunc(-5));
    EXPECT_EQ(solve_phi0(w, 4, {2}, start), phi);
    start.set(0, {0}, RatFunc(1));
    EXPECT_THROW(solve_phi0(w, 4, {2}, start), Error);
}

TEST(Potential, PointAndLowOrders) {
    const auto pot = potential(point_target(), solve_phi0(point_target(), 6, {0}));
    EXPECT_EQ(pot.coeff(3, {0}), RatFunc(make_rat(1, 6)));
    for (int k = 0; k <= 2; ++k) EXPECT_TRUE(pot.coeff(k, {0}).is_zero());
}

TEST(Potential, ZeroDegreePartIsTargetTimesPoint) {
    const auto point = potential(point_target(), solve_phi0(point_target(), 6, {0}));
    for (int n = 1; n <= 3; ++n) {
        const auto w = projective_space(n);
        const auto pot = potential(w, solve_phi0(w, 6, {1}));
        for (int k = 0; k <= 6; ++k) EXPECT_EQ(pot.coeff(k, {0}), point.coeff(k, {0}) * RatFunc(w.pw())) << n << k;
    }
}

TEST(Classes, PointTarget) {
    const auto table = compute_classes(point_target(), 6, {0});
    EXPECT_EQ(table.at(3, {0}), UPoly(1));
    EXPECT_EQ(table.at(4, {0}), (UPoly{1, 1}));
    EXPECT_EQ(table.at(5, {0}), (UPoly{1, 5, 1}));
    EXPECT_EQ(table.at(6, {0}), (UPoly{1, 16, 16, 1}));
    EXPECT_THROW((void)table.at(7, {0}), Error);
}

TEST(Classes, DegreeOneUnmarkedIsGaussianBinomial) {
    for (int n = 1; n <= 4; ++n) {
        const auto table = compute_classes(projective_space(n), 0, {1});
        EXPECT_EQ(table.at(0, {1}), gaussian_binomial(n + 1, 2)) << n;
    }
    EXPECT_EQ(gaussian_binomial(4, 2), (UPoly{1, 1, 2, 1, 1}));
    EXPECT_EQ(compute_classes(projective_space(1), 0, {1}).at(0, {1}), UPoly(1));
}

TEST(Classes, StructuralInvariants) {
    const auto point = compute_classes(point_target(), 5, {0});
    for (int n = 1; n <= 2; ++n) {
        const auto table = compute_classes(projective_space(n), 4, {2});
        for (const auto& [key, poly] : table.entries) {
            if (is_unstable(key.k, key.beta)) {
                EXPECT_TRUE(poly.is_zero());
                continue;
            }
            const int dim = expected_dimension_pn(n, key.k, key.beta);
            EXPECT_EQ(poly.degree(), dim);
            EXPECT_EQ(poly.lead(), 1);
            if (total_degree(key.beta) <= 1)
                EXPECT_TRUE(is_palindromic(poly, dim)) << n << " " << key.k << " " << key.beta[0];
        }
        for (int k = 0; k <= 4; ++k) EXPECT_EQ(table.at(k, {0}), point.at(k, {0}) * pn_class(n));
    }
}

// Double covers of P^1: the open stratum contributes [Map_2]/[PGL2] = u^2, the
// nodal stratum (two degree-one components, swapped by an involution) (u+1)/2.
// The orbifold class is therefore not palindromic.
TEST(Classes, DoubleCoversOfTheLine) {
    const UPoly v = compute_classes(projective_space(1), 0, {2}).at(0, {2});
    EXPECT_EQ(v, (UPoly(std::vector<BigRat>{make_rat(1, 2), make_rat(1, 2), 1})));
    EXPECT_FALSE(is_palindromic(v, 2));
}

TEST(Classes, PalindromeHelper) {
    EXPECT_TRUE(is_palindromic(UPoly{1, 5, 1}, 2));
    EXPECT_FALSE(is_palindromic(UPoly{1, 5, 1}, 3));
    EXPECT_FALSE(is_palindromic(UPoly{1, 2}, 1));
    EXPECT_TRUE(is_palindromic(UPoly{0, 1}, 2));
    EXPECT_EQ(expected_dimension_pn(1, 0, {1}), 0);
    EXPECT_EQ(expected_dimension_pn(2, 3, {2}), 8);
}

TEST(Classes, NonPolynomialEntryIsReported) {
    const auto w = target_from_json(nlohmann::json{
        {"name", "odd"}, {"rank", 1}, {"pw", {"1", "1"}}, {"classes", {{{"beta", {1}}, {"value", {"1"}}}}}});
    try {
        (void)compute_classes(w, 0, {1});
        FAIL();
    } catch (const NonPolynomialClass& e) {
        EXPECT_EQ(e.k, 0);
        EXPECT_EQ(e.beta, Degree{1});
        EXPECT_FALSE(e.value.is_polynomial());
    }
}

TEST(Identities, OdeHolds) {
    for (const auto& w : {point_target(), projective_space(1), projective_space(2)}) {
        const auto r = verify_ode(solve_phi0(w, 5, {2}));
        EXPECT_TRUE(r.phi_form.is_zero()) << w.name();
        EXPECT_TRUE(r.psi_form.is_zero()) << w.name();
    }
}

TEST(Identities, OdeDetectsPerturbation) {
    MultiSeries phi = solve_phi0(projective_space(1), 5, {2});
    phi.add_to(3, {1}, RatFunc(1));
    EXPECT_FALSE(verify_ode(phi).ok());
}

TEST(Identities, DerivativeOfPotential) {
    for (const auto& w : {point_target(), projective_space(1), projective_space(2)}) {
        const auto phi = solve_phi0(w, 5, {2});
        EXPECT_TRUE(verify_dt(potential(w, phi), phi, w)) << w.name();
    }
    const auto w = projective_space(1);
    const auto phi = solve_phi0(w, 5, {2});
    MultiSeries wrong = phi;
    wrong.add_to(2, {1}, RatFunc(1));
    EXPECT_FALSE(verify_dt(potential(w, phi), wrong, w));
}

TEST(Identities, PotentialExpansionTermwiseVsClosed) {
    for (const auto& w : {point_target(), projective_space(1), projective_space(2)})
        EXPECT_TRUE(verify_potential_expansion(w, 4, 4, {2})) << w.name();
    EXPECT_THROW(verify_potential_expansion(point_target(), 1, 2, {0}), Error);
    // Swapping the Eisenstein data between two targets breaks the agreement.
    const auto p1 = projective_space(1);
    const auto p2 = projective_space(2);
    EXPECT_NE(potential_coefficients_termwise(p1, 3, 3, {2}), potential_coefficients_closed(p2, 3, 3, {2}));
}

TEST(Identities, ImplicitSolutionIsConstantAlongT) {
    const std::vector<double> ts{0.0, 0.005, 0.01};
    EXPECT_LE(verify_implicit_numeric(point_target(), 4, 0.0, ts, 10, {0}), 1e-10);
    EXPECT_LE(verify_implicit_numeric(projective_space(1), 4, 0.01, ts, 10, {8}), 1e-5);
    // phi0 = 0 is not a solution; its spread exceeds the acceptance threshold.
    const MultiSeries zero(Grading::of_rank(1), 10, {0});
    EXPECT_GT(implicit_constant_spread(zero, 4, 0.0, ts), 1e-5);
    EXPECT_THROW(implicit_constant_spread(zero, 1, 0.0, ts), Error);
}

TEST(Oracle, SolverAgreesWithTreeSum) {
    for (const auto& w : {point_target(), projective_space(1), projective_space(2)}) {
        const auto phi = solve_phi0(w, 4, {2});
        EXPECT_EQ(potential(w, phi), tree_sum_potential(w, 4, {2}, 2)) << w.name();
    }
}

TEST(Oracle, RankTwoTarget) {
    const auto w = load_target(std::string(STABLEMAPS_SAMPLES_DIR) + "/p1xp1.json");
    const auto pot = potential(w, solve_phi0(w, 3, {1, 1}));
    EXPECT_EQ(pot, tree_sum_potential(w, 3, {1, 1}, 2));
    const auto table = extract_classes(pot, w.name());
    // bidegree (1,0) curves are the fibres, a P^1 of them;
    // (1,1) curves form the linear system |O(1,1)| = P^3.
    EXPECT_EQ(table.at(0, {1, 0}), (UPoly{1, 1}));
    EXPECT_EQ(table.at(0, {1, 1}), (UPoly{1, 1, 1, 1}));
    for (const auto& [key, poly] : table.entries)
        if (!is_unstable(key.k, key.beta))
            EXPECT_TRUE(is_palindromic(poly, 2 * total_degree(key.beta) + 2 + key.k - 3));
}

TEST(Classes, KFactorialScaling) {
    const auto w = projective_space(2);
    const auto pot = potential(w, solve_phi0(w, 3, {1}));
    const auto table = extract_classes(pot);
    for (int k = 0; k <= 3; ++k) EXPECT_EQ(RatFunc(table.at(k, {1})), pot.coeff(k, {1}) * kfact(k));
}
