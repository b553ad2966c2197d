#include <gtest/gtest.h>

#include <random>

#include "stablemaps/qfield.hpp"

using namespace stablemaps;

namespace {

UPoly random_poly(std::mt19937& rng, int max_deg) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> c(-5, 5);
    std::vector<BigRat> cs(static_cast<std::size_t>(deg(rng)) + 1);
    for (auto& x : cs) x = make_rat(c(rng), 1 + std::abs(c(rng)));
    return UPoly(std::move(cs));
}

RatFunc random_ratfunc(std::mt19937& rng) {
    UPoly den = random_poly(rng, 3);
    while (den.is_zero()) den = random_poly(rng, 3);
    return RatFunc(random_poly(rng, 4), den);
}

bool is_normalized(const RatFunc& f) {
    if (f.den().is_zero() || f.den().lead() != 1) return false;
    if (f.is_zero()) return f.den() == UPoly(1);
    return gcd(f.num(), f.den()).degree() == 0;
}

}  // namespace

TEST(RatArith, PolynomialProduct) {
    EXPECT_EQ(RatFunc(UPoly{1, 1}) * RatFunc(UPoly{0, 1}), RatFunc(UPoly{0, 1, 1}));
}

TEST(RatArith, DivisionIdentity) {
    const RatFunc pgl(UPoly{0, -1, 0, 1});
    EXPECT_EQ(pgl / pgl, RatFunc(1));
}

TEST(RatArith, LongDivision) {
    const RatFunc q = RatFunc(UPoly{0, -1, 0, 1}) / RatFunc(UPoly{1, 1});
    EXPECT_EQ(q, RatFunc(UPoly{0, -1, 1}));
    EXPECT_EQ(q * RatFunc(UPoly{1, 1}), RatFunc(UPoly{0, -1, 0, 1}));
}

TEST(RatArith, DivisionByZero) {
    try {
        (void)(RatFunc(1) / RatFunc());
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "division by zero");
    }
    EXPECT_THROW(RatFunc(UPoly{1}, UPoly{}), Error);
}

TEST(RatArith, ZeroIsZeroOverOne) {
    const RatFunc z = RatFunc(UPoly{1, 1}, UPoly{0, 1}) - RatFunc(UPoly{1, 1}, UPoly{0, 1});
    EXPECT_TRUE(z.is_zero());
    EXPECT_EQ(z.den(), UPoly(1));
}

TEST(RatArith, RandomMulDivRoundTripAndNormalForm) {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        const RatFunc a = random_ratfunc(rng);
        RatFunc b = random_ratfunc(rng);
        if (b.is_zero()) continue;
        const RatFunc prod = a * b;
        EXPECT_TRUE(is_normalized(prod));
        EXPECT_TRUE(is_normalized(a + b));
        EXPECT_TRUE(is_normalized(a - b));
        EXPECT_EQ(prod / b, a);
        EXPECT_EQ((a + b) - b, a);
    }
}

TEST(UpolyGcd, Examples) {
    EXPECT_EQ(gcd(UPoly{-1, 0, 1}, UPoly{1, 1}), (UPoly{1, 1}));
    EXPECT_EQ(gcd(UPoly{0, -1, 0, 1}, UPoly{0, -1, 1}), (UPoly{0, -1, 1}));
    EXPECT_EQ(gcd(UPoly{2, 1}, UPoly{3, 1}), UPoly(1));
    EXPECT_THROW(gcd(UPoly{}, UPoly{}), Error);
}

TEST(UpolyGcd, RandomDividesBothAndIsMaximal) {
    std::mt19937 rng(11);
    for (int i = 0; i < 100; ++i) {
        const UPoly common = random_poly(rng, 2);
        const UPoly a = random_poly(rng, 3) * common;
        const UPoly b = random_poly(rng, 3) * common;
        if (a.is_zero() && b.is_zero()) continue;
        const UPoly g = gcd(a, b);
        EXPECT_EQ(g.lead(), 1);
        EXPECT_TRUE(divmod(a, g).second.is_zero());
        EXPECT_TRUE(divmod(b, g).second.is_zero());
        if (!common.is_zero()) EXPECT_TRUE(divmod(g, common.monic()).second.is_zero());
    }
}

TEST(EvalAt, Examples) {
    EXPECT_EQ(eval_at(RatFunc(UPoly{0, -1, 0, 1}), 4), 60);
    EXPECT_EQ(eval_at(RatFunc(UPoly{1, 1}), 1), 2);
    try {
        (void)eval_at(RatFunc(UPoly{1}, UPoly{-1, 1}), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "pole");
    }
}

TEST(ExpandAtOne, Examples) {
    EXPECT_EQ(expand_at_one(RatFunc(UPoly{0, 0, 1}), 2), (std::vector<BigRat>{1, 2, 1}));
    EXPECT_EQ(expand_at_one(RatFunc(UPoly{-1, 0, 1}, UPoly{-1, 1}), 1), (std::vector<BigRat>{2, 1}));
    EXPECT_EQ(expand_at_one(RatFunc(UPoly{1}, UPoly{0, 1}), 2), (std::vector<BigRat>{1, -1, 1}));
    try {
        (void)expand_at_one(RatFunc(UPoly{1}, UPoly{-1, 1}), 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "pole at unity");
    }
}

// num - T den is divisible by (u-1)^{m+1}, so the exact defect f(u0) - T(u0)
// factors as h^{m+1} q(u0) / den(u0) with h = u0 - 1.
TEST(ExpandAtOne, TruncationDefectIsHighOrder) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        RatFunc f = random_ratfunc(rng);
        if (f.den().eval(1) == 0) continue;
        const int m = 3;
        const auto c = expand_at_one(f, m);
        UPoly taylor;
        UPoly power(1);
        for (int j = 0; j <= m; ++j) {
            taylor += power * c[static_cast<std::size_t>(j)];
            power *= UPoly{-1, 1};
        }
        UPoly defect = f.num() - taylor * f.den();
        for (int j = 0; j <= m; ++j) {
            auto [q, r] = divmod(defect, UPoly{-1, 1});
            ASSERT_TRUE(r.is_zero());
            defect = q;
        }
        const BigRat u0 = make_rat(101, 100);
        const BigRat h = u0 - 1;
        BigRat hp = 1;
        for (int j = 0; j <= m; ++j) hp *= h;
        EXPECT_EQ(eval_at(f, u0) - taylor.eval(u0), hp * defect.eval(u0) / f.den().eval(u0));
    }
}

TEST(BinomFalling, Examples) {
    const RatFunc p1(UPoly{1, 1});
    EXPECT_EQ(binom_falling(p1, 3) * RatFunc(6), RatFunc(UPoly{0, -1, 0, 1}));
    EXPECT_EQ(binom_falling(p1, 0), RatFunc(1));
    EXPECT_EQ(binom_falling(RatFunc(UPoly{-2, 1}), 2) * RatFunc(2), RatFunc(UPoly{-2, 1} * UPoly{-3, 1}));
    EXPECT_THROW(binom_falling(p1, -1), Error);
}

TEST(BinomFalling, IntegerArgumentsGiveBinomialCoefficients) {
    for (int n = 0; n <= 12; ++n)
        for (int k = 0; k <= n; ++k) {
            BigInt expected;
            mpz_bin_uiui(expected.get_mpz_t(), static_cast<unsigned>(n), static_cast<unsigned>(k));
            EXPECT_EQ(binom_falling(RatFunc(n), k), RatFunc(BigRat(expected)));
        }
}

TEST(BinomFalling, PolynomialArgumentGivesPolynomialOfExpectedDegree) {
    const RatFunc alpha(UPoly{1, 2, 1});
    for (int k = 0; k <= 5; ++k) {
        const RatFunc v = binom_falling(alpha, k) * RatFunc(BigRat(factorial(static_cast<unsigned>(k))));
        EXPECT_TRUE(v.is_polynomial());
        EXPECT_EQ(v.num().degree(), 2 * k);
    }
}

TEST(FallingP1, MatchesBinomFalling) {
    for (int m = 0; m <= 6; ++m)
        EXPECT_EQ(RatFunc(falling_p1(m)),
                  binom_falling(RatFunc(UPoly{1, 1}), m) * RatFunc(BigRat(factorial(static_cast<unsigned>(m)))));
}

TEST(QfieldJson, RoundTrip) {
    const RatFunc f(UPoly(std::vector<BigRat>{make_rat(1, 2), 0, -3}), UPoly{1, 0, 1});
    const auto j = to_json(f);
    EXPECT_EQ(j.at("num").at(0), "1/2");
    EXPECT_EQ(ratfunc_from_json(j), f);
    EXPECT_THROW(ratfunc_from_json(nlohmann::json{{"num", {"x"}}}), DataError);
    EXPECT_THROW(ratfunc_from_json(nlohmann::json{{"num", {"1"}}, {"den", nlohmann::json::array()}}), DataError);
}
