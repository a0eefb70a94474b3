#include <gtest/gtest.h>

#include <random>

#include "sps2/brill.hpp"
#include "sps2/linear_factor.hpp"

using namespace sps2;

namespace {

LinearForm F(std::initializer_list<long> xs) {
    LinearForm l;
    for (long x : xs) l.emplace_back(x);
    return l;
}

Polynomial X(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial L(const LinearForm& l) { return Polynomial::from_form(l); }

LinearForm random_form(std::mt19937_64& rng, std::size_t n, long bound) {
    std::uniform_int_distribution<long> c(-bound, bound);
    LinearForm l(n);
    do {
        for (auto& x : l) x = c(rng);
    } while (is_zero(l));
    return l;
}

Polynomial random_form_product(std::mt19937_64& rng, std::size_t n, unsigned d) {
    Polynomial p = Polynomial::constant(n, 1);
    for (unsigned i = 0; i < d; ++i) p = p * L(random_form(rng, n, 4));
    return p;
}

Polynomial random_homogeneous(std::mt19937_64& rng, std::size_t n, unsigned d) {
    std::uniform_int_distribution<int> c(-5, 5);
    Polynomial p(n);
    std::vector<std::uint16_t> e(n, 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned rest) {
        if (i + 1 == n) {
            e[i] = static_cast<std::uint16_t>(rest);
            p.add_term(e, c(rng));
            return;
        }
        for (unsigned k = 0; k <= rest; ++k) {
            e[i] = static_cast<std::uint16_t>(k);
            rec(i + 1, rest - k);
        }
    };
    rec(0, d);
    return p;
}

// Rank of the symmetric matrix of a quadratic form.
std::size_t quadratic_rank(const Polynomial& q) {
    std::size_t n = q.nvars();
    Matrix A(n, std::vector<Scalar>(n, 0));
    for (const auto& [e, c] : q.terms()) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            for (unsigned k = 0; k < e[i]; ++k) idx.push_back(i);
        if (idx[0] == idx[1]) A[idx[0]][idx[0]] += c;
        else {
            A[idx[0]][idx[1]] += c / 2;
            A[idx[1]][idx[0]] += c / 2;
        }
    }
    return matrix_rank(A);
}

}  // namespace

TEST(Polar, Examples) {
    Polynomial x1 = X(2, 0), x2 = X(2, 1);
    Polynomial f = x1 * x2;
    // k = 0 gives f(y).
    EXPECT_EQ(polar(f, 0).poly, X(4, 2) * X(4, 3));
    // x1 x2, k = 1: (x1 y2 + x2 y1) / 2
    Polynomial want = (X(4, 0) * X(4, 3) + X(4, 1) * X(4, 2)) * Scalar(1, 2);
    EXPECT_EQ(polar(f, 1).poly, want);
    // k = d of a power returns the power in x.
    EXPECT_EQ(polar(x1.pow(3), 3).poly, X(4, 0).pow(3));
    EXPECT_THROW(polar(f, 3), Error);
}

TEST(Polar, Bidegree) {
    std::mt19937_64 rng(2);
    Polynomial f = random_homogeneous(rng, 3, 4);
    for (unsigned k = 0; k <= 4; ++k) {
        PolarForm p = polar(f, k);
        for (const auto& [e, c] : p.poly.terms()) {
            EXPECT_EQ(e[0] + e[1] + e[2], int(k));
            EXPECT_EQ(e[3] + e[4] + e[5], int(4 - k));
        }
    }
}

TEST(Young, DegreeOneAndLinearity) {
    // d = 1: (x1 y1 - y1 x1) / 2 = 0 for f = g = x1.
    Polynomial x1 = X(2, 0);
    EXPECT_TRUE(young_product(x1, x1).is_zero());
    // f = x1, g = x2: (x1 y2 - y1 x2) / 2
    Polynomial want = (X(4, 0) * X(4, 3) - X(4, 2) * X(4, 1)) * Scalar(1, 2);
    EXPECT_EQ(young_product(x1, X(2, 1)), want);
    EXPECT_TRUE(young_product(x1 * x1, Polynomial(2)).is_zero());
    std::mt19937_64 rng(4);
    Polynomial f = random_homogeneous(rng, 2, 3), g = random_homogeneous(rng, 2, 3), h = random_homogeneous(rng, 2, 3);
    EXPECT_EQ(young_product(f, g + h), young_product(f, g) + young_product(f, h));
    EXPECT_THROW(young_product(f, x1), Error);
}

TEST(BrillForm, Examples) {
    Polynomial x1 = X(3, 0), x2 = X(3, 1), x3 = X(3, 2);
    EXPECT_TRUE(brill_form(x1.pow(3)).poly.is_zero());
    EXPECT_TRUE(brill_form(x1 * x2 * (x1 + x2)).poly.is_zero());
    BrillForm b = brill_form(x1 * x1 + x2 * x2 + x3 * x3);
    ASSERT_FALSE(b.poly.is_zero());
    // Multidegree (d, d, d(d-1)) = (2, 2, 2).
    for (const auto& [e, c] : b.poly.terms()) {
        EXPECT_EQ(e[0] + e[1] + e[2], 2);
        EXPECT_EQ(e[3] + e[4] + e[5], 2);
        EXPECT_EQ(e[6] + e[7] + e[8], 2);
    }
    std::mt19937_64 rng(1);
    EXPECT_THROW(brill_form(random_form_product(rng, 4, 8), 1000), Error);
}

TEST(BrillForm, EvaluationMatchesExpansion) {
    std::mt19937_64 rng(8);
    for (unsigned d = 2; d <= 3; ++d) {
        Polynomial f = random_homogeneous(rng, 3, d);
        BrillForm b = brill_form(f);
        for (int t = 0; t < 3; ++t) {
            LinearForm x = random_form(rng, 3, 9), y = random_form(rng, 3, 9), z = random_form(rng, 3, 9);
            LinearForm pt = x;
            pt.insert(pt.end(), y.begin(), y.end());
            pt.insert(pt.end(), z.begin(), z.end());
            EXPECT_EQ(brill_value(f, x, y, z), evaluate(b.poly, pt));
        }
    }
}

TEST(Splits, Examples) {
    Polynomial x1 = X(3, 0), x2 = X(3, 1), x3 = X(3, 2);
    EXPECT_TRUE(splits_into_linear_forms(x1 * x1 - x2 * x2));
    EXPECT_TRUE(splits_into_linear_forms(x1 * x1 + x2 * x2));
    std::mt19937_64 rng(12);
    EXPECT_FALSE(splits_into_linear_forms(random_homogeneous(rng, 3, 3)));
    EXPECT_FALSE(splits_into_linear_forms(x1 * x1 * x1 + x2 * x2 * x2 + x3 * x3 * x3));
}

TEST(Splits, RandomProducts) {
    std::mt19937_64 rng(13);
    int count = 0;
    for (unsigned d = 2; d <= 5; ++d)
        for (std::size_t r = 2; r <= 4; ++r)
            for (int t = 0; t < 17; ++t, ++count) {
                Polynomial p = random_form_product(rng, r, d);
                EXPECT_TRUE(splits_into_linear_forms(p, count)) << p;
            }
    EXPECT_GE(count, 200);
}

TEST(Splits, QuadraticsAgreeWithRank) {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 40; ++t) {
        std::size_t n = 2 + t % 3;
        Polynomial q(n);
        // Sums of up to n signed squares of random forms.
        std::size_t k = 1 + t % n;
        for (std::size_t i = 0; i < k; ++i) q += L(random_form(rng, n, 3)).pow(2) * Scalar(i % 2 ? -1 : 2);
        if (q.is_zero()) continue;
        EXPECT_EQ(splits_into_linear_forms(q), quadratic_rank(q) <= 2) << q;
    }
}

TEST(Splits, RealSplittingImpliesComplexSplitting) {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 10; ++t) {
        Polynomial f = random_form_product(rng, 3, 2) * (t % 2 ? random_form_product(rng, 3, 1) : random_homogeneous(rng, 3, 1));
        if (is_pi_sigma_real(f)) EXPECT_TRUE(splits_into_linear_forms(f));
    }
}

TEST(CandidateSystem, ConstantCoreIsEmpty) {
    EXPECT_TRUE(candidate_system(Polynomial::constant(3, 5)).empty());
    EXPECT_THROW(candidate_system(Polynomial::constant(1, 5)), Error);
}

TEST(CandidateSystem, BinaryRestrictionsAreDegenerate) {
    // r = 2: the restriction is a power of x_2, r = 3: a binary form; both always split over C.
    Polynomial x1 = X(2, 0), x2 = X(2, 1);
    EXPECT_TRUE(candidate_system(x1 * x1 + x2 * x2).empty());
    Polynomial y1 = X(3, 0), y2 = X(3, 1), y3 = X(3, 2);
    auto sys = candidate_system(y1 * y1 + y2 * y2 + y3 * y3);
    EXPECT_TRUE(sys.empty());
    EXPECT_THROW(solve_candidate_system(sys, 2), Error);
}

TEST(CandidateSystem, GateTuplesSatisfySystem) {
    // h = l0 l1 - l2 l3 in four variables; on l0 = 0 it becomes -l2 l3.
    std::mt19937_64 rng(21);
    std::vector<LinearForm> ls;
    for (int i = 0; i < 4; ++i) {
        LinearForm l = random_form(rng, 4, 3);
        if (l[0] == 0) l[0] = 1;
        ls.push_back(scale(l, Scalar(1 / l[0])));
    }
    Polynomial h = L(ls[0]) * L(ls[1]) - L(ls[2]) * L(ls[3]);
    auto sys = candidate_system(h);
    ASSERT_FALSE(sys.empty());
    for (int i = 0; i < 4; ++i) {
        std::vector<Scalar> a{-ls[i][1], -ls[i][2], -ls[i][3]};
        for (auto& p : sys) EXPECT_EQ(evaluate(p, a), 0);
        EXPECT_TRUE(is_candidate(h, ls[i]));
    }
    // A random tuple is not a zero.
    std::vector<Scalar> a{3, -7, 2};
    bool all_zero = true;
    for (auto& p : sys) all_zero = all_zero && evaluate(p, a) == 0;
    EXPECT_FALSE(all_zero);
}

TEST(Solver, SmallSystems) {
    Polynomial a = X(1, 0);
    auto one = Polynomial::constant(1, 1);
    EXPECT_EQ(solve_candidate_system({a - one}, 1), (std::vector<std::vector<Scalar>>{{1}}));
    EXPECT_EQ(solve_candidate_system({a * a - one, a - one}, 1), (std::vector<std::vector<Scalar>>{{1}}));
    Polynomial b = X(2, 0), c = X(2, 1), one2 = Polynomial::constant(2, 1);
    // b^2 = 4, c = b/2 + 1, b + c = 4 -> (2, 2)
    auto sols = solve_candidate_system({b * b - one2 * 4, c * 2 - b - one2 * 2, b + c - one2 * 4}, 2);
    EXPECT_EQ(sols, (std::vector<std::vector<Scalar>>{{2, 2}}));
    Polynomial u = X(3, 0), v = X(3, 1), w = X(3, 2), one3 = Polynomial::constant(3, 1);
    sols = solve_candidate_system({u * u - one3, v - u * 3, w * w - v * v, w - v}, 3);
    EXPECT_EQ(sols, (std::vector<std::vector<Scalar>>{{-1, -3, -3}, {1, 3, 3}}));
    EXPECT_THROW(solve_candidate_system({b - c}, 2), Error);
}

TEST(Solver, ResultantOfLinearPair) {
    Polynomial x = X(2, 0), y = X(2, 1), one = Polynomial::constant(2, 1);
    // Res_y(y - x, y + x - 2) = 2 - 2x up to sign.
    Polynomial r = resultant(y - x, y + x - one * 2, 1);
    EXPECT_TRUE(r == x * 2 - one * 2 || r == one * 2 - x * 2) << r;
}

namespace {

struct Seeded {
    Polynomial f;
    std::vector<LinearForm> gates;
};

Seeded seeded_rank4(std::uint64_t seed, unsigned M, unsigned g) {
    std::mt19937_64 rng(seed);
    auto form = [&] {
        LinearForm l = random_form(rng, 4, 9);
        if (l[0] == 0) l[0] = 1;
        return l;
    };
    Polynomial T0 = Polynomial::constant(4, 1), T1 = T0, G = T0;
    Seeded s{Polynomial(4), {}};
    for (unsigned i = 0; i < 2 * M; ++i) {
        s.gates.push_back(form());
        (i < M ? T0 : T1) = (i < M ? T0 : T1) * L(s.gates.back());
    }
    for (unsigned i = 0; i < g; ++i) G = G * L(form());
    s.f = G * (T0 * Scalar(2) - T1 * Scalar(7, 3));
    return s;
}

}  // namespace

TEST(Candidates, ContainGateFactorsOnSeededInstances) {
    struct Case {
        std::uint64_t seed;
        unsigned M, g;
    };
    for (Case c : {Case{1, 3, 0}, Case{2, 3, 1}, Case{3, 4, 1}, Case{4, 4, 2}, Case{5, 5, 0}}) {
        Seeded s = seeded_rank4(c.seed, c.M, c.g);
        CandidateSet C = candidates(s.f);
        unsigned d = c.M + c.g;
        EXPECT_EQ(C.source, CandidateSource::ModularSearch);
        EXPECT_LE(C.forms.size(), std::size_t(d * d * d * d + 2 * d));
        for (auto& l : s.gates) EXPECT_TRUE(C.contains(l)) << form_to_string(l);
        Polynomial core = lin_split(s.f).core;
        for (auto& l : C.forms) {
            EXPECT_EQ(l[0], 1);
            EXPECT_TRUE(is_candidate(core, l));
        }
    }
}

TEST(Candidates, DegenerateRanksAreRejected) {
    Polynomial x1 = X(3, 0), x2 = X(3, 1), x3 = X(3, 2);
    Polynomial f = x1 * x2 * x3 - (x1 + x2) * (x2 + x3) * (x1 - x3);
    EXPECT_THROW(candidates(f), Error);
    // A quadratic core in four variables has a positive-dimensional candidate family.
    Seeded s = seeded_rank4(9, 2, 0);
    EXPECT_THROW(candidates(s.f), Error);
    EXPECT_THROW(candidates_by_resultants(s.f), Error);
}

TEST(Candidates, InjectedOracle) {
    CandidateSet C = inject_candidates({F({2, 4, 0, -2}), F({1, 2, 0, -1}), F({0, 1, 1, 1}), F({-3, 0, 3, 0})});
    EXPECT_EQ(C.source, CandidateSource::InjectedTestOracle);
    ASSERT_EQ(C.forms.size(), 2u);
    EXPECT_TRUE(C.contains(F({1, 2, 0, -1})));
    EXPECT_TRUE(C.contains(F({1, 0, -1, 0})));
    EXPECT_STREQ(candidate_source_name(C.source), "injected-test-oracle");
}
