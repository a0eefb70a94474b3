#include <gtest/gtest.h>

#include <random>

#include "sps2/reconstructor.hpp"

using namespace sps2;

namespace {

LinearForm F(std::initializer_list<long> xs) {
    LinearForm l;
    for (long x : xs) l.emplace_back(x);
    return l;
}

LinearForm random_form(std::mt19937_64& rng, std::size_t n, long bound) {
    std::uniform_int_distribution<long> c(-bound, bound);
    LinearForm l(n);
    do {
        for (auto& x : l) x = c(rng);
    } while (is_zero(l));
    return l;
}

BasisDecomposition random_split(std::mt19937_64& rng) {
    // r = 5 with |S0| = 2, |S1| = 1, |S2| = 2.
    std::vector<LinearForm> basis;
    do {
        basis.clear();
        for (int i = 0; i < 5; ++i) basis.push_back(random_form(rng, 5, 3));
    } while (!linearly_independent(basis));
    return make_split_basis(basis, {0, 1}, {2}, {3, 4});
}

LinearForm in_block(std::mt19937_64& rng, const BasisDecomposition& dec, const std::string& W) {
    LinearForm c(dec.dim(), 0);
    std::uniform_int_distribution<long> v(-4, 4);
    for (auto j : dec.block_indices(W)) c[j] = v(rng);
    return dec.from_coordinates(c);
}

struct Instance {
    PiSigmaPoly Q, P;
};

// Q = P R with pi_W0'(P) a power of one form. Every factor of R either lies in W0 + W1 or shares its
// W2 direction with another factor of R, so P is the only reconstructor of Q.
Instance reconstructor_instance(std::mt19937_64& rng, const BasisDecomposition& dec, unsigned t, unsigned extra) {
    std::size_t n = dec.dim();
    LinearForm p;
    do {
        p = add(in_block(rng, dec, "W1"), in_block(rng, dec, "W2"));
    } while (is_zero(project(p, dec, "W2")) || is_zero(project(p, dec, "W1")));
    std::vector<LinearForm> Pf, Rf;
    std::uniform_int_distribution<long> beta(1, 5);
    for (unsigned j = 0; j < t; ++j) Pf.push_back(add(scale(p, beta(rng)), in_block(rng, dec, "W0")));
    while (Rf.size() < extra) {
        if (extra - Rf.size() == 1 || rng() % 2 == 0) {
            LinearForm l0 = in_block(rng, dec, "W0"), l1 = in_block(rng, dec, "W1");
            if (!is_zero(l0) && !is_zero(l1)) Rf.push_back(add(l0, l1));
            continue;
        }
        LinearForm w2 = in_block(rng, dec, "W2");
        if (is_zero(w2) || are_proportional(w2, project(p, dec, "W2"))) continue;
        LinearForm a = add(w2, add(in_block(rng, dec, "W0"), in_block(rng, dec, "W1")));
        LinearForm b = add(scale(w2, beta(rng)), add(in_block(rng, dec, "W0"), in_block(rng, dec, "W1")));
        if (are_proportional(project(a, dec, "W0'"), project(b, dec, "W0'"))) continue;
        Rf.push_back(a);
        Rf.push_back(b);
    }
    PiSigmaPoly P = PiSigmaPoly::from_forms(n, Pf).monic();
    PiSigmaPoly R = PiSigmaPoly::from_forms(n, Rf).monic();
    return {P * R, P};
}

}  // namespace

TEST(ReconstructLinear, WorkedExample) {
    BasisDecomposition dec = make_split_basis({F({1, 0, 0}), F({0, 1, 0}), F({0, 0, 1})}, {0}, {1}, {2});
    EXPECT_EQ(reconstruct_linear(F({0, 1, 1}), F({1, 0, 1}), dec), F({1, 1, 1}));
    // Already in W2.
    EXPECT_EQ(reconstruct_linear(F({0, 0, 3}), F({0, 0, 3}), dec), F({0, 0, 1}));
    EXPECT_THROW(reconstruct_linear(F({0, 1, 0}), F({1, 0, 0}), dec), Error);
}

TEST(ReconstructLinear, RoundTripAndScaleInvariance) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        BasisDecomposition dec = random_split(rng);
        LinearForm L;
        do L = random_form(rng, 5, 6);
        while (is_zero(project(L, dec, "W2")));
        LinearForm L0 = project(L, dec, "W0'"), L1 = project(L, dec, "W1'");
        LinearForm got = reconstruct_linear(L0, L1, dec);
        EXPECT_TRUE(are_proportional(got, L));
        LinearForm again = reconstruct_linear(scale(L0, Scalar(-3, 7)), scale(L1, 5), dec);
        EXPECT_TRUE(are_proportional(again, got));
    }
}

TEST(ReconstructPiSigma, Examples) {
    std::mt19937_64 rng(2);
    BasisDecomposition dec = random_split(rng);
    Instance in = reconstructor_instance(rng, dec, 3, 0);
    auto P0 = project_pisigma(in.P, dec, "W0'"), P1 = project_pisigma(in.P, dec, "W1'");
    ASSERT_TRUE(P0 && P1);
    ASSERT_EQ(P0->factors().size(), 1u);
    EXPECT_EQ(reconstruct_pisigma(*P0, *P1, dec), in.P);
    // t = 1 reduces to the linear case.
    PiSigmaPoly one(5), d(5);
    one.multiply(P0->factors()[0].form);
    d.multiply(P1->forms_with_multiplicity()[0]);
    PiSigmaPoly r = reconstruct_pisigma(one, d, dec);
    EXPECT_EQ(r.degree(), 1u);
    EXPECT_THROW(reconstruct_pisigma(one, *P1, dec), Error);
    // A d_j inside W1 has no W2 component.
    PiSigmaPoly bad(5);
    bad.multiply(in_block(rng, dec, "W0"));
    EXPECT_THROW(reconstruct_pisigma(one, bad, dec), Error);
}

TEST(RunReconstructor, CompletenessOnSeededInstances) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        BasisDecomposition dec = random_split(rng);
        Instance in = reconstructor_instance(rng, dec, 1 + t % 3, 2 + t % 3);
        auto Q0 = project_pisigma(in.Q, dec, "W0'"), Q1 = project_pisigma(in.Q, dec, "W1'");
        ASSERT_TRUE(Q0 && Q1);
        EXPECT_EQ(run_reconstructor(*Q0, *Q1, dec), in.P) << in.Q.to_string();
    }
}

TEST(RunReconstructor, ExactRecoveryWhenUnique) {
    std::mt19937_64 rng(4);
    int exact = 0;
    for (int t = 0; t < 100; ++t) {
        BasisDecomposition dec = random_split(rng);
        Instance in = reconstructor_instance(rng, dec, 2, 0);
        auto Q0 = project_pisigma(in.Q, dec, "W0'"), Q1 = project_pisigma(in.Q, dec, "W1'");
        ASSERT_TRUE(Q0 && Q1);
        PiSigmaPoly got = run_reconstructor(*Q0, *Q1, dec);
        exact += got == in.P;
    }
    EXPECT_EQ(exact, 100);
}

TEST(RunReconstructor, CollapsingFactorsGiveOne) {
    BasisDecomposition dec = make_split_basis({F({1, 0, 0}), F({0, 1, 0}), F({0, 0, 1})}, {0}, {1}, {2});
    // Every factor of Q0 projects into the single W2 direction, so the gcd test fails for each.
    PiSigmaPoly Q0 = PiSigmaPoly::from_forms(3, {F({0, 1, 1}), F({0, 2, 1})});
    PiSigmaPoly Q1 = PiSigmaPoly::from_forms(3, {F({1, 0, 1}), F({2, 0, 1})});
    EXPECT_TRUE(run_reconstructor(Q0, Q1, dec).is_constant());
}

TEST(RunReconstructor, SoundOnRandomProducts) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 500; ++t) {
        BasisDecomposition dec = random_split(rng);
        std::vector<LinearForm> forms;
        for (int k = 0; k < 4; ++k) forms.push_back(random_form(rng, 5, 3));
        PiSigmaPoly Q = PiSigmaPoly::from_forms(5, forms).monic();
        auto Q0 = project_pisigma(Q, dec, "W0'"), Q1 = project_pisigma(Q, dec, "W1'");
        if (!Q0 || !Q1) continue;
        PiSigmaPoly got = run_reconstructor(*Q0, *Q1, dec);
        EXPECT_TRUE(got.is_constant() || got.divides(Q)) << got.to_string() << " vs " << Q.to_string();
    }
}

TEST(RunReconstructor, IndependencePreservedUnderW1Projection) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 30; ++t) {
        BasisDecomposition dec = random_split(rng);
        Instance in = reconstructor_instance(rng, dec, 3, 0);
        auto fs = in.P.distinct_forms();
        for (std::size_t a = 0; a < fs.size(); ++a)
            for (std::size_t b = a + 1; b < fs.size(); ++b)
                EXPECT_EQ(linearly_independent({fs[a], fs[b]}),
                          linearly_independent({project(fs[a], dec, "W1'"), project(fs[b], dec, "W1'")}));
    }
}
