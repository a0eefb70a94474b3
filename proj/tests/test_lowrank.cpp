#include <gtest/gtest.h>

#include <random>

#include "sps2/generator.hpp"
#include "sps2/linear_factor.hpp"
#include "sps2/lowrank.hpp"

using namespace sps2;

namespace {

LinearForm F(std::initializer_list<long> xs) {
    LinearForm l;
    for (long x : xs) l.emplace_back(x);
    return l;
}

Sps2Circuit transformed(const Sps2Circuit& c, const Matrix& Omega) {
    Sps2Circuit t = c;
    t.G = c.G.transform(Omega);
    t.T0 = c.T0.transform(Omega);
    t.T1 = c.T1.transform(Omega);
    return t;
}

// Gate forms of a circuit after a random transform, plus the transformed polynomial.
struct Standardized {
    Sps2Circuit c;
    Polynomial g;
    RandomTransformPair pair;
};

Standardized standardize(const Sps2Circuit& c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RandomTransformPair pair = sample_transform(c.n, transform_bound(c.degree(), 0), rng);
    Sps2Circuit t = transformed(c, pair.Omega);
    return {t, t.expand(), pair};
}

std::vector<LinearForm> gate_forms(const Sps2Circuit& c) {
    auto a = c.T0.distinct_forms(), b = c.T1.distinct_forms(), g = c.G.distinct_forms();
    a.insert(a.end(), b.begin(), b.end());
    a.insert(a.end(), g.begin(), g.end());
    return a;
}

Polynomial dense_random(std::mt19937_64& rng, std::size_t n, unsigned d) {
    std::uniform_int_distribution<long> c(-20, 20);
    std::vector<Polynomial> vars;
    for (std::size_t i = 0; i < n; ++i) vars.push_back(Polynomial::variable(n, i));
    // All monomials of degree d via repeated multiplication by the sum of variables with random weights.
    Polynomial s(n);
    for (std::size_t i = 0; i < n; ++i) s += vars[i] * Scalar(c(rng) | 1);
    Polynomial base = s.pow(d), p = base;
    for (const auto& [e, v] : base.terms()) p.add_term(e, Scalar(c(rng)));
    return p;
}

bool in_forms(const LinearForm& l, const std::vector<LinearForm>& forms) {
    for (const auto& f : forms)
        if (are_proportional(l, f)) return true;
    return false;
}

}  // namespace

TEST(LowRankConfig, PresetsAndBounds) {
    LowRankConfig desk = LowRankConfig::desk();
    EXPECT_EQ(desk.r, 3u);
    EXPECT_EQ(desk.k, 2u);
    EXPECT_EQ(desk.s_threshold, 3u);
    EXPECT_EQ(desk.max_resamples, 16u);
    LowRankConfig pf = LowRankConfig::theoretical();
    EXPECT_EQ(pf.k, 29u);
    EXPECT_EQ(rank_bound_c(4), 48u);
    EXPECT_GT(pf.s_threshold, 48u);
    EXPECT_NO_THROW(validate_config(desk));
    EXPECT_NO_THROW(validate_config(pf));
}

TEST(LowRankConfig, AdmissibleRanges) {
    // (7 - sqrt 37) / 6 = 0.15287...
    EXPECT_TRUE(delta_admissible(Scalar(152, 1000)));
    EXPECT_FALSE(delta_admissible(Scalar(153, 1000)));
    EXPECT_FALSE(delta_admissible(0));
    EXPECT_FALSE(delta_admissible(Scalar(1, 6)));
    LowRankConfig cfg;
    cfg.delta = Scalar(1, 5);
    EXPECT_THROW(validate_config(cfg), Error);
    cfg = LowRankConfig{};
    cfg.theta = Scalar(99, 100);
    EXPECT_THROW(validate_config(cfg), Error);
    cfg.theta = Scalar(1, 100);
    EXPECT_THROW(validate_config(cfg), Error);
}

TEST(LowRankConfig, DetectorFractionValues) {
    Scalar delta(1, 20), theta(1, 2);
    EXPECT_EQ(detector_fraction(delta, theta, true), Scalar(9, 20));
    EXPECT_EQ(detector_fraction(delta, theta, false), Scalar(17, 40));
    EXPECT_TRUE(detector_inequality_holds(delta, theta));
}

TEST(RandomTransform, DeterministicInRangeAndInvertible) {
    mpz_class N = transform_bound(4, 0);
    EXPECT_EQ(N, mpz_class(1) << 16);
    EXPECT_EQ(transform_bound(20, 0), mpz_class(1) << 20);
    EXPECT_EQ(transform_bound(4, 5), mpz_class(32));
    std::mt19937_64 a(9), b(9);
    RandomTransformPair p = sample_transform(4, N, a), q = sample_transform(4, N, b);
    EXPECT_EQ(p.Omega, q.Omega);
    EXPECT_EQ(p.Lambda, q.Lambda);
    EXPECT_NE(determinant(p.Omega), 0);
    for (const auto* M : {&p.Omega, &p.Lambda})
        for (const auto& row : *M)
            for (const auto& x : row) {
                EXPECT_EQ(x.get_den(), 1);
                EXPECT_GE(x, 1);
                EXPECT_LE(x, Scalar(N));
            }
    EXPECT_THROW(sample_transform(1, N, a), Error);
}

TEST(RandomTransform, FormsFollowSubstitution) {
    std::mt19937_64 rng(10);
    RandomTransformPair p = sample_transform(3, mpz_class(50), rng);
    LinearForm l = F({2, -1, 5});
    EXPECT_EQ(substitute_linear(Polynomial::from_form(l), p.Omega), Polynomial::from_form(apply_transform(p.Omega, l)));
}

TEST(CheckAssumptions, Cases) {
    Matrix I = {F({1, 0, 0, 0}), F({0, 1, 0, 0}), F({0, 0, 1, 0}), F({0, 0, 0, 1})};
    RandomTransformPair id{I, I};
    PointSet T = {F({0, 1, 0, 0}), F({1, 1, 1, 1})};
    AssumptionReport rep = check_assumptions(T, id, 1);
    EXPECT_FALSE(rep.ok());
    bool a1 = false;
    for (const auto& v : rep.violations) a1 |= v.rfind("assumption 1", 0) == 0;
    EXPECT_TRUE(a1);

    Matrix singular = I;
    singular[3] = singular[2];
    rep = check_assumptions({F({1, 2, 3, 4})}, {singular, I}, 1);
    ASSERT_FALSE(rep.ok());
    EXPECT_EQ(rep.violations[0].rfind("assumption 0", 0), 0u);

    Sps2Circuit c = generate_circuit(3, 4, 5, 1, RankProfile::Generic);
    std::mt19937_64 rng(11);
    RandomTransformPair pair = sample_transform(4, transform_bound(5, 0), rng);
    rep = check_assumptions(gate_forms(c), pair, 2);
    EXPECT_TRUE(rep.ok()) << rep.violations[0];
    EXPECT_THROW(check_assumptions(T, pair, 4), Error);
}

TEST(EasyCase, RecoversGatesWithOracleCandidates) {
    // T0 lies in x4 = 0 and T1 has factors outside sp(T0).
    std::vector<LinearForm> t0 = {F({1, 2, 0, 0}), F({1, -1, 3, 0}), F({1, 0, -2, 0}), F({1, 1, 1, 0})};
    std::vector<LinearForm> t1 = {F({1, 1, 0, 2}), F({1, -2, 1, 1}), F({1, 3, -1, -1}), F({1, 0, 2, -3})};
    Sps2Circuit src;
    src.n = 4;
    src.G = PiSigmaPoly(4);
    src.T0 = PiSigmaPoly::from_forms(4, t0);
    src.T1 = PiSigmaPoly::from_forms(4, t1);
    src.alpha1 = -2;
    Polynomial f = src.expand();
    std::vector<LinearForm> all = t0;
    all.insert(all.end(), t1.begin(), t1.end());
    Decomposition d = easy_case(f, PiSigmaPoly(4), PiSigmaPoly(4), inject_candidates(all));
    ASSERT_TRUE(d.iscorrect) << d.diagnostic;
    EXPECT_EQ(d.path, "easy");
    EXPECT_EQ(d.M0.expand() + d.M1.expand(), f);
    EXPECT_TRUE(verify_equivalence(src, circuit_from_gates(d.M0, d.M1)));
}

TEST(EasyCase, RejectsDenseRandomPolynomial) {
    std::mt19937_64 rng(12);
    Polynomial f = dense_random(rng, 4, 4);
    std::vector<LinearForm> C = {F({1, 0, 0, 0}), F({1, 1, 0, 0}), F({1, 0, 1, 0}), F({1, 0, 0, 1}), F({1, 2, 3, 4})};
    Decomposition d = easy_case(f, PiSigmaPoly(4), PiSigmaPoly(4), inject_candidates(C));
    EXPECT_FALSE(d.iscorrect);
    EXPECT_FALSE(d.diagnostic.empty());
}

TEST(MediumCase, RecoversTwoDimensionGapInstances) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Sps2Circuit c = generate_circuit(seed, 4, 4, 0, RankProfile::MediumCase);
        Standardized s = standardize(c, seed);
        CandidateSet C = candidates(s.g);
        Decomposition d = medium_case(s.g, C);
        ASSERT_TRUE(d.iscorrect) << d.diagnostic;
        EXPECT_EQ(d.path, "medium");
        EXPECT_EQ(d.M0.expand() + d.M1.expand(), s.g);
        EXPECT_TRUE(verify_equivalence(s.c, circuit_from_gates(d.M0, d.M1)));
    }
}

TEST(MediumCase, FallsThroughWhenGateSumHasLinearFactor) {
    // Easy-profile instances: T0 - T1 is divisible by the shift form, so Lin(f) is larger than G.
    Sps2Circuit c = generate_circuit(1, 4, 5, 0, RankProfile::EasyCase);
    Standardized s = standardize(c, 1);
    EXPECT_FALSE(lin_split(s.g).lin.is_constant());
    Decomposition d = medium_case(s.g, candidates(s.g));
    EXPECT_FALSE(d.iscorrect);
}

TEST(IdentifyFactors, TrivialCases) {
    std::vector<LinearForm> t0 = {F({1, 2, 0, 0}), F({1, -1, 3, 0}), F({1, 0, -2, 1})};
    std::vector<LinearForm> t1 = {F({1, 1, 0, 2}), F({1, -2, 1, 1}), F({1, 3, -1, -1})};
    Polynomial g = PiSigmaPoly::from_forms(4, t0).expand() + PiSigmaPoly::from_forms(4, t1).expand();
    ASSERT_TRUE(lin_split(g).lin.is_constant());
    EXPECT_TRUE(identify_factors(g, inject_candidates(t0), {t0[0]}).is_constant());
    EXPECT_THROW(identify_factors(g, inject_candidates(t0), {t0[0], scale(t0[0], 2)}), Error);
}

TEST(DetectorMachinery, IdentifyAndOverestimateOnHardInstances) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Sps2Circuit c = generate_circuit(seed, 4, 5, 1, RankProfile::HardCase);
        Standardized s = standardize(c, seed);
        CandidateSet C = candidates(s.g);
        for (int i = 0; i < 2; ++i) {
            const PiSigmaPoly& Ti = i == 0 ? s.c.T0 : s.c.T1;
            const PiSigmaPoly& To = i == 0 ? s.c.T1 : s.c.T0;
            auto Li = Ti.distinct_forms(), Lo = To.distinct_forms();
            auto all = gate_forms(s.c);
            std::vector<LinearForm> S = {Li[0]};
            PiSigmaPoly I = identify_factors(s.g, C, S);
            EXPECT_TRUE(I.divides(s.c.G));
            for (const auto& l : I.distinct_forms()) EXPECT_FALSE(in_forms(l, Li) || in_forms(l, Lo));
            Polynomial fstar = divide_exact(s.g, I.expand());
            DetectorOverestimate det = overestimate_detector(fstar, S, C);
            // D: forms d of T_i whose flat sp(S, d) meets no other gate form.
            for (std::size_t j = 1; j < Li.size(); ++j) {
                bool elementary = true;
                for (const auto& l : all)
                    if (!are_proportional(l, Li[0]) && !are_proportional(l, Li[j]) && in_span({Li[0], Li[j]}, l))
                        elementary = false;
                if (elementary) EXPECT_TRUE(in_forms(Li[j], det.X)) << "seed " << seed;
            }
            for (const auto& x : det.X) EXPECT_TRUE(in_forms(x, Li)) << "seed " << seed;
            for (const auto& l : Lo) EXPECT_FALSE(in_forms(l, det.X));
        }
    }
}

TEST(DetectorMachinery, EmptyCandidateSet) {
    Polynomial f = PiSigmaPoly::from_forms(3, {F({1, 1, 0}), F({1, 0, 1})}).expand();
    EXPECT_TRUE(overestimate_detector(f, {F({1, 0, 0})}, CandidateSet{}).X.empty());
}

TEST(HardCase, RecoversGatesAndKeepsKnownPartDividingGate) {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        Sps2Circuit c = generate_circuit(seed, 4, 4, 0, RankProfile::HardCase);
        Standardized s = standardize(c, seed);
        CandidateSet C = candidates(s.g);
        int events = 0;
        HardCaseHook hook = [&](const HardCaseEvent& ev) {
            ++events;
            PiSigmaPoly Gs = s.c.G.divide(ev.I);
            EXPECT_TRUE(ev.K.divides(Gs * s.c.T0) || ev.K.divides(Gs * s.c.T1));
        };
        Decomposition d = hard_case(s.g, C, s.pair.Lambda, LowRankConfig::desk(), hook);
        ASSERT_TRUE(d.iscorrect) << d.diagnostic;
        EXPECT_EQ(d.path, "hard");
        EXPECT_GT(events, 0);
        EXPECT_EQ(d.M0.expand() + d.M1.expand(), s.g);
        EXPECT_TRUE(verify_equivalence(s.c, circuit_from_gates(d.M0, d.M1)));
    }
}

TEST(HardCase, RejectsDenseRandomPolynomial) {
    std::mt19937_64 rng(13);
    Polynomial f = dense_random(rng, 4, 4);
    std::vector<LinearForm> C = {F({1, 0, 0, 0}), F({1, 1, 0, 0}), F({1, 0, 1, 0}), F({1, 0, 0, 1}), F({1, 2, 3, 4})};
    RandomTransformPair pair = sample_transform(4, mpz_class(1000), rng);
    EXPECT_FALSE(hard_case(f, inject_candidates(C), pair.Lambda, LowRankConfig::desk()).iscorrect);
}

TEST(ReconstructLowRank, ProfilesTakeTheirPath) {
    struct Case {
        RankProfile profile;
        unsigned d, degG;
        const char* path;
    };
    for (const Case& k : {Case{RankProfile::MediumCase, 4, 1, "medium"}, Case{RankProfile::EasyCase, 5, 0, "easy"},
                          Case{RankProfile::HardCase, 4, 0, "hard"}}) {
        Sps2Circuit c = generate_circuit(7, 4, k.d, k.degG, k.profile);
        std::mt19937_64 rng(7);
        Decomposition d = reconstruct_low_rank(c.expand(), LowRankConfig::desk(), rng);
        ASSERT_TRUE(d.iscorrect) << profile_name(k.profile) << ": " << d.diagnostic;
        EXPECT_EQ(d.path, k.path);
        EXPECT_EQ(d.M0.expand() + d.M1.expand(), c.expand());
        EXPECT_TRUE(verify_equivalence(c, circuit_from_gates(d.M0, d.M1)));
    }
}

TEST(ReconstructLowRank, DeterministicUnderSeed) {
    Sps2Circuit c = generate_circuit(8, 4, 4, 0, RankProfile::Generic);
    std::mt19937_64 a(5), b(5);
    Decomposition x = reconstruct_low_rank(c.expand(), LowRankConfig::desk(), a);
    Decomposition y = reconstruct_low_rank(c.expand(), LowRankConfig::desk(), b);
    ASSERT_TRUE(x.iscorrect);
    EXPECT_EQ(x.M0, y.M0);
    EXPECT_EQ(x.M1, y.M1);
}

TEST(ReconstructLowRank, FailsHonestly) {
    std::mt19937_64 rng(14);
    Polynomial f = dense_random(rng, 4, 4);
    Decomposition d = reconstruct_low_rank(f, LowRankConfig::desk(), rng);
    EXPECT_FALSE(d.iscorrect);
    EXPECT_FALSE(d.diagnostic.empty());
    // Not homogeneous.
    Polynomial g = Polynomial::variable(4, 0) + Polynomial::constant(4, 1);
    EXPECT_FALSE(reconstruct_low_rank(g, LowRankConfig::desk(), rng).iscorrect);
}

TEST(Generator, DeterministicAndValidated) {
    Sps2Circuit a = generate_circuit(7, 5, 4, 1, RankProfile::Generic);
    Sps2Circuit b = generate_circuit(7, 5, 4, 1, RankProfile::Generic);
    EXPECT_EQ(a.expand(), b.expand());
    EXPECT_EQ(a.T0, b.T0);
    EXPECT_EQ(a.degree(), 4u);
    EXPECT_EQ(a.G.degree(), 1u);
    EXPECT_TRUE(gcd_pisigma(a.T0, a.T1).is_constant());
    EXPECT_THROW(generate_circuit(7, 5, 4, 4, RankProfile::Generic), Error);
    EXPECT_THROW(generate_circuit(7, 3, 5, 0, RankProfile::HardCase), Error);
    EXPECT_THROW(generate_circuit(7, 4, 4, 0, RankProfile::EasyCase), Error);
    EXPECT_EQ(parse_profile("medium-case"), RankProfile::MediumCase);
    EXPECT_STREQ(profile_name(RankProfile::HardCase), "hard-case");
    EXPECT_THROW(parse_profile("easy"), Error);
}

TEST(Generator, ProfilesMeetTheirConditions) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (std::size_t n : {4u, 6u}) {
            Sps2Circuit m = generate_circuit(seed, n, 4, 0, RankProfile::MediumCase);
            auto t0 = m.T0.distinct_forms(), t1 = m.T1.distinct_forms();
            auto both = t0;
            both.insert(both.end(), t1.begin(), t1.end());
            bool gap0 = span_dim(both) - span_dim(t0) >= 2, gap1 = span_dim(both) - span_dim(t1) >= 2;
            EXPECT_TRUE(gap0 || gap1);
            EXPECT_EQ(span_dim(both), 4u);

            Sps2Circuit e = generate_circuit(seed, n, 6, 1, RankProfile::EasyCase);
            EXPECT_EQ(span_dim(e.T0.distinct_forms()), 3u);
            EXPECT_EQ(e.degree(), 6u);

            Sps2Circuit h = generate_circuit(seed, n, 5, 1, RankProfile::HardCase);
            EXPECT_EQ(span_dim(h.T0.distinct_forms()), 4u);
            EXPECT_EQ(span_dim(h.T1.distinct_forms()), 4u);
            Polynomial g = h.T0.expand() * h.alpha0 + h.T1.expand() * h.alpha1;
            EXPECT_TRUE(lin_split(g).lin.is_constant());
        }
    }
}
