#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sps2/brill.hpp"
#include "sps2/reconstructor.hpp"

namespace sps2 {

struct LowRankConfig {
    std::size_t r = 3;            // slice rank of the lifting stage
    std::size_t k = 2;            // detector size, capped at rank - 3 inside hard_case
    Scalar delta{1, 20};
    Scalar theta{1, 2};
    unsigned N_bits = 0;          // 0 selects N = max(2^d, 2^16)
    std::size_t s_threshold = 3;
    unsigned max_resamples = 16;  // fresh (Omega, Lambda) draws on detectable assumption failures
    std::size_t max_completions = 1;  // basis completions tried per detector guess
    CandidateOptions candidates;

    static LowRankConfig desk();
    // Constants from the uniqueness and detector bounds: c(3) + 2 = 29, c(4) = 48.
    static LowRankConfig theoretical();
};

// c(m) = 3 m^2.
std::size_t rank_bound_c(std::size_t m);
// Throws InvalidArgument when delta or theta leave their admissible ranges.
void validate_config(const LowRankConfig& cfg);
// delta < (7 - sqrt 37) / 6, decided exactly.
bool delta_admissible(const Scalar& delta);
bool theta_admissible(const Scalar& delta, const Scalar& theta);
// v(delta, theta) for the two size regimes of the smaller gate.
Scalar detector_fraction(const Scalar& delta, const Scalar& theta, bool small_gate);
// (2 - v) / v <= (1 - delta) / delta for both regimes.
bool detector_inequality_holds(const Scalar& delta, const Scalar& theta);

struct RandomTransformPair {
    Matrix Omega, Lambda;
};

// Forms transform as l -> M^T l, so that l(x) becomes l(M x).
LinearForm apply_transform(const Matrix& M, const LinearForm& l);
mpz_class transform_bound(unsigned d, unsigned N_bits);
RandomTransformPair sample_transform(std::size_t r, const mpz_class& N, std::mt19937_64& rng);

struct AssumptionReport {
    std::vector<std::string> violations;
    bool skipped_subsets = false;  // too many LI subsets to enumerate exhaustively
    bool ok() const { return violations.empty(); }
};
AssumptionReport check_assumptions(const PointSet& T, const RandomTransformPair& pair, std::size_t k);

Decomposition easy_case(const Polynomial& f, const PiSigmaPoly& K0, const PiSigmaPoly& K1, const CandidateSet& C);
Decomposition medium_case(const Polynomial& f, const CandidateSet& C);

PiSigmaPoly identify_factors(const Polynomial& f, const CandidateSet& C, const std::vector<LinearForm>& S);

struct DetectorOverestimate {
    std::vector<LinearForm> S, X;
};
DetectorOverestimate overestimate_detector(const Polynomial& fstar, const std::vector<LinearForm>& S,
                                           const CandidateSet& C);

// Observes every update of the hard case's known part; used by instrumented tests.
struct HardCaseEvent {
    int i;                         // gate index of the detector
    std::vector<LinearForm> S0;
    PiSigmaPoly I, K;              // identified factors and the updated known part of gate 1 - i
};
using HardCaseHook = std::function<void(const HardCaseEvent&)>;

Decomposition hard_case(const Polynomial& f, const CandidateSet& C, const Matrix& Lambda, const LowRankConfig& cfg,
                        const HardCaseHook& hook = {});

// Tries medium, easy and hard in that order on f(Omega x) and maps the result back.
Decomposition reconstruct_low_rank(const Polynomial& f, const LowRankConfig& cfg, std::mt19937_64& rng);

}  // namespace sps2
