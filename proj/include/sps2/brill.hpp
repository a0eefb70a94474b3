#pragma once

#include <cstdint>
#include <vector>

#include "sps2/pisigma.hpp"

namespace sps2 {

// Bihomogeneous form in x = (x_1..x_r) followed by y = (y_1..y_r).
struct PolarForm {
    Polynomial poly;
    std::size_t r = 0;
    unsigned k = 0;
    unsigned d = 0;
};

// Form in blocks x, y, z of r variables each, followed by any parameters.
struct BrillForm {
    Polynomial poly;
    std::size_t r = 0;
};

enum class CandidateSource { BrillSystem, ModularSearch, InjectedTestOracle };
const char* candidate_source_name(CandidateSource s);

struct CandidateSet {
    std::vector<LinearForm> forms;  // x_1 coefficient 1, no duplicates
    CandidateSource source = CandidateSource::ModularSearch;
    bool contains(const LinearForm& l) const;
};

PolarForm polar(const Polynomial& f, unsigned k);
Polynomial young_product(const Polynomial& f, const Polynomial& g);

// Symbolic expansion; throws SizeLimit when the estimated expansion is too large.
BrillForm brill_form(const Polynomial& f, std::size_t max_terms = 200000);
// Same construction treating the last n_params variables of f as coefficients.
BrillForm brill_form_with_params(const Polynomial& f, std::size_t n_params, std::size_t max_terms = 200000);

// Exact value of B_f at one point (x, y, z).
Scalar brill_value(const Polynomial& f, const LinearForm& x, const LinearForm& y, const LinearForm& z);
// B_f == 0, decided by exact evaluation at random points.
bool splits_into_linear_forms(const Polynomial& f, std::uint64_t seed = 11, int trials = 3);

// Polynomials in a_2..a_r whose common zeros are the candidate tuples of h.
std::vector<Polynomial> candidate_system(const Polynomial& h, std::size_t max_terms = 200000);
// Rational common zeros of a zero-dimensional system by resultant elimination.
std::vector<std::vector<Scalar>> solve_candidate_system(const std::vector<Polynomial>& sys, std::size_t unknowns);
// Resultant in variable `var`; the result does not involve var.
Polynomial resultant(const Polynomial& p, const Polynomial& q, std::size_t var);

struct CandidateOptions {
    std::uint64_t seed = 1;
    int primes = 2;                      // independent primes whose results are merged
    std::size_t max_survivors = 20000;   // modular survivors before declaring degeneracy
};

// Candidate set of f: forms x_1 - a_2 x_2 - ... - a_r x_r with f/Lin(f) split on their zero set.
CandidateSet candidates(const Polynomial& f, const CandidateOptions& opt = {});
// Candidate set via candidate_system and solve_candidate_system.
CandidateSet candidates_by_resultants(const Polynomial& f);
// Candidate set built from known forms, for testing downstream modules.
CandidateSet inject_candidates(const std::vector<LinearForm>& forms);
// Exact membership test of one standard form.
bool is_candidate(const Polynomial& h, const LinearForm& l);

}  // namespace sps2
