#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sps2/polynomial.hpp"

namespace sps2 {

struct Factor {
    LinearForm form;  // normalized
    unsigned mult = 1;
};

// scale times a product of normalized linear forms, kept in canonical order.
class PiSigmaPoly {
public:
    explicit PiSigmaPoly(std::size_t n = 0, const Scalar& scale = 1) : n_(n), scale_(scale) {}
    // Each form is normalized; the scalar it carried moves into the scale.
    static PiSigmaPoly from_forms(std::size_t n, const std::vector<LinearForm>& forms, const Scalar& scale = 1);

    std::size_t nvars() const { return n_; }
    const Scalar& scale() const { return scale_; }
    void set_scale(const Scalar& s) { scale_ = s; }
    const std::vector<Factor>& factors() const { return factors_; }
    unsigned degree() const;
    bool is_constant() const { return factors_.empty(); }

    void multiply(const LinearForm& l, unsigned mult = 1);
    PiSigmaPoly operator*(const PiSigmaPoly& o) const;
    bool operator==(const PiSigmaPoly& o) const;
    bool operator!=(const PiSigmaPoly& o) const { return !(*this == o); }

    unsigned multiplicity_of(const LinearForm& l) const;
    // Factor-multiset divisibility, scales ignored.
    bool divides(const PiSigmaPoly& o) const;
    // Removes the factors of d; the scale becomes scale()/d.scale(). Throws NonDivisible.
    PiSigmaPoly divide(const PiSigmaPoly& d) const;
    // All factors with multiplicity, each repeated.
    std::vector<LinearForm> forms_with_multiplicity() const;
    std::vector<LinearForm> distinct_forms() const;
    // Same factors, scale 1.
    PiSigmaPoly monic() const;
    // Applies x -> M x to each factor: l(x) becomes l(Mx).
    PiSigmaPoly transform(const Matrix& M) const;

    Polynomial expand() const;
    std::string to_string() const;

private:
    std::size_t n_;
    Scalar scale_;
    std::vector<Factor> factors_;
};

bool form_less(const LinearForm& a, const LinearForm& b);

PiSigmaPoly gcd_pisigma(const PiSigmaPoly& P1, const PiSigmaPoly& P2);

struct Sps2Circuit {
    std::size_t n = 0;
    PiSigmaPoly G;
    Scalar alpha0 = 1, alpha1 = 1;
    PiSigmaPoly T0, T1;  // scale 1

    unsigned degree() const { return G.degree() + T0.degree(); }
    unsigned gate_degree() const { return T0.degree(); }
    Polynomial expand() const;
    // gate i as the product alpha_i G T_i
    PiSigmaPoly gate(int i) const;
};

struct Decomposition {
    bool iscorrect = false;
    Polynomial f;
    PiSigmaPoly M0, M1;
    std::string path;        // which case produced the result
    std::string diagnostic;  // reason for failure, if any
};

// Splits M0 + M1 into G = gcd(M0, M1) and the coprime gates.
Sps2Circuit circuit_from_gates(const PiSigmaPoly& M0, const PiSigmaPoly& M1);
// Folds gcd(T0, T1) into G and moves all scales into alpha0, alpha1.
Sps2Circuit canonical_circuit(const Sps2Circuit& c);

std::size_t simple_rank(const Sps2Circuit& c);
// Throws PolynomialMismatch when the circuits compute different polynomials.
bool verify_equivalence(const Sps2Circuit& c1, const Sps2Circuit& c2);
// Largest t with l^t | p.
unsigned multiplicity(const LinearForm& l, const Polynomial& p);

}  // namespace sps2
