#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <optional>
#include <string>
#include <vector>

#include "sps2/core_algebra.hpp"

namespace sps2 {

using Exponent = std::vector<std::uint16_t>;

// Graded lexicographic order: higher total degree first, then lex with x1 largest.
struct GrlexGreater {
    bool operator()(const Exponent& a, const Exponent& b) const;
};

unsigned total_degree(const Exponent& e);

class Polynomial {
public:
    using TermMap = std::map<Exponent, Scalar, GrlexGreater>;

    explicit Polynomial(std::size_t n = 0) : n_(n) {}
    static Polynomial constant(std::size_t n, const Scalar& c);
    static Polynomial variable(std::size_t n, std::size_t i);
    static Polynomial from_form(const LinearForm& l);

    std::size_t nvars() const { return n_; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    // -1 for the zero polynomial.
    int degree() const;
    bool is_homogeneous() const;
    bool is_constant() const { return degree() <= 0; }
    Scalar coeff(const Exponent& e) const;
    // Leading term under grlex; precondition: nonzero.
    const std::pair<const Exponent, Scalar>& leading() const { return *terms_.begin(); }

    void add_term(const Exponent& e, const Scalar& c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const Scalar& c) const;
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }
    Polynomial pow(unsigned k) const;

    // One line per term: "num/den : e1 ... en".
    std::string to_text() const;
    static Polynomial from_text(const std::string& text, std::size_t n_hint = 0);
    std::string to_string() const;

private:
    void check(const Polynomial& o) const;
    std::size_t n_;
    TermMap terms_;
};

std::ostream& operator<<(std::ostream& os, const Polynomial& p);

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
// Throws NonDivisible when q does not divide p.
Polynomial divide_exact(const Polynomial& p, const Polynomial& q);
std::optional<Polynomial> try_divide(const Polynomial& p, const Polynomial& q);

Scalar evaluate(const Polynomial& p, const std::vector<Scalar>& point);
// Replaces x_i by the form whose coefficients are row i of M (M may be n x m).
Polynomial substitute_linear(const Polynomial& p, const Matrix& M);
// Replaces x_i by an arbitrary polynomial subs[i].
Polynomial substitute(const Polynomial& p, const std::vector<Polynomial>& subs);
// Adds a trailing variable Z.
Polynomial homogenize(const Polynomial& p);
// Sets the last variable to 1 and drops it.
Polynomial dehomogenize(const Polynomial& p);
Polynomial derivative(const Polynomial& p, std::size_t i);
// Homogeneous component of the given degree.
Polynomial homogeneous_part(const Polynomial& p, unsigned deg);
// Places p's variables at offset..offset+n-1 of an m-variable ring.
Polynomial embed(const Polynomial& p, std::size_t m, std::size_t offset);
// Primitive-part style rescaling: makes the leading coefficient 1.
Polynomial monic(const Polynomial& p);
// Restricts to the subspace spanned by the given vectors: y -> p(sum_j y_j u_j).
Polynomial restrict_to(const Polynomial& p, const std::vector<LinearForm>& basis);

}  // namespace sps2
