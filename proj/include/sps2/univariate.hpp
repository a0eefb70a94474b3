#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sps2/core_algebra.hpp"

namespace sps2 {

// Dense univariate polynomials, coefficient of t^i at index i.
using QPoly = std::vector<Scalar>;
using ZPoly = std::vector<mpz_class>;

void trim(QPoly& p);
int qdeg(const QPoly& p);
QPoly qmul(const QPoly& a, const QPoly& b);
QPoly qsub(const QPoly& a, const QPoly& b);
QPoly qderiv(const QPoly& p);
// Quotient and remainder over Q.
std::pair<QPoly, QPoly> qdivmod(const QPoly& a, const QPoly& b);
QPoly qgcd(QPoly a, QPoly b);
Scalar qeval(const QPoly& p, const Scalar& t);
// Primitive integer polynomial with the same roots.
ZPoly primitive_part(const QPoly& p);

struct RootMult {
    Scalar root;
    unsigned mult;
};

// All rational roots with multiplicities; p must be nonzero.
std::vector<RootMult> rational_roots(const QPoly& p);

// Arithmetic modulo a word-size prime.
namespace nmod {

using u64 = std::uint64_t;
using Poly = std::vector<u64>;

u64 mulmod(u64 a, u64 b, u64 p);
u64 powmod(u64 a, u64 e, u64 p);
u64 invmod(u64 a, u64 p);
void trim(Poly& f);
Poly mul(const Poly& a, const Poly& b, u64 p);
Poly rem(Poly a, const Poly& b, u64 p);
Poly gcd(Poly a, Poly b, u64 p);
Poly divide(const Poly& a, const Poly& b, u64 p);
Poly derivative(const Poly& f, u64 p);
// x^e mod f.
Poly powx(u64 e, const Poly& f, u64 p);
// Distinct roots of f in F_p (f nonzero).
std::vector<u64> roots(const Poly& f, u64 p, std::uint64_t seed);
// True iff f splits into linear factors over F_p, counting multiplicity.
bool splits(Poly f, u64 p);
u64 reduce(const mpz_class& z, u64 p);
// Reduces a rational; returns false if p divides the denominator.
bool reduce(const Scalar& q, u64 p, u64& out);
bool is_prime(u64 n);

}  // namespace nmod

// a/b with |a|,|b| <= sqrt(m/2) and a = b u mod m, if one exists.
bool rational_reconstruct(const mpz_class& u, const mpz_class& m, Scalar& out);

}  // namespace sps2
