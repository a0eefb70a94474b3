#include <algorithm>
#include <array>
#include <optional>
#include <random>

#include "sps2/brill.hpp"
#include "sps2/linear_factor.hpp"
#include "sps2/univariate.hpp"

namespace sps2 {

namespace {

using u64 = std::uint64_t;

struct SmallRing {
    using T = u64;
    u64 p;
    T zero() const { return 0; }
    T add(T a, T b) const { return (a + b) % p; }
    T sub(T a, T b) const { return (a + p - b) % p; }
    T mul(T a, T b) const { return a * b % p; }
    T from(const mpz_class& z) const { return nmod::reduce(z, p); }
    bool is_zero(T a) const { return a == 0; }
};

struct BigRing {
    using T = mpz_class;
    mpz_class N;
    T zero() const { return 0; }
    T add(const T& a, const T& b) const { T s = a + b; if (s >= N) s -= N; return s; }
    T sub(const T& a, const T& b) const { T s = a - b; if (s < 0) s += N; return s; }
    T mul(const T& a, const T& b) const { T s = a * b; mpz_mod(s.get_mpz_t(), s.get_mpz_t(), N.get_mpz_t()); return s; }
    T from(const mpz_class& z) const { T s; mpz_mod(s.get_mpz_t(), z.get_mpz_t(), N.get_mpz_t()); return s; }
    bool is_zero(const T& a) const { return a == 0; }
};

// Dense ternary form: coefficient of v0^i v1^j v2^(deg-i-j) at idx(i, j).
template <class R>
struct Ternary {
    using T = typename R::T;
    unsigned deg = 0;
    std::vector<T> c;
    static std::size_t size_for(unsigned d) { return (d + 1) * (d + 2) / 2; }
    static std::size_t idx(unsigned d, unsigned i, unsigned j) { return i * (d + 1) - i * (i - 1) / 2 + j; }
    std::size_t idx(unsigned i, unsigned j) const { return idx(deg, i, j); }
    static Ternary zeros(unsigned d, const R& ring) { return {d, std::vector<T>(size_for(d), ring.zero())}; }
    static Ternary linear(const std::array<T, 3>& l) { return {1, {l[2], l[1], l[0]}}; }
};

template <class R>
Ternary<R> tmul(const Ternary<R>& a, const Ternary<R>& b, const R& ring) {
    auto out = Ternary<R>::zeros(a.deg + b.deg, ring);
    for (unsigned i = 0; i <= a.deg; ++i)
        for (unsigned j = 0; i + j <= a.deg; ++j) {
            const auto& x = a.c[a.idx(i, j)];
            if (ring.is_zero(x)) continue;
            for (unsigned k = 0; k <= b.deg; ++k)
                for (unsigned l = 0; k + l <= b.deg; ++l) {
                    auto& t = out.c[out.idx(i + k, j + l)];
                    t = ring.add(t, ring.mul(x, b.c[b.idx(k, l)]));
                }
        }
    return out;
}

template <class R>
Ternary<R> tscale(Ternary<R> a, const typename R::T& s, const R& ring) {
    for (auto& x : a.c) x = ring.mul(x, s);
    return a;
}

// Integer polynomial in four variables, homogeneous.
struct IntForm {
    std::vector<std::pair<std::array<unsigned, 4>, mpz_class>> terms;
    unsigned deg = 0;
};

IntForm integral_primitive(const Polynomial& h) {
    mpz_class den = 1, g = 0;
    for (const auto& [e, c] : h.terms()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
    IntForm out;
    out.deg = static_cast<unsigned>(h.degree());
    for (const auto& [e, c] : h.terms()) {
        mpz_class v = c.get_num() * (den / c.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        out.terms.push_back({{e[0], e[1], e[2], e[3]}, v});
    }
    for (auto& t : out.terms) t.second /= g;
    return out;
}

IntForm d_dx1(const IntForm& h) {
    IntForm out;
    out.deg = h.deg - 1;
    for (const auto& [e, c] : h.terms)
        if (e[0] > 0) out.terms.push_back({{e[0] - 1, e[1], e[2], e[3]}, c * e[0]});
    return out;
}

// h(a . v, v_0, v_1, v_2) as a ternary form.
template <class R>
Ternary<R> substitute_x1(const IntForm& h, const std::array<typename R::T, 3>& a, const R& ring) {
    std::vector<Ternary<R>> pw{Ternary<R>::zeros(0, ring)};
    pw[0].c[0] = ring.from(1);
    auto L = Ternary<R>::linear(a);
    for (unsigned k = 1; k <= h.deg; ++k) pw.push_back(tmul(pw.back(), L, ring));
    auto out = Ternary<R>::zeros(h.deg, ring);
    for (const auto& [e, c] : h.terms) {
        auto cv = ring.from(c);
        if (ring.is_zero(cv)) continue;
        const auto& P = pw[e[0]];
        for (unsigned i = 0; i <= P.deg; ++i)
            for (unsigned j = 0; i + j <= P.deg; ++j) {
                auto& t = out.c[out.idx(i + e[1], j + e[2])];
                t = ring.add(t, ring.mul(cv, P.c[P.idx(i, j)]));
            }
    }
    return out;
}

template <class R>
typename R::T teval(const Ternary<R>& F, const std::array<typename R::T, 3>& pt, const R& ring) {
    auto acc = ring.zero();
    for (unsigned i = 0; i <= F.deg; ++i)
        for (unsigned j = 0; i + j <= F.deg; ++j) {
            auto t = F.c[F.idx(i, j)];
            if (ring.is_zero(t)) continue;
            for (unsigned k = 0; k < i; ++k) t = ring.mul(t, pt[0]);
            for (unsigned k = 0; k < j; ++k) t = ring.mul(t, pt[1]);
            for (unsigned k = 0; k < F.deg - i - j; ++k) t = ring.mul(t, pt[2]);
            acc = ring.add(acc, t);
        }
    return acc;
}

template <class R>
Ternary<R> tderiv(const Ternary<R>& F, int var, const R& ring) {
    auto out = Ternary<R>::zeros(F.deg - 1, ring);
    for (unsigned i = 0; i <= F.deg; ++i)
        for (unsigned j = 0; i + j <= F.deg; ++j) {
            unsigned k = F.deg - i - j;
            unsigned e = var == 0 ? i : var == 1 ? j : k;
            if (e == 0) continue;
            unsigned ni = i - (var == 0), nj = j - (var == 1);
            auto& t = out.c[out.idx(ni, nj)];
            t = ring.add(t, ring.mul(F.c[F.idx(i, j)], ring.from(e)));
        }
    return out;
}

// Binary form u(t) = F(b + t w) modulo p.
nmod::Poly line_poly(const Ternary<SmallRing>& F, const std::array<u64, 3>& b, const std::array<u64, 3>& w, const SmallRing& ring) {
    std::array<nmod::Poly, 3> lin;
    for (int v = 0; v < 3; ++v) lin[v] = {b[v], w[v]};
    std::array<std::vector<nmod::Poly>, 3> pw;
    for (int v = 0; v < 3; ++v) {
        pw[v] = {nmod::Poly{1}};
        for (unsigned k = 1; k <= F.deg; ++k) pw[v].push_back(nmod::mul(pw[v].back(), lin[v], ring.p));
    }
    nmod::Poly u(F.deg + 1, 0);
    for (unsigned i = 0; i <= F.deg; ++i)
        for (unsigned j = 0; i + j <= F.deg; ++j) {
            u64 c = F.c[F.idx(i, j)];
            if (!c) continue;
            nmod::Poly t = nmod::mul(nmod::mul(pw[0][i], pw[1][j], ring.p), pw[2][F.deg - i - j], ring.p);
            for (std::size_t k = 0; k < t.size(); ++k) u[k] = (u[k] + c * t[k]) % ring.p;
        }
    nmod::trim(u);
    return u;
}

struct ModSplit {
    std::vector<std::array<u64, 3>> lines;  // pivot coefficient 1
    std::vector<int> pivot;
    u64 scale = 0;
};

// Splits F into distinct linear forms over F_p, if it does.
std::optional<ModSplit> split_mod_p(const Ternary<SmallRing>& F, const SmallRing& ring, std::mt19937_64& rng) {
    if (std::all_of(F.c.begin(), F.c.end(), [](u64 x) { return x == 0; })) return std::nullopt;
    std::uniform_int_distribution<u64> dist(0, ring.p - 1);
    std::array<Ternary<SmallRing>, 3> grad{tderiv(F, 0, ring), tderiv(F, 1, ring), tderiv(F, 2, ring)};
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::array<u64, 3> b{dist(rng), dist(rng), dist(rng)}, w{dist(rng), dist(rng), dist(rng)};
        nmod::Poly u = line_poly(F, b, w, ring);
        if (u.size() != F.deg + 1) continue;
        nmod::Poly g = nmod::gcd(u, nmod::derivative(u, ring.p), ring.p);
        if (g.size() > 1) continue;
        auto roots = nmod::roots(u, ring.p, rng());
        if (roots.size() < F.deg) return std::nullopt;
        ModSplit out;
        bool ok = true;
        for (u64 rho : roots) {
            std::array<u64, 3> pt;
            for (int v = 0; v < 3; ++v) pt[v] = (b[v] + rho * w[v]) % ring.p;
            std::array<u64, 3> l{teval(grad[0], pt, ring), teval(grad[1], pt, ring), teval(grad[2], pt, ring)};
            int piv = 0;
            while (piv < 3 && l[piv] == 0) ++piv;
            if (piv == 3) {
                ok = false;
                break;
            }
            u64 inv = nmod::invmod(l[piv], ring.p);
            for (auto& x : l) x = x * inv % ring.p;
            out.lines.push_back(l);
            out.pivot.push_back(piv);
        }
        if (!ok) continue;
        auto prod = Ternary<SmallRing>::zeros(0, ring);
        prod.c[0] = 1;
        for (auto& l : out.lines) prod = tmul(prod, Ternary<SmallRing>::linear(l), ring);
        std::size_t k = 0;
        while (k < prod.c.size() && prod.c[k] == 0) ++k;
        if (k == prod.c.size()) return std::nullopt;
        out.scale = F.c[k] * nmod::invmod(prod.c[k], ring.p) % ring.p;
        for (std::size_t i = 0; i < prod.c.size(); ++i)
            if (prod.c[i] * out.scale % ring.p != F.c[i]) return std::nullopt;
        return out;
    }
    return std::nullopt;
}

// Allocation-free arithmetic for polynomials of degree <= 16 over a prime below 2^16.
struct SP {
    int deg = -1;
    std::array<u64, 17> c{};
};

void sp_trim(SP& a) {
    while (a.deg >= 0 && a.c[a.deg] == 0) --a.deg;
}

u64 sp_inv(u64 a, u64 p) { return nmod::invmod(a, p); }

// Remainder of a modulo b (b nonzero).
SP sp_rem(SP a, const SP& b, u64 p) {
    u64 inv = sp_inv(b.c[b.deg], p);
    while (a.deg >= b.deg) {
        u64 f = a.c[a.deg] * inv % p;
        int shift = a.deg - b.deg;
        for (int i = 0; i <= b.deg; ++i) a.c[i + shift] = (a.c[i + shift] + (p - f) * b.c[i]) % p;
        sp_trim(a);
    }
    return a;
}

SP sp_div(SP a, const SP& b, u64 p) {
    SP q;
    q.deg = a.deg - b.deg;
    u64 inv = sp_inv(b.c[b.deg], p);
    while (a.deg >= b.deg) {
        u64 f = a.c[a.deg] * inv % p;
        int shift = a.deg - b.deg;
        q.c[shift] = f;
        for (int i = 0; i <= b.deg; ++i) a.c[i + shift] = (a.c[i + shift] + (p - f) * b.c[i]) % p;
        sp_trim(a);
    }
    return q;
}

SP sp_gcd(SP a, SP b, u64 p) {
    while (b.deg >= 0) {
        SP r = sp_rem(a, b, p);
        a = b;
        b = r;
    }
    return a;
}

// a * b mod monic m, with deg a, deg b < deg m.
SP sp_mulmod(const SP& a, const SP& b, const SP& m, u64 p) {
    SP r;
    if (a.deg < 0 || b.deg < 0) return r;
    std::array<u64, 33> t{};
    for (int i = 0; i <= a.deg; ++i)
        for (int j = 0; j <= b.deg; ++j) t[i + j] += a.c[i] * b.c[j];
    int n = a.deg + b.deg;
    for (int i = 0; i <= n; ++i) t[i] %= p;
    for (int k = n; k >= m.deg; --k) {
        u64 f = t[k];
        if (!f) continue;
        int shift = k - m.deg;
        for (int i = 0; i <= m.deg; ++i) t[i + shift] = (t[i + shift] + (p - f) * m.c[i]) % p;
    }
    r.deg = std::min(n, m.deg - 1);
    for (int i = 0; i <= r.deg; ++i) r.c[i] = t[i];
    sp_trim(r);
    return r;
}

// a * x mod monic m, deg a < deg m.
SP sp_mulx(const SP& a, const SP& m, u64 p) {
    SP r;
    if (a.deg < 0) return r;
    for (int i = a.deg; i >= 0; --i) r.c[i + 1] = a.c[i];
    r.deg = a.deg + 1;
    if (r.deg == m.deg) {
        u64 f = r.c[r.deg];
        for (int i = 0; i < m.deg; ++i) r.c[i] = (r.c[i] + (p - f) * m.c[i]) % p;
        r.c[r.deg] = 0;
        r.deg = m.deg - 1;
        sp_trim(r);
    }
    return r;
}

// True iff u splits into linear factors over F_p (u nonzero).
bool fast_splits(SP u, u64 p) {
    if (u.deg <= 1) return true;
    u64 inv = sp_inv(u.c[u.deg], p);
    for (int i = 0; i <= u.deg; ++i) u.c[i] = u.c[i] * inv % p;
    // x^p mod u by left-to-right binary powering.
    SP r;
    r.deg = 0;
    r.c[0] = 1;
    int top = 63 - __builtin_clzll(p);
    for (int b = top; b >= 0; --b) {
        r = sp_mulmod(r, r, u, p);
        if ((p >> b) & 1) r = sp_mulx(r, u, p);
    }
    if (r.deg < 1) r.deg = 1;
    r.c[1] = (r.c[1] + p - 1) % p;
    sp_trim(r);
    SP g = r.deg < 0 ? u : sp_gcd(u, r, p);
    if (g.deg == u.deg) return true;
    if (g.deg <= 0) return false;
    SP v = sp_div(u, g, p);
    while (v.deg > 0) {
        SP h = sp_gcd(v, g, p);
        if (h.deg <= 0) return false;
        v = sp_div(v, h, p);
    }
    return true;
}

// Plane of (x_2, x_3, x_4)-space spanned by P and Q; h_a restricted to it depends on (a.P, a.Q).
struct Plane {
    std::array<long, 3> P, Q;
};

// Q(x1, t) = h(x1, P + t Q) reduced mod p, indexed [e1][et]; empty if it vanishes mod p.
std::vector<std::vector<u64>> plane_poly(const Polynomial& h, const Plane& pl, const SmallRing& ring) {
    LinearForm e1{1, 0, 0, 0}, P{0, pl.P[0], pl.P[1], pl.P[2]}, Q{0, pl.Q[0], pl.Q[1], pl.Q[2]};
    Polynomial r = restrict_to(h, {e1, P, Q});
    unsigned D = static_cast<unsigned>(h.degree());
    std::vector<std::vector<u64>> out(D + 1, std::vector<u64>(D + 1, 0));
    bool any = false;
    for (const auto& [e, c] : r.terms()) {
        u64 v = ring.from(c.get_num());
        out[e[0]][e[2]] = (out[e[0]][e[2]] + v) % ring.p;
        any = any || v != 0;
    }
    if (!any) return {};
    return out;
}

// Splitting table over (a.P, a.Q) for the restriction of h_a to a plane.
std::vector<char> pair_table(const std::vector<std::vector<u64>>& Q, unsigned D, const SmallRing& ring) {
    const u64 p = ring.p;
    std::vector<std::vector<u64>> binom(D + 1, std::vector<u64>(D + 1, 0));
    for (unsigned n = 0; n <= D; ++n) {
        binom[n][0] = 1;
        for (unsigned k = 1; k <= n; ++k) binom[n][k] = (binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0)) % p;
    }
    std::vector<char> table(p * p, 0);
    std::vector<std::vector<u64>> G(D + 1, std::vector<u64>(D + 1));
    std::vector<u64> apow(D + 1);
    for (u64 ai = 0; ai < p; ++ai) {
        apow[0] = 1;
        for (unsigned k = 1; k <= D; ++k) apow[k] = apow[k - 1] * ai % p;
        // G(y, t) = Q(ai + y, t)
        for (unsigned i = 0; i <= D; ++i)
            for (unsigned j = 0; j <= D; ++j) {
                u64 s = 0;
                for (unsigned e1 = i; e1 <= D; ++e1)
                    if (Q[e1][j]) s = (s + Q[e1][j] * binom[e1][i] % p * apow[e1 - i]) % p;
                G[i][j] = s;
            }
        // u(t) = G(aj t, t)
        for (u64 aj = 0; aj < p; ++aj) {
            SP u;
            u.deg = static_cast<int>(D);
            u64 pw = 1;
            for (unsigned i = 0; i <= D; ++i) {
                for (unsigned j = 0; i + j <= D; ++j)
                    if (G[i][j]) u.c[i + j] = (u.c[i + j] + G[i][j] * pw) % p;
                pw = pw * aj % p;
            }
            sp_trim(u);
            table[ai * p + aj] = u.deg < 0 || fast_splits(u, p);
        }
    }
    return table;
}

// Solves A x = b modulo N using pivots that are units modulo p.
std::optional<std::vector<mpz_class>> solve_mod(std::vector<std::vector<mpz_class>> A, std::vector<mpz_class> b,
                                                const mpz_class& N, u64 p) {
    std::size_t n = A.size();
    BigRing ring{N};
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && mpz_divisible_ui_p(A[piv][col].get_mpz_t(), p)) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), A[col][col].get_mpz_t(), N.get_mpz_t());
        for (std::size_t j = col; j < n; ++j) A[col][j] = ring.mul(A[col][j], inv);
        b[col] = ring.mul(b[col], inv);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || A[i][col] == 0) continue;
            mpz_class f = A[i][col];
            for (std::size_t j = col; j < n; ++j) A[i][j] = ring.sub(A[i][j], ring.mul(f, A[col][j]));
            b[i] = ring.sub(b[i], ring.mul(f, b[col]));
        }
    }
    return b;
}

// Newton lifting of a modular candidate to a rational tuple.
class Lifter {
public:
    Lifter(const IntForm& h, const IntForm& h1, const Polynomial& core, u64 p) : h_(h), h1_(h1), core_(core), p_(p) {}

    std::optional<LinearForm> lift(const std::array<u64, 3>& a, const ModSplit& s) {
        D_ = h_.deg;
        pivot_ = s.pivot;
        // Unknowns: a (3), two free coefficients per line, scale.
        std::vector<mpz_class> u;
        for (auto x : a) u.push_back(x);
        for (std::size_t j = 0; j < s.lines.size(); ++j)
            for (int v = 0; v < 3; ++v)
                if (v != pivot_[j]) u.push_back(s.lines[j][v]);
        u.push_back(s.scale);
        nu_ = u.size();
        mpz_class N = p_;
        if (!select_rows(system(u, BigRing{N}).second)) return std::nullopt;
        for (int step = 0; step < 10; ++step) {
            mpz_class N2 = N * N;
            BigRing ring{N2};
            auto [R, J] = system(u, ring);
            for (auto& r : R) {
                mpz_class m;
                mpz_mod(m.get_mpz_t(), r.get_mpz_t(), N.get_mpz_t());
                if (m != 0) return std::nullopt;
            }
            std::vector<std::vector<mpz_class>> A;
            std::vector<mpz_class> b;
            for (auto r : rows_) {
                A.push_back(J[r]);
                b.push_back(R[r]);
            }
            auto delta = solve_mod(A, b, N2, p_);
            if (!delta) return std::nullopt;
            for (std::size_t i = 0; i < nu_; ++i) u[i] = ring.sub(u[i], (*delta)[i]);
            N = N2;
            if (mpz_sizeinbase(N.get_mpz_t(), 2) < 48) continue;
            LinearForm l(4);
            l[0] = 1;
            bool ok = true;
            for (int v = 0; v < 3 && ok; ++v) {
                Scalar q;
                ok = rational_reconstruct(u[v], N, q);
                l[v + 1] = -q;
            }
            if (ok && is_candidate(core_, l)) return l;
        }
        return std::nullopt;
    }

private:
    std::pair<std::vector<mpz_class>, std::vector<std::vector<mpz_class>>> system(const std::vector<mpz_class>& u,
                                                                                  const BigRing& ring) {
        std::array<mpz_class, 3> a{u[0], u[1], u[2]};
        std::vector<Ternary<BigRing>> lines;
        std::size_t pos = 3;
        for (std::size_t j = 0; j < pivot_.size(); ++j) {
            std::array<mpz_class, 3> l;
            for (int v = 0; v < 3; ++v) l[v] = v == pivot_[j] ? mpz_class(1) : u[pos++];
            lines.push_back(Ternary<BigRing>::linear(l));
        }
        mpz_class c = u[pos];
        std::size_t L = lines.size();
        // prefix/suffix products
        std::vector<Ternary<BigRing>> pre(L + 1), suf(L + 1);
        pre[0] = Ternary<BigRing>::zeros(0, ring);
        pre[0].c[0] = 1;
        suf[L] = pre[0];
        for (std::size_t j = 0; j < L; ++j) pre[j + 1] = tmul(pre[j], lines[j], ring);
        for (std::size_t j = L; j-- > 0;) suf[j] = tmul(lines[j], suf[j + 1], ring);
        auto ha = substitute_x1(h_, a, ring);
        auto h1a = substitute_x1(h1_, a, ring);
        std::size_t nm = ha.c.size();
        std::vector<mpz_class> R(nm);
        for (std::size_t i = 0; i < nm; ++i) R[i] = ring.sub(ha.c[i], ring.mul(c, pre[L].c[i]));
        std::vector<std::vector<mpz_class>> J(nm, std::vector<mpz_class>(nu_, 0));
        auto unit = [&](int v) {
            std::array<mpz_class, 3> e{0, 0, 0};
            e[v] = 1;
            return Ternary<BigRing>::linear(e);
        };
        for (int v = 0; v < 3; ++v) {
            auto col = tmul(h1a, unit(v), ring);
            for (std::size_t i = 0; i < nm; ++i) J[i][v] = col.c[i];
        }
        std::size_t k = 3;
        mpz_class negc = ring.sub(0, c);
        for (std::size_t j = 0; j < L; ++j) {
            auto others = tscale(tmul(pre[j], suf[j + 1], ring), negc, ring);
            for (int v = 0; v < 3; ++v) {
                if (v == pivot_[j]) continue;
                auto col = tmul(others, unit(v), ring);
                for (std::size_t i = 0; i < nm; ++i) J[i][k] = col.c[i];
                ++k;
            }
        }
        for (std::size_t i = 0; i < nm; ++i) J[i][k] = ring.sub(0, pre[L].c[i]);
        return {R, J};
    }

    // Chooses nu rows of J that are independent modulo p.
    bool select_rows(const std::vector<std::vector<mpz_class>>& J) {
        rows_.clear();
        std::vector<std::vector<u64>> basis;
        std::vector<std::size_t> lead;
        for (std::size_t r = 0; r < J.size() && rows_.size() < nu_; ++r) {
            std::vector<u64> v(nu_);
            for (std::size_t i = 0; i < nu_; ++i) v[i] = nmod::reduce(J[r][i], p_);
            for (std::size_t b = 0; b < basis.size(); ++b) {
                u64 f = v[lead[b]];
                if (!f) continue;
                for (std::size_t i = 0; i < nu_; ++i) v[i] = (v[i] + (p_ - f) * basis[b][i]) % p_;
            }
            std::size_t piv = 0;
            while (piv < nu_ && v[piv] == 0) ++piv;
            if (piv == nu_) continue;
            u64 inv = nmod::invmod(v[piv], p_);
            for (auto& x : v) x = x * inv % p_;
            // keep the basis reduced at its pivots
            for (std::size_t b = 0; b < basis.size(); ++b) {
                u64 f = basis[b][piv];
                if (!f) continue;
                for (std::size_t i = 0; i < nu_; ++i) basis[b][i] = (basis[b][i] + (p_ - f) * v[i]) % p_;
            }
            basis.push_back(v);
            lead.push_back(piv);
            rows_.push_back(r);
        }
        return rows_.size() == nu_;
    }

    const IntForm& h_;
    const IntForm& h1_;
    const Polynomial& core_;
    u64 p_;
    unsigned D_ = 0;
    std::vector<int> pivot_;
    std::size_t nu_ = 0;
    std::vector<std::size_t> rows_;
};

}  // namespace

CandidateSet candidates(const Polynomial& f, const CandidateOptions& opt) {
    if (!f.is_homogeneous()) throw Error(ErrorKind::NonHomogeneous, "candidates need a homogeneous polynomial");
    if (f.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "candidates of the zero polynomial");
    std::size_t r = f.nvars();
    if (r > 4 || f.degree() > 8)
        throw Error(ErrorKind::SizeLimit, "candidate search supports r <= 4 and degree <= 8");
    if (r < 4)
        throw Error(ErrorKind::DegenerateSystem, "restrictions to hyperplanes are binary forms when r <= 3; the candidate tuples form a positive-dimensional family");
    Polynomial core = lin_split(f, opt.seed).core;
    if (core.degree() <= 2)
        throw Error(ErrorKind::DegenerateSystem, "linear-free part of degree " + std::to_string(core.degree()) +
                                                     " has a positive-dimensional candidate family");
    IntForm h = integral_primitive(core), h1 = d_dx1(h);
    std::mt19937_64 rng(opt.seed);
    std::vector<u64> primes;
    for (u64 q = 101; q < 212; q += 2)
        if (nmod::is_prime(q)) primes.push_back(q);
    std::shuffle(primes.begin(), primes.end(), rng);

    CandidateSet out;
    out.source = CandidateSource::ModularSearch;
    Polynomial hz(4);
    for (const auto& [e, c] : h.terms) hz.add_term({std::uint16_t(e[0]), std::uint16_t(e[1]), std::uint16_t(e[2]), std::uint16_t(e[3])}, Scalar(c));
    // Coordinate planes first, then random planes to thin out low degrees.
    std::vector<Plane> planes{{{1, 0, 0}, {0, 1, 0}}, {{1, 0, 0}, {0, 0, 1}}, {{0, 1, 0}, {0, 0, 1}}};
    std::size_t extra = h.deg == 3 ? 4 : h.deg == 4 ? 2 : 1;
    std::uniform_int_distribution<long> small(-5, 5);
    while (planes.size() < 3 + extra) {
        Plane pl{{small(rng), small(rng), small(rng)}, {small(rng), small(rng), small(rng)}};
        LinearForm P{pl.P[0], pl.P[1], pl.P[2]}, Q{pl.Q[0], pl.Q[1], pl.Q[2]};
        if (linearly_independent({P, Q})) planes.push_back(pl);
    }
    int done = 0, tried = 0;
    for (u64 p : primes) {
        if (done >= opt.primes || tried >= opt.primes + 4) break;
        SmallRing ring{p};
        std::vector<std::vector<std::vector<u64>>> polys;
        for (auto& pl : planes) polys.push_back(plane_poly(hz, pl, ring));
        if (std::any_of(polys.begin(), polys.end(), [](const auto& q) { return q.empty(); })) continue;
        ++tried;
        std::vector<std::vector<char>> tables;
        for (auto& q : polys) tables.push_back(pair_table(q, h.deg, ring));
        auto dotp = [&](const std::array<long, 3>& v, const std::array<u64, 3>& a) {
            long long s = 0;
            for (int i = 0; i < 3; ++i) s += v[i] * static_cast<long long>(a[i]);
            s %= static_cast<long long>(p);
            return static_cast<u64>(s < 0 ? s + p : s);
        };
        std::vector<std::array<u64, 3>> survivors;
        bool too_many = false;
        for (u64 a2 = 0; a2 < p && !too_many; ++a2)
            for (u64 a3 = 0; a3 < p && !too_many; ++a3) {
                if (!tables[0][a2 * p + a3]) continue;
                for (u64 a4 = 0; a4 < p; ++a4) {
                    if (!tables[1][a2 * p + a4] || !tables[2][a3 * p + a4]) continue;
                    std::array<u64, 3> a{a2, a3, a4};
                    bool ok = true;
                    for (std::size_t k = 3; k < planes.size() && ok; ++k)
                        ok = tables[k][dotp(planes[k].P, a) * p + dotp(planes[k].Q, a)];
                    if (!ok) continue;
                    survivors.push_back(a);
                    if (survivors.size() > opt.max_survivors) {
                        too_many = true;
                        break;
                    }
                }
            }
        if (too_many) continue;
        ++done;
        Lifter lifter(h, h1, core, p);
        for (const auto& a : survivors) {
            auto F = substitute_x1(h, a, ring);
            auto split = split_mod_p(F, ring, rng);
            if (!split) continue;
            auto l = lifter.lift(a, *split);
            if (l && std::find(out.forms.begin(), out.forms.end(), *l) == out.forms.end()) out.forms.push_back(*l);
        }
    }
    if (done < opt.primes)
        throw Error(ErrorKind::DegenerateSystem, "modular candidate search found too many survivors for every prime tried");
    std::sort(out.forms.begin(), out.forms.end());
    return out;
}

}  // namespace sps2
