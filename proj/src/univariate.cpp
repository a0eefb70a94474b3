#include "sps2/univariate.hpp"

#include <algorithm>
#include <random>

namespace sps2 {

void trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

int qdeg(const QPoly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[i] != 0) return i;
    return -1;
}

QPoly qmul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    trim(c);
    return c;
}

QPoly qsub(const QPoly& a, const QPoly& b) {
    QPoly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] -= b[i];
    trim(c);
    return c;
}

QPoly qderiv(const QPoly& p) {
    QPoly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<unsigned long>(i));
    trim(d);
    return d;
}

std::pair<QPoly, QPoly> qdivmod(const QPoly& a, const QPoly& b) {
    QPoly r = a, bb = b;
    trim(r);
    trim(bb);
    if (bb.empty()) throw Error(ErrorKind::ZeroPolynomial, "univariate division by zero");
    int db = qdeg(bb);
    QPoly q(std::max(0, qdeg(r) - db + 1), 0);
    while (qdeg(r) >= db) {
        int dr = qdeg(r);
        Scalar c = r[dr] / bb[db];
        q[dr - db] = c;
        for (int i = 0; i <= db; ++i) r[dr - db + i] -= c * bb[i];
        trim(r);
    }
    trim(q);
    return {q, r};
}

QPoly qgcd(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        QPoly r = qdivmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Scalar lc = a.back();
        for (auto& c : a) c /= lc;
    }
    return a;
}

Scalar qeval(const QPoly& p, const Scalar& t) {
    Scalar s = 0;
    for (std::size_t i = p.size(); i-- > 0;) s = s * t + p[i];
    return s;
}

ZPoly primitive_part(const QPoly& p) {
    mpz_class l = 1, g = 0;
    for (const auto& c : p) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    ZPoly z(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        z[i] = p[i].get_num() * (l / p[i].get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z[i].get_mpz_t());
    }
    if (g != 0)
        for (auto& c : z) c /= g;
    while (!z.empty() && z.back() == 0) z.pop_back();
    if (!z.empty() && z.back() < 0)
        for (auto& c : z) c = -c;
    return z;
}

namespace nmod {

u64 mulmod(u64 a, u64 b, u64 p) {
    if (p >> 32 == 0 && a < p && b < p) return a * b % p;
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p);
}

u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

u64 invmod(u64 a, u64 p) {
    if (a % p == 0) throw Error(ErrorKind::Precondition, "inverse of zero modulo p");
    return powmod(a, p - 2, p);
}

void trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly mul(const Poly& a, const Poly& b, u64 p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + mulmod(a[i], b[j], p)) % p;
    }
    trim(c);
    return c;
}

Poly rem(Poly a, const Poly& b, u64 p) {
    trim(a);
    std::size_t db = b.size() - 1;
    u64 inv = b.back() == 1 ? 1 : invmod(b.back(), p);
    while (a.size() > db) {
        u64 c = mulmod(a.back(), inv, p);
        std::size_t shift = a.size() - 1 - db;
        for (std::size_t i = 0; i <= db; ++i) a[shift + i] = (a[shift + i] + p - mulmod(c, b[i], p)) % p;
        trim(a);
    }
    return a;
}

Poly divide(const Poly& a, const Poly& b, u64 p) {
    Poly r = a;
    trim(r);
    std::size_t db = b.size() - 1;
    if (r.size() < b.size()) return {};
    Poly q(r.size() - db, 0);
    u64 inv = invmod(b.back(), p);
    while (r.size() > db) {
        u64 c = mulmod(r.back(), inv, p);
        std::size_t shift = r.size() - 1 - db;
        q[shift] = c;
        for (std::size_t i = 0; i <= db; ++i) r[shift + i] = (r[shift + i] + p - mulmod(c, b[i], p)) % p;
        trim(r);
    }
    trim(q);
    return q;
}

Poly gcd(Poly a, Poly b, u64 p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        u64 inv = invmod(a.back(), p);
        for (auto& c : a) c = mulmod(c, inv, p);
    }
    return a;
}

Poly derivative(const Poly& f, u64 p) {
    Poly d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(mulmod(f[i], i % p, p));
    trim(d);
    return d;
}

static Poly powpoly(Poly base, u64 e, Poly f, u64 p) {
    trim(f);
    u64 lead = invmod(f.back(), p);
    for (auto& c : f) c = mulmod(c, lead, p);
    Poly r{1};
    base = rem(base, f, p);
    while (e) {
        if (e & 1) r = rem(mul(r, base, p), f, p);
        e >>= 1;
        if (e) base = rem(mul(base, base, p), f, p);
    }
    return r;
}

Poly powx(u64 e, const Poly& f, u64 p) { return powpoly(Poly{0, 1}, e, f, p); }

static Poly xp_minus_x_gcd(const Poly& f, u64 p) {
    Poly xp = powx(p, f, p);
    if (xp.size() < 2) xp.resize(2, 0);
    xp[1] = (xp[1] + p - 1) % p;
    trim(xp);
    return gcd(f, xp, p);
}

static void split_roots(const Poly& g, u64 p, std::mt19937_64& rng, std::vector<u64>& out) {
    if (g.size() <= 1) return;
    if (g.size() == 2) {
        out.push_back(mulmod(p - g[0] % p, invmod(g[1], p), p));
        return;
    }
    if (p == 2) {
        for (u64 x = 0; x < 2; ++x) {
            u64 v = 0;
            for (std::size_t i = g.size(); i-- > 0;) v = (v * x + g[i]) % 2;
            if (!v) out.push_back(x);
        }
        return;
    }
    std::uniform_int_distribution<u64> dist(0, p - 1);
    while (true) {
        Poly h = powpoly(Poly{dist(rng), 1}, (p - 1) / 2, g, p);
        if (h.empty()) h = {0};
        h[0] = (h[0] + p - 1) % p;
        trim(h);
        Poly d = gcd(g, h, p);
        if (d.size() > 1 && d.size() < g.size()) {
            split_roots(d, p, rng, out);
            split_roots(divide(g, d, p), p, rng, out);
            return;
        }
    }
}

std::vector<u64> roots(const Poly& f, u64 p, std::uint64_t seed) {
    Poly ff = f;
    trim(ff);
    if (ff.empty()) throw Error(ErrorKind::ZeroPolynomial, "roots of the zero polynomial");
    std::vector<u64> out;
    if (ff.size() == 1) return out;
    Poly g = xp_minus_x_gcd(ff, p);
    std::mt19937_64 rng(seed);
    split_roots(g, p, rng, out);
    std::sort(out.begin(), out.end());
    return out;
}

bool splits(Poly f, u64 p) {
    trim(f);
    if (f.empty()) return true;
    while (f.size() > 1) {
        Poly g = xp_minus_x_gcd(f, p);
        if (g.size() <= 1) return false;
        f = divide(f, g, p);
    }
    return true;
}

u64 reduce(const mpz_class& z, u64 p) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), z.get_mpz_t(), p);
    return r.get_ui();
}

bool reduce(const Scalar& q, u64 p, u64& out) {
    u64 d = reduce(q.get_den(), p);
    if (!d) return false;
    out = mulmod(reduce(q.get_num(), p), invmod(d, p), p);
    return true;
}

bool is_prime(u64 n) {
    mpz_class z(static_cast<unsigned long>(n));
    return mpz_probab_prime_p(z.get_mpz_t(), 30) > 0;
}

}  // namespace nmod

bool rational_reconstruct(const mpz_class& u, const mpz_class& m, Scalar& out) {
    mpz_class bound;
    mpz_class half = m / 2;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    mpz_class r0 = m, r1, s0 = 0, s1 = 1;
    mpz_fdiv_r(r1.get_mpz_t(), u.get_mpz_t(), m.get_mpz_t());
    while (r1 > bound) {
        mpz_class q = r0 / r1;
        mpz_class t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (s1 == 0 || abs(s1) > bound) return false;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), s1.get_mpz_t());
    if (g != 1) return false;
    out = Scalar(r1, s1);
    out.canonicalize();
    return true;
}

namespace {

mpz_class zeval(const ZPoly& p, const mpz_class& t) {
    mpz_class s = 0;
    for (std::size_t i = p.size(); i-- > 0;) s = s * t + p[i];
    return s;
}

mpz_class zeval_mod(const ZPoly& p, const mpz_class& t, const mpz_class& m) {
    mpz_class s = 0;
    for (std::size_t i = p.size(); i-- > 0;) {
        s = s * t + p[i];
        mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), m.get_mpz_t());
    }
    return s;
}

// Integer roots of a monic integer polynomial without repeated roots.
std::vector<mpz_class> integer_roots_monic(const ZPoly& v) {
    std::size_t n = v.size() - 1;
    std::vector<mpz_class> out;
    if (n == 0) return out;
    if (n == 1) {
        out.push_back(-v[0]);
        return out;
    }
    mpz_class B = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (abs(v[i]) > B) B = abs(v[i]);
    B += 1;
    ZPoly dv(n);
    for (std::size_t i = 1; i <= n; ++i) dv[i - 1] = v[i] * static_cast<unsigned long>(i);
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<nmod::u64> pick(1ull << 30, (1ull << 31) - 1);
    for (int attempt = 0; attempt < 200; ++attempt) {
        nmod::u64 p = pick(rng);
        if (!nmod::is_prime(p)) continue;
        nmod::Poly vp(n + 1), dvp(n);
        for (std::size_t i = 0; i <= n; ++i) vp[i] = nmod::reduce(v[i], p);
        for (std::size_t i = 0; i < n; ++i) dvp[i] = nmod::reduce(dv[i], p);
        nmod::trim(dvp);
        if (dvp.empty() || nmod::gcd(vp, dvp, p).size() != 1) continue;
        auto rs = nmod::roots(vp, p, p);
        mpz_class two_b = 2 * B;
        for (auto r0 : rs) {
            mpz_class M = static_cast<unsigned long>(p), r = static_cast<unsigned long>(r0);
            while (M <= two_b) {
                mpz_class M2 = M * M;
                mpz_class fv = zeval_mod(v, r, M2), dfv = zeval_mod(dv, r, M2), inv;
                if (!mpz_invert(inv.get_mpz_t(), dfv.get_mpz_t(), M2.get_mpz_t())) break;
                r = r - fv * inv;
                mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), M2.get_mpz_t());
                M = M2;
            }
            if (r > M / 2) r -= M;
            if (zeval(v, r) == 0) out.push_back(r);
        }
        return out;
    }
    throw Error(ErrorKind::RetryExhausted, "no suitable prime for root finding");
}

}  // namespace

std::vector<RootMult> rational_roots(const QPoly& p_in) {
    QPoly p = p_in;
    trim(p);
    if (p.empty()) throw Error(ErrorKind::ZeroPolynomial, "roots of the zero polynomial");
    std::vector<RootMult> out;
    std::size_t zeros = 0;
    while (zeros < p.size() && p[zeros] == 0) ++zeros;
    if (zeros) {
        out.push_back({Scalar(0), static_cast<unsigned>(zeros)});
        p.erase(p.begin(), p.begin() + static_cast<long>(zeros));
    }
    if (p.size() <= 1) return out;
    QPoly g = qgcd(p, qderiv(p));
    QPoly sqf = qdivmod(p, g).first;
    QPoly sq;
    for (const auto& c : primitive_part(sqf)) sq.emplace_back(c);
    ZPoly s = primitive_part(sq);
    std::size_t n = s.size() - 1;
    mpz_class lc = s[n];
    ZPoly v(n + 1);
    mpz_class pw = 1;
    for (std::size_t i = n; i-- > 0;) {
        v[i] = s[i] * pw;
        pw *= lc;
    }
    v[n] = 1;
    for (const auto& z : integer_roots_monic(v)) {
        Scalar rho(z, lc);
        rho.canonicalize();
        unsigned m = 0;
        QPoly q = p;
        while (true) {
            auto [quot, r] = qdivmod(q, QPoly{-rho, 1});
            if (!r.empty()) break;
            q = quot;
            ++m;
        }
        if (m) out.push_back({rho, m});
    }
    std::sort(out.begin(), out.end(), [](const RootMult& a, const RootMult& b) { return a.root < b.root; });
    return out;
}

}  // namespace sps2
