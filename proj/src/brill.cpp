#include "sps2/brill.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "sps2/linear_factor.hpp"
#include "sps2/univariate.hpp"

namespace sps2 {

namespace {

Scalar factorial(unsigned n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return Scalar(r);
}

Scalar binomial(unsigned n, unsigned k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return Scalar(r);
}

mpz_class binomial_z(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// Moves variable i of p to position map[i] in a ring of nout variables.
Polynomial remap(const Polynomial& p, std::size_t nout, const std::vector<std::size_t>& map) {
    Polynomial out(nout);
    for (const auto& [e, c] : p.terms()) {
        Exponent f(nout, 0);
        for (std::size_t i = 0; i < e.size(); ++i) f[map[i]] += e[i];
        out.add_term(f, c);
    }
    return out;
}

// Layout with nb blocks of m form variables followed by q parameters.
struct Layout {
    std::size_t m, nb, q;
    std::size_t total() const { return nb * m + q; }
    std::size_t var(std::size_t block, std::size_t i) const { return block * m + i; }
    std::size_t param(std::size_t j) const { return nb * m + j; }
};

// f in m form variables and q parameters placed into `block`.
Polynomial place(const Polynomial& f, const Layout& L, std::size_t block) {
    std::vector<std::size_t> map(L.m + L.q);
    for (std::size_t i = 0; i < L.m; ++i) map[i] = L.var(block, i);
    for (std::size_t j = 0; j < L.q; ++j) map[L.m + j] = L.param(j);
    return remap(f, L.total(), map);
}

// Renames block `from` to block `to`, which must be absent from p.
Polynomial rename_block(const Polynomial& p, const Layout& L, std::size_t from, std::size_t to) {
    std::vector<std::size_t> map(L.total());
    for (std::size_t v = 0; v < map.size(); ++v) map[v] = v;
    for (std::size_t i = 0; i < L.m; ++i) map[L.var(from, i)] = L.var(to, i);
    return remap(p, L.total(), map);
}

// Applies sum_i v_{to,i} d/dv_{from,i}.
Polynomial polar_operator(const Polynomial& p, const Layout& L, std::size_t from, std::size_t to) {
    Polynomial out(L.total());
    for (std::size_t i = 0; i < L.m; ++i) {
        Polynomial d = derivative(p, L.var(from, i));
        if (d.is_zero()) continue;
        out += d * Polynomial::variable(L.total(), L.var(to, i));
    }
    return out;
}

unsigned form_degree(const Polynomial& f, std::size_t m) {
    int deg = -1;
    for (const auto& [e, c] : f.terms()) {
        int s = 0;
        for (std::size_t i = 0; i < m; ++i) s += e[i];
        if (deg >= 0 && s != deg) throw Error(ErrorKind::NonHomogeneous, "form is not homogeneous in its variables");
        deg = s;
    }
    return deg < 0 ? 0 : static_cast<unsigned>(deg);
}

// Young product of F and G, both placed in block 0 (x); block 1 (y) must be free.
Polynomial young_in_layout(const Polynomial& F, const Polynomial& G, const Layout& L, unsigned d) {
    Polynomial sum(L.total());
    Polynomial fk = F;
    Polynomial gk = rename_block(G, L, 0, 1);
    Scalar norm = 1 / factorial(d);
    for (unsigned k = 0; k <= d; ++k) {
        if (k > 0) {
            fk = polar_operator(fk, L, 0, 1);
            gk = polar_operator(gk, L, 1, 0);
        }
        // Both polars carry (d-k)!/d!; one binomial factor cancels.
        Scalar c = binomial(d, k) * factorial(d - k) * factorial(d - k) * norm * norm;
        if (k % 2) c = -c;
        sum += (fk * gk) * c;
    }
    return sum * Scalar(1, d + 1);
}

// Exponent vectors (i_1..i_d) with sum_j j i_j = d.
void partitions(unsigned d, unsigned part, std::vector<unsigned>& cur, const std::function<void()>& emit, unsigned rest) {
    if (rest == 0) {
        emit();
        return;
    }
    if (part > d) return;
    for (unsigned i = 0; i * part <= rest; ++i) {
        cur[part - 1] = i;
        partitions(d, part + 1, cur, emit, rest - i * part);
    }
    cur[part - 1] = 0;
}

// Girard-Waring: the d-th power sum from elementary symmetric values.
template <class T, class Mul, class Add>
T power_sum(unsigned d, const std::vector<T>& e, const T& one, Mul mul, Add add, const T& zero) {
    T total = zero;
    std::vector<unsigned> idx(d, 0);
    partitions(d, 1, idx, [&] {
        unsigned s = 0;
        Scalar denom = 1;
        for (unsigned j = 0; j < d; ++j) {
            s += idx[j];
            denom *= factorial(idx[j]);
        }
        Scalar coef = factorial(s - 1) / denom;
        if (s % 2) coef = -coef;
        T term = one;
        for (unsigned j = 0; j < d; ++j)
            for (unsigned t = 0; t < idx[j]; ++t) term = mul(term, e[j]);
        total = add(total, term, coef);
    }, d);
    Scalar lead = d % 2 ? Scalar(-static_cast<long>(d)) : Scalar(d);
    return add(zero, total, lead);
}

std::size_t monomial_count(std::size_t vars, std::size_t deg) {
    if (vars == 0) return 1;
    return binomial_z(deg + vars - 1, vars - 1).get_ui();
}

}  // namespace

const char* candidate_source_name(CandidateSource s) {
    switch (s) {
        case CandidateSource::BrillSystem: return "brill-system";
        case CandidateSource::ModularSearch: return "modular-search";
        case CandidateSource::InjectedTestOracle: return "injected-test-oracle";
    }
    return "?";
}

bool CandidateSet::contains(const LinearForm& l) const {
    return std::any_of(forms.begin(), forms.end(), [&](const LinearForm& c) { return are_proportional(c, l); });
}

PolarForm polar(const Polynomial& f, unsigned k) {
    if (!f.is_homogeneous()) throw Error(ErrorKind::NonHomogeneous, "polar needs a homogeneous polynomial");
    unsigned d = static_cast<unsigned>(std::max(f.degree(), 0));
    if (k > d) throw Error(ErrorKind::InvalidArgument, "polar order exceeds the degree");
    Layout L{f.nvars(), 2, 0};
    Polynomial p = place(f, L, 1);
    for (unsigned i = 0; i < k; ++i) p = polar_operator(p, L, 1, 0);
    return {p * (factorial(d - k) / factorial(d)), f.nvars(), k, d};
}

Polynomial young_product(const Polynomial& f, const Polynomial& g) {
    if (f.nvars() != g.nvars()) throw Error(ErrorKind::DimensionMismatch, "young product operands");
    Layout L{f.nvars(), 2, 0};
    if (f.is_zero() || g.is_zero()) return Polynomial(L.total());
    if (!f.is_homogeneous() || !g.is_homogeneous())
        throw Error(ErrorKind::NonHomogeneous, "young product needs homogeneous forms");
    if (f.degree() != g.degree()) throw Error(ErrorKind::DegreeMismatch, "young product needs equal degrees");
    return young_in_layout(place(f, L, 0), place(g, L, 0), L, static_cast<unsigned>(f.degree()));
}

BrillForm brill_form_with_params(const Polynomial& f, std::size_t n_params, std::size_t max_terms) {
    if (n_params > f.nvars()) throw Error(ErrorKind::InvalidArgument, "more parameters than variables");
    Layout L{f.nvars() - n_params, 3, n_params};
    if (f.is_zero()) return {Polynomial(L.total()), L.m};
    unsigned d = form_degree(f, L.m);
    if (d == 0) return {Polynomial(L.total()), L.m};
    std::size_t param_deg = 0;
    for (const auto& [e, c] : f.terms()) {
        std::size_t s = 0;
        for (std::size_t j = 0; j < n_params; ++j) s += e[L.m + j];
        param_deg = std::max(param_deg, s);
    }
    double estimate = double(monomial_count(L.m, d)) * double(monomial_count(L.m, d)) *
                      double(monomial_count(L.m, d * (d - 1))) *
                      double(monomial_count(n_params + 1, param_deg * (d + 1)));
    if (estimate > double(max_terms))
        throw Error(ErrorKind::SizeLimit, "Brill form expansion too large (estimated " +
                                              std::to_string(static_cast<long long>(estimate)) + " terms)");

    Polynomial fx = place(f, L, 0), fz = place(f, L, 2);
    // e_k = (1/k!) (sum x_i d/dz_i)^k f(z) * f(z)^(k-1)
    std::vector<Polynomial> e(d, Polynomial(L.total()));
    Polynomial pk = fz, fzpow = Polynomial::constant(L.total(), 1);
    for (unsigned k = 1; k <= d; ++k) {
        pk = polar_operator(pk, L, 2, 0);
        e[k - 1] = pk * fzpow * (1 / factorial(k));
        fzpow = fzpow * fz;
    }
    Polynomial P = power_sum<Polynomial>(
        d, e, Polynomial::constant(L.total(), 1), [](const Polynomial& a, const Polynomial& b) { return a * b; },
        [](const Polynomial& acc, const Polynomial& t, const Scalar& c) { return acc + t * c; }, Polynomial(L.total()));
    return {young_in_layout(fx, P, L, d), L.m};
}

BrillForm brill_form(const Polynomial& f, std::size_t max_terms) {
    if (!f.is_homogeneous()) throw Error(ErrorKind::NonHomogeneous, "Brill form needs a homogeneous polynomial");
    return brill_form_with_params(f, 0, max_terms);
}

Scalar brill_value(const Polynomial& f, const LinearForm& x, const LinearForm& y, const LinearForm& z) {
    if (!f.is_homogeneous()) throw Error(ErrorKind::NonHomogeneous, "Brill form needs a homogeneous polynomial");
    if (f.is_zero() || f.degree() == 0) return 0;
    unsigned d = static_cast<unsigned>(f.degree());
    // A_k = [s^k] f(x + s y)
    QPoly A = line_restriction(f, x, y);
    A.resize(d + 1, 0);
    // F(t, u) = f(z + t y + u x)
    Polynomial F = restrict_to(f, {z, y, x});
    auto Fc = [&](unsigned a, unsigned b) { return F.coeff(Exponent{std::uint16_t(d - a - b), std::uint16_t(a), std::uint16_t(b)}); };
    Scalar fz = evaluate(f, z);
    // e_j(y + s x) as a polynomial in s.
    std::vector<QPoly> e(d);
    Scalar fzpow = 1;
    for (unsigned j = 1; j <= d; ++j) {
        QPoly ej(j + 1, 0);
        for (unsigned b = 0; b <= j; ++b) ej[b] = Fc(j - b, b) * fzpow;
        e[j - 1] = ej;
        fzpow *= fz;
    }
    QPoly P = power_sum<QPoly>(
        d, e, QPoly{1}, [](const QPoly& a, const QPoly& b) { return qmul(a, b); },
        [](const QPoly& acc, const QPoly& t, const Scalar& c) {
            QPoly r = acc;
            if (r.size() < t.size()) r.resize(t.size(), 0);
            for (std::size_t i = 0; i < t.size(); ++i) r[i] += c * t[i];
            return r;
        },
        QPoly{});
    P.resize(std::max<std::size_t>(P.size(), d + 1), 0);
    Scalar B = 0;
    for (unsigned k = 0; k <= d; ++k) {
        Scalar t = A[k] * P[k] / binomial(d, k);
        B += k % 2 ? -t : t;
    }
    return B / (d + 1);
}

bool splits_into_linear_forms(const Polynomial& f, std::uint64_t seed, int trials) {
    if (!f.is_homogeneous()) throw Error(ErrorKind::NonHomogeneous, "splitting test needs a homogeneous polynomial");
    if (f.degree() <= 1) return true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(-(1L << 16), 1L << 16);
    auto pt = [&] {
        LinearForm v(f.nvars());
        for (auto& c : v) c = dist(rng);
        return v;
    };
    for (int t = 0; t < trials; ++t) {
        LinearForm x = pt(), y = pt(), z = pt();
        if (brill_value(f, x, y, z) != 0) return false;
    }
    return true;
}

std::vector<Polynomial> candidate_system(const Polynomial& h, std::size_t max_terms) {
    std::size_t r = h.nvars();
    if (r < 2) throw Error(ErrorKind::InvalidArgument, "candidate system needs at least two variables");
    if (!h.is_homogeneous()) throw Error(ErrorKind::NonHomogeneous, "candidate system needs a homogeneous core");
    if (h.degree() <= 0) return {};
    std::size_t m = r - 1;
    // Ring: x_2..x_r then a_2..a_r.
    std::size_t N = 2 * m;
    std::vector<Polynomial> subs(r);
    subs[0] = Polynomial(N);
    for (std::size_t j = 0; j < m; ++j) {
        subs[0] += Polynomial::variable(N, j) * Polynomial::variable(N, m + j);
        subs[j + 1] = Polynomial::variable(N, j);
    }
    Polynomial ha = substitute(h, subs);
    BrillForm B = brill_form_with_params(ha, m, max_terms);
    std::map<Exponent, Polynomial> coeffs;
    std::size_t forms = 3 * m;
    for (const auto& [e, c] : B.poly.terms()) {
        Exponent key(e.begin(), e.begin() + forms);
        Exponent rest(e.begin() + forms, e.end());
        auto it = coeffs.try_emplace(key, Polynomial(m)).first;
        it->second.add_term(rest, c);
    }
    std::vector<Polynomial> sys;
    std::set<std::string> seen;
    for (auto& [k, p] : coeffs) {
        if (p.is_zero()) continue;
        Polynomial q = monic(p);
        if (seen.insert(q.to_text()).second) sys.push_back(q);
    }
    return sys;
}

namespace {

// Coefficients of p as a polynomial in variable var.
std::vector<Polynomial> coefficients_in(const Polynomial& p, std::size_t var) {
    std::vector<Polynomial> c;
    for (const auto& [e, v] : p.terms()) {
        std::size_t k = e[var];
        if (c.size() <= k) c.resize(k + 1, Polynomial(p.nvars()));
        Exponent f = e;
        f[var] = 0;
        c[k].add_term(f, v);
    }
    return c;
}

int degree_in(const Polynomial& p, std::size_t var) {
    int d = -1;
    for (const auto& [e, v] : p.terms()) d = std::max<int>(d, e[var]);
    return d;
}

Polynomial drop_last(const Polynomial& p) {
    Polynomial out(p.nvars() - 1);
    for (const auto& [e, c] : p.terms()) out.add_term(Exponent(e.begin(), e.end() - 1), c);
    return out;
}

Polynomial fix_prefix(const Polynomial& p, const std::vector<Scalar>& vals) {
    // Substitutes the first vals.size() variables; returns a univariate polynomial in the last.
    Polynomial out(1);
    for (const auto& [e, c] : p.terms()) {
        Scalar v = c;
        for (std::size_t i = 0; i < vals.size(); ++i)
            for (unsigned k = 0; k < e[i]; ++k) v *= vals[i];
        out.add_term(Exponent{e.back()}, v);
    }
    return out;
}

QPoly to_qpoly(const Polynomial& p) {
    QPoly q;
    for (const auto& [e, c] : p.terms()) {
        if (q.size() <= e[0]) q.resize(e[0] + 1, 0);
        q[e[0]] += c;
    }
    trim(q);
    return q;
}

std::vector<std::vector<Scalar>> solve_rec(std::vector<Polynomial> sys, std::size_t k) {
    std::vector<Polynomial> nz;
    for (auto& p : sys) {
        if (p.is_zero()) continue;
        if (p.degree() == 0) return {};
        nz.push_back(p);
    }
    if (nz.empty()) throw Error(ErrorKind::DegenerateSystem, "candidate system has a positive-dimensional solution set");
    std::size_t v = k - 1;
    if (k == 1) {
        QPoly g;
        for (auto& p : nz) g = g.empty() ? to_qpoly(p) : qgcd(g, to_qpoly(p));
        std::vector<std::vector<Scalar>> out;
        if (qdeg(g) <= 0) return out;
        for (auto& r : rational_roots(g)) out.push_back({r.root});
        return out;
    }
    std::vector<Polynomial> free_of_v, with_v;
    for (auto& p : nz) (degree_in(p, v) > 0 ? with_v : free_of_v).push_back(p);
    std::vector<Polynomial> reduced;
    for (auto& p : free_of_v) reduced.push_back(drop_last(p));
    if (!with_v.empty()) {
        auto pivot = std::min_element(with_v.begin(), with_v.end(),
                                      [&](const Polynomial& a, const Polynomial& b) { return degree_in(a, v) < degree_in(b, v); });
        for (auto it = with_v.begin(); it != with_v.end(); ++it)
            if (it != pivot) reduced.push_back(drop_last(resultant(*pivot, *it, v)));
    }
    std::vector<std::vector<Scalar>> partial = solve_rec(reduced, k - 1);
    std::vector<std::vector<Scalar>> out;
    for (auto& s : partial) {
        QPoly g;
        for (auto& p : with_v) {
            QPoly u = to_qpoly(fix_prefix(p, s));
            if (u.empty()) continue;
            g = g.empty() ? u : qgcd(g, u);
        }
        if (g.empty()) throw Error(ErrorKind::DegenerateSystem, "candidate system has a positive-dimensional solution set");
        if (qdeg(g) <= 0) continue;
        for (auto& r : rational_roots(g)) {
            auto full = s;
            full.push_back(r.root);
            out.push_back(full);
        }
    }
    return out;
}

}  // namespace

Polynomial resultant(const Polynomial& p, const Polynomial& q, std::size_t var) {
    if (p.nvars() != q.nvars()) throw Error(ErrorKind::DimensionMismatch, "resultant operands");
    std::size_t n = p.nvars();
    if (p.is_zero() || q.is_zero()) return Polynomial(n);
    auto cp = coefficients_in(p, var), cq = coefficients_in(q, var);
    std::size_t a = cp.size() - 1, b = cq.size() - 1;
    if (a == 0) return p.pow(static_cast<unsigned>(b));
    if (b == 0) return q.pow(static_cast<unsigned>(a));
    std::size_t s = a + b;
    std::vector<std::vector<Polynomial>> M(s, std::vector<Polynomial>(s, Polynomial(n)));
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j <= a; ++j) M[i][i + j] = cp[a - j];
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j <= b; ++j) M[b + i][i + j] = cq[b - j];
    // Fraction-free elimination.
    Polynomial prev = Polynomial::constant(n, 1);
    bool negate = false;
    for (std::size_t col = 0; col < s; ++col) {
        std::size_t piv = col;
        while (piv < s && M[piv][col].is_zero()) ++piv;
        if (piv == s) return Polynomial(n);
        if (piv != col) {
            std::swap(M[piv], M[col]);
            negate = !negate;
        }
        for (std::size_t i = col + 1; i < s; ++i) {
            for (std::size_t j = col + 1; j < s; ++j)
                M[i][j] = divide_exact(M[col][col] * M[i][j] - M[i][col] * M[col][j], prev);
            M[i][col] = Polynomial(n);
        }
        prev = M[col][col];
    }
    return negate ? -M[s - 1][s - 1] : M[s - 1][s - 1];
}

std::vector<std::vector<Scalar>> solve_candidate_system(const std::vector<Polynomial>& sys, std::size_t unknowns) {
    if (unknowns == 0) throw Error(ErrorKind::InvalidArgument, "no unknowns");
    for (auto& p : sys)
        if (p.nvars() != unknowns) throw Error(ErrorKind::DimensionMismatch, "system polynomial has the wrong number of variables");
    auto sols = solve_rec(sys, unknowns);
    std::vector<std::vector<Scalar>> out;
    for (auto& s : sols) {
        bool ok = std::all_of(sys.begin(), sys.end(), [&](const Polynomial& p) { return evaluate(p, s) == 0; });
        if (ok && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

CandidateSet candidates_by_resultants(const Polynomial& f) {
    if (f.nvars() < 2) throw Error(ErrorKind::InvalidArgument, "candidates need at least two variables");
    Polynomial h = lin_split(f).core;
    auto sols = solve_candidate_system(candidate_system(h), f.nvars() - 1);
    CandidateSet out;
    out.source = CandidateSource::BrillSystem;
    for (auto& s : sols) {
        LinearForm l(f.nvars());
        l[0] = 1;
        for (std::size_t j = 0; j < s.size(); ++j) l[j + 1] = -s[j];
        out.forms.push_back(l);
    }
    return out;
}

CandidateSet inject_candidates(const std::vector<LinearForm>& forms) {
    CandidateSet out;
    out.source = CandidateSource::InjectedTestOracle;
    for (const auto& l : forms) {
        if (l.empty() || l[0] == 0) continue;
        LinearForm s = scale(l, Scalar(1 / l[0]));
        if (std::find(out.forms.begin(), out.forms.end(), s) == out.forms.end()) out.forms.push_back(s);
    }
    std::sort(out.forms.begin(), out.forms.end());
    return out;
}

bool is_candidate(const Polynomial& h, const LinearForm& l) {
    if (l.size() != h.nvars()) throw Error(ErrorKind::DimensionMismatch, "candidate form length");
    if (l[0] != 1) throw Error(ErrorKind::Precondition, "candidate forms have x_1 coefficient 1");
    Matrix M = identity_matrix(h.nvars());
    M[0][0] = 0;
    for (std::size_t j = 1; j < l.size(); ++j) M[0][j] = -l[j];
    Polynomial ha = substitute_linear(h, M);
    if (ha.is_zero()) return false;
    return as_pisigma(ha).has_value();
}

}  // namespace sps2
