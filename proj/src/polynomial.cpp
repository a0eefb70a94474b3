#include "sps2/polynomial.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace sps2 {

unsigned total_degree(const Exponent& e) {
    unsigned s = 0;
    for (auto v : e) s += v;
    return s;
}

bool GrlexGreater::operator()(const Exponent& a, const Exponent& b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;
}

Polynomial Polynomial::constant(std::size_t n, const Scalar& c) {
    Polynomial p(n);
    p.add_term(Exponent(n, 0), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t n, std::size_t i) {
    Polynomial p(n);
    Exponent e(n, 0);
    e.at(i) = 1;
    p.add_term(e, 1);
    return p;
}

Polynomial Polynomial::from_form(const LinearForm& l) {
    Polynomial p(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i] == 0) continue;
        Exponent e(l.size(), 0);
        e[i] = 1;
        p.terms_.emplace(e, l[i]);
    }
    return p;
}

int Polynomial::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(total_degree(terms_.begin()->first));
}

bool Polynomial::is_homogeneous() const {
    if (terms_.empty()) return true;
    unsigned d = total_degree(terms_.begin()->first);
    return total_degree(terms_.rbegin()->first) == d;
}

Scalar Polynomial::coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
}

void Polynomial::add_term(const Exponent& e, const Scalar& c) {
    if (e.size() != n_) throw Error(ErrorKind::DimensionMismatch, "exponent length");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void Polynomial::check(const Polynomial& o) const {
    if (n_ != o.n_)
        throw Error(ErrorKind::DimensionMismatch, std::to_string(n_) + " vs " + std::to_string(o.n_) + " variables");
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    r += o;
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    r -= o;
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    check(o);
    Polynomial r(n_);
    Exponent e(n_);
    Scalar c;
    for (const auto& [ea, ca] : terms_)
        for (const auto& [eb, cb] : o.terms_) {
            for (std::size_t i = 0; i < n_; ++i) e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
            c = ca * cb;
            r.add_term(e, c);
        }
    return r;
}

Polynomial Polynomial::operator*(const Scalar& c) const {
    if (c == 0) return Polynomial(n_);
    Polynomial r = *this;
    for (auto& [e, v] : r.terms_) v *= c;
    return r;
}

Polynomial Polynomial::pow(unsigned k) const {
    Polynomial result = constant(n_, 1);
    Polynomial base = *this;
    while (k) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

std::string Polynomial::to_text() const {
    std::ostringstream os;
    for (const auto& [e, c] : terms_) {
        os << scalar_to_string(c) << " :";
        for (auto v : e) os << " " << v;
        os << "\n";
    }
    return os.str();
}

Polynomial Polynomial::from_text(const std::string& text, std::size_t n_hint) {
    std::istringstream is(text);
    std::string line;
    std::optional<Polynomial> p;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": missing ':'");
        Scalar c = parse_scalar(line.substr(0, colon));
        std::istringstream es(line.substr(colon + 1));
        Exponent e;
        std::string tok;
        while (es >> tok) {
            for (char ch : tok)
                if (!std::isdigit(static_cast<unsigned char>(ch)))
                    throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": bad exponent '" + tok + "'");
            unsigned long v = std::stoul(tok);
            if (v > 65535) throw Error(ErrorKind::Parse, "exponent too large");
            e.push_back(static_cast<std::uint16_t>(v));
        }
        if (!p) p = Polynomial(e.size());
        if (e.size() != p->nvars())
            throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": inconsistent variable count");
        p->add_term(e, c);
    }
    if (!p) return Polynomial(n_hint);
    return *p;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        Scalar a = c;
        if (!first) os << (a < 0 ? " - " : " + ");
        else if (a < 0) os << "-";
        if (a < 0) a = -a;
        bool unit = total_degree(e) > 0 && a == 1;
        if (!unit) os << a.get_str();
        bool need_star = !unit;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            os << (need_star ? "*" : "") << "x" << (i + 1);
            if (e[i] > 1) os << "^" << e[i];
            need_star = true;
        }
        first = false;
    }
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

std::optional<Polynomial> try_divide(const Polynomial& p, const Polynomial& q) {
    if (p.nvars() != q.nvars()) throw Error(ErrorKind::DimensionMismatch, "variable counts differ");
    if (q.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "division by zero polynomial");
    std::size_t n = p.nvars();
    Polynomial rem = p, quot(n);
    const auto& [lq_e, lq_c] = q.leading();
    while (!rem.is_zero()) {
        const auto& [le, lc] = rem.leading();
        Exponent e(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (le[i] < lq_e[i]) return std::nullopt;
            e[i] = static_cast<std::uint16_t>(le[i] - lq_e[i]);
        }
        Scalar c = lc / lq_c;
        Polynomial t(n);
        t.add_term(e, c);
        quot.add_term(e, c);
        rem -= t * q;
    }
    return quot;
}

Polynomial divide_exact(const Polynomial& p, const Polynomial& q) {
    auto r = try_divide(p, q);
    if (!r) throw Error(ErrorKind::NonDivisible, "divisor does not divide dividend");
    return *r;
}

Scalar evaluate(const Polynomial& p, const std::vector<Scalar>& point) {
    if (point.size() != p.nvars())
        throw Error(ErrorKind::DimensionMismatch,
                    "point has " + std::to_string(point.size()) + " coordinates, expected " + std::to_string(p.nvars()));
    std::size_t n = p.nvars();
    int d = std::max(p.degree(), 0);
    std::vector<std::vector<Scalar>> pw(n, std::vector<Scalar>(d + 1));
    for (std::size_t i = 0; i < n; ++i) {
        pw[i][0] = 1;
        for (int k = 1; k <= d; ++k) pw[i][k] = pw[i][k - 1] * point[i];
    }
    Scalar s = 0, t;
    for (const auto& [e, c] : p.terms()) {
        t = c;
        for (std::size_t i = 0; i < n; ++i)
            if (e[i]) t *= pw[i][e[i]];
        s += t;
    }
    return s;
}

Polynomial substitute(const Polynomial& p, const std::vector<Polynomial>& subs) {
    if (subs.size() != p.nvars())
        throw Error(ErrorKind::DimensionMismatch, "substitution needs one polynomial per variable");
    std::size_t m = subs.empty() ? 0 : subs[0].nvars();
    for (const auto& s : subs)
        if (s.nvars() != m) throw Error(ErrorKind::DimensionMismatch, "substitutions live in different rings");
    std::size_t n = p.nvars();
    std::vector<std::vector<Polynomial>> pw(n);
    for (std::size_t i = 0; i < n; ++i) pw[i].push_back(Polynomial::constant(m, 1));
    auto power = [&](std::size_t i, unsigned k) -> const Polynomial& {
        while (pw[i].size() <= k) pw[i].push_back(pw[i].back() * subs[i]);
        return pw[i][k];
    };
    Polynomial result(m);
    for (const auto& [e, c] : p.terms()) {
        Polynomial t = Polynomial::constant(m, c);
        for (std::size_t i = 0; i < n; ++i)
            if (e[i]) t = t * power(i, e[i]);
        result += t;
    }
    return result;
}

Polynomial substitute_linear(const Polynomial& p, const Matrix& M) {
    if (M.size() != p.nvars())
        throw Error(ErrorKind::DimensionMismatch, "matrix needs one row per variable");
    std::size_t m = M.empty() ? 0 : M[0].size();
    for (const auto& row : M)
        if (row.size() != m) throw Error(ErrorKind::DimensionMismatch, "ragged matrix");
    if (M.empty()) return Polynomial::constant(0, p.coeff(Exponent{}));
    if (p.is_zero()) return Polynomial(m);
    // Integer Horner scheme: f(Mz) = sum_j P_0^j f_j(P_1, ...), with denominators cleared up front.
    std::size_t n = p.nvars();
    int d = p.degree();
    std::vector<std::vector<mpz_class>> R(n, std::vector<mpz_class>(m));
    std::vector<mpz_class> D(n, 1);
    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& x : M[k]) mpz_lcm(D[k].get_mpz_t(), D[k].get_mpz_t(), x.get_den_mpz_t());
        for (std::size_t j = 0; j < m; ++j) R[k][j] = M[k][j].get_num() * (D[k] / M[k][j].get_den());
    }
    std::vector<std::pair<Exponent, Scalar>> scaled;
    mpz_class den = 1;
    for (const auto& [e, c] : p.terms()) {
        Scalar v = c;
        for (std::size_t k = 0; k < n; ++k) {
            mpz_class w;
            mpz_pow_ui(w.get_mpz_t(), D[k].get_mpz_t(), static_cast<unsigned long>(d - e[k]));
            v *= w;
        }
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
        scaled.emplace_back(e, v);
    }
    using IntPoly = std::map<Exponent, mpz_class>;
    std::vector<std::pair<Exponent, mpz_class>> terms;
    for (const auto& [e, v] : scaled) terms.emplace_back(e, v.get_num() * (den / v.get_den()));
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    auto times_row = [&](const IntPoly& a, std::size_t k) {
        IntPoly out;
        for (const auto& [e, c] : a)
            for (std::size_t j = 0; j < m; ++j) {
                if (R[k][j] == 0) continue;
                Exponent f = e;
                ++f[j];
                out[f] += c * R[k][j];
            }
        return out;
    };
    auto add_into = [](IntPoly& a, const IntPoly& b) {
        for (const auto& [e, c] : b) a[e] += c;
    };
    // Terms in [lo, hi) share exponents in variables before k and are sorted descending.
    std::function<IntPoly(std::size_t, std::size_t, std::size_t)> horner = [&](std::size_t lo, std::size_t hi,
                                                                               std::size_t k) {
        if (k == n) return IntPoly{{Exponent(m, 0), terms[lo].second}};
        IntPoly acc;
        unsigned top = terms[lo].first[k];
        std::size_t i = lo;
        for (int j = static_cast<int>(top); j >= 0; --j) {
            if (!acc.empty()) acc = times_row(acc, k);
            std::size_t s = i;
            while (i < hi && terms[i].first[k] == static_cast<unsigned>(j)) ++i;
            if (i > s) add_into(acc, horner(s, i, k + 1));
        }
        return acc;
    };
    IntPoly q = horner(0, terms.size(), 0);
    mpz_class total = den;
    for (std::size_t k = 0; k < n; ++k) {
        mpz_class w;
        mpz_pow_ui(w.get_mpz_t(), D[k].get_mpz_t(), static_cast<unsigned long>(d));
        total *= w;
    }
    Polynomial out(m);
    for (const auto& [e, c] : q)
        if (c != 0) {
            Scalar v(c, total);
            v.canonicalize();
            out.add_term(e, v);
        }
    return out;
}

Polynomial homogenize(const Polynomial& p) {
    int d = p.degree();
    Polynomial r(p.nvars() + 1);
    for (const auto& [e, c] : p.terms()) {
        Exponent f = e;
        f.push_back(static_cast<std::uint16_t>(d - static_cast<int>(total_degree(e))));
        r.add_term(f, c);
    }
    return r;
}

Polynomial dehomogenize(const Polynomial& p) {
    if (p.nvars() == 0) throw Error(ErrorKind::DimensionMismatch, "no variable to dehomogenize");
    Polynomial r(p.nvars() - 1);
    for (const auto& [e, c] : p.terms()) r.add_term(Exponent(e.begin(), e.end() - 1), c);
    return r;
}

Polynomial derivative(const Polynomial& p, std::size_t i) {
    if (i >= p.nvars()) throw Error(ErrorKind::DimensionMismatch, "no such variable");
    Polynomial r(p.nvars());
    for (const auto& [e, c] : p.terms()) {
        if (!e[i]) continue;
        Exponent f = e;
        --f[i];
        r.add_term(f, c * static_cast<unsigned long>(e[i]));
    }
    return r;
}

Polynomial homogeneous_part(const Polynomial& p, unsigned deg) {
    Polynomial r(p.nvars());
    for (const auto& [e, c] : p.terms())
        if (total_degree(e) == deg) r.add_term(e, c);
    return r;
}

Polynomial embed(const Polynomial& p, std::size_t m, std::size_t offset) {
    if (offset + p.nvars() > m) throw Error(ErrorKind::DimensionMismatch, "embedding does not fit");
    Polynomial r(m);
    for (const auto& [e, c] : p.terms()) {
        Exponent f(m, 0);
        for (std::size_t i = 0; i < e.size(); ++i) f[offset + i] = e[i];
        r.add_term(f, c);
    }
    return r;
}

Polynomial monic(const Polynomial& p) {
    if (p.is_zero()) return p;
    return p * (1 / p.leading().second);
}

Polynomial restrict_to(const Polynomial& p, const std::vector<LinearForm>& basis) {
    std::size_t n = p.nvars();
    Matrix M(n, std::vector<Scalar>(basis.size(), 0));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (basis[j].size() != n) throw Error(ErrorKind::DimensionMismatch, "slice vector length");
        for (std::size_t i = 0; i < n; ++i) M[i][j] = basis[j][i];
    }
    return substitute_linear(p, M);
}

}  // namespace sps2
