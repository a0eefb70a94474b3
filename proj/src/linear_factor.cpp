#include "sps2/linear_factor.hpp"

#include <random>

#include "sps2/univariate.hpp"

namespace sps2 {

std::vector<Scalar> line_restriction(const Polynomial& f, const LinearForm& b, const LinearForm& w) {
    Polynomial F = restrict_to(f, {b, w});
    std::vector<Scalar> u(std::max(f.degree(), 0) + 1, 0);
    for (const auto& [e, c] : F.terms()) u[e[1]] += c;
    trim(u);
    return u;
}

namespace {

LinearForm random_point(std::mt19937_64& rng, std::size_t n, long bound) {
    std::uniform_int_distribution<long> dist(-bound, bound);
    LinearForm v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

Polynomial directional_derivative(const Polynomial& f, const LinearForm& w) {
    Polynomial d(f.nvars());
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] != 0) d += derivative(f, i) * w[i];
    return d;
}

}  // namespace

LinSplit lin_split(const Polynomial& f, std::uint64_t seed) {
    if (f.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "lin_split of the zero polynomial");
    if (!f.is_homogeneous()) throw Error(ErrorKind::NonHomogeneous, "lin_split needs a homogeneous polynomial");
    std::size_t n = f.nvars();
    std::mt19937_64 rng(seed);
    LinSplit out{PiSigmaPoly(n), f, 0};
    int unexplained = 0;
    while (out.core.degree() > 0 && unexplained < 12) {
        LinearForm b = random_point(rng, n, 1 << 12), w = random_point(rng, n, 1 << 12);
        // Every linear factor must meet the line transversally.
        if (evaluate(out.core, w) == 0) continue;
        auto roots = rational_roots(line_restriction(out.core, b, w));
        if (roots.empty()) break;
        bool found = false;
        for (const auto& [rho, mu] : roots) {
            LinearForm p = add(b, scale(w, rho));
            Polynomial F = out.core;
            for (unsigned k = 1; k < mu; ++k) F = directional_derivative(F, w);
            LinearForm grad(n);
            for (std::size_t i = 0; i < n; ++i) grad[i] = evaluate(derivative(F, i), p);
            if (is_zero(grad)) continue;
            LinearForm l = normalize(grad);
            Polynomial lp = Polynomial::from_form(l);
            unsigned m = 0;
            while (auto q = try_divide(out.core, lp)) {
                out.core = *q;
                ++m;
            }
            if (m) {
                out.lin.multiply(l, m);
                found = true;
            }
        }
        if (!found) ++unexplained;
    }
    out.d_h = static_cast<unsigned>(std::max(out.core.degree(), 0));
    return out;
}

bool maybe_pisigma(const Polynomial& f, std::uint64_t seed) {
    if (f.degree() <= 1) return true;
    std::mt19937_64 rng(seed);
    const nmod::u64 p = 2147483647ull;
    for (int attempt = 0; attempt < 4; ++attempt) {
        LinearForm b = random_point(rng, f.nvars(), 1 << 10), w = random_point(rng, f.nvars(), 1 << 10);
        auto u = line_restriction(f, b, w);
        if (qdeg(u) != f.degree()) continue;
        nmod::Poly up(u.size());
        bool ok = true;
        for (std::size_t i = 0; i < u.size() && ok; ++i) ok = nmod::reduce(u[i], p, up[i]);
        nmod::trim(up);
        if (!ok || up.size() != u.size()) continue;
        return nmod::splits(up, p);
    }
    return true;
}

std::optional<PiSigmaPoly> as_pisigma(const Polynomial& f) {
    if (f.is_zero() || !f.is_homogeneous()) return std::nullopt;
    if (f.degree() == 0) return PiSigmaPoly(f.nvars(), f.leading().second);
    if (!maybe_pisigma(f)) return std::nullopt;
    LinSplit s = lin_split(f);
    if (s.core.degree() != 0) return std::nullopt;
    PiSigmaPoly p = s.lin;
    p.set_scale(s.core.leading().second);
    return p;
}

bool is_pi_sigma_real(const Polynomial& f) {
    if (f.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "ΠΣ test of the zero polynomial");
    if (!f.is_homogeneous()) throw Error(ErrorKind::NonHomogeneous, "ΠΣ test needs a homogeneous polynomial");
    return as_pisigma(f).has_value();
}

}  // namespace sps2
