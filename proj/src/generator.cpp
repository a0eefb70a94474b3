#include "sps2/generator.hpp"

#include <algorithm>
#include <random>

#include "sps2/linear_factor.hpp"

namespace sps2 {

namespace {

constexpr long kCoeff = 9;

class FormSource {
public:
    explicit FormSource(std::uint64_t seed) : rng_(seed) {}

    // Random nonzero form whose coordinates outside [0, support) are zero.
    LinearForm form(std::size_t n, std::size_t support) {
        std::uniform_int_distribution<long> c(-kCoeff, kCoeff);
        LinearForm l(n, 0);
        do {
            for (std::size_t j = 0; j < support; ++j) l[j] = c(rng_);
        } while (is_zero(l));
        return l;
    }

    long small(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

    Scalar alpha() {
        long p;
        do p = small(-5, 5);
        while (p == 0);
        Scalar a(p, small(1, 5));
        a.canonicalize();
        return a;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

bool proportional_to_any(const LinearForm& l, const std::vector<LinearForm>& forms) {
    for (const auto& f : forms)
        if (are_proportional(l, f)) return true;
    return false;
}

// m pairwise non-proportional forms, none proportional to a form in avoid.
std::vector<LinearForm> distinct_forms(FormSource& src, std::size_t n, std::size_t support, unsigned m,
                                       const std::vector<LinearForm>& avoid) {
    std::vector<LinearForm> out;
    std::vector<LinearForm> seen = avoid;
    for (int guard = 0; out.size() < m; ++guard) {
        if (guard > 10000) throw Error(ErrorKind::InvalidArgument, "cannot draw enough distinct forms");
        LinearForm l = src.form(n, support);
        if (proportional_to_any(l, seen)) continue;
        out.push_back(l);
        seen.push_back(l);
    }
    return out;
}

std::vector<LinearForm> concat(std::vector<LinearForm> a, const std::vector<LinearForm>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

struct Raw {
    std::vector<LinearForm> G, T0, T1;
    Scalar alpha0, alpha1;
};

Polynomial product(std::size_t n, const std::vector<LinearForm>& forms) {
    Polynomial p = Polynomial::constant(n, 1);
    for (const auto& l : forms) p = p * Polynomial::from_form(l);
    return p;
}

Raw generic(FormSource& src, std::size_t n, unsigned M, unsigned degG) {
    Raw c;
    c.T0 = distinct_forms(src, n, n, M, {});
    c.T1 = distinct_forms(src, n, n, M, c.T0);
    for (unsigned j = 0; j < degG; ++j) c.G.push_back(src.form(n, n));
    c.alpha0 = src.alpha();
    c.alpha1 = src.alpha();
    return c;
}

Raw easy(FormSource& src, unsigned M, unsigned degG) {
    Raw c;
    do c.T0 = distinct_forms(src, 4, 3, M, {});
    while (span_dim(c.T0) < 3);
    LinearForm l = src.form(4, 4);
    while (l[3] == 0) l = src.form(4, 4);
    for (const auto& t : c.T0) {
        long s;
        do s = src.small(-5, 5);
        while (s == 0);
        c.T1.push_back(add(t, scale(l, s)));
    }
    for (unsigned j = 0; j < degG; ++j) c.G.push_back(src.form(4, 3));
    c.alpha0 = 1;
    c.alpha1 = -1;
    return c;
}

Raw medium(FormSource& src, unsigned M, unsigned degG) {
    Raw c;
    c.T0 = distinct_forms(src, 4, 2, M, {});
    do c.T1 = distinct_forms(src, 4, 4, M, c.T0);
    while (span_dim(concat(c.T0, c.T1)) < 4);
    for (unsigned j = 0; j < degG; ++j) c.G.push_back(src.form(4, 4));
    c.alpha0 = src.alpha();
    c.alpha1 = src.alpha();
    return c;
}

Raw hard(FormSource& src, unsigned M, unsigned degG) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Raw c = generic(src, 4, M, degG);
        if (span_dim(c.T0) < 4 || span_dim(c.T1) < 4) continue;
        Polynomial g = product(4, c.T0) * c.alpha0 + product(4, c.T1) * c.alpha1;
        if (g.is_zero() || !lin_split(g).lin.is_constant()) continue;
        return c;
    }
    throw Error(ErrorKind::InvalidArgument, "hard-case profile: no admissible draw");
}

}  // namespace

const char* profile_name(RankProfile p) {
    switch (p) {
        case RankProfile::Generic: return "generic";
        case RankProfile::EasyCase: return "easy-case";
        case RankProfile::MediumCase: return "medium-case";
        case RankProfile::HardCase: return "hard-case";
    }
    return "?";
}

RankProfile parse_profile(const std::string& name) {
    for (RankProfile p : {RankProfile::Generic, RankProfile::EasyCase, RankProfile::MediumCase, RankProfile::HardCase})
        if (name == profile_name(p)) return p;
    throw Error(ErrorKind::Parse, "unknown rank profile '" + name + "'");
}

Sps2Circuit generate_circuit(std::uint64_t seed, std::size_t n, unsigned d, unsigned degG, RankProfile profile) {
    if (d < degG + 1) throw Error(ErrorKind::InvalidArgument, "d must exceed deg G");
    unsigned M = d - degG;
    FormSource src(seed);
    Raw raw;
    switch (profile) {
        case RankProfile::Generic:
            if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
            raw = generic(src, n, M, degG);
            break;
        case RankProfile::EasyCase:
            if (n < 4 || M < 5) throw Error(ErrorKind::InvalidArgument, "easy-case profile needs n >= 4 and gate degree >= 5");
            raw = easy(src, M, degG);
            break;
        case RankProfile::MediumCase:
            if (n < 4 || M < 3) throw Error(ErrorKind::InvalidArgument, "medium-case profile needs n >= 4 and gate degree >= 3");
            raw = medium(src, M, degG);
            break;
        case RankProfile::HardCase:
            if (n < 4 || M < 4) throw Error(ErrorKind::InvalidArgument, "hard-case profile needs n >= 4 and gate degree >= 4");
            raw = hard(src, M, degG);
            break;
    }
    if (profile != RankProfile::Generic && n > 4) {
        // l(y) with y = A x, A of full rank 4.
        Matrix A;
        do {
            A.assign(4, LinearForm(n));
            for (auto& row : A)
                for (auto& x : row) x = src.small(-3, 3);
        } while (matrix_rank(A) < 4);
        auto embed = [&](std::vector<LinearForm>& forms) {
            for (auto& l : forms) l = mat_vec(transpose(A), l);
        };
        embed(raw.G);
        embed(raw.T0);
        embed(raw.T1);
    }
    Sps2Circuit c;
    c.n = n;
    c.G = PiSigmaPoly::from_forms(n, raw.G);
    c.T0 = PiSigmaPoly::from_forms(n, raw.T0);
    c.T1 = PiSigmaPoly::from_forms(n, raw.T1);
    c.alpha0 = raw.alpha0;
    c.alpha1 = raw.alpha1;
    if (!gcd_pisigma(c.T0, c.T1).is_constant()) throw Error(ErrorKind::InvalidArgument, "gates share a factor");
    return canonical_circuit(c);
}

}  // namespace sps2
