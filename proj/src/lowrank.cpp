#include "sps2/lowrank.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "sps2/linear_factor.hpp"
#include "sps2/univariate.hpp"

namespace sps2 {

namespace {

constexpr nmod::u64 kPrime = 2147483647ull;

// Visits the k-subsets of [n] in lexicographic order until f returns false.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        if (!f(idx)) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::vector<LinearForm> pick(const std::vector<LinearForm>& v, const std::vector<std::size_t>& idx) {
    std::vector<LinearForm> out;
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

// Normal vector of the span of n - 1 forms in n variables; nullopt when they are dependent.
std::optional<LinearForm> hyperplane_normal(const std::vector<LinearForm>& rows) {
    std::size_t n = rows[0].size();
    LinearForm phi(n);
    for (std::size_t j = 0; j < n; ++j) {
        Matrix minor(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) minor[i].push_back(rows[i][c]);
        phi[j] = determinant(minor);
        if (j % 2) phi[j] = -phi[j];
    }
    if (is_zero(phi)) return std::nullopt;
    return normalize(phi);
}

template <class Fn>
std::optional<PiSigmaPoly> map_forms(const PiSigmaPoly& P, Fn&& fn) {
    PiSigmaPoly out(P.nvars(), P.scale());
    for (const auto& f : P.factors()) {
        LinearForm q = fn(f.form);
        if (is_zero(q)) return std::nullopt;
        out.multiply(q, f.mult);
    }
    return out;
}

using ModVec = std::vector<nmod::u64>;

std::optional<ModVec> reduce_vec(const LinearForm& l) {
    ModVec v(l.size());
    for (std::size_t i = 0; i < l.size(); ++i)
        if (!nmod::reduce(l[i], kPrime, v[i])) return std::nullopt;
    return v;
}

nmod::u64 dot_mod(const ModVec& a, const ModVec& b) {
    nmod::u64 s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s = (s + nmod::mulmod(a[i], b[i], kPrime)) % kPrime;
    return s;
}

// f - M restricted to a fixed random line must split modulo a prime whenever f - M is a product of forms.
class LineProbe {
public:
    LineProbe(const Polynomial& f, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<long> c(-(1 << 10), 1 << 10);
        b_.resize(f.nvars());
        w_.resize(f.nvars());
        for (auto& x : b_) x = c(rng);
        for (auto& x : w_) x = c(rng);
        auto u = line_restriction(f, b_, w_);
        f_line_.resize(u.size());
        for (std::size_t i = 0; i < u.size() && valid_; ++i) valid_ = nmod::reduce(u[i], kPrime, f_line_[i]);
        if (valid_) {
            bm_ = *reduce_vec(b_);
            wm_ = *reduce_vec(w_);
        }
    }

    bool valid() const { return valid_; }
    const ModVec& b() const { return bm_; }
    const ModVec& w() const { return wm_; }

    // M on the line, as a polynomial in t modulo the prime.
    std::optional<nmod::Poly> on_line(const PiSigmaPoly& M) const {
        nmod::u64 s;
        if (!nmod::reduce(M.scale(), kPrime, s)) return std::nullopt;
        nmod::Poly m{s};
        for (const auto& fac : M.factors()) {
            auto lm = reduce_vec(fac.form);
            if (!lm) return std::nullopt;
            nmod::Poly lin{dot_mod(*lm, bm_), dot_mod(*lm, wm_)};
            for (unsigned j = 0; j < fac.mult; ++j) m = nmod::mul(m, lin, kPrime);
        }
        return m;
    }

    bool may_split_minus(const nmod::Poly& m) const {
        if (!valid_) return true;
        nmod::Poly diff(std::max(m.size(), f_line_.size()), 0);
        for (std::size_t i = 0; i < f_line_.size(); ++i) diff[i] = f_line_[i];
        for (std::size_t i = 0; i < m.size(); ++i) diff[i] = (diff[i] + kPrime - m[i]) % kPrime;
        nmod::trim(diff);
        if (diff.size() <= 2) return true;
        return nmod::splits(diff, kPrime);
    }

    bool may_split_difference(const PiSigmaPoly& M) const {
        if (!valid_) return true;
        auto m = on_line(M);
        return !m || may_split_minus(*m);
    }

private:
    LinearForm b_, w_;
    ModVec bm_, wm_;
    nmod::Poly f_line_;
    bool valid_ = true;
};

// Restriction of f to the line b + t w splits modulo the prime; true when the test is inconclusive.
bool line_may_split(const Polynomial& f, const LinearForm& b, const LinearForm& w) {
    auto u = line_restriction(f, b, w);
    nmod::Poly p(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!nmod::reduce(u[i], kPrime, p[i])) return true;
    nmod::trim(p);
    if (p.size() <= 2) return true;
    return nmod::splits(p, kPrime);
}

Scalar eval_pisigma(const PiSigmaPoly& P, const LinearForm& z) {
    Scalar v = P.scale();
    for (const auto& f : P.factors()) {
        Scalar lz = dot(f.form, z);
        for (unsigned j = 0; j < f.mult; ++j) v *= lz;
    }
    return v;
}

// pi(f) = 0 for the projection whose matrix rows are pi(x_k); random evaluation first, then exact.
bool projection_vanishes(const Polynomial& f, const Matrix& M, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> c(-(1 << 12), 1 << 12);
    std::size_t n = f.nvars();
    for (int trial = 0; trial < 3; ++trial) {
        LinearForm z(n);
        for (auto& x : z) x = c(rng);
        // pi(f)(z) = f(y) with y_k = pi(x_k)(z).
        LinearForm y = mat_vec(M, z);
        if (evaluate(f, y) != 0) return false;
    }
    return substitute_linear(f, M).is_zero();
}

std::vector<LinearForm> complete_basis(std::vector<LinearForm> basis, const std::vector<LinearForm>& pool) {
    std::size_t n = basis[0].size();
    for (const auto& c : pool) {
        if (basis.size() == n) break;
        basis.push_back(c);
        if (!linearly_independent(basis)) basis.pop_back();
    }
    for (std::size_t j = 0; j < n && basis.size() < n; ++j) {
        basis.push_back(unit_form(n, j));
        if (!linearly_independent(basis)) basis.pop_back();
    }
    return basis;
}

std::vector<std::size_t> iota(std::size_t from, std::size_t to) {
    std::vector<std::size_t> v;
    for (std::size_t i = from; i < to; ++i) v.push_back(i);
    return v;
}

Decomposition failure(const Polynomial& f, const std::string& why) {
    Decomposition d;
    d.f = f;
    d.diagnostic = why;
    return d;
}

Polynomial power_of_form(const LinearForm& l, unsigned t) {
    return Polynomial::from_form(l).pow(t);
}

}  // namespace

LowRankConfig LowRankConfig::desk() { return LowRankConfig{}; }

LowRankConfig LowRankConfig::theoretical() {
    LowRankConfig c;
    c.k = rank_bound_c(3) + 2;
    c.s_threshold = rank_bound_c(4) + 1;
    c.r = c.s_threshold;
    return c;
}

std::size_t rank_bound_c(std::size_t m) { return 3 * m * m; }

bool delta_admissible(const Scalar& delta) {
    if (delta <= 0) return false;
    Scalar a = Scalar(7) - Scalar(6) * delta;
    return a > 0 && a * a > 37;
}

bool theta_admissible(const Scalar& delta, const Scalar& theta) {
    return theta > Scalar(3) * delta / (Scalar(1) - delta) && theta < Scalar(1) - Scalar(3) * delta;
}

void validate_config(const LowRankConfig& cfg) {
    if (!delta_admissible(cfg.delta)) throw Error(ErrorKind::InvalidArgument, "delta outside (0, (7 - sqrt 37)/6)");
    if (!theta_admissible(cfg.delta, cfg.theta))
        throw Error(ErrorKind::InvalidArgument, "theta outside (3 delta/(1 - delta), 1 - 3 delta)");
    if (cfg.k == 0 || cfg.r < 2) throw Error(ErrorKind::InvalidArgument, "k must be positive and r at least 2");
}

Scalar detector_fraction(const Scalar& delta, const Scalar& theta, bool small_gate) {
    Scalar one(1);
    if (small_gate) return one - delta - theta;
    return (one - delta) * (one + theta) - one;
}

bool detector_inequality_holds(const Scalar& delta, const Scalar& theta) {
    for (bool small : {true, false}) {
        Scalar v = detector_fraction(delta, theta, small);
        if (v <= 0) return false;
        if ((Scalar(2) - v) / v > (Scalar(1) - delta) / delta) return false;
    }
    return true;
}

LinearForm apply_transform(const Matrix& M, const LinearForm& l) { return mat_vec(transpose(M), l); }

mpz_class transform_bound(unsigned d, unsigned N_bits) {
    mpz_class N = 1;
    N <<= N_bits ? N_bits : std::max(d, 16u);
    return N;
}

namespace {

mpz_class uniform_in(const mpz_class& N, std::mt19937_64& rng) {
    std::size_t bits = mpz_sizeinbase(N.get_mpz_t(), 2);
    while (true) {
        mpz_class x = 0;
        for (std::size_t b = 0; b < bits; b += 32) {
            x <<= 32;
            x += static_cast<unsigned long>(rng() & 0xffffffffu);
        }
        mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), bits);
        if (x < N) return x + 1;
    }
}

Matrix random_matrix(std::size_t r, const mpz_class& N, std::mt19937_64& rng) {
    Matrix m(r, LinearForm(r));
    for (auto& row : m)
        for (auto& x : row) x = Scalar(uniform_in(N, rng));
    return m;
}

}  // namespace

RandomTransformPair sample_transform(std::size_t r, const mpz_class& N, std::mt19937_64& rng) {
    if (r < 2) throw Error(ErrorKind::InvalidArgument, "transform dimension must be at least 2");
    for (int attempt = 0; attempt < 16; ++attempt) {
        RandomTransformPair p{random_matrix(r, N, rng), random_matrix(r, N, rng)};
        if (determinant(p.Omega) != 0) return p;
    }
    throw Error(ErrorKind::RetryExhausted, "no invertible Omega in 16 draws");
}

AssumptionReport check_assumptions(const PointSet& T, const RandomTransformPair& pair, std::size_t k) {
    AssumptionReport rep;
    std::size_t r = pair.Omega.size();
    if (k == 0 || k >= r) throw Error(ErrorKind::InvalidArgument, "assumption checks need 0 < k < r");
    if (determinant(pair.Omega) == 0) rep.violations.push_back("assumption 0: Omega is singular");
    PointSet pts;
    for (const auto& t : T) {
        if (t.size() != r) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from Omega");
        if (is_zero(t)) continue;
        LinearForm nt = normalize(t);
        if (std::find(pts.begin(), pts.end(), nt) == pts.end()) pts.push_back(nt);
    }
    std::vector<LinearForm> om;
    for (const auto& t : pts) om.push_back(apply_transform(pair.Omega, t));
    for (std::size_t a = 0; a < pts.size(); ++a)
        if (om[a][0] == 0) rep.violations.push_back("assumption 1: first coordinate vanishes for " + form_to_string(pts[a]));
    std::vector<LinearForm> lom;
    for (const auto& v : om) lom.push_back(apply_transform(pair.Lambda, v));

    std::size_t budget = 20000;
    bool a2 = true, a3 = true, a4 = true;
    for_each_subset(pts.size(), r, [&](const std::vector<std::size_t>& idx) {
        if (budget == 0) {
            rep.skipped_subsets = true;
            return false;
        }
        --budget;
        if (!linearly_independent(pick(pts, idx))) return true;
        if (a2 && !linearly_independent(pick(om, idx))) {
            rep.violations.push_back("assumption 2: an independent r-set loses independence under Omega");
            a2 = false;
        }
        // Every choice of the k forms kept under Omega alone, and of the form placed at position k + 1.
        for_each_subset(r, k, [&](const std::vector<std::size_t>& first) {
            std::vector<std::size_t> rest;
            for (std::size_t j = 0; j < r; ++j)
                if (std::find(first.begin(), first.end(), j) == first.end()) rest.push_back(idx[j]);
            std::vector<LinearForm> head;
            for (auto j : first) head.push_back(om[idx[j]]);
            for (std::size_t lead = 0; lead < rest.size(); ++lead) {
                std::vector<LinearForm> B = head;
                B.push_back(lom[rest[lead]]);
                for (std::size_t j = 0; j < rest.size(); ++j)
                    if (j != lead) B.push_back(lom[rest[j]]);
                if (!linearly_independent(B)) {
                    if (a3) rep.violations.push_back("assumption 3: mixed Omega / Lambda Omega set is dependent");
                    a3 = false;
                    return false;
                }
                if (!a4) continue;
                BasisDecomposition dec(B, {{"all", iota(0, r)}});
                for (const auto& v : om) {
                    if (in_span(head, v)) continue;
                    if (dec.coordinates(v)[k] == 0) {
                        rep.violations.push_back("assumption 4: coordinate k + 1 vanishes for " + form_to_string(v));
                        a4 = false;
                        break;
                    }
                }
            }
            return true;
        });
        return true;
    });
    return rep;
}

namespace {

// Modular image of M_i = K_i pi(f~) / pi(K~) on the probe line, for ruling out hyperplanes before exact work.
class PlaneFilter {
public:
    static std::optional<PlaneFilter> make(const LinearForm& l1, const PiSigmaPoly& PF0, const PiSigmaPoly& Kt,
                                           const PiSigmaPoly& Ki, const LineProbe& probe) {
        if (!probe.valid()) return std::nullopt;
        PlaneFilter pf;
        auto l1m = reduce_vec(l1);
        auto kline = probe.on_line(Ki);
        nmod::u64 sf, sk;
        if (!l1m || !kline || !nmod::reduce(PF0.scale(), kPrime, sf) || !nmod::reduce(Kt.scale(), kPrime, sk) || sk == 0)
            return std::nullopt;
        pf.l1_ = *l1m;
        pf.l1b_ = dot_mod(pf.l1_, probe.b());
        pf.l1w_ = dot_mod(pf.l1_, probe.w());
        pf.base_ = nmod::mul(*kline, nmod::Poly{nmod::mulmod(sf, nmod::invmod(sk, kPrime), kPrime)}, kPrime);
        for (auto [P, out] : {std::pair{&PF0, &pf.num_}, std::pair{&Kt, &pf.den_}})
            for (const auto& fac : P->factors()) {
                auto v = reduce_vec(fac.form);
                if (!v) return std::nullopt;
                out->push_back({*v, dot_mod(*v, probe.b()), dot_mod(*v, probe.w()), fac.mult});
            }
        return pf;
    }

    bool plausible(const ModVec& phi, const LineProbe& probe) const {
        nmod::u64 den = dot_mod(phi, l1_);
        if (den == 0) return true;
        nmod::u64 inv = nmod::invmod(den, kPrime);
        auto line = [&](const std::vector<Term>& terms) {
            nmod::Poly m{1};
            for (const auto& t : terms) {
                nmod::u64 c = nmod::mulmod(dot_mod(phi, t.v), inv, kPrime);
                nmod::Poly lin{(t.b + kPrime - nmod::mulmod(l1b_, c, kPrime)) % kPrime,
                               (t.w + kPrime - nmod::mulmod(l1w_, c, kPrime)) % kPrime};
                for (unsigned j = 0; j < t.mult; ++j) m = nmod::mul(m, lin, kPrime);
            }
            return m;
        };
        nmod::Poly num = line(num_), den_line = line(den_);
        if (den_line.empty()) return true;
        nmod::Poly q = nmod::divide(num, den_line, kPrime);
        if (nmod::mul(q, den_line, kPrime) != num) return false;
        return probe.may_split_minus(nmod::mul(base_, q, kPrime));
    }

private:
    struct Term {
        ModVec v;
        nmod::u64 b, w;
        unsigned mult;
    };
    ModVec l1_;
    nmod::u64 l1b_ = 0, l1w_ = 0;
    nmod::Poly base_;
    std::vector<Term> num_, den_;
};

}  // namespace

namespace {

// Data of the easy case that depends only on f and C, shared by every (K0, K1) tried on the same f.
class EasyContext {
public:
    EasyContext(const Polynomial& f, const CandidateSet& C) : f_(f), C_(C), n_(f.nvars()), probe_(f, 0x5eed) {
        if (f.is_zero() || n_ < 2 || C.forms.size() < n_) return;
        // W' depends on {l2..lr} only through its span.
        std::set<LinearForm> seen;
        for_each_subset(C.forms.size(), n_ - 1, [&](const std::vector<std::size_t>& idx) {
            auto phi = hyperplane_normal(pick(C.forms, idx));
            if (phi && seen.insert(*phi).second) planes_.push_back(*phi);
            return true;
        });
        for (const auto& phi : planes_) planes_mod_.push_back(reduce_vec(phi));
        std::mt19937_64 rng(0x11e);
        std::uniform_int_distribution<long> c(-(1 << 10), 1 << 10);
        line_b_.resize(n_);
        line_w_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            line_b_[k] = c(rng);
            line_w_[k] = c(rng);
        }
        per_l1_.resize(C.forms.size());
    }

    const Polynomial& f() const { return f_; }

    Decomposition run(const PiSigmaPoly& K0, const PiSigmaPoly& K1) {
        Decomposition none = failure(f_, "easy case: no basis guess verified");
        if (planes_.empty()) return none;
        for (int i = 0; i < 2; ++i) {
            const PiSigmaPoly& Ki = i == 0 ? K0 : K1;
            for (std::size_t c = 0; c < C_.forms.size(); ++c) {
                const LinearForm& l1 = C_.forms[c];
                L1Data& data = l1_data(c);
                if (Ki.multiplicity_of(l1) != data.t || !data.PF0) continue;
                PiSigmaPoly Kt = Ki.divide(PiSigmaPoly::from_forms(n_, std::vector<LinearForm>(data.t, l1)));
                auto filter = PlaneFilter::make(l1, *data.PF0, Kt, Ki, probe_);
                for (std::size_t pi = 0; pi < planes_.size(); ++pi) {
                    const LinearForm& phi = planes_[pi];
                    Scalar pl = dot(phi, l1);
                    if (pl == 0) continue;
                    if (filter && planes_mod_[pi] && !filter->plausible(*planes_mod_[pi], probe_)) continue;
                    // The form with the same restriction to l1 = 0 that lies in W' = ker phi.
                    auto proj = [&](const LinearForm& v) { return sub(v, scale(l1, dot(phi, v) / pl)); };
                    auto PF = map_forms(*data.PF0, proj);
                    auto PK = map_forms(Kt, proj);
                    if (!PF || !PK || !PK->divides(*PF)) continue;
                    PiSigmaPoly Mi = Ki * PF->divide(*PK);
                    if (!probe_.may_split_difference(Mi)) continue;
                    Polynomial R = f_ - Mi.expand();
                    if (R.is_zero()) continue;
                    auto Mo = as_pisigma(R);
                    if (!Mo) continue;
                    Decomposition d;
                    d.iscorrect = true;
                    d.f = f_;
                    d.M0 = i == 0 ? Mi : *Mo;
                    d.M1 = i == 0 ? *Mo : Mi;
                    d.path = "easy";
                    return d;
                }
            }
        }
        return none;
    }

private:
    struct L1Data {
        bool ready = false;
        unsigned t = 0;
        std::optional<PiSigmaPoly> PF0;  // f~ restricted to l1 = 0, when it is a product of forms
    };

    L1Data& l1_data(std::size_t c) {
        L1Data& data = per_l1_[c];
        if (data.ready) return data;
        data.ready = true;
        const LinearForm& l1 = C_.forms[c];
        data.t = multiplicity(l1, f_);
        Polynomial ft = data.t ? divide_exact(f_, power_of_form(l1, data.t)) : f_;
        // Eliminate the pivot variable of l1; whether pi(f~) is a product of forms does not depend on W'.
        std::size_t p = 0;
        while (l1[p] == 0) ++p;
        Matrix M = identity_matrix(n_);
        M[p] = scale(l1, Scalar(-1) / l1[p]);
        M[p][p] = 0;
        if (!line_may_split(ft, mat_vec(M, line_b_), mat_vec(M, line_w_))) return data;
        data.PF0 = as_pisigma(substitute_linear(ft, M));
        return data;
    }

    Polynomial f_;
    const CandidateSet& C_;
    std::size_t n_;
    LineProbe probe_;
    std::vector<LinearForm> planes_;
    std::vector<std::optional<ModVec>> planes_mod_;
    LinearForm line_b_, line_w_;
    std::vector<L1Data> per_l1_;
};

Decomposition medium_with(EasyContext& ctx) {
    const Polynomial& f = ctx.f();
    if (f.is_zero()) return failure(f, "medium case: zero polynomial");
    PiSigmaPoly L = lin_split(f).lin;
    Decomposition d = ctx.run(L, L);
    if (d.iscorrect) d.path = "medium";
    else d.diagnostic = "medium case: easy case with K0 = K1 = Lin(f) failed";
    return d;
}

}  // namespace

Decomposition easy_case(const Polynomial& f, const PiSigmaPoly& K0, const PiSigmaPoly& K1, const CandidateSet& C) {
    EasyContext ctx(f, C);
    return ctx.run(K0, K1);
}

Decomposition medium_case(const Polynomial& f, const CandidateSet& C) {
    EasyContext ctx(f, C);
    return medium_with(ctx);
}

namespace {

PiSigmaPoly identify_from_lin(const PiSigmaPoly& lin, const CandidateSet& C, const std::vector<LinearForm>& S) {
    std::size_t n = lin.nvars();
    if (!linearly_independent(S)) throw Error(ErrorKind::Precondition, "identify_factors needs an independent S");
    std::vector<LinearForm> outside;
    for (const auto& c : C.forms)
        if (!in_flat(c, S)) outside.push_back(c);
    PiSigmaPoly I(n);
    for (const auto& fac : lin.factors()) {
        bool flag = false;
        std::vector<LinearForm> Sl = S;
        Sl.push_back(fac.form);
        if (linearly_independent(Sl)) {
            int hits = 0;
            for (const auto& c : outside)
                if (in_span(Sl, c) && ++hits >= 2) break;
            flag = hits >= 2;
        }
        if (!flag) I.multiply(fac.form, fac.mult);
    }
    return I;
}

}  // namespace

PiSigmaPoly identify_factors(const Polynomial& f, const CandidateSet& C, const std::vector<LinearForm>& S) {
    return identify_from_lin(lin_split(f).lin, C, S);
}

DetectorOverestimate overestimate_detector(const Polynomial& fstar, const std::vector<LinearForm>& S,
                                           const CandidateSet& C) {
    DetectorOverestimate out{S, {}};
    std::size_t n = fstar.nvars();
    std::mt19937_64 rng(0xde7ec7);
    for (const auto& l : C.forms) {
        bool flag = true;
        for (const auto& lj : S) {
            if (!linearly_independent({l, lj})) continue;
            bool vanishes;
            if (n == 2) {
                vanishes = fstar.degree() > 0;
            } else {
                auto basis = complete_basis({l, lj}, C.forms);
                BasisDecomposition dec(basis, {{"U", {0, 1}}, {"Up", iota(2, n)}});
                vanishes = projection_vanishes(fstar, dec.projection_matrix("Up"), rng);
            }
            if (vanishes) {
                flag = false;
                break;
            }
        }
        if (flag) out.X.push_back(l);
    }
    return out;
}

namespace {

// Factors of P whose W2 component is nonzero.
PiSigmaPoly strip_w2_prime(const PiSigmaPoly& P, const BasisDecomposition& split) {
    PiSigmaPoly out(P.nvars(), P.scale());
    for (const auto& f : P.factors())
        if (!is_zero(project(f.form, split, "W2"))) out.multiply(f.form, f.mult);
    return out;
}

// pi(f) / pi(K) as a product of forms, for the projection onto block W of dec.
std::optional<PiSigmaPoly> projected_quotient(const Polynomial& f, const PiSigmaPoly& K, const BasisDecomposition& dec,
                                              const std::string& W) {
    auto PK = project_pisigma(K, dec, W);
    if (!PK) return std::nullopt;
    Polynomial pf = substitute_linear(f, dec.projection_matrix(W));
    if (pf.is_zero()) return std::nullopt;
    auto q = try_divide(pf, PK->expand());
    if (!q) return std::nullopt;
    return as_pisigma(*q);
}

std::string easy_key(const Polynomial& f, const PiSigmaPoly& K0, const PiSigmaPoly& K1) {
    return f.to_text() + "|" + K0.to_string() + "|" + K1.to_string();
}

}  // namespace

Decomposition hard_case(const Polynomial& f, const CandidateSet& C, const Matrix& Lambda, const LowRankConfig& cfg,
                        const HardCaseHook& hook) {
    std::size_t n = f.nvars();
    if (f.is_zero() || n < 4 || C.forms.size() < n) return failure(f, "hard case: rank or candidate set too small");
    std::size_t k = std::min(cfg.k, n - 3);
    std::set<std::string> easy_failed;
    std::mt19937_64 rng(0x4a7d);
    std::uniform_int_distribution<long> coord(-(1 << 12), 1 << 12);
    const auto& Cf = C.forms;
    PiSigmaPoly lin_f = lin_split(f).lin;
    std::map<std::string, std::unique_ptr<EasyContext>> contexts;
    Decomposition result;

    for (int i = 0; i < 2; ++i) {
        bool stop = false;
        for_each_subset(Cf.size(), k, [&](const std::vector<std::size_t>& sidx) -> bool {
            std::vector<LinearForm> S0 = pick(Cf, sidx);
            if (!linearly_independent(S0)) return true;
            std::size_t completions = 0;
            Decomposition found;
            // Completions l'_{k+1}..l'_r of S0 inside C, mapped through Lambda.
            for_each_subset(Cf.size(), n - k, [&](const std::vector<std::size_t>& cidx) -> bool {
                for (auto c : cidx)
                    if (std::find(sidx.begin(), sidx.end(), c) != sidx.end()) return true;
                std::vector<LinearForm> Bp = S0;
                for (auto c : cidx) Bp.push_back(Cf[c]);
                if (!linearly_independent(Bp)) return true;
                ++completions;
                std::vector<LinearForm> B = S0;
                for (auto c : cidx) B.push_back(apply_transform(Lambda, Cf[c]));
                if (linearly_independent(B)) {
                    PiSigmaPoly I = identify_from_lin(lin_f, C, S0);
                    Polynomial fstar = divide_exact(f, I.expand());
                    unsigned dstar = static_cast<unsigned>(fstar.degree());
                    PiSigmaPoly K[2] = {PiSigmaPoly(n), PiSigmaPoly(n)};
                    PiSigmaPoly& Kc = K[1 - i];
                    DetectorOverestimate X = overestimate_detector(fstar, S0, C);
                    for (unsigned iter = 0; Kc.degree() < dstar; ++iter) {
                        if (iter > dstar) throw Error(ErrorKind::Precondition, "hard case loop exceeded deg(f*)");
                        std::string key = easy_key(fstar, K[0], K[1]);
                        if (!easy_failed.count(key)) {
                            auto& ctx = contexts[fstar.to_text()];
                            if (!ctx) ctx = std::make_unique<EasyContext>(fstar, C);
                            Decomposition e = ctx->run(K[0], K[1]);
                            if (e.iscorrect) {
                                found.iscorrect = true;
                                found.f = f;
                                found.M0 = I * e.M0;
                                found.M1 = I * e.M1;
                                return false;
                            }
                            easy_failed.insert(key);
                        }
                        unsigned before = Kc.degree();
                        for (const auto& d1 : X.X) {
                            std::vector<LinearForm> B2 = S0;
                            B2.push_back(d1);
                            for (std::size_t j = k + 1; j < n; ++j) B2.push_back(B[j]);
                            if (!linearly_independent(B2)) continue;
                            BasisDecomposition split = make_split_basis(B2, iota(0, k), {k}, iota(k + 1, n));
                            BasisDecomposition v1(B2, {{"V1", {0}}, {"V1'", iota(1, n)}});
                            auto Q0 = projected_quotient(fstar, Kc, v1, "V1'");
                            auto Q1 = projected_quotient(fstar, Kc, split, "W1'");
                            if (!Q0 || !Q1) continue;
                            PiSigmaPoly q0 = strip_w2_prime(*Q0, split), q1 = strip_w2_prime(*Q1, split);
                            auto p0 = project_pisigma(q0, split, "W0'");
                            if (!p0) continue;
                            PiSigmaPoly P = run_reconstructor(*p0, q1, split);
                            if (P.is_constant()) continue;
                            Kc = Kc * P;
                            if (hook) hook(HardCaseEvent{i, S0, I, Kc});
                            if (Kc.degree() >= dstar) break;
                        }
                        if (Kc.degree() == before || Kc.degree() > dstar) break;
                    }
                    if (Kc.degree() == dstar) {
                        // gate i vanishes on l_1 = 0, which fixes the scale of gate 1 - i.
                        PiSigmaPoly M = I * Kc;
                        const LinearForm& l1 = S0[0];
                        std::size_t piv = 0;
                        while (l1[piv] == 0) ++piv;
                        for (int trial = 0; trial < 4; ++trial) {
                            LinearForm z(n);
                            for (auto& x : z) x = coord(rng);
                            z[piv] = 0;
                            z[piv] = -dot(l1, z) / l1[piv];
                            Scalar mz = eval_pisigma(M, z);
                            if (mz == 0) continue;
                            M.set_scale(M.scale() * evaluate(f, z) / mz);
                            Polynomial R = f - M.expand();
                            if (R.is_zero()) break;
                            if (auto Mo = as_pisigma(R)) {
                                found.iscorrect = true;
                                found.f = f;
                                found.M0 = i == 0 ? *Mo : M;
                                found.M1 = i == 0 ? M : *Mo;
                                return false;
                            }
                            break;
                        }
                    }
                }
                return completions < cfg.max_completions;
            });
            if (found.iscorrect) {
                found.path = "hard";
                stop = true;
                result = found;
                return false;
            }
            return true;
        });
        if (stop) return result;
    }
    return failure(f, "hard case: no detector guess produced a verified decomposition");
}

Decomposition reconstruct_low_rank(const Polynomial& f, const LowRankConfig& cfg, std::mt19937_64& rng) {
    validate_config(cfg);
    std::size_t n = f.nvars();
    if (f.is_zero() || !f.is_homogeneous() || f.degree() < 1) return failure(f, "input must be nonzero and homogeneous");
    mpz_class N = transform_bound(static_cast<unsigned>(f.degree()), cfg.N_bits);
    std::string last = "no attempt";
    for (unsigned attempt = 0; attempt < cfg.max_resamples; ++attempt) {
        RandomTransformPair pair = sample_transform(n, N, rng);
        Polynomial g = substitute_linear(f, pair.Omega);
        CandidateOptions opt = cfg.candidates;
        opt.seed = rng();
        CandidateSet C;
        try {
            C = candidates(g, opt);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::DegenerateSystem || e.kind() == ErrorKind::SizeLimit)
                return failure(f, std::string("no ΣΠΣ(2) structure found: candidate set: ") + e.what());
            throw;
        }
        // A gate factor with vanishing x_1 coefficient is missing from C, which usually leaves C rank deficient.
        if (span_dim(C.forms) < n) {
            last = "candidate set does not span after " + std::to_string(attempt + 1) + " draws";
            continue;
        }
        EasyContext ctx(g, C);
        Decomposition d = medium_with(ctx);
        if (!d.iscorrect) d = ctx.run(PiSigmaPoly(n), PiSigmaPoly(n));
        if (!d.iscorrect) d = hard_case(g, C, pair.Lambda, cfg);
        if (!d.iscorrect) return failure(f, "no ΣΠΣ(2) structure found: " + d.diagnostic);
        Matrix inv = inverse(pair.Omega);
        Decomposition out;
        out.f = f;
        out.M0 = d.M0.transform(inv);
        out.M1 = d.M1.transform(inv);
        out.path = d.path;
        out.iscorrect = out.M0.expand() + out.M1.expand() == f;
        if (!out.iscorrect) out.diagnostic = "identity check failed after mapping back";
        return out;
    }
    return failure(f, "no ΣΠΣ(2) structure found: " + last);
}

}  // namespace sps2
