#include "sps2/pisigma.hpp"

#include <algorithm>
#include <sstream>

namespace sps2 {

bool form_less(const LinearForm& a, const LinearForm& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

PiSigmaPoly PiSigmaPoly::from_forms(std::size_t n, const std::vector<LinearForm>& forms, const Scalar& scale) {
    PiSigmaPoly p(n, scale);
    for (const auto& l : forms) p.multiply(l);
    return p;
}

unsigned PiSigmaPoly::degree() const {
    unsigned d = 0;
    for (const auto& f : factors_) d += f.mult;
    return d;
}

void PiSigmaPoly::multiply(const LinearForm& l, unsigned mult) {
    if (l.size() != n_) throw Error(ErrorKind::DimensionMismatch, "factor length");
    if (mult == 0) return;
    if (is_zero(l)) throw Error(ErrorKind::ZeroForm, "zero factor in a product of linear forms");
    Scalar lead;
    for (const auto& c : l)
        if (c != 0) {
            lead = c;
            break;
        }
    LinearForm nl = sps2::scale(l, Scalar(1 / lead));
    for (unsigned i = 0; i < mult; ++i) scale_ *= lead;
    auto it = std::lower_bound(factors_.begin(), factors_.end(), nl,
                               [](const Factor& f, const LinearForm& v) { return form_less(f.form, v); });
    if (it != factors_.end() && it->form == nl) it->mult += mult;
    else factors_.insert(it, Factor{nl, mult});
}

PiSigmaPoly PiSigmaPoly::operator*(const PiSigmaPoly& o) const {
    if (o.n_ != n_) throw Error(ErrorKind::DimensionMismatch, "product of different rings");
    PiSigmaPoly r = *this;
    r.scale_ *= o.scale_;
    for (const auto& f : o.factors_) r.multiply(f.form, f.mult);
    return r;
}

bool PiSigmaPoly::operator==(const PiSigmaPoly& o) const {
    if (n_ != o.n_ || scale_ != o.scale_ || factors_.size() != o.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].mult != o.factors_[i].mult || factors_[i].form != o.factors_[i].form) return false;
    return true;
}

unsigned PiSigmaPoly::multiplicity_of(const LinearForm& l) const {
    if (is_zero(l)) throw Error(ErrorKind::ZeroForm, "multiplicity of the zero form");
    LinearForm nl = normalize(l);
    for (const auto& f : factors_)
        if (f.form == nl) return f.mult;
    return 0;
}

bool PiSigmaPoly::divides(const PiSigmaPoly& o) const {
    for (const auto& f : factors_)
        if (o.multiplicity_of(f.form) < f.mult) return false;
    return true;
}

PiSigmaPoly PiSigmaPoly::divide(const PiSigmaPoly& d) const {
    if (!d.divides(*this)) throw Error(ErrorKind::NonDivisible, "factor multiset does not divide");
    PiSigmaPoly r(n_, scale_ / d.scale_);
    for (const auto& f : factors_) {
        unsigned m = f.mult - d.multiplicity_of(f.form);
        if (m) r.factors_.push_back(Factor{f.form, m});
    }
    return r;
}

std::vector<LinearForm> PiSigmaPoly::forms_with_multiplicity() const {
    std::vector<LinearForm> out;
    for (const auto& f : factors_)
        for (unsigned i = 0; i < f.mult; ++i) out.push_back(f.form);
    return out;
}

std::vector<LinearForm> PiSigmaPoly::distinct_forms() const {
    std::vector<LinearForm> out;
    for (const auto& f : factors_) out.push_back(f.form);
    return out;
}

PiSigmaPoly PiSigmaPoly::monic() const {
    PiSigmaPoly r = *this;
    r.scale_ = 1;
    return r;
}

PiSigmaPoly PiSigmaPoly::transform(const Matrix& M) const {
    // l(Mx) has coefficient vector M^T l.
    Matrix Mt = transpose(M);
    PiSigmaPoly r(Mt.size(), scale_);
    for (const auto& f : factors_) r.multiply(mat_vec(Mt, f.form), f.mult);
    return r;
}

Polynomial PiSigmaPoly::expand() const {
    Polynomial p = Polynomial::constant(n_, scale_);
    if (scale_ == 0) return Polynomial(n_);
    for (const auto& f : factors_) p = p * Polynomial::from_form(f.form).pow(f.mult);
    return p;
}

std::string PiSigmaPoly::to_string() const {
    std::ostringstream os;
    os << scale_.get_str();
    for (const auto& f : factors_) {
        os << " * (" << form_to_string(f.form) << ")";
        if (f.mult > 1) os << "^" << f.mult;
    }
    return os.str();
}

PiSigmaPoly gcd_pisigma(const PiSigmaPoly& P1, const PiSigmaPoly& P2) {
    if (P1.nvars() != P2.nvars()) throw Error(ErrorKind::DimensionMismatch, "gcd of different rings");
    PiSigmaPoly g(P1.nvars());
    for (const auto& f : P1.factors()) {
        unsigned m = std::min(f.mult, P2.multiplicity_of(f.form));
        if (m) g.multiply(f.form, m);
    }
    return g;
}

Polynomial Sps2Circuit::expand() const {
    return G.expand() * (T0.expand() * alpha0 + T1.expand() * alpha1);
}

PiSigmaPoly Sps2Circuit::gate(int i) const {
    PiSigmaPoly g = G.monic() * (i == 0 ? T0 : T1);
    g.set_scale(G.scale() * (i == 0 ? alpha0 * T0.scale() : alpha1 * T1.scale()));
    return g;
}

Sps2Circuit circuit_from_gates(const PiSigmaPoly& M0, const PiSigmaPoly& M1) {
    Sps2Circuit c;
    c.n = M0.nvars();
    c.G = gcd_pisigma(M0, M1);
    c.T0 = M0.divide(c.G).monic();
    c.T1 = M1.divide(c.G).monic();
    c.alpha0 = M0.scale();
    c.alpha1 = M1.scale();
    return c;
}

Sps2Circuit canonical_circuit(const Sps2Circuit& c) {
    return circuit_from_gates(c.gate(0), c.gate(1));
}

std::size_t simple_rank(const Sps2Circuit& c) {
    Sps2Circuit s = canonical_circuit(c);
    std::vector<LinearForm> forms = s.T0.distinct_forms();
    for (const auto& l : s.T1.distinct_forms()) forms.push_back(l);
    return span_dim(forms);
}

bool verify_equivalence(const Sps2Circuit& c1, const Sps2Circuit& c2) {
    if (c1.n != c2.n || c1.expand() != c2.expand())
        throw Error(ErrorKind::PolynomialMismatch, "circuits compute different polynomials");
    Sps2Circuit a = canonical_circuit(c1), b = canonical_circuit(c2);
    if (a.G.monic() != b.G.monic()) return false;
    bool straight = a.T0 == b.T0 && a.T1 == b.T1;
    bool swapped = a.T0 == b.T1 && a.T1 == b.T0;
    return straight || swapped;
}

unsigned multiplicity(const LinearForm& l, const Polynomial& p) {
    if (p.is_zero()) throw Error(ErrorKind::UndefinedMultiplicity, "multiplicity in the zero polynomial");
    if (is_zero(l)) throw Error(ErrorKind::ZeroForm, "multiplicity of the zero form");
    Polynomial q = p, lp = Polynomial::from_form(l);
    unsigned t = 0;
    while (auto r = try_divide(q, lp)) {
        q = *r;
        ++t;
    }
    return t;
}

}  // namespace sps2
