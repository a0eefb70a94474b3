#include "sps2/core_algebra.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace sps2 {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::ZeroForm: return "zero-form";
        case ErrorKind::NotStandardizable: return "not-standardizable";
        case ErrorKind::UnknownBlock: return "unknown-block";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::NotSubset: return "not-subset";
        case ErrorKind::NonDivisible: return "non-divisible";
        case ErrorKind::PolynomialMismatch: return "polynomial-mismatch";
        case ErrorKind::UndefinedMultiplicity: return "undefined-multiplicity";
        case ErrorKind::NonHomogeneous: return "non-homogeneous";
        case ErrorKind::ZeroPolynomial: return "zero-polynomial";
        case ErrorKind::DegreeMismatch: return "degree-mismatch";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::DegenerateSystem: return "degenerate-system";
        case ErrorKind::SizeLimit: return "size-limit";
        case ErrorKind::InconsistentProjections: return "inconsistent-projections";
        case ErrorKind::RetryExhausted: return "retry-exhausted";
        case ErrorKind::InterpolationFailure: return "interpolation-failure";
        case ErrorKind::Parse: return "parse";
    }
    return "unknown";
}

std::string scalar_to_string(const Scalar& s) {
    return s.get_num().get_str() + "/" + s.get_den().get_str();
}

Scalar parse_scalar(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw Error(ErrorKind::Parse, "empty scalar");
    auto slash = t.find('/');
    auto valid_int = [](const std::string& s, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i >= s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    std::string num = t.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false)) throw Error(ErrorKind::Parse, "bad scalar '" + text + "'");
    if (num[0] == '+') num = num.substr(1);
    mpz_class d(den);
    if (d == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + text + "'");
    Scalar s(mpz_class(num), d);
    s.canonicalize();
    return s;
}

bool is_zero(const LinearForm& l) {
    return std::all_of(l.begin(), l.end(), [](const Scalar& c) { return c == 0; });
}

LinearForm unit_form(std::size_t n, std::size_t i) {
    LinearForm l(n, 0);
    l.at(i) = 1;
    return l;
}

LinearForm scale(const LinearForm& l, const Scalar& c) {
    LinearForm out(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) out[i] = l[i] * c;
    return out;
}

static void check_same(std::size_t a, std::size_t b) {
    if (a != b) throw Error(ErrorKind::DimensionMismatch, std::to_string(a) + " vs " + std::to_string(b));
}

LinearForm add(const LinearForm& a, const LinearForm& b) {
    check_same(a.size(), b.size());
    LinearForm out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

LinearForm sub(const LinearForm& a, const LinearForm& b) {
    check_same(a.size(), b.size());
    LinearForm out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Scalar dot(const LinearForm& a, const LinearForm& b) {
    check_same(a.size(), b.size());
    Scalar s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::string form_to_string(const LinearForm& l) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i] == 0) continue;
        Scalar c = l[i];
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        if (c < 0) c = -c;
        if (c != 1) os << c.get_str() << "*";
        os << "x" << (i + 1);
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

Matrix identity_matrix(std::size_t n) {
    Matrix m(n, std::vector<Scalar>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

Matrix transpose(const Matrix& m) {
    if (m.empty()) return {};
    Matrix t(m[0].size(), std::vector<Scalar>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.empty()) return {};
    check_same(a[0].size(), b.size());
    std::size_t cols = b.empty() ? 0 : b[0].size();
    Matrix c(a.size(), std::vector<Scalar>(cols, 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

LinearForm mat_vec(const Matrix& m, const LinearForm& v) {
    LinearForm out(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
    return out;
}

// Row echelon form in place; returns pivot columns.
static std::vector<std::size_t> echelon(Matrix& a, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
        std::size_t p = row;
        while (p < a.size() && a[p][c] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[row]);
        Scalar inv = 1 / a[row][c];
        for (std::size_t j = c; j < a[row].size(); ++j) a[row][j] *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == row || a[i][c] == 0) continue;
            Scalar f = a[i][c];
            for (std::size_t j = c; j < a[i].size(); ++j) a[i][j] -= f * a[row][j];
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

std::size_t matrix_rank(const Matrix& rows) { return span_dim(rows); }

Scalar determinant(const Matrix& m) {
    std::size_t n = m.size();
    for (const auto& row : m) check_same(row.size(), n);
    Matrix a = m;
    Scalar det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            Scalar f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

Matrix inverse(const Matrix& m) {
    std::size_t n = m.size();
    Matrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        check_same(m[i].size(), n);
        a[i] = m[i];
        a[i].resize(2 * n, 0);
        a[i][n + i] = 1;
    }
    auto piv = echelon(a, n);
    if (piv.size() != n) throw Error(ErrorKind::Precondition, "singular matrix");
    Matrix inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[i].assign(a[i].begin() + n, a[i].end());
    return inv;
}

std::optional<LinearForm> solve_square(const Matrix& a, const LinearForm& b) {
    std::size_t n = a.size();
    check_same(b.size(), n);
    Matrix aug(n);
    for (std::size_t i = 0; i < n; ++i) {
        check_same(a[i].size(), n);
        aug[i] = a[i];
        aug[i].push_back(b[i]);
    }
    auto piv = echelon(aug, n);
    if (piv.size() != n) return std::nullopt;
    LinearForm x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = aug[i][n];
    return x;
}

std::optional<LinearForm> express_in_span(const std::vector<LinearForm>& rows, const LinearForm& v) {
    std::size_t k = rows.size();
    std::size_t n = v.size();
    // Columns are the rows; solve sum_j x_j rows[j] = v.
    Matrix aug(n, std::vector<Scalar>(k + 1, 0));
    for (std::size_t j = 0; j < k; ++j) {
        check_same(rows[j].size(), n);
        for (std::size_t i = 0; i < n; ++i) aug[i][j] = rows[j][i];
    }
    for (std::size_t i = 0; i < n; ++i) aug[i][k] = v[i];
    auto piv = echelon(aug, k + 1);
    if (!piv.empty() && piv.back() == k) return std::nullopt;
    LinearForm x(k, 0);
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug[r][k];
    return x;
}

bool in_span(const std::vector<LinearForm>& rows, const LinearForm& v) {
    return express_in_span(rows, v).has_value();
}

bool linearly_independent(const std::vector<LinearForm>& forms) { return span_dim(forms) == forms.size(); }

std::size_t span_dim(const std::vector<LinearForm>& forms) {
    if (forms.empty()) return 0;
    std::size_t n = forms[0].size();
    for (const auto& f : forms) check_same(f.size(), n);
    // Clear denominators row by row, then Bareiss elimination over Z.
    std::vector<std::vector<mpz_class>> a(forms.size(), std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < forms.size(); ++i) {
        mpz_class l = 1;
        for (const auto& c : forms[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
        for (std::size_t j = 0; j < n; ++j) a[i][j] = forms[i][j].get_num() * (l / forms[i][j].get_den());
    }
    std::size_t rank = 0;
    mpz_class prev = 1;
    for (std::size_t c = 0; c < n && rank < a.size(); ++c) {
        std::size_t p = rank;
        while (p < a.size() && a[p][c] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[rank]);
        for (std::size_t i = rank + 1; i < a.size(); ++i) {
            for (std::size_t j = c + 1; j < n; ++j) {
                mpz_class t = a[rank][c] * a[i][j] - a[i][c] * a[rank][j];
                mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[rank][c];
        ++rank;
    }
    return rank;
}

LinearForm normalize(const LinearForm& l) {
    for (const auto& c : l)
        if (c != 0) return scale(l, 1 / c);
    throw Error(ErrorKind::ZeroForm, "cannot normalize the zero form");
}

bool are_proportional(const LinearForm& a, const LinearForm& b) {
    check_same(a.size(), b.size());
    if (is_zero(a) || is_zero(b)) return is_zero(a) && is_zero(b);
    return normalize(a) == normalize(b);
}

BasisDecomposition::BasisDecomposition(std::vector<LinearForm> basis, std::vector<Block> blocks)
    : basis_(std::move(basis)), blocks_(std::move(blocks)) {
    std::size_t n = basis_.size();
    for (const auto& b : basis_) check_same(b.size(), n);
    if (span_dim(basis_) != n) throw Error(ErrorKind::Precondition, "basis is not independent");
    std::vector<int> seen(n, 0);
    std::set<std::string> names;
    for (const auto& blk : blocks_) {
        if (!names.insert(blk.name).second) throw Error(ErrorKind::Precondition, "duplicate block " + blk.name);
        for (auto i : blk.indices) {
            if (i >= n || seen[i]++) throw Error(ErrorKind::Precondition, "blocks do not partition the basis");
        }
    }
    for (int s : seen)
        if (s != 1) throw Error(ErrorKind::Precondition, "blocks do not cover the basis");
    // Row j of the basis matrix B is b_j, so l = c B and c = l B^{-1}.
    inv_ = inverse(basis_);
}

LinearForm BasisDecomposition::coordinates(const LinearForm& l) const {
    check_same(l.size(), basis_.size());
    std::size_t n = l.size();
    LinearForm c(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (l[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) c[j] += l[i] * inv_[i][j];
    }
    return c;
}

LinearForm BasisDecomposition::from_coordinates(const LinearForm& c) const {
    check_same(c.size(), basis_.size());
    LinearForm l(c.size(), 0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0) continue;
        for (std::size_t i = 0; i < l.size(); ++i) l[i] += c[j] * basis_[j][i];
    }
    return l;
}

std::vector<std::size_t> BasisDecomposition::block_indices(const std::string& name) const {
    for (const auto& b : blocks_)
        if (b.name == name) return b.indices;
    if (!name.empty() && (name.back() == '\'')) {
        std::string base = name.substr(0, name.size() - 1);
        for (const auto& b : blocks_) {
            if (b.name != base) continue;
            std::vector<std::size_t> out;
            for (std::size_t i = 0; i < basis_.size(); ++i)
                if (std::find(b.indices.begin(), b.indices.end(), i) == b.indices.end()) out.push_back(i);
            return out;
        }
    }
    throw Error(ErrorKind::UnknownBlock, "no block named '" + name + "'");
}

Matrix BasisDecomposition::projection_matrix(const std::string& name) const {
    auto idx = block_indices(name);
    std::size_t n = basis_.size();
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        LinearForm c = inv_[i];
        LinearForm kept(n, 0);
        for (auto j : idx) kept[j] = c[j];
        m[i] = from_coordinates(kept);
    }
    return m;
}

BasisDecomposition standard_decomposition(std::size_t n) {
    std::vector<LinearForm> b;
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < n; ++i) {
        b.push_back(unit_form(n, i));
        all.push_back(i);
    }
    return BasisDecomposition(b, {{"W", all}});
}

LinearForm standardize(const LinearForm& l, const BasisDecomposition& basis) {
    LinearForm c = basis.coordinates(l);
    if (c.empty() || c[0] == 0) throw Error(ErrorKind::NotStandardizable, "coefficient of b1 is zero");
    return scale(l, 1 / c[0]);
}

LinearForm project(const LinearForm& v, const BasisDecomposition& dec, const std::string& block) {
    auto idx = dec.block_indices(block);
    LinearForm c = dec.coordinates(v);
    LinearForm kept(c.size(), 0);
    for (auto j : idx) kept[j] = c[j];
    return dec.from_coordinates(kept);
}

bool in_affine_hull(const LinearForm& l, const std::vector<LinearForm>& S) {
    if (S.empty()) return false;
    std::vector<LinearForm> dirs;
    for (std::size_t i = 1; i < S.size(); ++i) dirs.push_back(sub(S[i], S[0]));
    LinearForm d = sub(l, S[0]);
    if (is_zero(d)) return true;
    return in_span(dirs, d);
}

bool in_flat(const LinearForm& l, const std::vector<LinearForm>& S) {
    if (!linearly_independent(S)) throw Error(ErrorKind::Precondition, "in_flat requires independent S");
    auto x = express_in_span(S, l);
    if (!x) return false;
    Scalar sum = 0;
    for (const auto& c : *x) sum += c;
    return sum == 1;
}

static PointSet distinct_points(const PointSet& P) {
    PointSet out;
    for (const auto& p : P)
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    return out;
}

bool is_elementary_flat(const std::vector<LinearForm>& S, const PointSet& P) {
    for (const auto& s : S)
        if (std::find(P.begin(), P.end(), s) == P.end()) throw Error(ErrorKind::NotSubset, "S is not contained in P");
    PointSet Sd = distinct_points(S);
    for (const auto& p : distinct_points(P)) {
        if (std::find(Sd.begin(), Sd.end(), p) != Sd.end()) continue;
        if (in_affine_hull(p, Sd)) return false;
    }
    return true;
}

std::optional<std::pair<LinearForm, LinearForm>> find_semiordinary_line(const PointSet& X, const PointSet& Y) {
    PointSet xs = distinct_points(X), ys = distinct_points(Y);
    PointSet all = xs;
    all.insert(all.end(), ys.begin(), ys.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            std::vector<LinearForm> line{all[i], all[j]};
            std::size_t ny = 0, nx = 0;
            for (const auto& y : ys) ny += in_affine_hull(y, line);
            if (ny != 1) continue;
            for (const auto& x : xs) nx += in_affine_hull(x, line);
            if (nx >= 1) return std::make_pair(all[i], all[j]);
        }
    return std::nullopt;
}

bool is_delta_sg_k(const PointSet& S, const Scalar& delta, std::size_t k) {
    PointSet pts = distinct_points(S);
    std::size_t n = pts.size();
    if (k == 0 || n < k) throw Error(ErrorKind::Precondition, "is_delta_sg_k needs |S| >= k >= 1");
    Scalar need = delta * static_cast<unsigned long>(n);
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::vector<LinearForm> base;
        for (auto i : idx) base.push_back(pts[i]);
        if (linearly_independent(base)) {
            std::size_t count = 0;
            for (std::size_t t = 0; t < n; ++t) {
                if (in_affine_hull(pts[t], base)) {
                    ++count;
                    continue;
                }
                auto ext = base;
                ext.push_back(pts[t]);
                for (std::size_t u = 0; u < n; ++u) {
                    if (u == t || std::find(idx.begin(), idx.end(), u) != idx.end()) continue;
                    if (in_affine_hull(pts[u], ext)) {
                        ++count;
                        break;
                    }
                }
            }
            if (Scalar(static_cast<unsigned long>(count)) < need) return false;
        }
        // Next k-combination.
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
    return true;
}

}  // namespace sps2
