#include <gtest/gtest.h>

#include <random>

#include "sps2/core_algebra.hpp"

using namespace sps2;

namespace {

LinearForm F(std::initializer_list<long> xs) {
    LinearForm l;
    for (long x : xs) l.emplace_back(x);
    return l;
}

LinearForm Q(std::initializer_list<const char*> xs) {
    LinearForm l;
    for (auto x : xs) l.push_back(parse_scalar(x));
    return l;
}

// Rank as the size of the largest nonzero minor, via cofactor expansion.
Scalar cofactor_det(const Matrix& m) {
    if (m.size() == 1) return m[0][0];
    Scalar s = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        Matrix sub;
        for (std::size_t i = 1; i < m.size(); ++i) {
            std::vector<Scalar> row;
            for (std::size_t k = 0; k < m.size(); ++k)
                if (k != j) row.push_back(m[i][k]);
            sub.push_back(row);
        }
        Scalar t = m[0][j] * cofactor_det(sub);
        s += (j % 2 ? -t : t);
    }
    return s;
}

bool next_subset(std::vector<std::size_t>& idx, std::size_t n) {
    std::size_t k = idx.size();
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return false;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    return true;
}

std::size_t minor_rank(const Matrix& m) {
    std::size_t rows = m.size(), cols = m[0].size();
    for (std::size_t k = std::min(rows, cols); k > 0; --k) {
        std::vector<std::size_t> ri(k), ci(k);
        for (std::size_t i = 0; i < k; ++i) ri[i] = i;
        do {
            for (std::size_t i = 0; i < k; ++i) ci[i] = i;
            do {
                Matrix sub(k, std::vector<Scalar>(k));
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b) sub[a][b] = m[ri[a]][ci[b]];
                if (cofactor_det(sub) != 0) return k;
            } while (next_subset(ci, cols));
        } while (next_subset(ri, rows));
    }
    return 0;
}

}  // namespace

TEST(SpanDim, Examples) {
    EXPECT_EQ(span_dim({F({1, 0, 0}), F({0, 1, 0})}), 2u);
    EXPECT_EQ(span_dim({F({1, 1}), F({2, 2})}), 1u);
    // Rank frozen from an exact row reduction of these six forms.
    std::vector<LinearForm> six = {
        Q({"1", "5/4", "7/5", "-3/2"}), Q({"7/4", "-4", "5/3", "-5"}),   Q({"8", "3/4", "-4/5", "-9/5"}),
        Q({"-7", "-4", "-2/5", "-9/4"}), Q({"1/4", "9/2", "7/2", "0"}), Q({"-9", "5/3", "4/5", "-7/3"})};
    EXPECT_EQ(span_dim(six), 4u);
}

TEST(SpanDim, MixedDimensionsRejected) {
    try {
        span_dim({F({1, 0}), F({1, 0, 0})});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(SpanDim, AgreesWithMinorRank) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> ent(-2, 2), dim(1, 5);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t r = dim(rng), c = dim(rng);
        Matrix m(r, std::vector<Scalar>(c));
        for (auto& row : m)
            for (auto& x : row) x = ent(rng);
        EXPECT_EQ(span_dim(m), minor_rank(m));
    }
}

TEST(Normalize, Examples) {
    EXPECT_EQ(normalize(F({0, 2, 4})), F({0, 1, 2}));
    EXPECT_EQ(normalize(F({1, -1})), F({1, -1}));
    EXPECT_EQ(normalize(F({-3, 0, 0, 6})), F({1, 0, 0, -2}));
    EXPECT_THROW(normalize(F({0, 0})), Error);
}

TEST(Standardize, Examples) {
    auto std3 = standard_decomposition(3);
    EXPECT_EQ(standardize(F({3, 1, 0}), std3), Q({"1", "1/3", "0"}));
    try {
        standardize(F({0, 1, 0}), std3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotStandardizable);
    }
    // Random basis: build l from coordinates with leading coordinate 5.
    BasisDecomposition dec({F({1, 2, 0}), F({0, 1, 3}), F({1, 0, 1})}, {{"W", {0, 1, 2}}});
    LinearForm l = dec.from_coordinates(F({5, -2, 7}));
    LinearForm s = standardize(l, dec);
    EXPECT_EQ(dec.coordinates(s), Q({"1", "-2/5", "7/5"}));
}

TEST(Project, Examples) {
    BasisDecomposition dec({F({1, 0}), F({0, 1})}, {{"W", {0}}, {"V", {1}}});
    EXPECT_EQ(project(F({1, 1}), dec, "W"), F({1, 0}));
    EXPECT_EQ(project(F({3, 0}), dec, "W"), F({3, 0}));
    EXPECT_EQ(project(F({1, 1}), dec, "W'"), F({0, 1}));
    EXPECT_THROW(project(F({1, 1}), dec, "Z"), Error);
}

TEST(Project, ComponentsResum) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> ent(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<LinearForm> b;
        do {
            b.assign(4, LinearForm(4));
            for (auto& v : b)
                for (auto& x : v) x = ent(rng);
        } while (span_dim(b) < 4);
        BasisDecomposition dec(b, {{"W0", {0}}, {"W1", {1, 2}}, {"W2", {3}}});
        LinearForm v(4);
        for (auto& x : v) x = ent(rng);
        LinearForm s = add(add(project(v, dec, "W0"), project(v, dec, "W1")), project(v, dec, "W2"));
        EXPECT_EQ(s, v);
        EXPECT_EQ(add(project(v, dec, "W1"), project(v, dec, "W1'")), v);
        LinearForm p = project(v, dec, "W1");
        EXPECT_EQ(project(p, dec, "W1"), p);
    }
}

TEST(Flats, InFlat) {
    LinearForm s1 = F({1, 0, 1}), s2 = F({0, 1, 1});
    EXPECT_TRUE(in_flat(s1, {s1, s2}));
    EXPECT_TRUE(in_flat(Q({"1/2", "1/2", "1"}), {s1, s2}));
    EXPECT_FALSE(in_flat(scale(s1, 2), {s1, s2}));
    EXPECT_THROW(in_flat(s1, {s1, scale(s1, 2)}), Error);
}

TEST(Flats, SpanToFlatProperty) {
    // Standard forms in the span of standard forms lie in their flat.
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> ent(-6, 6);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<LinearForm> S;
        for (int j = 0; j < 3; ++j) {
            LinearForm l(5);
            l[0] = 1;
            for (int i = 1; i < 5; ++i) l[i] = ent(rng);
            S.push_back(l);
        }
        if (!linearly_independent(S)) continue;
        LinearForm v(5, 0);
        Scalar a = ent(rng), b = ent(rng), c = ent(rng);
        if (a + b + c == 0) continue;
        v = add(add(scale(S[0], a), scale(S[1], b)), scale(S[2], c));
        v = scale(v, 1 / v[0]);
        EXPECT_TRUE(in_flat(v, S));
    }
}

TEST(Flats, Elementary) {
    PointSet P = {F({1, 0}), F({1, 1}), F({1, 2}), F({0, 1})};
    EXPECT_FALSE(is_elementary_flat({F({1, 0}), F({1, 1})}, P));
    EXPECT_TRUE(is_elementary_flat({F({1, 0}), F({0, 1})}, P));
    EXPECT_TRUE(is_elementary_flat(P, P));
    EXPECT_THROW(is_elementary_flat({F({5, 5})}, P), Error);
}

TEST(Flats, ElementaryGenericPair) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> ent(-50, 50);
    PointSet P;
    for (int i = 0; i < 8; ++i) P.push_back(F({ent(rng), ent(rng), ent(rng)}));
    // Exhaustive scan: no third point on the line through P[0], P[1].
    bool third = false;
    for (std::size_t i = 2; i < P.size(); ++i) {
        LinearForm d1 = sub(P[1], P[0]), d2 = sub(P[i], P[0]);
        third |= span_dim({d1, d2}) < 2;
    }
    EXPECT_EQ(is_elementary_flat({P[0], P[1]}, P), !third);
}

TEST(SemiOrdinary, Examples) {
    auto line = find_semiordinary_line({F({1, 0, 1})}, {F({0, 1, 1})});
    ASSERT_TRUE(line.has_value());
    EXPECT_TRUE((line->first == F({1, 0, 1}) && line->second == F({0, 1, 1})) ||
                (line->first == F({0, 1, 1}) && line->second == F({1, 0, 1})));
    // Y collinear and X on the same line.
    PointSet Y = {F({0, 0}), F({1, 0})}, X = {F({2, 0}), F({3, 0})};
    EXPECT_FALSE(find_semiordinary_line(X, Y).has_value());
}

TEST(DeltaSG, HandCases) {
    PointSet line3 = {F({1, 0}), F({1, 1}), F({1, 2})};
    PointSet generic3 = {F({1, 0, 0}), F({0, 1, 0}), F({0, 0, 1})};
    EXPECT_TRUE(is_delta_sg_k(generic3, Scalar(0), 1));
    EXPECT_TRUE(is_delta_sg_k(line3, Scalar(1), 1));
    EXPECT_FALSE(is_delta_sg_k(generic3, Scalar(1), 1));
}

TEST(LinearAlgebra, InverseAndSolve) {
    Matrix m = {F({2, 1}), F({1, 1})};
    Matrix inv = inverse(m);
    EXPECT_EQ(mat_mul(m, inv), identity_matrix(2));
    EXPECT_EQ(determinant(m), Scalar(1));
    auto x = solve_square(m, F({3, 2}));
    ASSERT_TRUE(x);
    EXPECT_EQ(*x, F({1, 1}));
    EXPECT_THROW(inverse({F({1, 1}), F({2, 2})}), Error);
}

TEST(Scalars, ParseRoundTrip) {
    EXPECT_EQ(parse_scalar("-6/4"), Scalar(-3, 2));
    EXPECT_EQ(scalar_to_string(parse_scalar("7")), "7/1");
    EXPECT_THROW(parse_scalar("1/0"), Error);
    EXPECT_THROW(parse_scalar("x"), Error);
}
