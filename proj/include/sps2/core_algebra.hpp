#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sps2/errors.hpp"

namespace sps2 {

using Scalar = mpq_class;
// Coefficient of x_i at index i.
using LinearForm = std::vector<Scalar>;
using Matrix = std::vector<std::vector<Scalar>>;
using PointSet = std::vector<LinearForm>;

std::string scalar_to_string(const Scalar& s);
// Accepts "p", "p/q" and "-p/q"; throws Parse on malformed input.
Scalar parse_scalar(const std::string& text);

bool is_zero(const LinearForm& l);
LinearForm unit_form(std::size_t n, std::size_t i);
LinearForm scale(const LinearForm& l, const Scalar& c);
LinearForm add(const LinearForm& a, const LinearForm& b);
LinearForm sub(const LinearForm& a, const LinearForm& b);
Scalar dot(const LinearForm& a, const LinearForm& b);
std::string form_to_string(const LinearForm& l);

// Linear algebra over Q.
Matrix identity_matrix(std::size_t n);
Matrix transpose(const Matrix& m);
Matrix mat_mul(const Matrix& a, const Matrix& b);
LinearForm mat_vec(const Matrix& m, const LinearForm& v);
std::size_t matrix_rank(const Matrix& rows);
Scalar determinant(const Matrix& m);
// Throws Precondition when singular.
Matrix inverse(const Matrix& m);
// Solves a x = b for square non-singular a; nullopt when singular.
std::optional<LinearForm> solve_square(const Matrix& a, const LinearForm& b);
// Any x with sum_j x_j rows[j] = v, nullopt if v is not in the row span.
std::optional<LinearForm> express_in_span(const std::vector<LinearForm>& rows, const LinearForm& v);
bool in_span(const std::vector<LinearForm>& rows, const LinearForm& v);
bool linearly_independent(const std::vector<LinearForm>& forms);

// Rank of the coefficient matrix via fraction-free elimination.
std::size_t span_dim(const std::vector<LinearForm>& forms);
// First nonzero coefficient becomes 1.
LinearForm normalize(const LinearForm& l);
bool are_proportional(const LinearForm& a, const LinearForm& b);

struct Block {
    std::string name;
    std::vector<std::size_t> indices;
};

class BasisDecomposition {
public:
    // Validates independence and that the blocks partition [n].
    BasisDecomposition(std::vector<LinearForm> basis, std::vector<Block> blocks);

    const std::vector<LinearForm>& basis() const { return basis_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t dim() const { return basis_.size(); }
    // Coordinates c with l = sum_j c_j b_j.
    LinearForm coordinates(const LinearForm& l) const;
    LinearForm from_coordinates(const LinearForm& c) const;
    // Indices of a block; a trailing prime (W') selects the complement.
    std::vector<std::size_t> block_indices(const std::string& name) const;
    // Matrix whose row i is the projection of x_i; used to project polynomials.
    Matrix projection_matrix(const std::string& name) const;

private:
    std::vector<LinearForm> basis_;
    std::vector<Block> blocks_;
    Matrix inv_;  // columns of inv_ give coordinates
};

BasisDecomposition standard_decomposition(std::size_t n);
// Coefficient of b_1 becomes 1.
LinearForm standardize(const LinearForm& l, const BasisDecomposition& basis);
LinearForm project(const LinearForm& v, const BasisDecomposition& dec, const std::string& block);

// Affine hull membership without independence requirement.
bool in_affine_hull(const LinearForm& l, const std::vector<LinearForm>& S);
bool in_flat(const LinearForm& l, const std::vector<LinearForm>& S);
bool is_elementary_flat(const std::vector<LinearForm>& S, const PointSet& P);
std::optional<std::pair<LinearForm, LinearForm>> find_semiordinary_line(const PointSet& X, const PointSet& Y);
bool is_delta_sg_k(const PointSet& S, const Scalar& delta, std::size_t k);

}  // namespace sps2
