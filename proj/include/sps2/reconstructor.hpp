#pragma once

#include <optional>

#include "sps2/pisigma.hpp"

namespace sps2 {

// Basis split into blocks W0, W1, W2; W0', W1', W2' name the complements.
BasisDecomposition make_split_basis(std::vector<LinearForm> basis, std::vector<std::size_t> S0,
                                    std::vector<std::size_t> S1, std::vector<std::size_t> S2);

// Projection of every factor; nullopt when some factor projects to zero.
std::optional<PiSigmaPoly> project_pisigma(const PiSigmaPoly& P, const BasisDecomposition& split, const std::string& W);

// L from multiples of its projections onto W0' and W1'.
LinearForm reconstruct_linear(const LinearForm& L0, const LinearForm& L1, const BasisDecomposition& split);
// P from P0 = p^t (projection onto W0') and P1 = d_1...d_t (projection onto W1'), up to scale.
PiSigmaPoly reconstruct_pisigma(const PiSigmaPoly& P0, const PiSigmaPoly& P1, const BasisDecomposition& split);
// Searches the projections of Q for a reconstructible factor P; returns the constant 1 if none is found.
PiSigmaPoly run_reconstructor(const PiSigmaPoly& Q0, const PiSigmaPoly& Q1, const BasisDecomposition& split);

}  // namespace sps2
