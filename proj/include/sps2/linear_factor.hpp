#pragma once

#include <cstdint>
#include <optional>

#include "sps2/pisigma.hpp"

namespace sps2 {

struct LinSplit {
    PiSigmaPoly lin;  // Lin(f), scale 1
    Polynomial core;  // h = f / Lin(f)
    unsigned d_h = 0;
};

// Extracts all rational linear factors of a nonzero homogeneous f.
LinSplit lin_split(const Polynomial& f, std::uint64_t seed = 1);
bool is_pi_sigma_real(const Polynomial& f);
// f as a product of linear forms, when it is one.
std::optional<PiSigmaPoly> as_pisigma(const Polynomial& f);
// Cheap necessary condition: a random line restriction splits modulo a prime.
bool maybe_pisigma(const Polynomial& f, std::uint64_t seed = 7);

// Univariate restriction t -> f(b + t w).
std::vector<Scalar> line_restriction(const Polynomial& f, const LinearForm& b, const LinearForm& w);

}  // namespace sps2
