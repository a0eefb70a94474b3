#pragma once

#include <cstdint>
#include <string>

#include "sps2/pisigma.hpp"

namespace sps2 {

enum class RankProfile { Generic, EasyCase, MediumCase, HardCase };

const char* profile_name(RankProfile p);
// Accepts generic, easy-case, medium-case and hard-case; throws Parse otherwise.
RankProfile parse_profile(const std::string& name);

// Seeded circuit with gcd(T0, T1) = 1. Engineered profiles are built in four variables and embedded
// by a random injective map when n > 4:
//   easy-case   gate degree >= 5, T0 in a hyperplane, T1 = T0 shifted by multiples of one form l, alpha = (1, -1), G in sp(T0)
//   medium-case T0 in a plane, T1 generic
//   hard-case   both gates span everything and alpha0 T0 + alpha1 T1 has no linear factor
Sps2Circuit generate_circuit(std::uint64_t seed, std::size_t n, unsigned d, unsigned degG, RankProfile profile);

}  // namespace sps2
