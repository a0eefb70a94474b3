#pragma once

#include <string>

#include "sps2/pisigma.hpp"

namespace sps2 {

// Circuit document: n, d, alpha0/alpha1 as "p/q" strings, G/T0/T1 as arrays of {coeffs: ["p/q", ...], mult}.
// Serialization canonicalizes first, so serialize(parse(text)) is stable.
std::string circuit_to_json(const Sps2Circuit& c);
// Throws Parse on malformed documents or when the fields do not describe a valid circuit.
Sps2Circuit circuit_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace sps2
