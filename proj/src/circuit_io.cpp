#include "sps2/circuit_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sps2 {

namespace {

using json = nlohmann::ordered_json;

json gate_to_json(const PiSigmaPoly& P) {
    json arr = json::array();
    for (const auto& f : P.factors()) {
        json coeffs = json::array();
        for (const auto& x : f.form) coeffs.push_back(scalar_to_string(x));
        arr.push_back({{"coeffs", coeffs}, {"mult", f.mult}});
    }
    return arr;
}

Scalar scalar_field(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_string()) throw Error(ErrorKind::Parse, "field '" + key + "' must be a \"p/q\" string");
    return parse_scalar(j[key].get<std::string>());
}

PiSigmaPoly gate_from_json(const json& j, const std::string& key, std::size_t n) {
    if (!j.contains(key) || !j[key].is_array()) throw Error(ErrorKind::Parse, "field '" + key + "' must be an array");
    PiSigmaPoly P(n);
    for (const auto& f : j[key]) {
        if (!f.is_object() || !f.contains("coeffs") || !f["coeffs"].is_array())
            throw Error(ErrorKind::Parse, key + ": factor needs a coeffs array");
        if (!f.contains("mult") || !f["mult"].is_number_integer() || f["mult"].get<long>() < 1)
            throw Error(ErrorKind::Parse, key + ": factor needs a positive integer mult");
        if (f["coeffs"].size() != n) throw Error(ErrorKind::Parse, key + ": factor must have n coefficients");
        LinearForm l;
        for (const auto& c : f["coeffs"]) {
            if (!c.is_string()) throw Error(ErrorKind::Parse, key + ": coefficients must be \"p/q\" strings");
            l.push_back(parse_scalar(c.get<std::string>()));
        }
        if (is_zero(l)) throw Error(ErrorKind::Parse, key + ": zero linear form");
        P.multiply(l, static_cast<unsigned>(f["mult"].get<long>()));
    }
    return P;
}

}  // namespace

std::string circuit_to_json(const Sps2Circuit& c) {
    Sps2Circuit k = canonical_circuit(c);
    json j;
    j["n"] = k.n;
    j["d"] = k.degree();
    j["alpha0"] = scalar_to_string(k.alpha0);
    j["alpha1"] = scalar_to_string(k.alpha1);
    j["G"] = gate_to_json(k.G);
    j["T0"] = gate_to_json(k.T0);
    j["T1"] = gate_to_json(k.T1);
    return j.dump(2) + "\n";
}

Sps2Circuit circuit_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("circuit file: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::Parse, "circuit file must be an object");
    if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long>() < 1)
        throw Error(ErrorKind::Parse, "field 'n' must be a positive integer");
    if (!j.contains("d") || !j["d"].is_number_integer() || j["d"].get<long>() < 1)
        throw Error(ErrorKind::Parse, "field 'd' must be a positive integer");
    Sps2Circuit c;
    c.n = j["n"].get<std::size_t>();
    c.alpha0 = scalar_field(j, "alpha0");
    c.alpha1 = scalar_field(j, "alpha1");
    if (c.alpha0 == 0 || c.alpha1 == 0) throw Error(ErrorKind::Parse, "alpha0 and alpha1 must be nonzero");
    c.G = gate_from_json(j, "G", c.n);
    c.T0 = gate_from_json(j, "T0", c.n);
    c.T1 = gate_from_json(j, "T1", c.n);
    if (c.T0.degree() != c.T1.degree() || c.T0.degree() == 0)
        throw Error(ErrorKind::Parse, "T0 and T1 must have the same positive degree");
    if (c.degree() != j["d"].get<unsigned>()) throw Error(ErrorKind::Parse, "field 'd' does not match the gates");
    return canonical_circuit(c);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Parse, "cannot write '" + path + "'");
    out << text;
}

}  // namespace sps2
