#include <cstdlib>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sps2/blackbox.hpp"
#include "sps2/brill.hpp"
#include "sps2/circuit_io.hpp"
#include "sps2/generator.hpp"
#include "sps2/linear_factor.hpp"

using namespace sps2;
using nlohmann::json;

namespace {

enum Exit { Success = 0, Structural = 1, Mismatch = 2, InputError = 3 };

// Input failures raised while reading or validating user data.
struct InputFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool is_input_kind(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parse:
        case ErrorKind::InvalidArgument:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::NonHomogeneous:
        case ErrorKind::ZeroPolynomial:
        case ErrorKind::ZeroForm:
            return true;
        default:
            return false;
    }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SPS2_SEED")) {
        try {
            std::size_t used = 0;
            std::uint64_t s = std::stoull(env, &used);
            if (used == std::string(env).size()) return s;
        } catch (const std::exception&) {
        }
        throw InputFailure("SPS2_SEED must be a non-negative integer");
    }
    return 1;
}

bool looks_like_json(const std::string& text) {
    auto p = text.find_first_not_of(" \t\r\n");
    return p != std::string::npos && text[p] == '{';
}

// A circuit document or a polynomial in the "coef: e1 ... en" line format.
struct Source {
    std::optional<Sps2Circuit> circuit;
    Polynomial f;
};

Source load_source(const std::string& path) {
    std::string text = read_file(path);
    Source s;
    if (looks_like_json(text)) {
        s.circuit = circuit_from_json(text);
        s.f = s.circuit->expand();
    } else {
        s.f = Polynomial::from_text(text);
    }
    return s;
}

Polynomial load_homogeneous(const std::string& path) {
    Polynomial f = load_source(path).f;
    if (f.is_zero()) throw InputFailure("input polynomial is zero");
    if (!f.is_homogeneous()) throw InputFailure("input polynomial is not homogeneous");
    return f;
}

std::vector<Scalar> parse_point(const std::string& text) {
    std::vector<Scalar> x;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) x.push_back(parse_scalar(tok));
    return x;
}

json forms_json(const std::vector<LinearForm>& forms) {
    json arr = json::array();
    for (const auto& l : forms) {
        json c = json::array();
        for (const auto& x : l) c.push_back(scalar_to_string(x));
        arr.push_back(c);
    }
    return arr;
}

json gate_json(const PiSigmaPoly& P) {
    json arr = json::array();
    for (const auto& f : P.factors()) arr.push_back({{"form", forms_json({f.form})[0]}, {"mult", f.mult}});
    return {{"scale", scalar_to_string(P.scale())}, {"factors", arr}};
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) std::cout << text;
    else write_file(out, text);
}

struct GenOpts {
    std::size_t n = 5;
    unsigned d = 4, degG = 0;
    std::string profile = "generic", out;
};

int cmd_gen(const GenOpts& o, std::uint64_t seed) {
    Sps2Circuit c = generate_circuit(seed, o.n, o.d, o.degG, parse_profile(o.profile));
    emit(circuit_to_json(c), o.out);
    return Success;
}

struct EvalOpts {
    std::string input, point;
    bool serve = false;
};

int cmd_eval(const EvalOpts& o) {
    Source s = load_source(o.input);
    BlackBox bb = s.circuit ? blackbox_from_circuit(*s.circuit) : blackbox_from_polynomial(s.f);
    if (!o.serve) {
        auto x = parse_point(o.point);
        if (x.size() != bb.n) throw InputFailure("point has " + std::to_string(x.size()) + " coordinates, expected " +
                                                 std::to_string(bb.n));
        std::cout << scalar_to_string(bb.eval(x)) << "\n";
        return Success;
    }
    // EVAL a1/b1 ... an/bn -> c/e, one request per line until end of input.
    std::string line;
    while (std::getline(std::cin, line)) {
        std::istringstream ls(line);
        std::string cmd, tok;
        ls >> cmd;
        std::vector<Scalar> x;
        while (ls >> tok) x.push_back(parse_scalar(tok));
        if (cmd != "EVAL" || x.size() != bb.n) throw InputFailure("malformed request: " + line);
        Scalar v = bb.eval(x);
        std::cout << v.get_num().get_str() << "/" << v.get_den().get_str() << "\n" << std::flush;
    }
    return Success;
}

struct ReconOpts {
    std::string input, subprocess, out;
    std::size_t n = 0;
    unsigned d = 0;
    bool low_rank = false, as_json = false;
    unsigned extra_slices = 0, jobs = 1;
};

int cmd_reconstruct(const ReconOpts& o, std::uint64_t seed) {
    if (o.input.empty() == o.subprocess.empty()) throw InputFailure("give exactly one of INPUT or --subprocess");
    std::optional<Source> src;
    BlackBox bb;
    std::shared_ptr<SubprocessEvaluator> proc;
    if (!o.input.empty()) {
        src = load_source(o.input);
        if (src->f.is_zero() || !src->f.is_homogeneous()) throw InputFailure("input must be a nonzero homogeneous polynomial");
        bb = src->circuit ? blackbox_from_circuit(*src->circuit) : blackbox_from_polynomial(src->f);
    } else {
        if (o.n == 0 || o.d == 0) throw InputFailure("--subprocess needs --n and --d");
        if (o.low_rank) throw InputFailure("--low-rank needs an explicit input");
        proc = std::make_shared<SubprocessEvaluator>(o.subprocess);
        bb = blackbox_from_subprocess(proc, o.n, o.d);
    }
    std::mt19937_64 rng(seed);
    LiftConfig cfg;
    cfg.low = LowRankConfig::desk();
    cfg.extra_slices = o.extra_slices;
    cfg.jobs = std::max(1u, o.jobs);
    LiftReport rep;
    Decomposition dec;
    if (o.low_rank) {
        dec = reconstruct_low_rank(src->f, cfg.low, rng);
    } else {
        dec = reconstruct_full(bb, cfg, rng, src ? &src->f : nullptr, &rep);
    }
    json report;
    report["iscorrect"] = dec.iscorrect;
    report["seed"] = seed;
    report["mode"] = o.low_rank ? "low-rank" : "full";
    report["path"] = dec.path;
    if (!o.low_rank) {
        report["attempts"] = rep.attempts;
        report["verify_points"] = rep.verify_points;
        report["symbolic_check"] = rep.symbolic_check;
        json slices = json::array();
        for (const auto& s : rep.slices)
            slices.push_back({{"name", s.name}, {"path", s.path}, {"diagnostic", s.diagnostic}});
        report["slices"] = slices;
        report["log"] = rep.log;
    }
    if (proc) report["evaluations"] = proc->calls();
    if (!dec.iscorrect) {
        report["diagnostic"] = dec.diagnostic;
        if (o.as_json) std::cout << report.dump(2) << "\n";
        else std::cout << "iscorrect: false\ndiagnostic: " << dec.diagnostic << "\n";
        std::cerr << "reconstruction failed: " << dec.diagnostic << "\n";
        return Structural;
    }
    Sps2Circuit c = circuit_from_gates(dec.M0, dec.M1);
    std::string doc = circuit_to_json(c);
    if (!o.out.empty()) write_file(o.out, doc);
    if (o.as_json) {
        report["circuit"] = json::parse(doc);
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "iscorrect: true\npath: " << dec.path << "\n";
        if (!o.low_rank) std::cout << "attempts: " << rep.attempts << "\nverify_points: " << rep.verify_points << "\n";
        if (o.out.empty()) std::cout << doc;
    }
    return Success;
}

int cmd_verify_equal(const std::string& a, const std::string& b) {
    Sps2Circuit ca = circuit_from_json(read_file(a)), cb = circuit_from_json(read_file(b));
    try {
        if (verify_equivalence(ca, cb)) {
            std::cout << "equal\n";
            return Success;
        }
        std::cout << "same polynomial, different circuits\n";
        return Structural;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PolynomialMismatch) throw;
        std::cout << "different polynomials\n";
        return Mismatch;
    }
}

int cmd_candidates(const std::string& path, bool as_json, std::uint64_t seed) {
    Polynomial f = load_homogeneous(path);
    CandidateOptions opt;
    opt.seed = seed;
    CandidateSet C = candidates(f, opt);
    long d = f.degree();
    if (as_json) {
        json j = {{"count", C.forms.size()},
                  {"bound", d * d * d * d + 2 * d},
                  {"source", candidate_source_name(C.source)},
                  {"forms", forms_json(C.forms)}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "candidates: " << C.forms.size() << " (bound d^4 + 2d = " << d * d * d * d + 2 * d
                  << ", source " << candidate_source_name(C.source) << ")\n";
        for (const auto& l : C.forms) std::cout << "  " << form_to_string(l) << "\n";
    }
    return Success;
}

int cmd_brill_test(const std::string& path, bool as_json, std::uint64_t seed) {
    Polynomial f = load_homogeneous(path);
    bool s = splits_into_linear_forms(f, seed);
    if (as_json) std::cout << json{{"splits", s}, {"degree", f.degree()}, {"n", f.nvars()}}.dump(2) << "\n";
    else std::cout << "splits: " << (s ? "true" : "false") << "\n";
    return Success;
}

int cmd_lin_factors(const std::string& path, bool as_json, std::uint64_t seed) {
    Polynomial f = load_homogeneous(path);
    LinSplit ls = lin_split(f, seed);
    if (as_json) {
        json j = {{"lin", gate_json(ls.lin)}, {"core_degree", ls.d_h}, {"core", ls.core.to_text()}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "lin: " << ls.lin.to_string() << "\ncore degree: " << ls.d_h << "\ncore:\n" << ls.core.to_text();
    }
    return Success;
}

int cmd_selftest(std::uint64_t seed) {
    LiftConfig cfg;
    cfg.low = LowRankConfig::desk();
    bool all = true;
    for (std::uint64_t s = seed; s < seed + 3; ++s) {
        Sps2Circuit c = circuit_from_json(circuit_to_json(generate_circuit(s, 5, 4, 0, RankProfile::Generic)));
        Polynomial f = c.expand();
        std::mt19937_64 rng(s);
        Decomposition d = reconstruct_full(blackbox_from_circuit(c), cfg, rng, &f);
        bool ok = d.iscorrect && verify_equivalence(c, circuit_from_gates(d.M0, d.M1));
        std::cout << "seed " << s << ": " << (ok ? "ok" : "FAILED " + d.diagnostic) << "\n";
        all = all && ok;
    }
    std::cout << "selftest: " << (all ? "ok" : "failed") << "\n";
    return all ? Success : Structural;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reconstruction of depth-3 circuits with two product gates over the rationals"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<std::uint64_t> seed_flag;
    app.add_option("--seed", seed_flag, "Random seed (falls back to SPS2_SEED, then 1)");

    GenOpts gen;
    auto* g = app.add_subcommand("gen", "Generate a seeded circuit");
    g->add_option("--n", gen.n, "Number of variables")->check(CLI::PositiveNumber);
    g->add_option("--d", gen.d, "Total degree")->check(CLI::PositiveNumber);
    g->add_option("--deg-g", gen.degG, "Degree of the common factor G");
    g->add_option("--profile", gen.profile, "generic, easy-case, medium-case or hard-case");
    g->add_option("-o,--out", gen.out, "Output file (default stdout)");

    EvalOpts ev;
    auto* e = app.add_subcommand("eval", "Evaluate a circuit or polynomial file");
    e->add_option("input", ev.input, "Circuit or polynomial file")->required();
    auto* pt = e->add_option("--point", ev.point, "Comma-separated rationals");
    auto* sv = e->add_flag("--serve", ev.serve, "Answer EVAL requests on standard input");
    pt->excludes(sv);

    ReconOpts rc;
    auto* r = app.add_subcommand("reconstruct", "Reconstruct a circuit from explicit or blackbox input");
    r->add_option("input", rc.input, "Circuit or polynomial file");
    r->add_option("--subprocess", rc.subprocess, "Evaluator command speaking the EVAL line protocol");
    r->add_option("--n", rc.n, "Variables of the subprocess blackbox");
    r->add_option("--d", rc.d, "Degree bound of the subprocess blackbox");
    r->add_flag("--low-rank", rc.low_rank, "Run the low-rank stage directly on the explicit polynomial");
    r->add_option("--extra-slices", rc.extra_slices, "Validation slices cross-checked against the lift");
    r->add_option("--jobs", rc.jobs, "Worker threads for slice reconstruction")->check(CLI::PositiveNumber);
    r->add_option("-o,--out", rc.out, "Write the reconstructed circuit here");
    r->add_flag("--json", rc.as_json, "Machine-readable report");

    std::string va, vb;
    auto* v = app.add_subcommand("verify-equal", "Compare two circuit files (0 equal, 1 structural, 2 polynomial)");
    v->add_option("a", va)->required();
    v->add_option("b", vb)->required();

    std::string ipath;
    bool ijson = false;
    auto* c = app.add_subcommand("candidates", "Candidate linear forms of a polynomial");
    auto* b = app.add_subcommand("brill-test", "Does a form split into linear forms");
    auto* l = app.add_subcommand("lin-factors", "Rational linear factors and linear-free core");
    for (auto* sub : {c, b, l}) {
        sub->add_option("input", ipath, "Polynomial or circuit file")->required();
        sub->add_flag("--json", ijson, "Machine-readable report");
    }
    auto* st = app.add_subcommand("selftest", "Generate, reconstruct and verify a few seeded circuits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? Success : InputError;
    }

    try {
        std::uint64_t seed = resolve_seed(seed_flag);
        if (*g) return cmd_gen(gen, seed);
        if (*e) {
            if (!ev.serve && ev.point.empty()) throw InputFailure("eval needs --point or --serve");
            return cmd_eval(ev);
        }
        if (*r) return cmd_reconstruct(rc, seed);
        if (*v) return cmd_verify_equal(va, vb);
        if (*c) return cmd_candidates(ipath, ijson, seed);
        if (*b) return cmd_brill_test(ipath, ijson, seed);
        if (*l) return cmd_lin_factors(ipath, ijson, seed);
        if (*st) return cmd_selftest(seed);
    } catch (const InputFailure& err) {
        std::cerr << "error: " << err.what() << "\n";
        return InputError;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return is_input_kind(err.kind()) ? InputError : Structural;
    }
    return InputError;
}
