#pragma once

#include <array>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sps2/lowrank.hpp"

namespace sps2 {

struct BlackBox {
    std::size_t n = 0;
    unsigned d = 0;  // degree bound
    std::function<Scalar(const std::vector<Scalar>&)> eval;
};

BlackBox blackbox_from_polynomial(const Polynomial& f);
BlackBox blackbox_from_circuit(const Sps2Circuit& c);

// Evaluator process speaking "EVAL a1/b1 ... an/bn" -> "c/e" over its standard streams.
class SubprocessEvaluator {
public:
    explicit SubprocessEvaluator(const std::string& command);
    ~SubprocessEvaluator();
    SubprocessEvaluator(const SubprocessEvaluator&) = delete;
    SubprocessEvaluator& operator=(const SubprocessEvaluator&) = delete;

    Scalar eval(const std::vector<Scalar>& point);
    std::size_t calls() const { return calls_; }

private:
    int pid_ = -1;
    int to_child_ = -1;
    std::FILE* from_child_ = nullptr;
    std::size_t calls_ = 0;
};

// Calls are serialized, so the returned blackbox is safe to share between threads.
BlackBox blackbox_from_subprocess(std::shared_ptr<SubprocessEvaluator> proc, std::size_t n, unsigned d);

// Columns are the basis vectors: x = S y.
Matrix slice_matrix(const std::vector<LinearForm>& basis);

struct InterpolationStats {
    unsigned resamples = 0;
};

// f restricted to the span of basis, in slice coordinates, from C(d + r - 1, r - 1) samples with parameters in
// [1 .. 2^(d + n)]. Resamples on a singular system or a failed fresh-point check; throws InterpolationFailure after
// max_resamples.
Polynomial interpolate_slice(const BlackBox& bb, const std::vector<LinearForm>& basis, unsigned d,
                             std::mt19937_64& rng, InterpolationStats* stats = nullptr, unsigned max_resamples = 3);

struct SliceGates {
    std::string name;
    PiSigmaPoly M0, M1;  // in slice coordinates y_1 .. y_r, y_{r+1}
};

// Glues gates found on the slices V + v_i, i = r+1..n (rows of A are v_1 .. v_n), into gates in n variables.
// nullopt with a diagnostic naming the slice when the gates do not correspond.
std::optional<std::array<PiSigmaPoly, 2>> glue_slices(const std::vector<SliceGates>& slices, std::size_t r,
                                                      const Matrix& A, std::string* diagnostic = nullptr);

struct LiftConfig {
    LowRankConfig low;
    unsigned extra_slices = 0;        // validation slices V + w cross-checked against the lifted gates
    unsigned max_attempts = 4;        // fresh slice systems after a correspondence failure
    std::size_t max_verify_points = 10000;
    unsigned jobs = 1;                // worker threads for per-slice reconstruction
};

struct SliceReport {
    std::string name;   // "V_4", "W_1", ...
    std::string path;   // low-rank case that reconstructed the slice
    std::string diagnostic;
};

struct LiftReport {
    unsigned attempts = 0;
    std::vector<SliceReport> slices;  // of the last attempt
    std::vector<std::string> log;     // one line per rejected attempt
    std::size_t verify_points = 0;
    bool symbolic_check = false;
};

// Full-rank reconstruction from blackbox access. The low-rank stage runs on the (r + 1)-dimensional slices
// V_i = V + v_i; gates on V are their restrictions y_i = 0. When explicit is given, the result is also
// checked symbolically against it.
Decomposition reconstruct_full(const BlackBox& bb, const LiftConfig& cfg, std::mt19937_64& rng,
                               const Polynomial* explicit_f = nullptr, LiftReport* report = nullptr);

}  // namespace sps2
