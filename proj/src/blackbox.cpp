#include "sps2/blackbox.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <csignal>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace sps2 {

namespace {

Scalar eval_pisigma(const PiSigmaPoly& P, const std::vector<Scalar>& x) {
    Scalar v = P.scale();
    for (const auto& f : P.factors()) {
        Scalar lx = dot(f.form, x);
        for (unsigned j = 0; j < f.mult; ++j) v *= lx;
    }
    return v;
}

mpz_class uniform_in(const mpz_class& N, std::mt19937_64& rng) {
    std::size_t bits = mpz_sizeinbase(N.get_mpz_t(), 2);
    while (true) {
        mpz_class x = 0;
        for (std::size_t b = 0; b < bits; b += 32) {
            x <<= 32;
            x += static_cast<unsigned long>(rng() & 0xffffffffu);
        }
        mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), bits);
        if (x < N) return x + 1;
    }
}

LinearForm random_vector(std::size_t n, const mpz_class& N, std::mt19937_64& rng) {
    LinearForm v(n);
    for (auto& x : v) x = Scalar(uniform_in(N, rng));
    return v;
}

mpz_class full_rank_bound(unsigned d, std::size_t n) {
    mpz_class N = 1;
    N <<= d + n;
    return N;
}

void exponents_of_degree(std::size_t r, unsigned d, Exponent& cur, std::size_t i, std::vector<Exponent>& out) {
    if (i + 1 == r) {
        cur[i] = static_cast<std::uint16_t>(d);
        out.push_back(cur);
        return;
    }
    for (int k = static_cast<int>(d); k >= 0; --k) {
        cur[i] = static_cast<std::uint16_t>(k);
        exponents_of_degree(r, d - k, cur, i + 1, out);
    }
}

// Fraction-free elimination of the integer system A x = b; nullopt when A is singular.
std::optional<std::vector<Scalar>> solve_integer_system(std::vector<std::vector<mpz_class>> A, std::vector<mpz_class> b) {
    std::size_t m = A.size();
    mpz_class prev = 1;
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t piv = k;
        while (piv < m && A[piv][k] == 0) ++piv;
        if (piv == m) return std::nullopt;
        std::swap(A[piv], A[k]);
        std::swap(b[piv], b[k]);
        for (std::size_t i = k + 1; i < m; ++i) {
            for (std::size_t j = k + 1; j < m; ++j) {
                A[i][j] = A[i][j] * A[k][k] - A[i][k] * A[k][j];
                mpz_divexact(A[i][j].get_mpz_t(), A[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            b[i] = b[i] * A[k][k] - A[i][k] * b[k];
            mpz_divexact(b[i].get_mpz_t(), b[i].get_mpz_t(), prev.get_mpz_t());
            A[i][k] = 0;
        }
        prev = A[k][k];
    }
    std::vector<Scalar> x(m);
    for (std::size_t k = m; k-- > 0;) {
        Scalar s = Scalar(b[k]);
        for (std::size_t j = k + 1; j < m; ++j) s -= Scalar(A[k][j]) * x[j];
        x[k] = s / Scalar(A[k][k]);
    }
    return x;
}

}  // namespace

BlackBox blackbox_from_polynomial(const Polynomial& f) {
    BlackBox bb;
    bb.n = f.nvars();
    bb.d = static_cast<unsigned>(std::max(f.degree(), 0));
    bb.eval = [f](const std::vector<Scalar>& x) { return evaluate(f, x); };
    return bb;
}

BlackBox blackbox_from_circuit(const Sps2Circuit& c) {
    BlackBox bb;
    bb.n = c.n;
    bb.d = c.degree();
    bb.eval = [c](const std::vector<Scalar>& x) {
        Scalar g = eval_pisigma(c.G, x);
        if (g == 0) return g;
        return Scalar(g * (c.alpha0 * eval_pisigma(c.T0, x) + c.alpha1 * eval_pisigma(c.T1, x)));
    };
    return bb;
}

SubprocessEvaluator::SubprocessEvaluator(const std::string& command) {
    int in[2], out[2];
    if (pipe(in) != 0 || pipe(out) != 0) throw Error(ErrorKind::Precondition, "cannot create pipes for the evaluator");
    pid_ = fork();
    if (pid_ < 0) throw Error(ErrorKind::Precondition, "cannot fork the evaluator");
    if (pid_ == 0) {
        dup2(in[0], STDIN_FILENO);
        dup2(out[1], STDOUT_FILENO);
        close(in[0]);
        close(in[1]);
        close(out[0]);
        close(out[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in[0]);
    close(out[1]);
    to_child_ = in[1];
    from_child_ = fdopen(out[0], "r");
    std::signal(SIGPIPE, SIG_IGN);
}

SubprocessEvaluator::~SubprocessEvaluator() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_) std::fclose(from_child_);
    if (pid_ > 0) waitpid(pid_, nullptr, 0);
}

Scalar SubprocessEvaluator::eval(const std::vector<Scalar>& point) {
    std::string line = "EVAL";
    for (const auto& x : point) line += " " + x.get_num().get_str() + "/" + x.get_den().get_str();
    line += "\n";
    std::size_t off = 0;
    while (off < line.size()) {
        ssize_t w = write(to_child_, line.data() + off, line.size() - off);
        if (w <= 0) throw Error(ErrorKind::Precondition, "evaluator closed its input");
        off += static_cast<std::size_t>(w);
    }
    std::string reply;
    int ch;
    while ((ch = std::fgetc(from_child_)) != EOF && ch != '\n') reply.push_back(static_cast<char>(ch));
    if (ch == EOF && reply.empty()) throw Error(ErrorKind::Precondition, "evaluator exited without a reply");
    while (!reply.empty() && (reply.back() == '\r' || reply.back() == ' ')) reply.pop_back();
    ++calls_;
    return parse_scalar(reply);
}

BlackBox blackbox_from_subprocess(std::shared_ptr<SubprocessEvaluator> proc, std::size_t n, unsigned d) {
    auto mu = std::make_shared<std::mutex>();
    BlackBox bb;
    bb.n = n;
    bb.d = d;
    bb.eval = [proc, mu, n](const std::vector<Scalar>& x) {
        if (x.size() != n) throw Error(ErrorKind::DimensionMismatch, "evaluation point has the wrong length");
        std::lock_guard<std::mutex> lock(*mu);
        return proc->eval(x);
    };
    return bb;
}

Matrix slice_matrix(const std::vector<LinearForm>& basis) {
    if (basis.empty()) throw Error(ErrorKind::InvalidArgument, "empty slice basis");
    std::size_t n = basis[0].size();
    Matrix S(n, LinearForm(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (basis[j].size() != n) throw Error(ErrorKind::DimensionMismatch, "ragged slice basis");
        for (std::size_t i = 0; i < n; ++i) S[i][j] = basis[j][i];
    }
    return S;
}

Polynomial interpolate_slice(const BlackBox& bb, const std::vector<LinearForm>& basis, unsigned d,
                             std::mt19937_64& rng, InterpolationStats* stats, unsigned max_resamples) {
    Matrix S = slice_matrix(basis);
    if (S.size() != bb.n) throw Error(ErrorKind::DimensionMismatch, "slice vectors must have n coordinates");
    std::size_t r = basis.size();
    std::vector<Exponent> mons;
    Exponent cur(r, 0);
    exponents_of_degree(r, d, cur, 0, mons);
    std::size_t m = mons.size();
    mpz_class N = full_rank_bound(d, bb.n);
    auto value_at = [&](const LinearForm& y) { return bb.eval(mat_vec(S, y)); };
    for (unsigned attempt = 0; attempt <= max_resamples; ++attempt) {
        if (attempt > 0 && stats) ++stats->resamples;
        std::vector<std::vector<mpz_class>> A(m, std::vector<mpz_class>(m));
        std::vector<Scalar> rhs(m);
        mpz_class den = 1;
        for (std::size_t i = 0; i < m; ++i) {
            LinearForm y = random_vector(r, N, rng);
            std::vector<std::vector<mpz_class>> pw(r, std::vector<mpz_class>(d + 1, 1));
            for (std::size_t k = 0; k < r; ++k)
                for (unsigned e = 1; e <= d; ++e) pw[k][e] = pw[k][e - 1] * y[k].get_num();
            for (std::size_t j = 0; j < m; ++j) {
                mpz_class v = 1;
                for (std::size_t k = 0; k < r; ++k) v *= pw[k][mons[j][k]];
                A[i][j] = v;
            }
            rhs[i] = value_at(y);
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), rhs[i].get_den_mpz_t());
        }
        std::vector<mpz_class> b(m);
        for (std::size_t i = 0; i < m; ++i) b[i] = rhs[i].get_num() * (den / rhs[i].get_den());
        auto sol = solve_integer_system(std::move(A), std::move(b));
        if (!sol) continue;
        Polynomial p(r);
        for (std::size_t j = 0; j < m; ++j)
            if ((*sol)[j] != 0) p.add_term(mons[j], (*sol)[j] / Scalar(den));
        // A wrong degree bound still yields a solution; fresh points expose it.
        bool ok = true;
        for (int t = 0; t < 2 && ok; ++t) {
            LinearForm y = random_vector(r, N, rng);
            ok = evaluate(p, y) == value_at(y);
        }
        if (ok) return p;
    }
    throw Error(ErrorKind::InterpolationFailure,
                "no consistent interpolant after " + std::to_string(max_resamples) + " resamples");
}

namespace {

struct SliceJob {
    SliceJob(std::string name, std::vector<LinearForm> basis) : name(std::move(name)), basis(std::move(basis)) {}
    std::string name;
    std::vector<LinearForm> basis;
    Polynomial f;
    std::uint64_t seed = 0;
    Decomposition result;
};

void run_jobs(std::vector<SliceJob>& jobs, const LowRankConfig& cfg, unsigned threads) {
    auto work = [&](SliceJob& j) {
        std::mt19937_64 rng(j.seed);
        try {
            j.result = reconstruct_low_rank(j.f, cfg, rng);
        } catch (const Error& e) {
            j.result = Decomposition();
            j.result.f = j.f;
            j.result.diagnostic = e.what();
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
    if (threads == 1) {
        for (auto& j : jobs) work(j);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) work(jobs[i]);
        });
    for (auto& t : pool) t.join();
}

// Forms of P restricted to the first r slice coordinates; nullopt if a factor vanishes there.
std::optional<PiSigmaPoly> restrict_to_V(const PiSigmaPoly& P, std::size_t r) {
    PiSigmaPoly out(r, P.scale());
    for (const auto& f : P.factors()) {
        LinearForm q(f.form.begin(), f.form.begin() + static_cast<long>(r));
        if (is_zero(q)) return std::nullopt;
        out.multiply(q, f.mult);
    }
    return out;
}

}  // namespace

std::optional<std::array<PiSigmaPoly, 2>> glue_slices(const std::vector<SliceGates>& slices, std::size_t r,
                                                      const Matrix& A, std::string* diagnostic) {
    auto fail = [&](const std::string& msg) -> std::optional<std::array<PiSigmaPoly, 2>> {
        if (diagnostic) *diagnostic = msg;
        return std::nullopt;
    };
    std::size_t n = A.size();
    if (slices.empty() || slices.size() != n - r) throw Error(ErrorKind::DimensionMismatch, "need one slice per v_i, i > r");
    // V-gates from the first slice; every other slice must restrict to the same pair.
    std::vector<std::array<PiSigmaPoly, 2>> gates(slices.size());
    std::array<PiSigmaPoly, 2> ref;
    for (std::size_t s = 0; s < slices.size(); ++s) {
        auto R0 = restrict_to_V(slices[s].M0, r), R1 = restrict_to_V(slices[s].M1, r);
        if (!R0 || !R1) return fail("slice " + slices[s].name + ": a gate factor vanishes on V");
        if (s == 0) {
            ref = {*R0, *R1};
            if (*R0 == *R1) return fail("V-gates coincide; gate correspondence is ambiguous");
            gates[s] = {slices[s].M0, slices[s].M1};
            continue;
        }
        bool direct = *R0 == ref[0] && *R1 == ref[1], swapped = *R0 == ref[1] && *R1 == ref[0];
        if (!direct && !swapped) return fail("slice " + slices[s].name + ": gates do not restrict to the V-gates");
        gates[s] = direct ? std::array<PiSigmaPoly, 2>{slices[s].M0, slices[s].M1}
                          : std::array<PiSigmaPoly, 2>{slices[s].M1, slices[s].M0};
    }
    Matrix Ainv = inverse(A);
    std::array<PiSigmaPoly, 2> full = {PiSigmaPoly(n), PiSigmaPoly(n)};
    for (int a = 0; a < 2; ++a) {
        full[a] = PiSigmaPoly(n, ref[a].scale());
        for (const auto& p : ref[a].factors()) {
            LinearForm c(n, 0);
            for (std::size_t k = 0; k < r; ++k) c[k] = p.form[k];
            for (std::size_t s = 0; s < slices.size(); ++s) {
                std::optional<LinearForm> lift;
                unsigned mult = 0;
                bool unique = true;
                for (const auto& q : gates[s][a].factors()) {
                    LinearForm qv(q.form.begin(), q.form.begin() + static_cast<long>(r));
                    if (!are_proportional(qv, p.form)) continue;
                    if (lift) unique = false;
                    lift = q.form;
                    mult += q.mult;
                }
                if (!lift || !unique || mult != p.mult)
                    return fail("slice " + slices[s].name + ": no unique multiplicity-matched lift of " +
                                form_to_string(p.form));
                std::size_t k = 0;
                while (p.form[k] == 0) ++k;
                c[r + s] = (*lift)[r] * p.form[k] / (*lift)[k];
            }
            full[a].multiply(mat_vec(Ainv, c), p.mult);
        }
    }
    return full;
}

namespace {

struct Attempt {
    Decomposition dec;
    bool ok = false;
    bool retry = false;  // failure that a fresh slice system may avoid
};

std::string join_paths(const std::vector<SliceReport>& s) {
    std::string out;
    for (const auto& r : s) out += (out.empty() ? "" : ",") + r.name + ":" + r.path;
    return out;
}

Attempt one_attempt(const BlackBox& bb, const LiftConfig& cfg, std::mt19937_64& rng, LiftReport& rep) {
    std::size_t n = bb.n, r = cfg.low.r;
    unsigned d = bb.d;
    Attempt at;
    mpz_class N = full_rank_bound(d, n);
    Matrix A;  // rows v_1 .. v_n
    do {
        A.clear();
        for (std::size_t i = 0; i < n; ++i) A.push_back(random_vector(n, N, rng));
    } while (determinant(A) == 0);

    bool single = n <= r + 1;
    std::vector<SliceJob> jobs;
    if (single) {
        jobs.emplace_back("V", A);
    } else {
        for (std::size_t i = r; i < n; ++i) {
            std::vector<LinearForm> basis(A.begin(), A.begin() + static_cast<long>(r));
            basis.push_back(A[i]);
            jobs.emplace_back("V_" + std::to_string(i + 1), basis);
        }
    }
    std::size_t main_jobs = jobs.size();
    for (unsigned e = 0; e < cfg.extra_slices; ++e) {
        std::vector<LinearForm> basis(A.begin(), A.begin() + static_cast<long>(std::min(r, n)));
        basis.push_back(random_vector(n, N, rng));
        jobs.emplace_back("W_" + std::to_string(e + 1), basis);
    }
    for (auto& j : jobs) {
        j.f = interpolate_slice(bb, j.basis, d, rng);
        j.seed = rng();
    }
    if (!single) {
        std::vector<LinearForm> vbasis(A.begin(), A.begin() + static_cast<long>(r));
        Polynomial fV = interpolate_slice(bb, vbasis, d, rng);
        Matrix drop(r + 1, LinearForm(r, 0));
        for (std::size_t k = 0; k < r; ++k) drop[k][k] = 1;
        for (const auto& j : jobs)
            if (substitute_linear(j.f, drop) != fV) {
                at.dec.diagnostic = "slice " + j.name + " does not restrict to f|V (degree bound violated?)";
                at.retry = true;
                return at;
            }
    }
    run_jobs(jobs, cfg.low, cfg.jobs);
    rep.slices.clear();
    for (const auto& j : jobs) rep.slices.push_back({j.name, j.result.path, j.result.diagnostic});
    for (const auto& j : jobs)
        if (!j.result.iscorrect) {
            at.dec.diagnostic = "slice " + j.name + " failed: " + j.result.diagnostic;
            return at;
        }

    PiSigmaPoly full[2] = {PiSigmaPoly(n), PiSigmaPoly(n)};
    if (single) {
        // Slice coordinates are the coefficients on v_1 .. v_n.
        Matrix Ainv = inverse(A);
        const PiSigmaPoly* M[2] = {&jobs[0].result.M0, &jobs[0].result.M1};
        for (int a = 0; a < 2; ++a) {
            full[a] = PiSigmaPoly(n, M[a]->scale());
            for (const auto& f : M[a]->factors()) full[a].multiply(mat_vec(Ainv, f.form), f.mult);
        }
    } else {
        std::vector<SliceGates> sg;
        for (std::size_t s = 0; s < main_jobs; ++s) sg.push_back({jobs[s].name, jobs[s].result.M0, jobs[s].result.M1});
        auto glued = glue_slices(sg, r, A, &at.dec.diagnostic);
        if (!glued) {
            at.retry = true;
            return at;
        }
        full[0] = (*glued)[0];
        full[1] = (*glued)[1];
    }

    // Validation slices must reproduce the lifted gates.
    for (std::size_t s = main_jobs; s < jobs.size(); ++s) {
        Matrix Sw = slice_matrix(jobs[s].basis);
        PiSigmaPoly P0 = full[0].transform(Sw), P1 = full[1].transform(Sw);
        const auto& res = jobs[s].result;
        if (!((res.M0 == P0 && res.M1 == P1) || (res.M0 == P1 && res.M1 == P0))) {
            at.dec.diagnostic = "validation slice " + jobs[s].name + " disagrees with the lifted gates";
            at.retry = true;
            return at;
        }
    }

    at.dec.M0 = full[0];
    at.dec.M1 = full[1];
    at.dec.path = join_paths(rep.slices);
    at.ok = true;
    return at;
}

std::size_t binomial(std::size_t a, std::size_t b) {
    std::size_t r = 1;
    for (std::size_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

}  // namespace

Decomposition reconstruct_full(const BlackBox& bb, const LiftConfig& cfg, std::mt19937_64& rng,
                               const Polynomial* explicit_f, LiftReport* report) {
    validate_config(cfg.low);
    LiftReport local;
    LiftReport& rep = report ? *report : local;
    rep = LiftReport{};
    Decomposition fail;
    if (explicit_f) fail.f = *explicit_f;
    if (bb.n == 0 || bb.d == 0) {
        fail.diagnostic = "blackbox needs n >= 1 and d >= 1";
        return fail;
    }
    for (unsigned attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        ++rep.attempts;
        Attempt at;
        try {
            at = one_attempt(bb, cfg, rng, rep);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InterpolationFailure) throw;
            fail.diagnostic = e.what();
            return fail;
        }
        if (!at.ok) {
            rep.log.push_back("attempt " + std::to_string(attempt + 1) + ": " + at.dec.diagnostic);
            fail.diagnostic = at.dec.diagnostic;
            if (!at.retry) return fail;
            continue;
        }
        Decomposition& d = at.dec;
        // Blackbox agreement at random points, then the exact identity when the source is explicit.
        std::size_t points = std::min(cfg.max_verify_points, 4 * binomial(bb.d + bb.n - 1, bb.n - 1));
        mpz_class N = full_rank_bound(bb.d, bb.n);
        bool agree = true;
        for (std::size_t t = 0; t < points && agree; ++t) {
            LinearForm x = random_vector(bb.n, N, rng);
            agree = bb.eval(x) == eval_pisigma(d.M0, x) + eval_pisigma(d.M1, x);
        }
        rep.verify_points = points;
        if (explicit_f) {
            rep.symbolic_check = true;
            agree = agree && d.M0.expand() + d.M1.expand() == *explicit_f;
            d.f = *explicit_f;
        }
        if (!agree) {
            rep.log.push_back("attempt " + std::to_string(attempt + 1) + ": final identity check failed");
            fail.diagnostic = "lifted circuit disagrees with the blackbox";
            continue;
        }
        d.iscorrect = true;
        return d;
    }
    fail.diagnostic = "resample attempts exhausted; last: " + fail.diagnostic;
    return fail;
}

}  // namespace sps2
