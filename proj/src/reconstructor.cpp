#include "sps2/reconstructor.hpp"

namespace sps2 {

BasisDecomposition make_split_basis(std::vector<LinearForm> basis, std::vector<std::size_t> S0,
                                    std::vector<std::size_t> S1, std::vector<std::size_t> S2) {
    if (S0.empty() || S1.empty() || S2.empty()) throw Error(ErrorKind::InvalidArgument, "split blocks must be nonempty");
    return BasisDecomposition(std::move(basis), {{"W0", std::move(S0)}, {"W1", std::move(S1)}, {"W2", std::move(S2)}});
}

std::optional<PiSigmaPoly> project_pisigma(const PiSigmaPoly& P, const BasisDecomposition& split, const std::string& W) {
    PiSigmaPoly out(P.nvars(), P.scale());
    for (const auto& f : P.factors()) {
        LinearForm q = project(f.form, split, W);
        if (is_zero(q)) return std::nullopt;
        out = out * PiSigmaPoly::from_forms(P.nvars(), std::vector<LinearForm>(f.mult, q));
    }
    return out;
}

LinearForm reconstruct_linear(const LinearForm& L0, const LinearForm& L1, const BasisDecomposition& split) {
    if (L0.size() != split.dim() || L1.size() != split.dim())
        throw Error(ErrorKind::DimensionMismatch, "projection length differs from the basis");
    LinearForm c0 = split.coordinates(L0), c1 = split.coordinates(L1);
    for (auto j : split.block_indices("W0"))
        if (c0[j] != 0) throw Error(ErrorKind::InconsistentProjections, "first input has a W0 component");
    for (auto j : split.block_indices("W1"))
        if (c1[j] != 0) throw Error(ErrorKind::InconsistentProjections, "second input has a W1 component");
    auto S2 = split.block_indices("W2");
    std::optional<std::size_t> pivot;
    for (auto j : S2)
        if (c0[j] != 0 && c1[j] != 0) {
            pivot = j;
            break;
        }
    if (!pivot) throw Error(ErrorKind::InconsistentProjections, "no common nonzero W2 coordinate");
    c0 = scale(c0, Scalar(1 / c0[*pivot]));
    c1 = scale(c1, Scalar(1 / c1[*pivot]));
    LinearForm c(split.dim(), 0);
    for (auto j : split.block_indices("W0")) c[j] = c1[j];
    for (auto j : split.block_indices("W1")) c[j] = c0[j];
    for (auto j : S2) {
        if (c0[j] != c1[j]) throw Error(ErrorKind::InconsistentProjections, "W2 coordinates disagree");
        c[j] = c0[j];
    }
    return split.from_coordinates(c);
}

PiSigmaPoly reconstruct_pisigma(const PiSigmaPoly& P0, const PiSigmaPoly& P1, const BasisDecomposition& split) {
    if (P0.degree() != P1.degree()) throw Error(ErrorKind::DegreeMismatch, "projections have different degrees");
    if (P0.factors().size() > 1) throw Error(ErrorKind::Precondition, "first projection must be a power of one form");
    PiSigmaPoly out(P0.nvars());
    if (P0.is_constant()) return out;
    const LinearForm& p = P0.factors()[0].form;
    for (const auto& d : P1.forms_with_multiplicity()) out.multiply(normalize(reconstruct_linear(p, d, split)));
    return out;
}

PiSigmaPoly run_reconstructor(const PiSigmaPoly& Q0, const PiSigmaPoly& Q1, const BasisDecomposition& split) {
    std::size_t n = Q0.nvars();
    const auto& cs = Q0.factors();
    std::vector<LinearForm> ds = Q1.forms_with_multiplicity();
    std::vector<LinearForm> c1(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) c1[i] = project(cs[i].form, split, "W1'");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (is_zero(c1[i])) continue;
        bool flag = true;
        for (std::size_t j = 0; j < cs.size() && flag; ++j)
            if (j != i && !is_zero(c1[j]) && are_proportional(c1[i], c1[j])) flag = false;
        if (!flag) continue;
        PiSigmaPoly P1(n);
        for (const auto& d : ds) {
            LinearForm d0 = project(d, split, "W0'");
            if (!is_zero(d0) && are_proportional(d0, c1[i])) P1.multiply(d);
        }
        if (P1.degree() != cs[i].mult) continue;
        PiSigmaPoly P0(n);
        P0.multiply(cs[i].form, cs[i].mult);
        try {
            return reconstruct_pisigma(P0, P1, split);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InconsistentProjections) throw;
        }
    }
    return PiSigmaPoly(n);
}

}  // namespace sps2
