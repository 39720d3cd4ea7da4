#pragma once

#include <cmath>
#include <string>

#include "splitlab/lattice.hpp"
#include "splitlab/pauli.hpp"

namespace splitlab {

enum class Family { None, CCExp, HorizontalZ, UniformZ, UniformXZ };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::None: return "none";
        case Family::CCExp: return "cc-exp";
        case Family::HorizontalZ: return "horizontal-z";
        case Family::UniformZ: return "uniform-z";
        case Family::UniformXZ: return "uniform-xz";
    }
    return "?";
}

// Perturbation V(lambda) added to the bare stabilizer Hamiltonian. Signs are
// taken exactly as printed; a global field-sign flip is a product of
// single-site unitaries and changes no entropy.
struct PerturbationSpec {
    Family family = Family::None;
    double lam_x = 0.0;  // UniformXZ
    double lam_z = 0.0;  // UniformXZ / UniformZ
    double lam_h = 0.0;  // HorizontalZ
    double lam = 0.0;    // CCExp

    static PerturbationSpec none() { return {}; }
    static PerturbationSpec uniform_xz(double lx, double lz) {
        PerturbationSpec s;
        s.family = Family::UniformXZ;
        s.lam_x = lx;
        s.lam_z = lz;
        return s;
    }
    static PerturbationSpec uniform_z(double lz) {
        PerturbationSpec s;
        s.family = Family::UniformZ;
        s.lam_z = lz;
        return s;
    }
    static PerturbationSpec horizontal_z(double lh) {
        PerturbationSpec s;
        s.family = Family::HorizontalZ;
        s.lam_h = lh;
        return s;
    }
    static PerturbationSpec cc_exp(double lam) {
        PerturbationSpec s;
        s.family = Family::CCExp;
        s.lam = lam;
        return s;
    }

    void validate() const {
        auto finite = [](double v) { return std::isfinite(v); };
        if (!finite(lam_x) || !finite(lam_z) || !finite(lam_h) || !finite(lam))
            throw std::invalid_argument("perturbation parameters must be finite");
        if (family == Family::CCExp && lam < 0)
            throw std::invalid_argument("cc-exp requires lambda >= 0");
    }
};

namespace detail {

// exp(-lam * sum_{i in s} sigma^z_i) expanded analytically per star:
// prod_{i in s} (cosh(lam) - sinh(lam) sigma^z_i), one string per subset.
inline void append_star_exponential(OperatorSum& op, EdgeMask star, double lam) {
    std::vector<int> bits;
    for (int i = 0; i < 64; ++i)
        if (star >> i & 1) bits.push_back(i);
    const int k = static_cast<int>(bits.size());
    const double ch = std::cosh(lam), sh = std::sinh(lam);
    for (unsigned sub = 0; sub < (1u << k); ++sub) {
        PauliString t;
        t.coeff = 1.0;
        for (int j = 0; j < k; ++j) {
            if (sub >> j & 1) {
                t.zmask |= EdgeMask{1} << bits[j];
                t.coeff *= -sh;
            } else {
                t.coeff *= ch;
            }
        }
        op.terms.push_back(t);
    }
}

}  // namespace detail

// H = -sum_s A_s - sum_p B_p + V(lambda) over the edge spins.
inline OperatorSum build_model(const LatticeGeometry& geom, const PerturbationSpec& spec) {
    spec.validate();
    OperatorSum op;
    op.n_sites = geom.n_edges;
    for (EdgeMask s : geom.stars) op.terms.push_back({s, 0, -1.0});
    for (EdgeMask p : geom.plaquettes) op.terms.push_back({0, p, -1.0});

    switch (spec.family) {
        case Family::None:
            break;
        case Family::UniformXZ:
            for (int i = 0; i < geom.n_edges; ++i) {
                op.terms.push_back({0, EdgeMask{1} << i, spec.lam_z});
                op.terms.push_back({EdgeMask{1} << i, 0, spec.lam_x});
            }
            break;
        case Family::UniformZ:
            for (int i = 0; i < geom.n_edges; ++i)
                op.terms.push_back({0, EdgeMask{1} << i, spec.lam_z});
            break;
        case Family::HorizontalZ:
            for (int y = 0; y < geom.ly; ++y)
                for (int x = 0; x < geom.lx; ++x)
                    if (int e = geom.h_ids[geom.cell(x, y)]; e >= 0)
                        op.terms.push_back({0, EdgeMask{1} << e, spec.lam_h});
            break;
        case Family::CCExp:
            for (EdgeMask s : geom.stars) detail::append_star_exponential(op, s, spec.lam);
            break;
    }
    simplify(op);
    return op;
}

}  // namespace splitlab
