#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "splitlab/ed.hpp"
#include "splitlab/entanglement.hpp"
#include "splitlab/pauli.hpp"

namespace splitlab {

enum class ChainBoundary { Open, Periodic };

// H = -coupling * sum_i S_i S_{i+1} - transverse * sum_i T_i
//     - longitudinal * sum_i S_i
// with S the Ising axis and T the conjugate Pauli. The ED path realizes S as
// sigma^z; the fermion path works in the dual frame where S is sigma^x.
struct ChainSpec {
    int n = 2;
    double coupling = 1.0;
    double transverse = 0.0;
    double longitudinal = 0.0;
    ChainBoundary boundary = ChainBoundary::Open;

    void validate() const {
        if (n < 2) throw std::invalid_argument("chain needs at least 2 sites");
        if (!std::isfinite(coupling) || !std::isfinite(transverse) || !std::isfinite(longitudinal))
            throw std::invalid_argument("chain parameters must be finite");
    }
};

inline OperatorSum chain_hamiltonian(const ChainSpec& spec) {
    spec.validate();
    OperatorSum op;
    op.n_sites = spec.n;
    const int bonds = (spec.boundary == ChainBoundary::Periodic) ? spec.n : spec.n - 1;
    for (int i = 0; i < bonds; ++i) {
        EdgeMask z = (EdgeMask{1} << i) | (EdgeMask{1} << ((i + 1) % spec.n));
        op.terms.push_back({0, z, -spec.coupling});
    }
    for (int i = 0; i < spec.n; ++i) {
        if (spec.transverse != 0.0) op.terms.push_back({EdgeMask{1} << i, 0, -spec.transverse});
        if (spec.longitudinal != 0.0) op.terms.push_back({0, EdgeMask{1} << i, -spec.longitudinal});
    }
    simplify(op);
    return op;
}

// Jordan-Wigner + Bogoliubov solution of the open transverse-field chain
// H_ff = -J sum tau^x tau^x - h sum tau^z. Exposes the Majorana two-point
// data needed for string correlators and block entropies.
struct FermionSolution {
    int n = 0;
    double ground_energy = 0.0;
    Eigen::MatrixXd u, v;    // mode matrices, rows = modes
    Eigen::MatrixXd tba;     // <B_i A_j>, B = c^dag - c, A = c^dag + c

    // <tau^z_mu> = <A_mu B_mu> = -<B_mu A_mu>
    double tau_z(int mu) const { return -tba(mu, mu); }

    // <tau^x_mu tau^x_nu> = det [ <B_{mu+a-1} A_{mu+b}> ]_{a,b=1..nu-mu}
    double tau_xx(int mu, int nu) const {
        if (mu == nu) return 1.0;
        if (mu > nu) std::swap(mu, nu);
        const int w = nu - mu;
        Eigen::MatrixXd m(w, w);
        for (int a = 0; a < w; ++a)
            for (int b = 0; b < w; ++b) m(a, b) = tba(mu + a, mu + 1 + b);
        return m.determinant();
    }
};

inline FermionSolution tfim_solve(const ChainSpec& spec) {
    spec.validate();
    if (spec.longitudinal != 0.0)
        throw UnsupportedFamily("longitudinal field breaks free-fermion solvability");
    if (spec.boundary != ChainBoundary::Open)
        throw UnsupportedFamily("fermion path supports open chains only");
    const int n = spec.n;
    const double j = spec.coupling, h = spec.transverse;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n), b = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = 2.0 * h;
    for (int i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = a(i + 1, i) = -j;
        b(i, i + 1) = -j;
        b(i + 1, i) = +j;
    }

    Eigen::MatrixXd bdg(2 * n, 2 * n);
    bdg.topLeftCorner(n, n) = a;
    bdg.topRightCorner(n, n) = b;
    bdg.bottomLeftCorner(n, n) = -b;
    bdg.bottomRightCorner(n, n) = -a;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bdg);

    FermionSolution fs;
    fs.n = n;
    fs.u.resize(n, n);
    fs.v.resize(n, n);
    // eigenvalues come in +/- pairs; the top n are the positive branch
    double lam_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const int col = n + k;
        lam_sum += es.eigenvalues()(col);
        fs.u.row(k) = es.eigenvectors().col(col).head(n).transpose();
        fs.v.row(k) = es.eigenvectors().col(col).tail(n).transpose();
    }
    fs.ground_energy = -h * n + 0.5 * (a.trace() - lam_sum);

    // c_i = sum_k (u_ki eta_k + v_ki eta_k^dag) over the eta vacuum
    Eigen::MatrixXd utu = fs.u.transpose() * fs.u;
    Eigen::MatrixXd vtv = fs.v.transpose() * fs.v;
    Eigen::MatrixXd vtu = fs.v.transpose() * fs.u;
    Eigen::MatrixXd utv = fs.u.transpose() * fs.v;
    fs.tba = vtu + vtv - utu - utv;
    return fs;
}

// Occupation parameters of the block [0, l): singular values of the
// restricted <BA> matrix. The block's Schmidt spectrum is the product of the
// per-mode pairs {(1+nu)/2, (1-nu)/2}.
inline EntanglementSpectrum fermion_block_spectrum(const FermionSolution& fs, int l,
                                                   double floor = kSpectrumFloor) {
    if (l < 1 || l >= fs.n) throw InvalidRegion("block must be a nonempty strict prefix");
    if (l > 16) throw CapExceeded("block spectrum capped at 16 modes");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fs.tba.topLeftCorner(l, l));
    std::vector<double> occ(l);
    for (int m = 0; m < l; ++m) occ[m] = std::clamp(0.5 * (1.0 + svd.singularValues()(m)), 0.0, 1.0);

    EntanglementSpectrum spec;
    spec.probs.reserve(std::size_t{1} << l);
    for (std::size_t s = 0; s < (std::size_t{1} << l); ++s) {
        double p = 1.0;
        for (int m = 0; m < l; ++m) p *= (s >> m & 1) ? (1.0 - occ[m]) : occ[m];
        if (p > floor) spec.probs.push_back(p);
    }
    std::sort(spec.probs.begin(), spec.probs.end(), std::greater<>());
    return spec;
}

// |<tau^x tau^x> - <tau^x><tau^x>| on neighboring mid-chain sites of the
// dual chain with bond strength lam. <tau^x> vanishes by parity, so the
// residual is the bond correlator itself; it is zero only at lam = 0.
inline double dual_factorization_residual(double lam, const ChainSpec& base) {
    ChainSpec spec = base;
    spec.coupling = lam;
    FermionSolution fs = tfim_solve(spec);
    const int mu = spec.n / 2 - 1;
    return std::abs(fs.tau_xx(mu, mu + 1));
}

inline double dual_factorization_residual(double lam, int n = 12) {
    ChainSpec spec;
    spec.n = n;
    spec.transverse = 1.0;
    return dual_factorization_residual(lam, spec);
}

}  // namespace splitlab
