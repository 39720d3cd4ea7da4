#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "splitlab/lattice.hpp"
#include "splitlab/pauli.hpp"

namespace splitlab {

inline OperatorSum loop_operator(const LoopSpec& loop, int n_sites) {
    OperatorSum op;
    op.n_sites = n_sites;
    PauliString t;
    t.coeff = 1.0;
    if (loop.kind == 'z')
        t.zmask = loop.mask;
    else
        t.xmask = loop.mask;
    op.terms = {t};
    return op;
}

struct SolverOptions {
    int k = 1;               // eigenpairs to return
    double tol = 1e-10;      // residual gate, relative to max(1, |E0|)
    int max_iter = 400;      // block iterations
    std::uint64_t seed = 1;  // start-block generator
    int block_extra = 2;     // extra block vectors beyond k
    int max_basis = 0;       // 0 = pick from memory budget
    int max_qubits = 24;
};

struct GroundSpace {
    std::vector<double> energies;     // ascending
    std::vector<StateVector> states;  // orthonormal
    std::vector<double> residuals;    // ||Hv - Ev|| per returned pair
    double gap_to_next = 0.0;         // next Ritz value minus last returned
    std::uint64_t seed = 0;
};

namespace detail {

inline double dot(const StateVector& a, const StateVector& b) {
    // extended-precision accumulation keeps the projected matrix accurate
    // enough for 1e-11-level residual gates
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(s);
}

inline void axpy(double a, const StateVector& x, StateVector& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline double norm(const StateVector& v) { return std::sqrt(dot(v, v)); }

inline void scale(StateVector& v, double a) {
    for (auto& x : v) x *= a;
}

inline void fill_gaussian(StateVector& v, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& x : v) x = g(rng);
}

// Two-pass MGS of `block` against `basis` and internally. Columns that lose
// all norm are refilled from the rng stream so the block keeps full rank.
inline void orthonormalize(std::vector<StateVector>& block, const std::vector<StateVector>& basis,
                           std::mt19937_64& rng) {
    for (std::size_t j = 0; j < block.size(); ++j) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& b : basis) axpy(-dot(b, block[j]), b, block[j]);
                for (std::size_t i = 0; i < j; ++i) axpy(-dot(block[i], block[j]), block[i], block[j]);
            }
            double n = norm(block[j]);
            if (n > 1e-8) {
                scale(block[j], 1.0 / n);
                break;
            }
            fill_gaussian(block[j], rng);
        }
    }
}

}  // namespace detail

// k lowest eigenpairs of a streamed OperatorSum by block Lanczos with full
// reorthogonalization and thick restarts at the basis cap. Deterministic for
// a fixed seed.
inline GroundSpace ground_space(const OperatorSum& h, const SolverOptions& opts = {}) {
    if (h.n_sites > opts.max_qubits) throw CapExceeded("system exceeds the solver qubit cap");
    if (opts.max_iter < 1) throw std::invalid_argument("solver needs at least one iteration");
    const std::size_t dim = h.dim();
    const int k = std::min<int>(std::max(1, opts.k), static_cast<int>(dim));
    const int block = std::min<int>(k + std::max(0, opts.block_extra), static_cast<int>(dim));

    int max_basis = opts.max_basis;
    if (max_basis <= 0) {
        std::size_t budget_vecs = (std::size_t{1} << 31) / (dim * sizeof(double) * 2);
        max_basis = static_cast<int>(std::min<std::size_t>(budget_vecs, 288));
    }
    max_basis = std::max(max_basis, 3 * block + k);
    max_basis = std::min<int>(max_basis, static_cast<int>(dim));

    std::mt19937_64 rng(opts.seed);
    std::vector<StateVector> basis, hbasis;
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(max_basis + block, max_basis + block);

    std::vector<StateVector> work(block, StateVector(dim));
    for (auto& w : work) detail::fill_gaussian(w, rng);
    detail::orthonormalize(work, basis, rng);

    Eigen::VectorXd ritz_vals;
    Eigen::MatrixXd ritz_vecs;
    std::vector<double> residuals(k, 1.0);

    auto ritz_state = [&](int col) {
        StateVector v(dim, 0.0);
        for (std::size_t i = 0; i < basis.size(); ++i) detail::axpy(ritz_vecs(i, col), basis[i], v);
        return v;
    };

    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        // grow basis by the work block, never past the full space
        const std::size_t m0 = basis.size();
        const std::size_t take = std::min<std::size_t>(work.size(), dim - m0);
        for (std::size_t c = 0; c < take; ++c) {
            basis.push_back(std::move(work[c]));
            hbasis.push_back(matvec(h, basis.back()));
        }
        const std::size_t m = basis.size();
        for (std::size_t j = m0; j < m; ++j) {
            for (std::size_t i = 0; i <= j; ++i) {
                double val = detail::dot(basis[i], hbasis[j]);
                proj(i, j) = val;
                proj(j, i) = val;
            }
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj.topLeftCorner(m, m));
        ritz_vals = es.eigenvalues();
        ritz_vecs = es.eigenvectors();

        // residuals of the k lowest Ritz pairs, from a direct matvec
        bool done = static_cast<int>(m) >= k;
        const double scale = std::max(1.0, std::abs(ritz_vals(0)));
        for (int j = 0; j < k && static_cast<int>(m) >= k; ++j) {
            StateVector v = ritz_state(j);
            StateVector hv = matvec(h, v);
            long double r2 = 0.0L;
            for (std::size_t t = 0; t < dim; ++t) {
                double d = hv[t] - ritz_vals(j) * v[t];
                r2 += static_cast<long double>(d) * d;
            }
            residuals[j] = std::sqrt(static_cast<double>(r2));
            if (residuals[j] > opts.tol * scale) done = false;
        }
        if (done || m >= dim) break;

        // classic block expansion: H times the newest block
        work.assign(block, StateVector(dim, 0.0));
        for (int c = 0; c < block; ++c) work[c] = hbasis[m0 + std::min<std::size_t>(c, m - 1 - m0)];

        // thick restart when the basis would overflow
        if (static_cast<int>(m) + block > max_basis) {
            const int keep = std::min<int>(static_cast<int>(m), std::max(2 * k + block, 3 * block));
            std::vector<StateVector> nb, nhb;
            nb.reserve(keep);
            nhb.reserve(keep);
            for (int c = 0; c < keep; ++c) {
                StateVector v(dim, 0.0), hv(dim, 0.0);
                for (std::size_t i = 0; i < m; ++i) {
                    detail::axpy(ritz_vecs(i, c), basis[i], v);
                    detail::axpy(ritz_vecs(i, c), hbasis[i], hv);
                }
                nb.push_back(std::move(v));
                nhb.push_back(std::move(hv));
            }
            basis = std::move(nb);
            hbasis = std::move(nhb);
            proj.setZero();
            for (int c = 0; c < keep; ++c) proj(c, c) = ritz_vals(c);
        }

        detail::orthonormalize(work, basis, rng);
    }

    const double scale = std::max(1.0, std::abs(ritz_vals(0)));
    for (int j = 0; j < k; ++j)
        if (iter >= opts.max_iter || residuals[j] > opts.tol * scale)
            throw ConvergenceFailure("eigensolver did not reach tolerance", residuals);

    GroundSpace gs;
    gs.seed = opts.seed;
    const std::size_t m = basis.size();
    for (int j = 0; j < k; ++j) {
        StateVector v = ritz_state(j);
        detail::scale(v, 1.0 / detail::norm(v));
        gs.states.push_back(std::move(v));
        gs.energies.push_back(ritz_vals(j));
        gs.residuals.push_back(residuals[j]);
    }
    gs.gap_to_next = (static_cast<int>(m) > k) ? ritz_vals(k) - ritz_vals(k - 1) : 0.0;
    return gs;
}

struct SectorSelection {
    StateVector state;
    double lz1 = 0.0;  // achieved loop expectations
    double lx2 = 0.0;
};

// Joint-diagonalize the two Wilson loops compressed to the (quasi-)degenerate
// space and return the eigenvector whose labels are closest to `target`.
inline SectorSelection select_sector(const GroundSpace& gs, const LoopSpec& lz, const LoopSpec& lx,
                                     std::pair<double, double> target = {1.0, 1.0},
                                     double commute_tol = 0.05) {
    const int k = static_cast<int>(gs.states.size());
    if (k == 0) throw std::invalid_argument("select_sector: empty ground space");
    const int n_sites = static_cast<int>(std::bit_width(gs.states[0].size()) - 1);
    OperatorSum oz = loop_operator(lz, n_sites);
    OperatorSum ox = loop_operator(lx, n_sites);

    if (k == 1) {
        return {gs.states[0], expectation(gs.states[0], oz), expectation(gs.states[0], ox)};
    }

    Eigen::MatrixXd mz(k, k), mx(k, k);
    for (int j = 0; j < k; ++j) {
        StateVector zv = matvec(oz, gs.states[j]);
        StateVector xv = matvec(ox, gs.states[j]);
        for (int i = 0; i < k; ++i) {
            mz(i, j) = detail::dot(gs.states[i], zv);
            mx(i, j) = detail::dot(gs.states[i], xv);
        }
    }
    mz = ((mz + mz.transpose()) / 2).eval();
    mx = ((mx + mx.transpose()) / 2).eval();

    if ((mz * mx - mx * mz).norm() > commute_tol)
        throw SectorAmbiguous("compressed loop operators do not commute within tolerance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ez(mz);

    // cluster the lz spectrum, then resolve lx inside each cluster
    double best_d2 = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_coeff;
    double best_z = 0, best_x = 0;
    int i = 0;
    while (i < k) {
        int j = i + 1;
        while (j < k && ez.eigenvalues()(j) - ez.eigenvalues()(i) < 0.25) ++j;
        const int w = j - i;
        Eigen::MatrixXd sub = ez.eigenvectors().middleCols(i, w);
        Eigen::MatrixXd mxs = sub.transpose() * mx * sub;
        mxs = ((mxs + mxs.transpose()) / 2).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(mxs);
        for (int c = 0; c < w; ++c) {
            Eigen::VectorXd coeff = sub * ex.eigenvectors().col(c);
            double vz = coeff.dot(mz * coeff);
            double vx = ex.eigenvalues()(c);
            double d2 = (vz - target.first) * (vz - target.first) +
                        (vx - target.second) * (vx - target.second);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_coeff = coeff;
                best_z = vz;
                best_x = vx;
            }
        }
        i = j;
    }

    StateVector out(gs.states[0].size(), 0.0);
    for (int c = 0; c < k; ++c) detail::axpy(best_coeff(c), gs.states[c], out);
    detail::scale(out, 1.0 / detail::norm(out));
    return {std::move(out), best_z, best_x};
}

}  // namespace splitlab
