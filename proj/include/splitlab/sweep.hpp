#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "splitlab/ed.hpp"
#include "splitlab/entanglement.hpp"
#include "splitlab/ising.hpp"
#include "splitlab/models.hpp"

namespace splitlab {

inline std::vector<double> default_alphas() {
    return {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 20.0};
}

struct SweepGrid {
    std::vector<std::vector<double>> path;  // one parameter vector per lambda point
    std::vector<double> alphas = default_alphas();
    Region region;

    void validate(bool need_stencil = false) const {
        if (path.empty()) throw std::invalid_argument("sweep path is empty");
        if (need_stencil && path.size() < 3)
            throw std::invalid_argument("derivative stencils need at least 3 lambda points");
        for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
            if (!(alphas[i] < alphas[i + 1]))
                throw std::invalid_argument("alpha grid must be strictly ascending");
        if (!alphas.empty() && alphas.front() < 0)
            throw std::invalid_argument("alpha values must be >= 0");
    }
};

struct SweepResult {
    std::vector<std::vector<double>> lambda_params;
    std::vector<double> arc;  // cumulative arc length along the path
    std::vector<double> alphas;
    std::vector<std::vector<double>> entropy;  // [lambda][alpha], nats
    std::vector<int> ranks;
    std::vector<double> energies;
    std::vector<double> lz1, lx2;  // NaN where no loops exist (chains)
    std::vector<double> xi;        // approximate, NaN when the fit is unusable
    std::vector<char> converged;
    std::uint64_t seed = 0;
};

// Least-squares exponential fit of horizontal-edge sigma^z connected
// correlators over separations 1..Lx/2. Approximate diagnostic only; the
// splitting verdicts never consume it.
inline double estimate_xi(const StateVector& v, const LatticeGeometry& geom) {
    const int rmax = geom.lx / 2;
    std::vector<double> rs, logs;
    for (int r = 1; r <= rmax; ++r) {
        double acc = 0.0;
        int cnt = 0;
        for (int y = 0; y < geom.ly; ++y) {
            for (int x = 0; x < geom.lx; ++x) {
                int e1 = geom.horizontal_edge(x, y);
                int e2 = geom.horizontal_edge(x + r, y);
                if (e1 < 0 || e2 < 0 || e1 == e2) continue;
                PauliString p{0, EdgeMask{1} << e1, 1.0}, q{0, EdgeMask{1} << e2, 1.0};
                acc += std::abs(connected_correlator(v, p, q));
                ++cnt;
            }
        }
        if (cnt == 0) continue;
        double c = acc / cnt;
        if (c < 1e-13) continue;
        rs.push_back(r);
        logs.push_back(std::log(c));
    }
    if (rs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sr = 0, sl = 0, srr = 0, srl = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        sr += rs[i];
        sl += logs[i];
        srr += rs[i] * rs[i];
        srl += rs[i] * logs[i];
    }
    const double n = static_cast<double>(rs.size());
    const double slope = (n * srl - sr * sl) / (n * srr - sr * sr);
    if (!(slope < 0)) return std::numeric_limits<double>::quiet_NaN();
    return -1.0 / slope;
}

inline PerturbationSpec spec_from_params(Family family, const std::vector<double>& p) {
    auto need = [&](std::size_t n) {
        if (p.size() != n) throw std::invalid_argument("wrong parameter count for family");
    };
    switch (family) {
        case Family::None:
            return PerturbationSpec::none();
        case Family::CCExp:
            need(1);
            return PerturbationSpec::cc_exp(p[0]);
        case Family::HorizontalZ:
            need(1);
            return PerturbationSpec::horizontal_z(p[0]);
        case Family::UniformZ:
            need(1);
            return PerturbationSpec::uniform_z(p[0]);
        case Family::UniformXZ:
            need(2);
            return PerturbationSpec::uniform_xz(p[0], p[1]);
    }
    throw std::invalid_argument("unknown family");
}

namespace detail {

inline std::vector<double> arc_length(const std::vector<std::vector<double>>& path) {
    std::vector<double> arc(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < path[i].size() && j < path[i - 1].size(); ++j) {
            double d = path[i][j] - path[i - 1][j];
            d2 += d * d;
        }
        arc[i] = arc[i - 1] + std::sqrt(d2);
    }
    return arc;
}

inline void push_point(SweepResult& r, const std::vector<double>& params, const StateVector& v,
                       const Region& region, int n_sites, double energy, double lz, double lx,
                       double xi) {
    EntanglementSpectrum spec = schmidt_spectrum(v, region.edges, n_sites);
    std::vector<double> row;
    row.reserve(r.alphas.size());
    for (double a : r.alphas) row.push_back(renyi(spec, a));
    r.lambda_params.push_back(params);
    r.entropy.push_back(std::move(row));
    r.ranks.push_back(schmidt_rank(spec));
    r.energies.push_back(energy);
    r.lz1.push_back(lz);
    r.lx2.push_back(lx);
    r.xi.push_back(xi);
    r.converged.push_back(1);
}

inline void push_failed(SweepResult& r, const std::vector<double>& params) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.lambda_params.push_back(params);
    r.entropy.emplace_back(r.alphas.size(), nan);
    r.ranks.push_back(-1);
    r.energies.push_back(nan);
    r.lz1.push_back(nan);
    r.lx2.push_back(nan);
    r.xi.push_back(nan);
    r.converged.push_back(0);
}

}  // namespace detail

// For each path point: build the model, solve the (quasi-)degenerate ground
// space, pick the (+1,+1) sector, and record the S_alpha row plus
// diagnostics. Convergence failures mark the row instead of aborting.
inline SweepResult run_sweep(const LatticeGeometry& geom, Family family, const SweepGrid& grid,
                             const SolverOptions& opts) {
    grid.validate();
    auto [lz, lx] = wilson_loops(geom);
    SweepResult r;
    r.alphas = grid.alphas;
    r.seed = opts.seed;
    r.arc = detail::arc_length(grid.path);
    for (const auto& params : grid.path) {
        OperatorSum h = build_model(geom, spec_from_params(family, params));
        try {
            GroundSpace gs = ground_space(h, opts);
            SectorSelection sel = select_sector(gs, lz, lx);
            double energy = expectation(sel.state, h);
            double xi = estimate_xi(sel.state, geom);
            detail::push_point(r, params, sel.state, grid.region, geom.n_edges, energy, sel.lz1,
                               sel.lx2, xi);
        } catch (const ConvergenceFailure&) {
            detail::push_failed(r, params);
        }
    }
    return r;
}

enum class ChainVariant { V1, V2 };

// Supplementary 1D control experiments on H = -sum sigma^z sigma^z + V over
// the half-chain cut. V1 is the transverse field; its degenerate doublet is
// resolved toward positive magnetization. V2 tilts the field and needs no
// selection.
inline SweepResult chain_sweep(ChainVariant variant, int n, const std::vector<double>& lambdas,
                               const std::vector<double>& alphas, const SolverOptions& base_opts,
                               ChainBoundary boundary = ChainBoundary::Open) {
    if (n > 20) throw CapExceeded("chain ED capped at 20 sites");
    SweepResult r;
    r.alphas = alphas;
    r.seed = base_opts.seed;
    std::vector<std::vector<double>> path;
    for (double l : lambdas) path.push_back({l});
    r.arc = detail::arc_length(path);

    const EdgeMask half = (EdgeMask{1} << (n / 2)) - 1;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    OperatorSum mag;
    mag.n_sites = n;
    for (int i = 0; i < n; ++i) mag.terms.push_back({0, EdgeMask{1} << i, 1.0});

    for (double lam : lambdas) {
        ChainSpec spec;
        spec.n = n;
        spec.coupling = 1.0;
        spec.transverse = lam;
        spec.longitudinal = (variant == ChainVariant::V2) ? 0.5 * lam : 0.0;
        spec.boundary = boundary;
        OperatorSum h = chain_hamiltonian(spec);

        SolverOptions opts = base_opts;
        opts.k = (variant == ChainVariant::V1) ? 2 : 1;
        try {
            GroundSpace gs = ground_space(h, opts);
            StateVector state;
            if (variant == ChainVariant::V1 && gs.states.size() > 1) {
                // resolve the ferromagnetic doublet toward +magnetization
                Eigen::Matrix2d m;
                StateVector m0 = matvec(mag, gs.states[0]);
                StateVector m1 = matvec(mag, gs.states[1]);
                m(0, 0) = detail::dot(gs.states[0], m0);
                m(0, 1) = detail::dot(gs.states[0], m1);
                m(1, 0) = m(0, 1);
                m(1, 1) = detail::dot(gs.states[1], m1);
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
                Eigen::Vector2d c = es.eigenvectors().col(1);  // largest magnetization
                state.assign(h.dim(), 0.0);
                detail::axpy(c(0), gs.states[0], state);
                detail::axpy(c(1), gs.states[1], state);
                detail::scale(state, 1.0 / detail::norm(state));
            } else {
                state = gs.states[0];
            }
            EntanglementSpectrum sp = schmidt_spectrum(state, half, n);
            std::vector<double> row;
            for (double a : alphas) row.push_back(renyi(sp, a));
            r.lambda_params.push_back({lam});
            r.entropy.push_back(std::move(row));
            r.ranks.push_back(schmidt_rank(sp));
            r.energies.push_back(expectation(state, h));
            r.lz1.push_back(nan);
            r.lx2.push_back(nan);
            r.xi.push_back(nan);
            r.converged.push_back(1);
        } catch (const ConvergenceFailure&) {
            detail::push_failed(r, {lam});
        }
    }
    return r;
}

struct DerivativeTable {
    std::vector<double> arc;
    std::vector<double> alphas;
    std::vector<std::vector<double>> nodes;  // central interior, one-sided ends
    std::vector<std::vector<double>> steps;  // forward difference per step
    bool uniform = true;
};

// d S_alpha / d lambda along the path's arc-length parameter, in nats per
// unit lambda. Non-uniform spacing falls back to divided differences and is
// flagged.
inline DerivativeTable derivatives(const SweepResult& r) {
    const std::size_t n = r.arc.size();
    if (n < 3) throw std::invalid_argument("derivatives need at least 3 lambda points");
    DerivativeTable t;
    t.arc = r.arc;
    t.alphas = r.alphas;

    double mean = (r.arc.back() - r.arc.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs((r.arc[i + 1] - r.arc[i]) - mean) > 1e-9 * std::max(1.0, std::abs(mean)))
            t.uniform = false;

    const std::size_t na = r.alphas.size();
    t.nodes.assign(n, std::vector<double>(na, 0.0));
    t.steps.assign(n - 1, std::vector<double>(na, 0.0));
    for (std::size_t j = 0; j < na; ++j) {
        for (std::size_t i = 0; i + 1 < n; ++i)
            t.steps[i][j] = (r.entropy[i + 1][j] - r.entropy[i][j]) / (r.arc[i + 1] - r.arc[i]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0) {
                t.nodes[i][j] = t.steps[0][j];
            } else if (i + 1 == n) {
                t.nodes[i][j] = t.steps[n - 2][j];
            } else {
                // three-point divided difference, the central stencil when uniform
                const double h0 = r.arc[i] - r.arc[i - 1], h1 = r.arc[i + 1] - r.arc[i];
                const double f0 = r.entropy[i - 1][j], f1 = r.entropy[i][j], f2 = r.entropy[i + 1][j];
                t.nodes[i][j] = (f2 * h0 * h0 - f0 * h1 * h1 + f1 * (h1 * h1 - h0 * h0)) /
                                (h0 * h1 * (h0 + h1));
            }
        }
    }
    return t;
}

struct AlphaCrossing {
    double lo = 0, hi = 0;      // bounding grid alphas
    double interpolated = 0;    // linear sign-change location
    bool positive_to_negative = true;
};

struct StepVerdict {
    bool split = false;
    std::vector<AlphaCrossing> crossings;
    bool non_monotone = false;
    bool dlc_forward = false;   // all derivatives <= eps
    bool dlc_backward = false;  // all derivatives >= -eps
    double max_deriv = 0, min_deriv = 0;
};

struct SplittingReport {
    bool split = false;
    std::optional<std::pair<double, double>> alpha0;  // hull over splitting steps
    bool non_monotone = false;
    bool dlc_forward_all = false;
    bool dlc_backward_all = false;
    double eps = 0;
    std::vector<StepVerdict> steps;
};

// A step splits when its derivative row carries both a significantly
// positive and a significantly negative entry across the alpha grid; the
// crossing location alpha_0 is reported as an interval of grid neighbors.
inline SplittingReport detect_splitting(const DerivativeTable& t, double eps = 1e-7) {
    SplittingReport rep;
    rep.eps = eps;
    rep.dlc_forward_all = true;
    rep.dlc_backward_all = true;
    double hull_lo = std::numeric_limits<double>::infinity();
    double hull_hi = -std::numeric_limits<double>::infinity();

    for (const auto& row : t.steps) {
        StepVerdict v;
        v.max_deriv = -std::numeric_limits<double>::infinity();
        v.min_deriv = std::numeric_limits<double>::infinity();
        bool pos = false, neg = false;
        for (double d : row) {
            v.max_deriv = std::max(v.max_deriv, d);
            v.min_deriv = std::min(v.min_deriv, d);
            pos = pos || d > eps;
            neg = neg || d < -eps;
        }
        v.split = pos && neg;
        v.dlc_forward = !pos;
        v.dlc_backward = !neg;

        // significant-sign sequence across alpha
        int prev_sign = 0;
        std::size_t prev_idx = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            int s = row[j] > eps ? 1 : (row[j] < -eps ? -1 : 0);
            if (s == 0) continue;
            if (prev_sign != 0 && s != prev_sign) {
                AlphaCrossing c;
                c.lo = t.alphas[prev_idx];
                c.hi = t.alphas[j];
                const double d0 = row[prev_idx], d1 = row[j];
                c.interpolated = c.lo + d0 * (c.hi - c.lo) / (d0 - d1);
                c.positive_to_negative = (prev_sign > 0);
                v.crossings.push_back(c);
            }
            prev_sign = s;
            prev_idx = j;
        }
        v.non_monotone = v.crossings.size() > 1;

        if (v.split) {
            for (const auto& c : v.crossings) {
                hull_lo = std::min(hull_lo, c.lo);
                hull_hi = std::max(hull_hi, c.hi);
            }
        }
        rep.split = rep.split || v.split;
        rep.non_monotone = rep.non_monotone || v.non_monotone;
        rep.dlc_forward_all = rep.dlc_forward_all && v.dlc_forward;
        rep.dlc_backward_all = rep.dlc_backward_all && v.dlc_backward;
        rep.steps.push_back(std::move(v));
    }
    if (rep.split && hull_lo <= hull_hi) rep.alpha0 = std::make_pair(hull_lo, hull_hi);
    return rep;
}

}  // namespace splitlab
