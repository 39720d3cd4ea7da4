#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "splitlab/lattice.hpp"
#include "splitlab/types.hpp"

namespace splitlab {

// Descending squared Schmidt values of rho_A; dust below the truncation
// floor is dropped before any entropy is evaluated.
struct EntanglementSpectrum {
    std::vector<double> probs;

    double sum() const {
        double s = 0;
        for (double p : probs) s += p;
        return s;
    }
};

struct RenyiPoint {
    double alpha = 0.0;
    double value = 0.0;  // nats
};

constexpr double kSpectrumFloor = 1e-14;
constexpr double kRankTol = 1e-10;  // relative to the largest eigenvalue

// Squared singular values of the state reshaped to 2^|A| x 2^|B| under the
// bit permutation that sends the region's edges to the leading positions.
// The spectrum is side-symmetric for a pure state, so the Gram matrix is
// accumulated on the smaller factor.
inline EntanglementSpectrum schmidt_spectrum(const StateVector& v, EdgeMask region, int n_sites,
                                             double floor = kSpectrumFloor) {
    if (v.size() != (std::size_t{1} << n_sites))
        throw std::invalid_argument("schmidt_spectrum: dimension mismatch");
    EdgeMask all = n_sites >= 64 ? ~EdgeMask{0} : ((EdgeMask{1} << n_sites) - 1);
    region &= all;
    if (region == 0 || region == all)
        throw InvalidRegion("region must be a nonempty strict subset of the edges");

    std::vector<int> a_bits, b_bits;
    for (int i = 0; i < n_sites; ++i) ((region >> i & 1) ? a_bits : b_bits).push_back(i);
    if (b_bits.size() < a_bits.size()) std::swap(a_bits, b_bits);
    const int na = static_cast<int>(a_bits.size());
    const int nb = static_cast<int>(b_bits.size());
    if (na > 12) throw CapExceeded("schmidt_spectrum: smaller factor exceeds 12 spins");

    const std::size_t da = std::size_t{1} << na, db = std::size_t{1} << nb;
    std::vector<EdgeMask> scat_a(da, 0), scat_b(db, 0);
    for (std::size_t a = 0; a < da; ++a) {
        EdgeMask m = 0;
        for (int j = 0; j < na; ++j)
            if (a >> j & 1) m |= EdgeMask{1} << a_bits[j];
        scat_a[a] = m;
    }
    for (std::size_t b = 0; b < db; ++b) {
        EdgeMask m = 0;
        for (int j = 0; j < nb; ++j)
            if (b >> j & 1) m |= EdgeMask{1} << b_bits[j];
        scat_b[b] = m;
    }

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(da, da);
    Eigen::VectorXd col(da);
    for (std::size_t b = 0; b < db; ++b) {
        const EdgeMask base = scat_b[b];
        for (std::size_t a = 0; a < da; ++a) col(a) = v[base | scat_a[a]];
        gram.selfadjointView<Eigen::Lower>().rankUpdate(col);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.selfadjointView<Eigen::Lower>());
    EntanglementSpectrum spec;
    spec.probs.reserve(da);
    for (int i = static_cast<int>(da) - 1; i >= 0; --i) {
        double p = es.eigenvalues()(i);
        if (p > floor) spec.probs.push_back(p);
    }
    std::sort(spec.probs.begin(), spec.probs.end(), std::greater<>());
    return spec;
}

inline EntanglementSpectrum schmidt_spectrum(const StateVector& v, const Region& a, int n_sites) {
    return schmidt_spectrum(v, a.edges, n_sites);
}

// Count of eigenvalues above tau relative to the largest.
inline int schmidt_rank(const EntanglementSpectrum& spec, double tau = kRankTol) {
    if (tau <= 0 || tau >= 1) throw std::invalid_argument("rank tolerance must lie in (0,1)");
    if (spec.probs.empty()) return 0;
    const double cut = tau * spec.probs.front();
    int r = 0;
    for (double p : spec.probs)
        if (p > cut) ++r;
    return r;
}

// S_alpha in nats. alpha = 0 counts the rank at the relative tolerance,
// alpha = 1 is the von Neumann limit with 0 ln 0 = 0.
inline double renyi(const EntanglementSpectrum& spec, double alpha, double rank_tol = kRankTol) {
    if (alpha < 0) throw std::invalid_argument("renyi: alpha must be >= 0");
    if (spec.probs.empty()) return 0.0;
    if (alpha == 0.0) return std::log(static_cast<double>(schmidt_rank(spec, rank_tol)));
    if (std::abs(alpha - 1.0) < 1e-9) {
        double s = 0.0;
        for (double p : spec.probs)
            if (p > 0) s -= p * std::log(p);
        return std::max(0.0, s);
    }
    double z = 0.0;
    for (double p : spec.probs) z += std::pow(p, alpha);
    return std::max(0.0, std::log(z) / (1.0 - alpha));
}

inline RenyiPoint renyi_point(const EntanglementSpectrum& spec, double alpha) {
    return {alpha, renyi(spec, alpha)};
}

}  // namespace splitlab
