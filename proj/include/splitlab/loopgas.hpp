#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "splitlab/entanglement.hpp"
#include "splitlab/lattice.hpp"
#include "splitlab/types.hpp"

namespace splitlab {

// Group G generated by the star supports under XOR. Each element is the
// flipped-edge set of a loop configuration |g>; on a torus the single global
// relation prod_s A_s = 1 gives |G| = 2^(N_s - 1).
struct GaugeGroup {
    std::vector<EdgeMask> elements;  // sorted, elements[0] == 0
    int n_edges = 0;

    std::size_t size() const { return elements.size(); }
};

struct RegionSubgroups {
    std::vector<EdgeMask> ga;  // supported inside A
    std::vector<EdgeMask> gb;  // supported inside B
};

// Deformed toric code whose exact ground state is the loop gas with
// amplitudes exp(-lambda L_g). Topological for lambda below ~0.44.
struct CCModel {
    LatticeGeometry geom;
    double lam = 0.0;
    static constexpr double lambda_c = 0.44;
};

inline int loop_length(EdgeMask g) { return popcount(g); }

inline GaugeGroup enumerate_group(const LatticeGeometry& geom) {
    if (geom.boundary != Boundary::Torus) throw InvalidGeometry("gauge group enumeration needs a torus");
    if (geom.n_stars() - 1 > 21) throw CapExceeded("gauge group exceeds the 2^21 enumeration cap");
    std::unordered_set<EdgeMask> seen{0};
    std::vector<EdgeMask> els{0};
    for (EdgeMask gen : geom.stars) {
        const std::size_t n = els.size();
        for (std::size_t i = 0; i < n; ++i) {
            EdgeMask e = els[i] ^ gen;
            if (seen.insert(e).second) els.push_back(e);
        }
    }
    std::sort(els.begin(), els.end());
    return GaugeGroup{std::move(els), geom.n_edges};
}

// Z = sum_g exp(-lam * w * L_g). The probability weights of the loop-gas
// ground state of the Hamiltonian parameter lambda correspond to w = 2
// (amplitudes carry exp(-lambda L_g), probabilities its square).
inline double partition_z(const GaugeGroup& g, double lam, double w = 1.0) {
    double z = 0.0;
    for (EdgeMask e : g.elements) z += std::exp(-lam * w * loop_length(e));
    return z;
}

inline RegionSubgroups region_subgroups(const GaugeGroup& g, const Region& a) {
    RegionSubgroups r;
    const EdgeMask amask = a.edges;
    const EdgeMask bmask = (g.n_edges >= 64 ? ~EdgeMask{0} : ((EdgeMask{1} << g.n_edges) - 1)) & ~amask;
    for (EdgeMask e : g.elements) {
        if ((e & ~amask) == 0) r.ga.push_back(e);
        if ((e & ~bmask) == 0) r.gb.push_back(e);
    }
    return r;
}

namespace detail {

// Coset representatives of G_A * G_B in G, visiting elements in sorted order.
inline std::vector<EdgeMask> coset_reps(const GaugeGroup& g, const RegionSubgroups& sub) {
    std::vector<EdgeMask> gab;
    gab.reserve(sub.ga.size() * sub.gb.size());
    for (EdgeMask a : sub.ga)
        for (EdgeMask b : sub.gb) gab.push_back(a ^ b);
    std::unordered_set<EdgeMask> visited;
    std::vector<EdgeMask> reps;
    for (EdgeMask e : g.elements) {
        if (visited.count(e)) continue;
        reps.push_back(e);
        for (EdgeMask ab : gab) visited.insert(e ^ ab);
    }
    return reps;
}

}  // namespace detail

// Exact entanglement spectrum of the loop-gas ground state for region A.
// rho_A is block diagonal over the cosets of G_A * G_B; the length of a
// product L_{g a b} splits over the two factors, so each block is rank one
// with probability  p_q = sum_{a,b} exp(-2 lam L_{q a b}) / Z(2 lam).
inline EntanglementSpectrum cc_spectrum(const GaugeGroup& g, const Region& a, double lam) {
    RegionSubgroups sub = region_subgroups(g, a);
    std::vector<EdgeMask> reps = detail::coset_reps(g, sub);
    EntanglementSpectrum spec;
    spec.probs.reserve(reps.size());
    double z = 0.0;
    for (EdgeMask q : reps) {
        double w = 0.0;
        for (EdgeMask ga : sub.ga)
            for (EdgeMask gb : sub.gb) w += std::exp(-2.0 * lam * loop_length(q ^ ga ^ gb));
        spec.probs.push_back(w);
        z += w;
    }
    for (double& p : spec.probs) p /= z;
    std::sort(spec.probs.begin(), spec.probs.end(), std::greater<>());
    return spec;
}

// Closed-form S_alpha of the deformed model; alpha = 0 reduces to
// ln(|G| / (|G_A| |G_B|)) independently of lambda, alpha = 1 is evaluated
// directly on the coset spectrum.
inline double renyi_exact(const CCModel& model, const Region& a, double alpha) {
    GaugeGroup g = enumerate_group(model.geom);
    return renyi(cc_spectrum(g, a, model.lam), alpha);
}

// Loop-gas ground state vector: amplitudes exp(-lam L) over one G-orbit of
// z-basis configurations. `winding` shifts the orbit by non-contractible
// dual cycles, selecting among the four exactly degenerate sectors labeled
// by the two direct z-loops; the default (0,0) orbit has both labels +1.
inline StateVector cc_state_vector(const LatticeGeometry& geom, double lam,
                                   std::pair<int, int> winding = {0, 0}) {
    GaugeGroup g = enumerate_group(geom);
    EdgeMask offset = 0;
    if (winding.first) offset ^= dual_loop_x_row(geom, 0).mask;    // flips the l^z_1 label
    if (winding.second) {                                          // flips the l^z_2 label
        EdgeMask m = 0;
        for (int y = 0; y < geom.ly; ++y) m |= EdgeMask{1} << geom.h_ids[geom.cell(0, y)];
        offset ^= m;
    }
    StateVector v(std::size_t{1} << geom.n_edges, 0.0);
    double n2 = 0.0;
    for (EdgeMask e : g.elements) {
        double amp = std::exp(-lam * loop_length(e ^ offset));
        v[e ^ offset] = amp;
        n2 += amp * amp;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (EdgeMask e : g.elements) v[e ^ offset] *= inv;
    return v;
}

}  // namespace splitlab
