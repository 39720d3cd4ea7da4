#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "splitlab/types.hpp"

namespace splitlab {

enum class Boundary { Torus, CylinderFinite };

// Non-contractible loop operator support. kind 'z': product of sigma^z over
// a cycle of the direct lattice; kind 'x': product of sigma^x over the edges
// crossed by a cycle of the dual lattice.
struct LoopSpec {
    char kind = 'z';
    std::vector<int> edges;
    EdgeMask mask = 0;
};

// Subsystem A of the bipartition A|B, as a set of edge ids.
struct Region {
    std::string label;
    EdgeMask edges = 0;
    int size() const { return popcount(edges); }
};

// Square lattice with one spin per edge. Edge ids are assigned cell by cell
// in row-major order, horizontal edge of the cell before its vertical edge,
// so bit positions are stable under the reshapes done by the entanglement
// code. Cell (x,y) owns h(x,y): (x,y)-(x+1,y) and v(x,y): (x,y)-(x,y+1).
struct LatticeGeometry {
    int lx = 0;
    int ly = 0;
    Boundary boundary = Boundary::Torus;
    int n_edges = 0;

    std::vector<EdgeMask> stars;       // sigma^x support per vertex
    std::vector<EdgeMask> plaquettes;  // sigma^z support per face

    std::vector<int> h_ids;  // per cell, -1 if absent (open x boundary)
    std::vector<int> v_ids;

    int n_stars() const { return static_cast<int>(stars.size()); }
    int n_plaquettes() const { return static_cast<int>(plaquettes.size()); }

    int cell(int x, int y) const { return y * lx + x; }
    int horizontal_edge(int x, int y) const { return h_ids[cell((x % lx + lx) % lx, (y % ly + ly) % ly)]; }
    int vertical_edge(int x, int y) const { return v_ids[cell((x % lx + lx) % lx, (y % ly + ly) % ly)]; }

    EdgeMask all_edges() const {
        return n_edges >= 64 ? ~EdgeMask{0} : ((EdgeMask{1} << n_edges) - 1);
    }
};

namespace detail {

inline LatticeGeometry build_lattice(int lx, int ly, Boundary bc) {
    if (lx < 2 || ly < 2) throw InvalidGeometry("lattice dimensions must be >= 2");
    if (2 * lx * ly > 60) throw CapExceeded("edge count exceeds the 60-bit mask budget");

    LatticeGeometry g;
    g.lx = lx;
    g.ly = ly;
    g.boundary = bc;
    g.h_ids.assign(static_cast<size_t>(lx) * ly, -1);
    g.v_ids.assign(static_cast<size_t>(lx) * ly, -1);

    const bool wrap_x = (bc == Boundary::Torus);
    int id = 0;
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            if (wrap_x || x < lx - 1) g.h_ids[g.cell(x, y)] = id++;
            g.v_ids[g.cell(x, y)] = id++;
        }
    }
    g.n_edges = id;

    auto bit = [](int e) { return EdgeMask{1} << e; };

    // Star at vertex (x,y): the incident edges. On the open x boundary the
    // missing horizontal edge leaves a 3-edge support.
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            EdgeMask m = 0;
            if (int e = g.h_ids[g.cell(x, y)]; e >= 0) m |= bit(e);
            int xm = wrap_x ? (x + lx - 1) % lx : x - 1;
            if (xm >= 0) {
                if (int e = g.h_ids[g.cell(xm, y)]; e >= 0) m |= bit(e);
            }
            m |= bit(g.v_ids[g.cell(x, y)]);
            m |= bit(g.v_ids[g.cell(x, (y + ly - 1) % ly)]);
            g.stars.push_back(m);
        }
    }

    // Plaquette at face (x,y): its boundary edges.
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            if (!wrap_x && x == lx - 1) continue;
            EdgeMask m = 0;
            m |= bit(g.h_ids[g.cell(x, y)]);
            m |= bit(g.h_ids[g.cell(x, (y + 1) % ly)]);
            m |= bit(g.v_ids[g.cell(x, y)]);
            m |= bit(g.v_ids[g.cell((x + 1) % lx, y)]);
            g.plaquettes.push_back(m);
        }
    }
    return g;
}

}  // namespace detail

inline LatticeGeometry build_torus(int lx, int ly) {
    return detail::build_lattice(lx, ly, Boundary::Torus);
}

inline LatticeGeometry build_cylinder(int lx, int ly) {
    return detail::build_lattice(lx, ly, Boundary::CylinderFinite);
}

inline EdgeMask star_support(const LatticeGeometry& g, int s) {
    if (s < 0 || s >= g.n_stars()) throw std::out_of_range("star index");
    return g.stars[s];
}

inline EdgeMask plaquette_support(const LatticeGeometry& g, int p) {
    if (p < 0 || p >= g.n_plaquettes()) throw std::out_of_range("plaquette index");
    return g.plaquettes[p];
}

// Subsystem built from one star support.
inline Region region_star(const LatticeGeometry& g, int s = 0) {
    return Region{"A_s(" + std::to_string(s) + ")", star_support(g, s)};
}

// Star plus an adjacent plaquette. A vertex star and a face cornered on that
// vertex always share exactly two edges (even overlap is what makes the
// stabilizers commute), so the union has six edges on a torus.
inline Region region_star_plaquette(const LatticeGeometry& g, int s, int p) {
    EdgeMask sm = star_support(g, s);
    EdgeMask pm = plaquette_support(g, p);
    if ((sm & pm) == 0) throw InvalidRegion("star and plaquette are not adjacent");
    return Region{"A_sp(" + std::to_string(s) + "," + std::to_string(p) + ")", sm | pm};
}

inline Region region_star_plaquette(const LatticeGeometry& g) {
    return region_star_plaquette(g, 0, 0);
}

// All edges of the first floor(Lx/2) columns of cells: the straight-cut
// analog of the half-infinite cylinder, never splitting an edge.
inline Region region_half(const LatticeGeometry& g) {
    EdgeMask m = 0;
    for (int y = 0; y < g.ly; ++y) {
        for (int x = 0; x < g.lx / 2; ++x) {
            if (int e = g.h_ids[g.cell(x, y)]; e >= 0) m |= EdgeMask{1} << e;
            m |= EdgeMask{1} << g.v_ids[g.cell(x, y)];
        }
    }
    if (m == 0 || m == g.all_edges()) throw InvalidRegion("half region is trivial");
    return Region{"C_half", m};
}

inline Region region_complement(const LatticeGeometry& g, const Region& a) {
    return Region{a.label + "^c", g.all_edges() & ~a.edges};
}

// The commuting pair used to label topological sectors: l^z_1 runs over the
// vertical edges of column 0 (a direct cycle winding in y), l^x_2 over the
// horizontal edges of column 0 (a dual cycle winding parallel to it). Both
// commute with every star and plaquette; conjugate-direction pairings would
// instead intersect an odd number of times and anticommute.
inline std::pair<LoopSpec, LoopSpec> wilson_loops(const LatticeGeometry& g) {
    LoopSpec lz, lx;
    lz.kind = 'z';
    lx.kind = 'x';
    for (int y = 0; y < g.ly; ++y) {
        int ve = g.v_ids[g.cell(0, y)];
        lz.edges.push_back(ve);
        lz.mask |= EdgeMask{1} << ve;
        int he = g.h_ids[g.cell(0, y)];
        if (he < 0) throw InvalidGeometry("no horizontal edges in column 0");
        lx.edges.push_back(he);
        lx.mask |= EdgeMask{1} << he;
    }
    return {lz, lx};
}

// Conjugate-direction dual loop (crosses l^z_1 once); used by the
// anticommutation checks, not by sector selection.
inline LoopSpec dual_loop_x_row(const LatticeGeometry& g, int row = 0) {
    LoopSpec l;
    l.kind = 'x';
    for (int x = 0; x < g.lx; ++x) {
        int ve = g.v_ids[g.cell(x, row)];
        l.edges.push_back(ve);
        l.mask |= EdgeMask{1} << ve;
    }
    return l;
}

// Direct z-cycle winding in x at row y0 (the partner label flipped by l^x_2).
inline LoopSpec direct_loop_z_row(const LatticeGeometry& g, int row = 0) {
    if (g.boundary != Boundary::Torus) throw InvalidGeometry("x-winding z-cycle needs a torus");
    LoopSpec l;
    l.kind = 'z';
    for (int x = 0; x < g.lx; ++x) {
        int he = g.h_ids[g.cell(x, row)];
        l.edges.push_back(he);
        l.mask |= EdgeMask{1} << he;
    }
    return l;
}

}  // namespace splitlab
