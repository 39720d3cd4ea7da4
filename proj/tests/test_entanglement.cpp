#include <doctest.h>

#include <random>

#include "splitlab/ed.hpp"
#include "splitlab/entanglement.hpp"
#include "splitlab/loopgas.hpp"
#include "splitlab/models.hpp"
#include "support/oracles.hpp"

using namespace splitlab;

namespace {

void check_same_spectrum(const EntanglementSpectrum& got, const std::vector<double>& expect,
                         double tol = 1e-10) {
    REQUIRE(got.probs.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(got.probs[i] - expect[i]) < tol);
}

StateVector selected_toric_state(const LatticeGeometry& g) {
    OperatorSum h = build_model(g, PerturbationSpec::none());
    auto [lz, lx] = wilson_loops(g);
    SolverOptions o;
    o.k = 4;
    o.tol = 1e-11;
    return select_sector(ground_space(h, o), lz, lx).state;
}

}  // namespace

TEST_CASE("product state has a singleton spectrum") {
    LatticeGeometry g = build_torus(2, 2);
    StateVector v(1u << g.n_edges, 0.0);
    v[0] = 1.0;  // all spins up
    for (const Region& a : {region_star(g), region_half(g)}) {
        EntanglementSpectrum s = schmidt_spectrum(v, a.edges, g.n_edges);
        check_same_spectrum(s, {1.0});
        CHECK(schmidt_rank(s) == 1);
        CHECK(renyi(s, 7.0) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("toric-code spectra match the stabilizer-formalism oracle") {
    // Pipeline sector (both Wilson labels +1) and loop-gas orbit sector
    // (both direct z-winding labels +1) on both desk tori, both regions.
    for (auto [lx, ly] : {std::pair{2, 2}, {3, 2}}) {
        CAPTURE(lx);
        CAPTURE(ly);
        LatticeGeometry g = build_torus(lx, ly);

        StateVector vsel = selected_toric_state(g);
        StateVector vorb = cc_state_vector(g, 0.0);
        auto sector_group = oracle::stabilizer_group(oracle::toric_sector_generators(g));
        auto orbit_group = oracle::stabilizer_group(oracle::toric_orbit_generators(g));
        REQUIRE(sector_group.size() == (std::size_t{1} << g.n_edges));
        REQUIRE(orbit_group.size() == (std::size_t{1} << g.n_edges));

        for (const Region& a : {region_star(g), region_star_plaquette(g)}) {
            CAPTURE(a.label);
            auto expect_sel = oracle::stabilizer_region_spectrum(sector_group, a.edges, g.n_edges);
            auto expect_orb = oracle::stabilizer_region_spectrum(orbit_group, a.edges, g.n_edges);
            check_same_spectrum(schmidt_spectrum(vsel, a.edges, g.n_edges), expect_sel);
            check_same_spectrum(schmidt_spectrum(vorb, a.edges, g.n_edges), expect_orb);
        }
    }
}

TEST_CASE("frozen fixed-point values from the stabilizer count") {
    // torus(2,2) orbit state: a single star generator plus the two winding
    // bigons live inside the region, leaving the Bell pair {1/2, 1/2}.
    LatticeGeometry g22 = build_torus(2, 2);
    StateVector orb22 = cc_state_vector(g22, 0.0);
    check_same_spectrum(schmidt_spectrum(orb22, region_star(g22).edges, g22.n_edges), {0.5, 0.5});
    check_same_spectrum(schmidt_spectrum(orb22, region_star_plaquette(g22).edges, g22.n_edges),
                        {0.25, 0.25, 0.25, 0.25});

    // the selected sector replaces one z-winding stabilizer by the dual loop,
    // which cannot sit inside the star: rank doubles to 4
    StateVector sel22 = selected_toric_state(g22);
    check_same_spectrum(schmidt_spectrum(sel22, region_star(g22).edges, g22.n_edges),
                        {0.25, 0.25, 0.25, 0.25});

    // torus(3,2), selected sector: both regions are flat of rank 4
    LatticeGeometry g32 = build_torus(3, 2);
    StateVector sel32 = selected_toric_state(g32);
    check_same_spectrum(schmidt_spectrum(sel32, region_star(g32).edges, g32.n_edges),
                        {0.25, 0.25, 0.25, 0.25});
    check_same_spectrum(schmidt_spectrum(sel32, region_star_plaquette(g32).edges, g32.n_edges),
                        {0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("renyi entropies") {
    EntanglementSpectrum flat{{0.5, 0.5}};
    for (double a : {0.0, 0.25, 1.0, 2.0, 20.0})
        CHECK(renyi(flat, a) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    EntanglementSpectrum one{{1.0}};
    CHECK(renyi(one, 7.0) == 0.0);
    CHECK(renyi(one, 0.0) == 0.0);

    // alpha -> 1 continuity
    EntanglementSpectrum p{{0.9, 0.1}};
    double s1 = renyi(p, 1.0);
    CHECK(std::abs(renyi(p, 1.0 + 1e-4) - s1) < 1e-3);
    CHECK(std::abs(renyi(p, 1.0 - 1e-4) - s1) < 1e-3);

    CHECK_THROWS_AS(renyi(p, -0.5), std::invalid_argument);
}

TEST_CASE("schmidt rank at tolerance") {
    CHECK(schmidt_rank(EntanglementSpectrum{{0.5, 0.5}}) == 2);
    CHECK(schmidt_rank(EntanglementSpectrum{{1.0}}) == 1);
    CHECK(schmidt_rank(EntanglementSpectrum{{0.7, 0.3, 1e-13}}) == 2);
    CHECK_THROWS_AS(schmidt_rank(EntanglementSpectrum{{1.0}}, 2.0), std::invalid_argument);

    // rank grows away from the fixed point
    LatticeGeometry g = build_torus(2, 2);
    StateVector v0 = selected_toric_state(g);
    int rank0 = schmidt_rank(schmidt_spectrum(v0, region_star(g).edges, g.n_edges));

    OperatorSum h = build_model(g, PerturbationSpec::uniform_xz(0.05, 0.025));
    auto [lz, lx] = wilson_loops(g);
    SolverOptions o;
    o.k = 4;
    o.tol = 1e-11;
    StateVector v = select_sector(ground_space(h, o), lz, lx).state;
    CHECK(schmidt_rank(schmidt_spectrum(v, region_star(g).edges, g.n_edges)) > rank0);
}

TEST_CASE("region validation") {
    LatticeGeometry g = build_torus(2, 2);
    StateVector v = oracle::random_state(1u << g.n_edges, 5);
    CHECK_THROWS_AS(schmidt_spectrum(v, EdgeMask{0}, g.n_edges), InvalidRegion);
    CHECK_THROWS_AS(schmidt_spectrum(v, g.all_edges(), g.n_edges), InvalidRegion);
    CHECK_THROWS_AS(schmidt_spectrum(v, EdgeMask{1}, g.n_edges + 1), std::invalid_argument);
}

TEST_CASE("pure-state invariants on random states") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 4 + static_cast<int>(rng() % 7);  // 4..10 spins
        StateVector v = oracle::random_state(std::size_t{1} << n, rng());
        EdgeMask all = (EdgeMask{1} << n) - 1;
        EdgeMask a = 0;
        while (a == 0 || a == all) a = rng() & all;

        EntanglementSpectrum sa = schmidt_spectrum(v, a, n);
        EntanglementSpectrum sb = schmidt_spectrum(v, all & ~a, n);

        CHECK(std::abs(sa.sum() - 1.0) < 1e-10);

        // purity symmetry, checked against the independent region-side Gram
        auto ora = oracle::region_side_spectrum(v, a, n);
        std::size_t m = std::min(ora.size(), sa.probs.size());
        for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(sa.probs[i] - ora[i]) < 1e-10);
        for (double alpha : {0.0, 0.5, 1.0, 2.0, 5.0})
            CHECK(std::abs(renyi(sa, alpha) - renyi(sb, alpha)) < 1e-10);

        // alpha-monotonicity and the rank identity
        double prev = renyi(sa, 0.0);
        for (double alpha : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 20.0}) {
            double cur = renyi(sa, alpha);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
        CHECK(renyi(sa, 0.0) == doctest::Approx(std::log(schmidt_rank(sa))).epsilon(1e-12));
    }
}

TEST_CASE("flat spectrum iff S0 equals S2") {
    EntanglementSpectrum flat{{0.25, 0.25, 0.25, 0.25}};
    CHECK(std::abs(renyi(flat, 0.0) - renyi(flat, 2.0)) < 1e-10);
    EntanglementSpectrum tilted{{0.5, 0.3, 0.2}};
    CHECK(renyi(tilted, 0.0) - renyi(tilted, 2.0) > 1e-3);
}
