#pragma once

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "splitlab/loopgas.hpp"
#include "splitlab/sweep.hpp"

namespace splitlab {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

enum class ExperimentKind { Sweep, LoopGas, Chain, CrossCheck };

enum ExitCode {
    kExitOk = 0,
    kExitGateBreach = 1,
    kExitSchema = 2,
    kExitSolver = 3,
    kExitCap = 4,
    kExitNoExactPath = 5,
};

// Everything an experiment needs, schema-validated, every field defaulted
// and echoed into the outputs. All randomness flows through `seed`.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Sweep;
    int lx = 2, ly = 2;
    std::string boundary = "torus";
    std::string family = "none";
    std::vector<std::vector<double>> path;
    std::vector<double> alphas = default_alphas();
    std::string region_kind = "star";
    int region_star = 0;
    int region_plaquette = 0;
    std::vector<int> region_edges;
    int k = 4;
    double tol = 1e-10;
    int max_iter = 400;
    std::uint64_t seed = 1;
    int chain_n = 12;
    std::string chain_boundary = "open";
    int max_qubits = 24;
    std::string units = "nats";
    std::string csv_path;
    std::string json_path;

    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail_io {

inline std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

}  // namespace detail_io

inline ExperimentConfig parse_config(ExperimentKind kind, const json& j) {
    using namespace detail_io;
    if (!j.is_object()) throw SchemaError("$", "config must be an object");
    static const std::vector<std::string> known = {
        "geometry", "family", "path", "alphas", "region", "solver", "chain",
        "caps",     "units",  "output"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw SchemaError(it.key(), "unknown field");
    }

    ExperimentConfig c;
    c.kind = kind;

    if (const json* g = find(j, "geometry")) {
        if (!g->is_object()) throw SchemaError("geometry", "expected an object");
        if (const json* v = find(*g, "lx")) c.lx = as_int(*v, "geometry.lx");
        if (const json* v = find(*g, "ly")) c.ly = as_int(*v, "geometry.ly");
        if (const json* v = find(*g, "boundary")) c.boundary = as_string(*v, "geometry.boundary");
        if (c.boundary != "torus" && c.boundary != "cylinder-finite")
            throw SchemaError("geometry.boundary", "must be 'torus' or 'cylinder-finite'");
        if (c.lx < 2 || c.ly < 2) throw SchemaError("geometry", "lx and ly must be >= 2");
    }

    if (const json* v = find(j, "family")) c.family = as_string(*v, "family");
    static const std::vector<std::string> families = {"none",       "cc-exp",  "horizontal-z",
                                                      "uniform-z",  "uniform-xz", "tfim-v1",
                                                      "tfim-v2"};
    if (std::find(families.begin(), families.end(), c.family) == families.end())
        throw SchemaError("family", "unknown family '" + c.family + "'");

    if (const json* p = find(j, "path")) {
        if (!p->is_array()) throw SchemaError("path", "expected an array of parameter vectors");
        int i = 0;
        for (const auto& pt : *p) {
            std::string at = "path[" + std::to_string(i++) + "]";
            std::vector<double> params;
            if (pt.is_number()) {
                params.push_back(pt.get<double>());
            } else if (pt.is_array()) {
                int jx = 0;
                for (const auto& x : pt)
                    params.push_back(as_number(x, at + "[" + std::to_string(jx++) + "]"));
            } else {
                throw SchemaError(at, "expected a number or an array of numbers");
            }
            for (double x : params)
                if (!std::isfinite(x)) throw SchemaError(at, "parameters must be finite");
            c.path.push_back(std::move(params));
        }
    }

    if (const json* a = find(j, "alphas")) {
        if (!a->is_array() || a->empty()) throw SchemaError("alphas", "expected a nonempty array");
        c.alphas.clear();
        int i = 0;
        for (const auto& x : *a) {
            double v = as_number(x, "alphas[" + std::to_string(i) + "]");
            if (!(v >= 0) || !std::isfinite(v))
                throw SchemaError("alphas[" + std::to_string(i) + "]", "alpha must be finite and >= 0");
            if (!c.alphas.empty() && v <= c.alphas.back())
                throw SchemaError("alphas[" + std::to_string(i) + "]", "alphas must be strictly ascending");
            c.alphas.push_back(v);
            ++i;
        }
    }

    if (const json* r = find(j, "region")) {
        if (!r->is_object()) throw SchemaError("region", "expected an object");
        if (const json* v = find(*r, "kind")) c.region_kind = as_string(*v, "region.kind");
        if (c.region_kind != "star" && c.region_kind != "star-plaquette" &&
            c.region_kind != "half" && c.region_kind != "custom")
            throw SchemaError("region.kind", "must be star|star-plaquette|half|custom");
        if (const json* v = find(*r, "star")) c.region_star = as_int(*v, "region.star");
        if (const json* v = find(*r, "plaquette")) c.region_plaquette = as_int(*v, "region.plaquette");
        if (const json* v = find(*r, "edges")) {
            if (!v->is_array()) throw SchemaError("region.edges", "expected an array");
            int i = 0;
            for (const auto& x : *v) c.region_edges.push_back(as_int(x, "region.edges[" + std::to_string(i++) + "]"));
        }
        if (c.region_kind == "custom" && c.region_edges.empty())
            throw SchemaError("region.edges", "custom region needs an edge list");
    }

    if (const json* s = find(j, "solver")) {
        if (!s->is_object()) throw SchemaError("solver", "expected an object");
        if (const json* v = find(*s, "k")) c.k = as_int(*v, "solver.k");
        if (const json* v = find(*s, "tol")) c.tol = as_number(*v, "solver.tol");
        if (const json* v = find(*s, "max_iter")) c.max_iter = as_int(*v, "solver.max_iter");
        if (const json* v = find(*s, "seed")) {
            if (!v->is_number_integer()) throw SchemaError("solver.seed", "expected an integer");
            c.seed = v->get<std::uint64_t>();
        }
        if (c.k < 1 || c.k > 16) throw SchemaError("solver.k", "k must lie in 1..16");
        if (!(c.tol > 0) || !(c.tol < 1)) throw SchemaError("solver.tol", "tol must lie in (0,1)");
        if (c.max_iter < 1) throw SchemaError("solver.max_iter", "must be positive");
    }

    if (const json* ch = find(j, "chain")) {
        if (!ch->is_object()) throw SchemaError("chain", "expected an object");
        if (const json* v = find(*ch, "n")) c.chain_n = as_int(*v, "chain.n");
        if (const json* v = find(*ch, "boundary")) c.chain_boundary = as_string(*v, "chain.boundary");
        if (c.chain_n < 2 || c.chain_n > 20) throw SchemaError("chain.n", "n must lie in 2..20");
        if (c.chain_boundary != "open" && c.chain_boundary != "periodic")
            throw SchemaError("chain.boundary", "must be 'open' or 'periodic'");
    }

    if (const json* cp = find(j, "caps")) {
        if (!cp->is_object()) throw SchemaError("caps", "expected an object");
        if (const json* v = find(*cp, "max_qubits")) c.max_qubits = as_int(*v, "caps.max_qubits");
        if (c.max_qubits < 2 || c.max_qubits > 24)
            throw SchemaError("caps.max_qubits", "must lie in 2..24");
    }

    if (const json* u = find(j, "units")) {
        c.units = as_string(*u, "units");
        if (c.units != "nats" && c.units != "bits") throw SchemaError("units", "must be 'nats' or 'bits'");
    }

    if (const json* o = find(j, "output")) {
        if (!o->is_object()) throw SchemaError("output", "expected an object");
        if (const json* v = find(*o, "csv")) c.csv_path = as_string(*v, "output.csv");
        if (const json* v = find(*o, "json")) c.json_path = as_string(*v, "output.json");
    }

    if (c.path.empty()) throw SchemaError("path", "at least one lambda point is required");
    return c;
}

inline ojson echo_config(const ExperimentConfig& c) {
    ojson e;
    e["geometry"] = {{"lx", c.lx}, {"ly", c.ly}, {"boundary", c.boundary}};
    e["family"] = c.family;
    e["path"] = c.path;
    e["alphas"] = c.alphas;
    ojson region = {{"kind", c.region_kind}, {"star", c.region_star}, {"plaquette", c.region_plaquette}};
    if (!c.region_edges.empty()) region["edges"] = c.region_edges;
    e["region"] = region;
    e["solver"] = {{"k", c.k}, {"tol", c.tol}, {"max_iter", c.max_iter}, {"seed", c.seed}};
    e["chain"] = {{"n", c.chain_n}, {"boundary", c.chain_boundary}};
    e["caps"] = {{"max_qubits", c.max_qubits}};
    e["units"] = c.units;
    e["output"] = {{"csv", c.csv_path}, {"json", c.json_path}};
    return e;
}

namespace detail_io {

inline LatticeGeometry geometry_from(const ExperimentConfig& c) {
    return c.boundary == "torus" ? build_torus(c.lx, c.ly) : build_cylinder(c.lx, c.ly);
}

inline Region region_from(const ExperimentConfig& c, const LatticeGeometry& g) {
    if (c.region_kind == "star") return region_star(g, c.region_star);
    if (c.region_kind == "star-plaquette")
        return region_star_plaquette(g, c.region_star, c.region_plaquette);
    if (c.region_kind == "half") return region_half(g);
    Region r;
    r.label = "custom";
    for (int e : c.region_edges) {
        if (e < 0 || e >= g.n_edges) throw SchemaError("region.edges", "edge id out of range");
        r.edges |= EdgeMask{1} << e;
    }
    if (r.edges == 0 || r.edges == g.all_edges())
        throw SchemaError("region.edges", "region must be a nonempty strict subset of the edges");
    return r;
}

inline Family family_2d(const std::string& name) {
    if (name == "none") return Family::None;
    if (name == "cc-exp") return Family::CCExp;
    if (name == "horizontal-z") return Family::HorizontalZ;
    if (name == "uniform-z") return Family::UniformZ;
    if (name == "uniform-xz") return Family::UniformXZ;
    throw SchemaError("family", "'" + name + "' is not a 2D lattice family");
}

inline double to_units(double nats, const std::string& units) {
    return units == "bits" ? nats / std::log(2.0) : nats;
}

inline std::string join_params(const std::vector<double>& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ';';
        s += fmt17(p[i]);
    }
    return s;
}

}  // namespace detail_io

// Surface CSV, one row per (lambda, alpha); floating-point values carry 17
// significant digits so identical config+seed reproduces identical bytes.
inline std::string surface_csv(const SweepResult& r, const std::string& units) {
    using namespace detail_io;
    std::string out = "lambda_index,lambda_params,alpha,S,rank,energy,lz1,lx2\n";
    for (std::size_t i = 0; i < r.lambda_params.size(); ++i) {
        for (std::size_t j = 0; j < r.alphas.size(); ++j) {
            out += std::to_string(i) + ',' + join_params(r.lambda_params[i]) + ',' +
                   fmt17(r.alphas[j]) + ',' + fmt17(to_units(r.entropy[i][j], units)) + ',' +
                   std::to_string(r.ranks[i]) + ',' + fmt17(r.energies[i]) + ',' +
                   fmt17(r.lz1[i]) + ',' + fmt17(r.lx2[i]) + '\n';
        }
    }
    return out;
}

inline ojson splitting_json(const SplittingReport& rep) {
    ojson s;
    s["split"] = rep.split;
    if (rep.alpha0)
        s["alpha0_interval"] = {rep.alpha0->first, rep.alpha0->second};
    else
        s["alpha0_interval"] = nullptr;
    s["non_monotone"] = rep.non_monotone;
    s["dlc"] = rep.dlc_forward_all ? "convertible" : "not-convertible";
    s["dlc_backward"] = rep.dlc_backward_all ? "convertible" : "not-convertible";
    s["eps"] = rep.eps;
    ojson steps = ojson::array();
    for (const auto& v : rep.steps) {
        ojson sv;
        sv["split"] = v.split;
        sv["dlc_forward"] = v.dlc_forward ? "convertible" : "not-convertible";
        sv["dlc_backward"] = v.dlc_backward ? "convertible" : "not-convertible";
        sv["max_deriv"] = v.max_deriv;
        sv["min_deriv"] = v.min_deriv;
        sv["non_monotone"] = v.non_monotone;
        ojson cr = ojson::array();
        for (const auto& cx : v.crossings)
            cr.push_back({{"lo", cx.lo}, {"hi", cx.hi}, {"at", cx.interpolated},
                          {"positive_to_negative", cx.positive_to_negative}});
        sv["crossings"] = cr;
        steps.push_back(sv);
    }
    s["steps"] = steps;
    return s;
}

inline ojson sweep_report(const ExperimentConfig& c, const SweepResult& r) {
    using namespace detail_io;
    ojson rep;
    rep["seed"] = c.seed;
    rep["units"] = c.units;
    rep["config_echo"] = echo_config(c);
    rep["arc"] = r.arc;
    rep["alphas"] = r.alphas;
    ojson surface = ojson::array();
    for (const auto& row : r.entropy) {
        ojson jr = ojson::array();
        for (double v : row) jr.push_back(to_units(v, c.units));
        surface.push_back(jr);
    }
    rep["surface"] = surface;
    rep["ranks"] = r.ranks;
    rep["energies"] = r.energies;
    rep["lz1"] = r.lz1;
    rep["lx2"] = r.lx2;
    rep["xi_approximate"] = r.xi;
    std::vector<bool> conv(r.converged.begin(), r.converged.end());
    rep["converged"] = conv;

    if (r.arc.size() >= 3) {
        DerivativeTable t = derivatives(r);
        ojson dt;
        dt["uniform_spacing"] = t.uniform;
        ojson nodes = ojson::array(), steps = ojson::array();
        for (const auto& row : t.nodes) {
            ojson jr = ojson::array();
            for (double v : row) jr.push_back(to_units(v, c.units));
            nodes.push_back(jr);
        }
        for (const auto& row : t.steps) {
            ojson jr = ojson::array();
            for (double v : row) jr.push_back(to_units(v, c.units));
            steps.push_back(jr);
        }
        dt["nodes"] = nodes;
        dt["steps"] = steps;
        rep["derivative_table"] = dt;
        ojson s = splitting_json(detect_splitting(t));
        rep["split"] = s["split"];
        rep["alpha0_interval"] = s["alpha0_interval"];
        rep["dlc"] = s["dlc"];
        rep["splitting"] = s;
    }
    return rep;
}

namespace detail_io {

inline void write_file(const std::string& path, const std::string& content) {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
}

inline void emit(const ExperimentConfig& c, const SweepResult& r, ojson& report) {
    write_file(c.csv_path, surface_csv(r, c.units));
    write_file(c.json_path, report.dump(2) + "\n");
}

}  // namespace detail_io

// `sweep`: ED pipeline over a 2D lattice family.
inline ojson run_sweep_experiment(const ExperimentConfig& c) {
    LatticeGeometry g = detail_io::geometry_from(c);
    if (g.n_edges > c.max_qubits) throw CapExceeded("geometry exceeds caps.max_qubits");
    SweepGrid grid;
    grid.path = c.path;
    grid.alphas = c.alphas;
    grid.region = detail_io::region_from(c, g);
    SolverOptions opts;
    opts.k = c.k;
    opts.tol = c.tol;
    opts.max_iter = c.max_iter;
    opts.seed = c.seed;
    opts.max_qubits = c.max_qubits;
    SweepResult r = run_sweep(g, detail_io::family_2d(c.family), grid, opts);
    ojson rep = sweep_report(c, r);
    rep["experiment"] = "sweep";
    detail_io::emit(c, r, rep);
    return rep;
}

// `loopgas`: the exact loop-gas surfaces for the cc-exp family; no state
// vector is built, so it scales with the group, not with 2^N.
inline ojson run_loopgas_experiment(const ExperimentConfig& c) {
    if (c.family != "cc-exp") throw SchemaError("family", "loopgas requires family 'cc-exp'");
    if (c.boundary != "torus") throw SchemaError("geometry.boundary", "loopgas requires a torus");
    LatticeGeometry g = build_torus(c.lx, c.ly);
    GaugeGroup group = enumerate_group(g);
    Region region = detail_io::region_from(c, g);

    SweepResult r;
    r.alphas = c.alphas;
    r.seed = c.seed;
    r.arc = detail::arc_length(c.path);
    for (const auto& params : c.path) {
        if (params.size() != 1) throw SchemaError("path", "cc-exp points carry one parameter");
        const double lam = params[0];
        if (lam < 0) throw SchemaError("path", "cc-exp requires lambda >= 0");
        EntanglementSpectrum spec = cc_spectrum(group, region, lam);
        std::vector<double> row;
        for (double a : c.alphas) row.push_back(renyi(spec, a));
        r.lambda_params.push_back(params);
        r.entropy.push_back(std::move(row));
        r.ranks.push_back(schmidt_rank(spec));
        r.energies.push_back(static_cast<double>(-g.n_plaquettes()));  // frustration-free
        r.lz1.push_back(1.0);  // orbit state: exact z-loop label
        r.lx2.push_back(0.0);  // dual loop maps the orbit out of itself
        r.xi.push_back(std::numeric_limits<double>::quiet_NaN());
        r.converged.push_back(1);
    }
    ojson rep = sweep_report(c, r);
    rep["experiment"] = "loopgas";
    rep["group_order"] = group.size();
    detail_io::emit(c, r, rep);
    return rep;
}

// `chain`: supplementary 1D control experiments (families tfim-v1 / tfim-v2).
inline ojson run_chain_experiment(const ExperimentConfig& c) {
    ChainVariant variant;
    if (c.family == "tfim-v1")
        variant = ChainVariant::V1;
    else if (c.family == "tfim-v2")
        variant = ChainVariant::V2;
    else
        throw SchemaError("family", "chain requires family 'tfim-v1' or 'tfim-v2'");
    std::vector<double> lambdas;
    for (const auto& p : c.path) {
        if (p.size() != 1) throw SchemaError("path", "chain points carry one parameter");
        lambdas.push_back(p[0]);
    }
    SolverOptions opts;
    opts.tol = c.tol;
    opts.max_iter = c.max_iter;
    opts.seed = c.seed;
    opts.max_qubits = c.max_qubits;
    ChainBoundary bc = c.chain_boundary == "open" ? ChainBoundary::Open : ChainBoundary::Periodic;
    SweepResult r = chain_sweep(variant, c.chain_n, lambdas, c.alphas, opts, bc);
    ojson rep = sweep_report(c, r);
    rep["experiment"] = "chain";
    detail_io::emit(c, r, rep);
    return rep;
}

// `crosscheck`: exact path vs ED path on the same instance. Returns a report
// with per-quantity max deviations; "ok" = false when a gate is breached.
inline ojson run_crosscheck_experiment(const ExperimentConfig& c) {
    ojson rep;
    rep["experiment"] = "crosscheck";
    rep["config_echo"] = echo_config(c);
    bool ok = true;
    ojson rows = ojson::array();

    if (c.family == "cc-exp") {
        LatticeGeometry g = build_torus(c.lx, c.ly);
        if (g.n_edges > c.max_qubits) throw CapExceeded("geometry exceeds caps.max_qubits");
        GaugeGroup group = enumerate_group(g);
        Region region = detail_io::region_from(c, g);
        const double gate_s = 1e-8, gate_res = 1e-8, gate_overlap = 1e-10;
        for (const auto& params : c.path) {
            const double lam = params.at(0);
            StateVector psi = cc_state_vector(g, lam);
            OperatorSum h = build_model(g, PerturbationSpec::cc_exp(lam));
            // residual against the frustration-free energy -N_p
            StateVector hv = matvec(h, psi);
            double e0 = -static_cast<double>(g.n_plaquettes());
            double res = 0.0;
            for (std::size_t i = 0; i < psi.size(); ++i) {
                double d = hv[i] - e0 * psi[i];
                res += d * d;
            }
            res = std::sqrt(res);

            SolverOptions opts;
            opts.k = 4;
            opts.tol = std::min(c.tol, 1e-11);
            opts.max_iter = c.max_iter;
            opts.seed = c.seed;
            GroundSpace gs = ground_space(h, opts);
            double overlap = 0.0;
            for (const auto& s : gs.states) {
                double d = detail::dot(s, psi);
                overlap += d * d;
            }

            EntanglementSpectrum ed_spec = schmidt_spectrum(psi, region.edges, g.n_edges);
            double max_ds = 0.0;
            for (double a : c.alphas) {
                double exact = renyi(cc_spectrum(group, region, lam), a);
                double ed = renyi(ed_spec, a);
                max_ds = std::max(max_ds, std::abs(exact - ed));
            }
            bool row_ok = max_ds <= gate_s && res <= gate_res && (1.0 - overlap) <= gate_overlap;
            ok = ok && row_ok;
            rows.push_back({{"lambda", lam},
                            {"max_abs_dS", max_ds},
                            {"state_residual", res},
                            {"ground_space_overlap_deficit", 1.0 - overlap},
                            {"gates", {{"dS", gate_s}, {"residual", gate_res}, {"overlap", gate_overlap}}},
                            {"ok", row_ok}});
        }
    } else if (c.family == "tfim-v1") {
        const int n = c.chain_n;
        const double gate_corr = 1e-9, gate_s = 1e-8;
        for (const auto& params : c.path) {
            const double lam = params.at(0);
            ChainSpec ff;
            ff.n = n;
            ff.coupling = lam;
            ff.transverse = 1.0;
            FermionSolution fs = tfim_solve(ff);

            OperatorSum h = chain_hamiltonian(ff);  // same model, ED frame
            SolverOptions opts;
            opts.k = 1;
            opts.tol = std::min(c.tol, 1e-13);
            opts.max_iter = std::max(c.max_iter, 600);
            opts.seed = c.seed;
            GroundSpace gs = ground_space(h, opts);
            const StateVector& v = gs.states[0];

            double de = std::abs(fs.ground_energy - gs.energies[0]);
            double dcorr = 0.0;
            for (int mu = 0; mu + 1 < n; ++mu) {
                PauliString zz{0, (EdgeMask{1} << mu) | (EdgeMask{1} << (mu + 1)), 1.0};
                dcorr = std::max(dcorr, std::abs(fs.tau_xx(mu, mu + 1) - expectation(v, zz)));
            }
            for (int mu = 0; mu < n; ++mu) {
                PauliString x{EdgeMask{1} << mu, 0, 1.0};
                dcorr = std::max(dcorr, std::abs(fs.tau_z(mu) - expectation(v, x)));
            }
            // symmetric 1e-12 floor: keeps fractional-alpha entropies clear
            // of floor-adjacent numerical dust on both routes
            EntanglementSpectrum ff_spec = fermion_block_spectrum(fs, n / 2, 1e-12);
            EntanglementSpectrum ed_spec = schmidt_spectrum(v, (EdgeMask{1} << (n / 2)) - 1, n, 1e-12);
            double ds = 0.0;
            for (double a : c.alphas) ds = std::max(ds, std::abs(renyi(ff_spec, a) - renyi(ed_spec, a)));

            bool row_ok = de <= gate_corr && dcorr <= gate_corr && ds <= gate_s;
            ok = ok && row_ok;
            rows.push_back({{"lambda", lam},
                            {"dE", de},
                            {"max_abs_dcorr", dcorr},
                            {"max_abs_dS", ds},
                            {"gates", {{"energy", gate_corr}, {"corr", gate_corr}, {"dS", gate_s}}},
                            {"ok", row_ok}});
        }
    } else if (c.family == "horizontal-z") {
        // the horizontal field commutes with both direct z-loops; the
        // loop-basis sector carries the exact-case block structure
        LatticeGeometry g = build_torus(c.lx, c.ly);
        if (g.n_edges > c.max_qubits) throw CapExceeded("geometry exceeds caps.max_qubits");
        Region region = region_star(g, c.region_star);
        LoopSpec lz = wilson_loops(g).first;
        LoopSpec lx = direct_loop_z_row(g, 0);
        SolverOptions opts;
        opts.k = c.k;
        opts.tol = c.tol;
        opts.max_iter = c.max_iter;
        opts.seed = c.seed;

        OperatorSum h0 = build_model(g, PerturbationSpec::none());
        SectorSelection s0 = select_sector(ground_space(h0, opts), lz, lx);
        EntanglementSpectrum sp0 = schmidt_spectrum(s0.state, region.edges, g.n_edges);
        const int rank0 = schmidt_rank(sp0);
        const double s1_0 = renyi(sp0, 1.0), s2_0 = renyi(sp0, 2.0);

        double r0 = dual_factorization_residual(0.0, c.chain_n);
        for (const auto& params : c.path) {
            const double lam = params.at(0);
            OperatorSum h = build_model(g, PerturbationSpec::horizontal_z(lam));
            SectorSelection sel = select_sector(ground_space(h, opts), lz, lx);
            EntanglementSpectrum sp = schmidt_spectrum(sel.state, region.edges, g.n_edges);
            double witness = dual_factorization_residual(lam, c.chain_n);
            bool row_ok = schmidt_rank(sp) > 2 && renyi(sp, 1.0) < s1_0 &&
                          renyi(sp, 2.0) < s2_0 && witness > 1e-3 && r0 <= 1e-12;
            ok = ok && row_ok;
            rows.push_back({{"lambda", lam},
                            {"rank", schmidt_rank(sp)},
                            {"rank_lambda0", rank0},
                            {"dS1", renyi(sp, 1.0) - s1_0},
                            {"dS2", renyi(sp, 2.0) - s2_0},
                            {"dual_witness", witness},
                            {"dual_witness_lambda0", r0},
                            {"ok", row_ok}});
        }
    } else {
        throw UnsupportedFamily("crosscheck has no exact path for family '" + c.family + "'");
    }

    rep["rows"] = rows;
    rep["ok"] = ok;
    detail_io::write_file(c.json_path, rep.dump(2) + "\n");
    return rep;
}

inline ojson run_experiment(const ExperimentConfig& c) {
    switch (c.kind) {
        case ExperimentKind::Sweep: return run_sweep_experiment(c);
        case ExperimentKind::LoopGas: return run_loopgas_experiment(c);
        case ExperimentKind::Chain: return run_chain_experiment(c);
        case ExperimentKind::CrossCheck: return run_crosscheck_experiment(c);
    }
    throw std::logic_error("unreachable");
}

// File-level driver shared by the CLI and the tests: parses, runs, writes,
// and maps the error taxonomy onto exit codes.
inline int run_config_file(ExperimentKind kind, const std::string& config_path,
                           std::string* message = nullptr) {
    auto say = [&](const std::string& m) {
        if (message) *message = m;
    };
    try {
        std::ifstream f(config_path);
        if (!f) throw SchemaError("$", "cannot read config file '" + config_path + "'");
        json j = json::parse(f);
        ExperimentConfig c = parse_config(kind, j);
        ojson rep = run_experiment(c);
        if (kind == ExperimentKind::CrossCheck && !rep["ok"].get<bool>()) {
            say("crosscheck gate breached");
            return kExitGateBreach;
        }
        say("ok");
        return kExitOk;
    } catch (const json::parse_error& e) {
        say(std::string("config parse error: ") + e.what());
        return kExitSchema;
    } catch (const SchemaError& e) {
        say(std::string("schema violation at ") + e.field_path + ": " + e.what());
        return kExitSchema;
    } catch (const ConvergenceFailure& e) {
        std::string m = std::string("solver failure: ") + e.what() + " (residuals:";
        for (double r : e.residuals) m += " " + detail_io::fmt17(r);
        say(m + ")");
        return kExitSolver;
    } catch (const CapExceeded& e) {
        say(std::string("cap exceeded: ") + e.what());
        return kExitCap;
    } catch (const UnsupportedFamily& e) {
        say(std::string("no exact path: ") + e.what());
        return kExitNoExactPath;
    } catch (const std::exception& e) {
        say(std::string("error: ") + e.what());
        return kExitGateBreach;
    }
}

}  // namespace splitlab
