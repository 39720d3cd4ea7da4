#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "splitlab/io.hpp"
#include "support/oracles.hpp"

using namespace splitlab;

namespace {

std::filesystem::path temp_dir() {
    auto p = std::filesystem::temp_directory_path() / "splitlab_io_tests";
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path write_config(const std::string& name, const json& j) {
    auto p = temp_dir() / name;
    std::ofstream f(p);
    f << j.dump(2);
    return p;
}

}  // namespace

TEST_CASE("config defaults and echo round trip") {
    json j = json::parse(R"({"geometry":{"lx":3,"ly":2},"family":"cc-exp","path":[[0.1],[0.3]]})");
    ExperimentConfig c = parse_config(ExperimentKind::Sweep, j);
    CHECK(c.lx == 3);
    CHECK(c.alphas == default_alphas());
    CHECK(c.units == "nats");

    ojson echo = echo_config(c);
    ExperimentConfig c2 = parse_config(ExperimentKind::Sweep, json::parse(echo.dump()));
    CHECK(c == c2);
}

TEST_CASE("schema violations carry field paths") {
    auto expect_schema = [](const char* text, const char* path_fragment) {
        CAPTURE(text);
        try {
            parse_config(ExperimentKind::Sweep, json::parse(text));
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.field_path).find(path_fragment) != std::string::npos);
        }
    };
    expect_schema(R"({"path":[[0]],"alphas":[0.5,0.25]})", "alphas");
    expect_schema(R"({"path":[[0]],"alphas":[-1]})", "alphas");
    expect_schema(R"({"path":[[0]],"alphas":["x"]})", "alphas");
    expect_schema(R"({"path":[[0]],"family":"bogus"})", "family");
    expect_schema(R"({"path":[[0]],"geometry":{"lx":1}})", "geometry");
    expect_schema(R"({"path":[[0]],"region":{"kind":"blob"}})", "region.kind");
    expect_schema(R"({"path":[[0]],"solver":{"tol":2.0}})", "solver.tol");
    expect_schema(R"({"path":"zap"})", "path");
    expect_schema(R"({"bogus_field":1,"path":[[0]]})", "bogus_field");
    expect_schema(R"({})", "path");
}

TEST_CASE("toric single-point CSV carries the flat fixed-point row") {
    auto csv_path = temp_dir() / "toric.csv";
    json j = {
        {"geometry", {{"lx", 2}, {"ly", 2}}},
        {"family", "none"},
        {"path", {{0.0}}},
        {"region", {{"kind", "star"}}},
        {"solver", {{"k", 4}, {"tol", 1e-11}, {"seed", 3}}},
        {"output", {{"csv", csv_path.string()}}},
    };
    ExperimentConfig c = parse_config(ExperimentKind::Sweep, j);
    run_experiment(c);

    std::string csv = slurp(csv_path);
    CHECK(csv.rfind("lambda_index,lambda_params,alpha,S,rank,energy,lz1,lx2\n", 0) == 0);

    // every alpha row carries the same S, equal to the stabilizer-oracle
    // value ln(rank) for this sector state
    LatticeGeometry g = build_torus(2, 2);
    auto group = oracle::stabilizer_group(oracle::toric_sector_generators(g));
    auto spec = oracle::stabilizer_region_spectrum(group, region_star(g).edges, g.n_edges);
    const double expect = std::log(static_cast<double>(spec.size()));

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        // S is the fourth field
        std::size_t pos = 0;
        for (int f = 0; f < 3; ++f) pos = line.find(',', pos) + 1;
        double s = std::stod(line.substr(pos));
        CHECK(s == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(rows == static_cast<int>(default_alphas().size()));
}

TEST_CASE("identical config and seed give identical bytes") {
    auto csv_a = temp_dir() / "det_a.csv";
    auto csv_b = temp_dir() / "det_b.csv";
    json base = {
        {"geometry", {{"lx", 3}, {"ly", 2}}},
        {"family", "cc-exp"},
        {"path", {{0.0}, {0.1}, {0.2}, {0.3}}},
        {"region", {{"kind", "star-plaquette"}}},
        {"solver", {{"seed", 11}}},
    };
    json ja = base;
    ja["output"] = {{"csv", csv_a.string()}};
    json jb = base;
    jb["output"] = {{"csv", csv_b.string()}};
    run_experiment(parse_config(ExperimentKind::LoopGas, ja));
    run_experiment(parse_config(ExperimentKind::LoopGas, jb));
    CHECK(slurp(csv_a) == slurp(csv_b));

    // the ED pipeline is deterministic too
    json s = {
        {"geometry", {{"lx", 2}, {"ly", 2}}},
        {"family", "uniform-xz"},
        {"path", {{0.0, 0.0}, {0.02, 0.01}, {0.04, 0.02}}},
        {"solver", {{"k", 4}, {"seed", 5}}},
    };
    json sa = s, sb = s;
    sa["output"] = {{"csv", (temp_dir() / "sd_a.csv").string()}};
    sb["output"] = {{"csv", (temp_dir() / "sd_b.csv").string()}};
    run_experiment(parse_config(ExperimentKind::Sweep, sa));
    run_experiment(parse_config(ExperimentKind::Sweep, sb));
    CHECK(slurp(temp_dir() / "sd_a.csv") == slurp(temp_dir() / "sd_b.csv"));
}

TEST_CASE("loopgas report: convertible with no splitting") {
    auto json_path = temp_dir() / "cc_report.json";
    json j = {
        {"geometry", {{"lx", 3}, {"ly", 2}}},
        {"family", "cc-exp"},
        {"path", json::array()},
        {"region", {{"kind", "star"}}},
        {"output", {{"json", json_path.string()}}},
    };
    for (int i = 0; i <= 14; ++i) j["path"].push_back({0.05 * i});
    run_experiment(parse_config(ExperimentKind::LoopGas, j));

    json rep = json::parse(slurp(json_path));
    CHECK(rep["splitting"]["split"] == false);
    CHECK(rep["splitting"]["dlc"] == "convertible");
    CHECK(rep["splitting"]["alpha0_interval"].is_null());
    // config echo reparses to the same config
    ExperimentConfig c = parse_config(ExperimentKind::LoopGas, j);
    ExperimentConfig c2 = parse_config(ExperimentKind::LoopGas, json::parse(rep["config_echo"].dump()));
    CHECK(c == c2);
}

TEST_CASE("crosscheck drivers and exit codes") {
    // cc-exp: exact formula vs constructed state vs ED ground space
    auto cc = write_config("cc.json", json{{"geometry", {{"lx", 2}, {"ly", 2}}},
                                           {"family", "cc-exp"},
                                           {"path", {{0.3}}},
                                           {"alphas", {0.0, 0.5, 2.0, 3.0}}});
    std::string msg;
    CHECK(run_config_file(ExperimentKind::CrossCheck, cc.string(), &msg) == kExitOk);

    // tfim-v1 at modest size for speed
    auto ff = write_config("ff.json", json{{"family", "tfim-v1"},
                                           {"path", {{0.5}}},
                                           {"chain", {{"n", 10}}},
                                           {"alphas", {0.0, 1.0, 2.0}}});
    CHECK(run_config_file(ExperimentKind::CrossCheck, ff.string(), &msg) == kExitOk);

    // a family without an exact path
    auto xz = write_config("xz.json", json{{"family", "uniform-xz"}, {"path", {{0.01, 0.005}}}});
    CHECK(run_config_file(ExperimentKind::CrossCheck, xz.string(), &msg) == kExitNoExactPath);

    // schema violation -> 2, and the message names the field
    auto bad = write_config("bad.json", json{{"path", {{0.0}}}, {"alphas", {0.5, 0.25}}});
    CHECK(run_config_file(ExperimentKind::Sweep, bad.string(), &msg) == kExitSchema);
    CHECK(msg.find("alphas") != std::string::npos);

    // malformed JSON -> 2
    auto broken = temp_dir() / "broken.json";
    std::ofstream(broken) << "{ not json";
    CHECK(run_config_file(ExperimentKind::Sweep, broken.string(), &msg) == kExitSchema);

    // unreadable path -> 2
    CHECK(run_config_file(ExperimentKind::Sweep, (temp_dir() / "missing.json").string(), &msg) ==
          kExitSchema);

    // cap exceeded -> 4
    auto big = write_config("big.json", json{{"geometry", {{"lx", 5}, {"ly", 3}}},
                                             {"family", "none"},
                                             {"path", {{0.0}}}});
    CHECK(run_config_file(ExperimentKind::Sweep, big.string(), &msg) == kExitCap);

    // solver failure -> 3
    auto hard = write_config("hard.json", json{{"geometry", {{"lx", 2}, {"ly", 2}}},
                                               {"family", "cc-exp"},
                                               {"path", {{0.1}}},
                                               {"solver", {{"max_iter", 1}, {"tol", 1e-13}}}});
    CHECK(run_config_file(ExperimentKind::CrossCheck, hard.string(), &msg) == kExitSolver);
}

TEST_CASE("bits units scale the emitted surfaces") {
    auto csv_n = temp_dir() / "units_nats.csv";
    auto csv_b = temp_dir() / "units_bits.csv";
    json base = {{"geometry", {{"lx", 2}, {"ly", 2}}},
                 {"family", "cc-exp"},
                 {"path", {{0.2}}},
                 {"alphas", {2.0}},
                 {"region", {{"kind", "star"}}}};
    json jn = base, jb = base;
    jn["output"] = {{"csv", csv_n.string()}};
    jb["output"] = {{"csv", csv_b.string()}};
    jb["units"] = "bits";
    run_experiment(parse_config(ExperimentKind::LoopGas, jn));
    run_experiment(parse_config(ExperimentKind::LoopGas, jb));

    auto s_of = [](const std::string& csv) {
        std::istringstream ss(csv);
        std::string line;
        std::getline(ss, line);
        std::getline(ss, line);
        std::size_t pos = 0;
        for (int f = 0; f < 3; ++f) pos = line.find(',', pos) + 1;
        return std::stod(line.substr(pos));
    };
    double sn = s_of(slurp(csv_n));
    double sb = s_of(slurp(csv_b));
    CHECK(sb == doctest::Approx(sn / std::log(2.0)).epsilon(1e-12));
}
