#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"

#include "mot/error.hpp"
#include "mot/io.hpp"

using namespace mot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("mot-io-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* minimal = R"({
  "problem": {"gaussian": {"mean0": 0.5, "sd0": 0.05, "mean1": 0.5, "sd1": 0.1}},
  "lattice": {"nt": 128, "nx": 128, "x_lo": 0.0, "x_hi": 1.0},
  "cost": {"gamma_bar": 0.00375}
})";

std::pair<ErrorKind, std::string> failure(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const Error& e) {
        return {e.kind(), e.what()};
    }
    FAIL("expected the config to be rejected");
    return {};
}

std::string with_solver(const std::string& body) {
    return R"({"problem": {"gaussian": {"mean0": 0.5, "sd0": 0.05, "mean1": 0.5, "sd1": 0.1}},
              "lattice": {"nt": 16, "nx": 16, "x_lo": 0, "x_hi": 1},
              "cost": {"gamma_bar": 0.00375}, "solver": )" +
           body + "}";
}

} // namespace

TEST_CASE("config defaults") {
    const RunConfig c = parse_config_text(minimal);
    CHECK(std::holds_alternative<GaussianProblem>(c.problem));
    CHECK(c.lattice.nt == 128);
    CHECK(c.gamma_bar == 0.00375);
    CHECK(c.solver.r == 64.0);
    CHECK(c.solver.max_iter == 3000);
    CHECK(c.solver.res_tol == 1e-6);
    CHECK(c.solver.lin_tol == 1e-10);
    CHECK(c.solver.init_scheme == InitScheme::Zero);
    CHECK(c.output.mask_fraction == 0.01);
    CHECK(c.solver.rho_mask_fraction == 0.01);
}

TEST_CASE("config validation names the violated constraint") {
    const auto [kind, what] = failure(with_solver(R"({"r": -1})"));
    CHECK(kind == ErrorKind::Validation);
    CHECK(what == "solver.r must be > 0");

    CHECK(failure(with_solver(R"({"max_iter": 0})")).second == "solver.max_iter must be >= 1");
    CHECK(failure(with_solver(R"({"init_scheme": "warm"})")).first == ErrorKind::Validation);
    CHECK(failure(with_solver(R"({"r": "big"})")).second.find("solver.r") != std::string::npos);
    CHECK(failure(with_solver(R"({"r": "big"})")).first == ErrorKind::Parse);
}

TEST_CASE("config parse errors carry position or key") {
    const auto [kind, what] = failure("{\n  \"problem\": ,\n}");
    CHECK(kind == ErrorKind::Parse);
    CHECK(what.find("line 2") != std::string::npos);

    CHECK(failure(R"({"lattice": {}})").second.find("problem") != std::string::npos);
    const auto missing = failure(R"({
      "problem": {"gaussian": {"mean0": 0.5, "sd0": 0.05, "mean1": 0.5, "sd1": 0.1}},
      "lattice": {"nt": 16, "nx": 16, "x_lo": 0},
      "cost": {"gamma_bar": 0.1}})");
    CHECK(missing.first == ErrorKind::Parse);
    CHECK(missing.second.find("lattice.x_hi") != std::string::npos);

    const auto dims = failure(R"({
      "problem": {"gaussian": {"mean0": 0.5, "sd0": 0.05, "mean1": 0.5, "sd1": 0.1}},
      "lattice": {"nt": 2, "nx": 16, "x_lo": 0, "x_hi": 1},
      "cost": {"gamma_bar": 0.1}})");
    CHECK(dims.first == ErrorKind::Validation);
    CHECK(dims.second == "lattice.nt must be >= 3");
}

TEST_CASE("config file paths resolve against the config directory") {
    TempDir dir;
    fs::create_directories(dir.path / "data");
    write_text(dir.path / "data" / "a.csv", "x,rho\n0,1\n1,1\n");
    write_text(dir.path / "data" / "b.csv", "x,rho\n0,1\n1,1\n");
    write_text(dir.path / "run.json", R"({
      "problem": {"files": {"rho0": "data/a.csv", "rho1": "data/b.csv"}},
      "lattice": {"nt": 8, "nx": 8, "x_lo": 0, "x_hi": 1},
      "cost": {"gamma_bar": 0.1},
      "output": {"directory": "out"}})");
    const RunConfig c = parse_config(dir.path / "run.json");
    const auto& files = std::get<FilesProblem>(c.problem);
    CHECK(files.rho0 == dir.path / "data" / "a.csv");
    CHECK(c.output.directory == dir.path / "out");

    write_text(dir.path / "bad.json", R"({
      "problem": {"files": {"rho0": "data/a.csv", "rho1": "data/missing.csv"}},
      "lattice": {"nt": 8, "nx": 8, "x_lo": 0, "x_hi": 1},
      "cost": {"gamma_bar": 0.1}})");
    try {
        parse_config(dir.path / "bad.json");
        FAIL("expected a missing-file error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
        CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(dir.path / "nope.json"), Error);
}

TEST_CASE("config round-trips through JSON") {
    RunConfig c = parse_config_text(minimal);
    c.solver.r = 12.5;
    c.solver.init_scheme = InitScheme::HeatKernel;
    c.output.directory = "elsewhere";
    c.output.mask_fraction = 0.1;
    const RunConfig back = parse_config_text(config_to_json(c).dump());
    CHECK(back.solver.r == 12.5);
    CHECK(back.solver.init_scheme == InitScheme::HeatKernel);
    CHECK(back.output.directory == fs::path("elsewhere"));
    CHECK(back.solver.rho_mask_fraction == 0.1);
    CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("property: format_double round-trips exactly") {
    std::mt19937_64 rng(71);
    std::uniform_int_distribution<std::uint64_t> bits;
    int checked = 0;
    while (checked < 5000) {
        const std::uint64_t b = bits(rng);
        double v;
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) continue;
        ++checked;
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    for (double v : {0.0, -0.0, 1.0 / 3.0, 0.1, 1e-300, std::numeric_limits<double>::denorm_min(),
                     std::numeric_limits<double>::max()})
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}

TEST_CASE("property: density CSV write/read is lossless") {
    TempDir dir;
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Lattice l = make_lattice(3, 5 + static_cast<std::size_t>(trial) * 7, -0.3, 1.9);
        Row rho(static_cast<Eigen::Index>(l.nx()));
        for (Eigen::Index i = 0; i < rho.size(); ++i) rho(i) = u(rng);
        const fs::path p = dir.path / "d.csv";
        write_density(p, l, rho);
        const TwoColumn back = read_density(p);
        REQUIRE(back.first.size() == l.nx());
        for (std::size_t i = 0; i < l.nx(); ++i) {
            CHECK(back.first[i] == l.x(i));
            CHECK(back.second[i] == rho(static_cast<Eigen::Index>(i)));
        }
    }
}

TEST_CASE("CSV reader errors") {
    TempDir dir;
    const fs::path p = dir.path / "c.csv";
    write_text(p, "K,C\n0.1,0.2\n");
    CHECK_THROWS_AS(read_chain(p), Error);
    write_text(p, "strike,price\n0.1,abc\n");
    try {
        read_chain(p);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    write_text(p, "strike,price\r\n0.1,0.2\r\n0.2,0.1\r\n");
    CHECK(read_chain(p).second.size() == 2);
    try {
        read_chain(dir.path / "absent.csv");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
}

TEST_CASE("resampling a density onto the lattice") {
    const Lattice l = make_lattice(3, 11, 0.0, 1.0);
    TwoColumn tent{{0.0, 0.5, 1.0}, {0.0, 2.0, 0.0}};
    const Row r = resample_density(tent, l);
    CHECK(integrate_x(r, l) == doctest::Approx(1.0));
    CHECK(r(5) == doctest::Approx(2.0));
    CHECK(r(1) == doctest::Approx(0.4));

    TwoColumn narrow{{0.3, 0.7}, {1.0, 1.0}};
    const Row n = resample_density(narrow, l);
    CHECK(n(0) == 0.0);
    CHECK(n(10) == 0.0);
    CHECK(n(5) > 0.0);

    CHECK_THROWS_AS(resample_density({{0.0, 0.0}, {1.0, 1.0}}, l), Error);
    CHECK_THROWS_AS(resample_density({{0.0, 1.0}, {1.0, -1.0}}, l), Error);
    CHECK_THROWS_AS(resample_density({{2.0, 3.0}, {1.0, 1.0}}, l), Error);
}

TEST_CASE("surface and residual CSV layouts") {
    TempDir dir;
    const Lattice l = make_lattice(3, 5, 0.0, 1.0);
    AdmmState s(l);
    s.rho = Field::from_function(l, [](double, double x) { return x; });
    s.m = Field::from_function(l, [](double, double x) { return 0.5 * x * 0.01; });
    const VolSurface surface = extract_sigma2(s, 0.3);
    write_surface(dir.path / "surface.csv", surface);
    const std::string text = read_text(dir.path / "surface.csv");
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,x,rho,m,sigma2,masked");
    std::getline(lines, line);
    CHECK(line == "0,0,0,0,,1");
    std::getline(lines, line);
    CHECK(line == "0,0.25,0.25,0.00125,,1");
    std::getline(lines, line);
    CHECK(line == "0,0.5,0.5,0.0025000000000000001,0.01,0");

    RunReport rep;
    rep.residual_history = {{1, 0.5, 0.25}, {2, 0.125, 1e-20}};
    write_residuals(dir.path / "residuals.csv", rep);
    CHECK(read_text(dir.path / "residuals.csv") ==
          "iter,residual,primal_gap\n1,0.5,0.25\n2,0.125,9.9999999999999995e-21\n");
}
