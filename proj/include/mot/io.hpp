#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "mot/admm.hpp"
#include "mot/calib.hpp"
#include "mot/density.hpp"
#include "mot/lattice.hpp"

namespace mot {

struct GaussianProblem {
    double mean0 = 0.5;
    double sd0 = 0.05;
    double mean1 = 0.5;
    double sd1 = 0.1;
};

struct FilesProblem {
    std::filesystem::path rho0;
    std::filesystem::path rho1;
};

struct ChainProblem {
    std::filesystem::path chain0;
    std::filesystem::path chain1;
};

using Problem = std::variant<GaussianProblem, FilesProblem, ChainProblem>;

struct LatticeSpec {
    std::size_t nt = 128;
    std::size_t nx = 128;
    double x_lo = 0.0;
    double x_hi = 1.0;

    Lattice build() const { return make_lattice(nt, nx, x_lo, x_hi); }
};

struct OutputSpec {
    std::filesystem::path directory = "mot-out";
    double mask_fraction = default_mask_fraction;
};

/// Everything a calibration run needs. JSON layout:
///
///   { "problem": { "gaussian": {"mean0","sd0","mean1","sd1"} }
///              | { "files": {"rho0","rho1"} } | { "chain": {"chain0","chain1"} },
///     "lattice": {"nt","nx","x_lo","x_hi"},
///     "cost":    {"gamma_bar"},
///     "solver":  {"r","max_iter","res_tol","lin_tol","init_scheme"},
///     "output":  {"directory","mask_fraction"} }
///
/// Relative file paths resolve against the config file's directory.
struct RunConfig {
    Problem problem = GaussianProblem{};
    LatticeSpec lattice;
    double gamma_bar = 0.00375;
    SolverConfig solver;
    OutputSpec output;
};

/// Parses and validates; throws Error(Parse) with line/column or key context,
/// Error(Validation) naming the violated constraint, Error(Io) for unreadable
/// or missing files.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text,
                            const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const RunConfig& config);

/// Builds the validated marginals described by the config.
DensityPair load_densities(const RunConfig& config, std::vector<std::string>* warnings = nullptr);

// CSV --------------------------------------------------------------------

/// Shortest text that parses back to exactly v ("%.17g").
std::string format_double(double v);

struct TwoColumn {
    std::vector<double> first;
    std::vector<double> second;
};

/// Reads a two-column CSV with the given header (e.g. "strike,price").
TwoColumn read_two_column_csv(const std::filesystem::path& path, const std::string& header);

TwoColumn read_chain(const std::filesystem::path& path);
TwoColumn read_density(const std::filesystem::path& path);

/// Linear interpolation of (x, rho) samples onto the lattice (zero outside
/// the sampled range), renormalized.
Row resample_density(const TwoColumn& samples, const Lattice& lattice);

void write_chain(const std::filesystem::path& path, const std::vector<double>& strikes,
                 const std::vector<double>& prices);
void write_density(const std::filesystem::path& path, const Lattice& lattice, const Row& rho);
void write_rho(const std::filesystem::path& path, const Field& rho);
void write_surface(const std::filesystem::path& path, const VolSurface& surface);
void write_residuals(const std::filesystem::path& path, const RunReport& report);

} // namespace mot
