#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "mot/io.hpp"

namespace mot {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    exit_ok = 0,
    exit_negative_verdict = 1,
    exit_input_error = 2,
    exit_numeric_error = 3,
};

struct CalibrateOptions {
    std::filesystem::path config;
    /// Overrides output.directory from the config when set.
    std::optional<std::filesystem::path> out_dir;
    /// Print a progress line every this many iterations (0 = silent).
    std::size_t progress_every = 0;
};

/// Runs a calibration and writes surface.csv, rho.csv, residuals.csv and
/// summary.json into the output directory.
int cmd_calibrate(const CalibrateOptions& options, std::ostream& out, std::ostream& err);

/// Breeden-Litzenberger recovery of one option chain onto a lattice; writes
/// an `x,rho` CSV.
int cmd_density(const std::filesystem::path& chain, const LatticeSpec& lattice,
                const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

/// Convex-order verdict for two density files on a shared uniform grid.
int cmd_check_order(const std::filesystem::path& rho0, const std::filesystem::path& rho1,
                    std::ostream& out, std::ostream& err);

} // namespace mot
