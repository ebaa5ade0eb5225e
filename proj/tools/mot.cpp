// mot: local-volatility calibration by martingale optimal transport.
//
//   mot calibrate   --config run.json --out results/
//   mot density     --chain calls.csv --nt 128 --nx 128 --xlo 0 --xhi 1 --out rho.csv
//   mot check-order --rho0 a.csv --rho1 b.csv

#include <iostream>

#include "CLI11.hpp"

#include "mot/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Local-volatility calibration by martingale optimal transport"};
    app.require_subcommand(1);

    mot::CalibrateOptions cal;
    std::string out_dir;
    auto* calibrate = app.add_subcommand("calibrate", "Run the ADMM calibration from a JSON config");
    calibrate->add_option("--config", cal.config, "Run configuration (JSON)")->required();
    calibrate->add_option("--out", out_dir, "Output directory (overrides output.directory)");
    calibrate->add_option("--progress", cal.progress_every,
                          "Print a progress line every N iterations (0 = quiet)");

    std::string chain, density_out;
    mot::LatticeSpec spec;
    auto* density = app.add_subcommand("density", "Recover a density from a call-price chain");
    density->add_option("--chain", chain, "CSV with header strike,price")->required();
    density->add_option("--nt", spec.nt, "Time nodes of the target lattice")->capture_default_str();
    density->add_option("--nx", spec.nx, "Space nodes of the target lattice")->capture_default_str();
    density->add_option("--xlo", spec.x_lo, "Lower end of the spatial domain")->capture_default_str();
    density->add_option("--xhi", spec.x_hi, "Upper end of the spatial domain")->capture_default_str();
    density->add_option("--out", density_out, "Output CSV (x,rho)")->required();

    std::string rho0, rho1;
    auto* order = app.add_subcommand("check-order", "Test two densities for convex order");
    order->add_option("--rho0", rho0, "CSV with header x,rho (earlier date)")->required();
    order->add_option("--rho1", rho1, "CSV with header x,rho (later date)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mot::exit_input_error;
    }

    if (*calibrate) {
        if (!out_dir.empty()) cal.out_dir = out_dir;
        return mot::cmd_calibrate(cal, std::cout, std::cerr);
    }
    if (*density) return mot::cmd_density(chain, spec, density_out, std::cout, std::cerr);
    return mot::cmd_check_order(rho0, rho1, std::cout, std::cerr);
}
