#include "mot/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "mot/admm.hpp"
#include "mot/calib.hpp"
#include "mot/error.hpp"

namespace mot {

namespace fs = std::filesystem;

namespace {

int report_error(const Error& e, std::ostream& err) {
    err << "error: " << e.what() << '\n';
    return e.is_input_error() ? exit_input_error : exit_numeric_error;
}

Eigen::Map<const Row> as_row(const std::vector<double>& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

} // namespace

int cmd_calibrate(const CalibrateOptions& options, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    RunConfig cfg;
    std::vector<std::string> warnings;
    std::optional<DensityPair> densities;
    try {
        cfg = parse_config(options.config);
        if (options.out_dir) cfg.output.directory = *options.out_dir;
        densities.emplace(load_densities(cfg, &warnings));
    } catch (const Error& e) {
        return report_error(e, err);
    }
    for (const auto& w : warnings) err << "warning: " << w << '\n';

    const CostModel cost(cfg.gamma_bar);
    RunResult result{AdmmState(densities->lattice()), {}};
    try {
        ProgressCallback progress;
        if (options.progress_every > 0) {
            progress = [&](const IterationRecord& rec) {
                if (rec.iteration % options.progress_every == 0 || rec.iteration == 1)
                    out << "iter " << rec.iteration << "  residual " << format_double(rec.residual)
                        << "  primal_gap " << format_double(rec.primal_gap) << '\n';
            };
        }
        result = run(cfg.solver, *densities, cost, progress);
    } catch (const Error& e) {
        return report_error(e, err);
    }

    try {
        const VolSurface surface = extract_sigma2(result.state, cfg.output.mask_fraction);
        const SurfaceSummary summary = summarize(surface);
        const fs::path dir = cfg.output.directory;
        fs::create_directories(dir);
        write_surface(dir / "surface.csv", surface);
        write_rho(dir / "rho.csv", result.state.rho);
        write_residuals(dir / "residuals.csv", result.report);

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        nlohmann::ordered_json s;
        s["iterations_used"] = result.report.iterations_used;
        s["final_residual"] = result.report.final_residual;
        s["converged"] = result.report.converged;
        s["unmasked_fraction"] = summary.unmasked_fraction;
        s["sigma2_mean_unmasked"] = summary.sigma2_mean;
        s["sigma2_min_unmasked"] = summary.sigma2_min;
        s["sigma2_max_unmasked"] = summary.sigma2_max;
        s["clip_count"] = summary.clip_count;
        s["mask_threshold"] = surface.threshold_used;
        s["primal_gap"] = result.report.primal_gap;
        s["primal_gap_masked"] = result.report.primal_gap_masked;
        s["worst_linear_residual"] = result.report.worst_linear_residual;
        s["wall_time_seconds"] = wall;
        s["warnings"] = warnings;
        s["config"] = config_to_json(cfg);
        std::ofstream f(dir / "summary.json", std::ios::binary);
        if (!f) throw Error(ErrorKind::Io, "cannot write summary.json in " + dir.string());
        f << s.dump(2) << '\n';

        out << "iterations " << result.report.iterations_used << ", residual "
            << format_double(result.report.final_residual) << ", sigma2 mean (unmasked) "
            << format_double(summary.sigma2_mean) << ", outputs in " << dir.string() << '\n';
    } catch (const Error& e) {
        return report_error(e, err);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    }
    return exit_ok;
}

int cmd_density(const fs::path& chain, const LatticeSpec& spec, const fs::path& out_path,
                std::ostream& out, std::ostream& err) {
    try {
        const Lattice lattice = spec.build();
        const TwoColumn c = read_chain(chain);
        const Row rho = density_from_calls(c.first, c.second, lattice);
        write_density(out_path, lattice, rho);
        out << "wrote " << lattice.nx() << " density nodes to " << out_path.string() << '\n';
    } catch (const Error& e) {
        // Every failure here traces back to the chain or the arguments.
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    }
    return exit_ok;
}

int cmd_check_order(const fs::path& rho0_path, const fs::path& rho1_path, std::ostream& out,
                    std::ostream& err) {
    try {
        const TwoColumn d0 = read_density(rho0_path);
        const TwoColumn d1 = read_density(rho1_path);
        const auto& x0 = d0.first;
        const auto& x1 = d1.first;
        if (x0.size() != x1.size())
            throw Error(ErrorKind::Validation, "grid mismatch: the density files have different "
                                               "numbers of rows");
        if (x0.size() < 5)
            throw Error(ErrorKind::Validation, "density files need at least 5 grid nodes");
        const double span = x0.back() - x0.front();
        for (std::size_t k = 0; k < x0.size(); ++k)
            if (std::abs(x0[k] - x1[k]) > 1e-12 * std::max(1.0, std::abs(span)))
                throw Error(ErrorKind::Validation, "grid mismatch: the density files sample "
                                                   "different x values");
        const Lattice lattice = make_lattice(3, x0.size(), x0.front(), x0.back());
        for (std::size_t k = 0; k < x0.size(); ++k)
            if (std::abs(x0[k] - lattice.x(k)) > 1e-9 * span)
                throw Error(ErrorKind::Validation, "density grid is not uniform");
        for (const auto* d : {&d0, &d1})
            for (double v : d->second)
                if (v < 0.0) throw Error(ErrorKind::Validation, "negative density value");

        const Row r0 = normalize(as_row(d0.second), lattice);
        const Row r1 = normalize(as_row(d1.second), lattice);
        const ConvexOrderVerdict v = check_convex_order(r0, r1, lattice);
        if (v.holds) {
            out << "holds: rho0 precedes rho1 in convex order\n";
            return exit_ok;
        }
        out << "fails";
        if (v.strike) out << " at strike " << format_double(*v.strike);
        out << ": " << v.reason << '\n';
        return exit_negative_verdict;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    }
}

} // namespace mot
