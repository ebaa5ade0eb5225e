#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mot/admm.hpp"
#include "mot/calib.hpp"
#include "mot/cost.hpp"
#include "mot/density.hpp"
#include "mot/error.hpp"
#include "mot/io.hpp"

namespace py = pybind11;
using namespace mot;

namespace {

Lattice line(std::size_t nx, double x_lo, double x_hi) { return make_lattice(3, nx, x_lo, x_hi); }

py::dict run_config(const RunConfig& cfg) {
    std::vector<std::string> warnings;
    const DensityPair densities = load_densities(cfg, &warnings);
    const CostModel cost(cfg.gamma_bar);
    RunResult result{AdmmState(densities.lattice()), {}};
    {
        py::gil_scoped_release release;
        result = run(cfg.solver, densities, cost);
    }
    const VolSurface surface = extract_sigma2(result.state, cfg.output.mask_fraction);
    const SurfaceSummary summary = summarize(surface);

    const Lattice& l = densities.lattice();
    std::vector<double> residuals, gaps;
    for (const auto& rec : result.report.residual_history) {
        residuals.push_back(rec.residual);
        gaps.push_back(rec.primal_gap);
    }
    py::dict out;
    out["t"] = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(l.nt()), 0.0, 1.0);
    out["x"] = Eigen::VectorXd(l.x_nodes().matrix());
    out["rho"] = Eigen::MatrixXd(result.state.rho.values().matrix());
    out["m"] = Eigen::MatrixXd(result.state.m.values().matrix());
    out["phi"] = Eigen::MatrixXd(result.state.phi.values().matrix());
    out["sigma2"] = Eigen::MatrixXd(surface.sigma2.matrix());
    out["mask"] = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>(surface.mask.matrix());
    out["residuals"] = residuals;
    out["primal_gaps"] = gaps;
    out["iterations_used"] = result.report.iterations_used;
    out["converged"] = result.report.converged;
    out["final_residual"] = result.report.final_residual;
    out["unmasked_fraction"] = summary.unmasked_fraction;
    out["sigma2_mean_unmasked"] = summary.sigma2_mean;
    out["clip_count"] = summary.clip_count;
    out["warnings"] = warnings;
    return out;
}

} // namespace

PYBIND11_MODULE(_mot, m) {
    m.doc() = "Local-volatility calibration by martingale optimal transport";

    static py::exception<Error> mot_error(m, "MotError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::handle(mot_error.ptr())(e.what());
            py::setattr(err, "kind", py::str(to_string(e.kind())));
            py::setattr(err, "input_error", py::bool_(e.is_input_error()));
            PyErr_SetObject(mot_error.ptr(), err.ptr());
        }
    });

    py::class_<CostModel>(m, "CostModel")
        .def(py::init<double>(), py::arg("gamma_bar"))
        .def_property_readonly("gamma_bar", &CostModel::gamma_bar)
        .def_property_readonly("kink", &CostModel::kink)
        .def("value", &CostModel::value, py::arg("gamma"))
        .def("conjugate", &CostModel::conjugate, py::arg("b"))
        .def("conjugate_slope", &CostModel::conjugate_slope, py::arg("b"));

    m.def(
        "project_to_k",
        [](const CostModel& cost, double alpha, double beta) {
            const KPoint p = project_to_k(cost, alpha, beta);
            return py::make_tuple(p.a, p.b);
        },
        py::arg("cost"), py::arg("alpha"), py::arg("beta"),
        "Euclidean projection of (alpha, beta) onto {a + F*(b) <= 0}; returns (a, b).");

    m.def(
        "gaussian_density",
        [](double mean, double sd, std::size_t nx, double x_lo, double x_hi) {
            return Eigen::VectorXd(gaussian_density(line(nx, x_lo, x_hi), mean, sd).matrix());
        },
        py::arg("mean"), py::arg("sd"), py::arg("nx") = 128, py::arg("x_lo") = 0.0,
        py::arg("x_hi") = 1.0, "Normal pdf on the nodes, rescaled to unit trapezoidal mass.");

    m.def(
        "density_from_calls",
        [](const std::vector<double>& strikes, const std::vector<double>& prices, std::size_t nx,
           double x_lo, double x_hi) {
            return Eigen::VectorXd(
                density_from_calls(strikes, prices, line(nx, x_lo, x_hi)).matrix());
        },
        py::arg("strikes"), py::arg("prices"), py::arg("nx") = 128, py::arg("x_lo") = 0.0,
        py::arg("x_hi") = 1.0, "Breeden-Litzenberger density from undiscounted call prices.");

    m.def(
        "check_convex_order",
        [](const Eigen::VectorXd& rho0, const Eigen::VectorXd& rho1, double x_lo, double x_hi) {
            if (rho0.size() != rho1.size())
                throw Error(ErrorKind::InvalidDimensions, "rho0 and rho1 differ in length");
            const Lattice l = line(static_cast<std::size_t>(rho0.size()), x_lo, x_hi);
            const ConvexOrderVerdict v = check_convex_order(rho0.array(), rho1.array(), l);
            py::dict out;
            out["holds"] = v.holds;
            out["strike"] = v.strike ? py::cast(*v.strike) : py::none();
            out["reason"] = v.reason;
            return out;
        },
        py::arg("rho0"), py::arg("rho1"), py::arg("x_lo") = 0.0, py::arg("x_hi") = 1.0);

    m.def(
        "calibrate",
        [](const std::string& config_json, const std::filesystem::path& base_dir) {
            return run_config(parse_config_text(config_json, base_dir));
        },
        py::arg("config_json"), py::arg("base_dir") = std::filesystem::path(),
        "Run a calibration from JSON config text (same layout as `mot calibrate`). Returns a "
        "dict of numpy arrays (t, x, rho, m, phi, sigma2, mask) plus run statistics.");

    m.def(
        "calibrate_file",
        [](const std::filesystem::path& path) { return run_config(parse_config(path)); },
        py::arg("path"), "Run a calibration from a JSON config file.");
}
