#include "mot/admm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mot/error.hpp"
#include "mot/parallel.hpp"

namespace mot {

std::string to_string(InitScheme scheme) {
    switch (scheme) {
    case InitScheme::Zero: return "zero";
    case InitScheme::LinearMarginal: return "linear-marginal";
    case InitScheme::HeatKernel: return "heat-kernel";
    }
    return "zero";
}

InitScheme parse_init_scheme(const std::string& name) {
    if (name == "zero") return InitScheme::Zero;
    if (name == "linear-marginal") return InitScheme::LinearMarginal;
    if (name == "heat-kernel") return InitScheme::HeatKernel;
    throw Error(ErrorKind::Validation,
                "solver.init_scheme must be one of zero, linear-marginal, heat-kernel (got \"" +
                    name + "\")");
}

void SolverConfig::validate() const {
    const auto fail = [](const std::string& what) { throw Error(ErrorKind::Validation, what); };
    if (!(r > 0.0) || !std::isfinite(r)) fail("solver.r must be > 0");
    if (max_iter < 1) fail("solver.max_iter must be >= 1");
    if (!(res_tol > 0.0)) fail("solver.res_tol must be > 0");
    if (!(lin_tol > 0.0)) fail("solver.lin_tol must be > 0");
    if (!(rho_mask_fraction > 0.0 && rho_mask_fraction < 1.0))
        fail("solver.rho_mask_fraction must lie in (0, 1)");
}

namespace {

// Row j of the heat-kernel interpolation: rho0 convolved with N(0, var t).
Row smoothed_row(const Row& rho0, const Lattice& l, double variance) {
    if (variance <= 0.0) return rho0;
    const Row xs = l.x_nodes();
    const Row w = trapezoid_weights_x(l);
    Row out = Row::Zero(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const Row z = (xs(i) - xs) / std::sqrt(variance);
        out(i) = (w * rho0 * (-0.5 * z.square()).exp()).sum();
    }
    return normalize(out, l);
}

void zero_boundary_columns(Field& f) {
    const auto nx = static_cast<Eigen::Index>(f.lattice().nx());
    f.values().col(0).setZero();
    f.values().col(nx - 1).setZero();
}

} // namespace

AdmmState init_state(const Lattice& lattice, const DensityPair& densities, const CostModel& cost,
                     InitScheme scheme) {
    AdmmState s(lattice);
    if (scheme == InitScheme::Zero) return s;

    const auto nt = static_cast<Eigen::Index>(lattice.nt());
    Grid& rho = s.rho.values();
    if (scheme == InitScheme::LinearMarginal) {
        for (Eigen::Index j = 0; j < nt; ++j) {
            const double t = lattice.t(static_cast<std::size_t>(j));
            rho.row(j) = ((1.0 - t) * densities.rho0() + t * densities.rho1()).transpose();
        }
        rho.row(0) = densities.rho0().transpose();
        rho.row(nt - 1) = densities.rho1().transpose();
    } else {
        const auto variance = [&](const Row& r) {
            const Row xs = lattice.x_nodes();
            const double mean = integrate_x(r * xs, lattice);
            return integrate_x(r * (xs - mean).square(), lattice);
        };
        const double spread =
            std::max(0.0, variance(densities.rho1()) - variance(densities.rho0()));
        for (Eigen::Index j = 0; j < nt; ++j) {
            const double t = lattice.t(static_cast<std::size_t>(j));
            rho.row(j) = smoothed_row(densities.rho0(), lattice, spread * t).transpose();
        }
        rho.row(0) = densities.rho0().transpose();
    }
    s.m = cost.gamma_bar() * s.rho;
    zero_boundary_columns(s.m);
    return s;
}

PhiSolution step_a(const AdmmState& state, const StepAOperator& op, const DensityPair& densities,
                   double lin_tol) {
    return solve_phi(op, build_rhs(state, densities, op.r()), lin_tol);
}

std::pair<Field, Field> step_b(const AdmmState& state, const CostModel& cost, double r,
                               std::size_t threads) {
    const Lattice& l = state.lattice();
    std::pair<Field, Field> grad = grad_txx(state.phi);
    Field& alpha = grad.first;
    Field& beta = grad.second;
    alpha += (1.0 / r) * state.rho;
    beta += (1.0 / r) * state.m;

    Field a(l);
    Field b(l);
    const std::size_t nx = l.nx();
    parallel_for(l.nt(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                try {
                    const KPoint p = project_to_k(cost, alpha(j, i), beta(j, i));
                    a(j, i) = p.a;
                    b(j, i) = p.b;
                } catch (const Error& e) {
                    std::ostringstream msg;
                    msg << e.what() << " at node (t=" << l.t(j) << ", x=" << l.x(i) << ")";
                    throw Error(e.kind(), msg.str());
                }
            }
        }
    });
    return {std::move(a), std::move(b)};
}

std::pair<Field, Field> step_c(const AdmmState& state, double r) {
    auto [gt, gxx] = grad_txx(state.phi);
    Field rho = state.rho + r * (gt - state.a);
    Field m = state.m + r * (gxx - state.b);
    return {std::move(rho), std::move(m)};
}

double residual(const AdmmState& state, const CostModel& cost) {
    const auto [gt, gxx] = grad_txx(state.phi);
    const Grid hjb = gt.values() + gxx.values().unaryExpr([&](double v) {
        return cost.conjugate(v);
    });
    return (state.rho.values() * hjb.abs()).abs().maxCoeff();
}

double primal_gap(const AdmmState& state, double rho_floor) {
    const auto [gt, gxx] = grad_txx(state.phi);
    const Grid gap =
        (gt.values() - state.a.values()).abs().max((gxx.values() - state.b.values()).abs());
    const auto selected = (state.rho.values() >= rho_floor).select(gap, 0.0);
    return selected.maxCoeff();
}

double dual_objective(const AdmmState& state, const DensityPair& densities) {
    const Lattice& l = state.lattice();
    const Row first = state.phi.row(0);
    const Row last = state.phi.row(l.nt() - 1);
    return integrate_x(first * densities.rho0() - last * densities.rho1(), l);
}

RunResult run(const SolverConfig& config, const DensityPair& densities, const CostModel& cost,
              const ProgressCallback& progress) {
    config.validate();
    const Lattice& lattice = densities.lattice();
    const std::size_t threads = resolve_threads(config.threads);

    StepAOperator op = assemble_operator(lattice, config.r);
    AdmmState state = init_state(lattice, densities, cost, config.init_scheme);
    RunReport report;
    report.residual_history.reserve(config.max_iter);

    for (std::size_t n = 1; n <= config.max_iter; ++n) {
        try {
            PhiSolution sol = step_a(state, op, densities, config.lin_tol);
            report.worst_linear_residual =
                std::max(report.worst_linear_residual, sol.relative_residual);
            state.phi = std::move(sol.phi);

            auto [a, b] = step_b(state, cost, config.r, threads);
            state.a = std::move(a);
            state.b = std::move(b);

            auto [rho, m] = step_c(state, config.r);
            state.rho = std::move(rho);
            state.m = std::move(m);

            if (!state.all_finite())
                throw Error(ErrorKind::Numeric, "non-finite value in the iterate");
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "iteration " << n << ": " << e.what();
            throw Error(e.kind(), msg.str());
        }

        const IterationRecord rec{n, residual(state, cost), primal_gap(state)};
        report.residual_history.push_back(rec);
        report.iterations_used = n;
        report.final_residual = rec.residual;
        report.primal_gap = rec.primal_gap;
        if (progress) progress(rec);
        if (rec.residual <= config.res_tol) {
            report.converged = true;
            break;
        }
    }
    report.primal_gap_masked =
        primal_gap(state, config.rho_mask_fraction * state.rho.values().maxCoeff());
    return {std::move(state), std::move(report)};
}

} // namespace mot
