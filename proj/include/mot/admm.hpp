#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mot/cost.hpp"
#include "mot/density.hpp"
#include "mot/lattice.hpp"
#include "mot/pde.hpp"
#include "mot/state.hpp"

namespace mot {

enum class InitScheme {
    /// phi, q and mu all start at zero.
    Zero,
    /// rho linear in t between the marginals, m = rho * gamma_bar.
    LinearMarginal,
    /// rho0 smoothed by a Gaussian kernel of variance (var1 - var0) t,
    /// m = rho * gamma_bar.
    HeatKernel,
};

std::string to_string(InitScheme scheme);
/// Accepts "zero", "linear-marginal", "heat-kernel"; throws Error(Validation).
InitScheme parse_init_scheme(const std::string& name);

struct SolverConfig {
    double r = 64.0;
    std::size_t max_iter = 3000;
    double res_tol = 1e-6;
    double lin_tol = default_lin_tol;
    InitScheme init_scheme = InitScheme::Zero;
    double rho_mask_fraction = 0.01;
    /// 0 = MOT_THREADS or hardware concurrency.
    std::size_t threads = 0;

    /// Throws Error(Validation) naming the first violated constraint.
    void validate() const;
};

struct IterationRecord {
    std::size_t iteration = 0;
    double residual = 0.0;
    double primal_gap = 0.0;
};

struct RunReport {
    std::vector<IterationRecord> residual_history;
    std::size_t iterations_used = 0;
    bool converged = false;
    double final_residual = 0.0;
    /// max |grad_txx phi - q| over all nodes at the last iteration.
    double primal_gap = 0.0;
    /// Same, restricted to nodes with rho >= rho_mask_fraction * max rho.
    double primal_gap_masked = 0.0;
    double worst_linear_residual = 0.0;
};

using ProgressCallback = std::function<void(const IterationRecord&)>;

AdmmState init_state(const Lattice& lattice, const DensityPair& densities, const CostModel& cost,
                     InitScheme scheme);

/// Potential update: solves the Step-A system for the current (q, mu).
/// The state is left untouched.
PhiSolution step_a(const AdmmState& state, const StepAOperator& op, const DensityPair& densities,
                   double lin_tol = default_lin_tol);

/// Pointwise projection of grad_txx(phi) + mu / r onto K. Returns (a, b).
std::pair<Field, Field> step_b(const AdmmState& state, const CostModel& cost, double r,
                               std::size_t threads = 1);

/// Multiplier ascent: (rho, m) + r (grad_txx(phi) - q). Returns (rho, m).
std::pair<Field, Field> step_c(const AdmmState& state, double r);

/// max over nodes of rho |d_t phi + F*(d_xx phi)|.
double residual(const AdmmState& state, const CostModel& cost);

/// max over nodes of |grad_txx(phi) - q| (both components), optionally only
/// where rho >= rho_floor.
double primal_gap(const AdmmState& state, double rho_floor = -CostModel::infinity);

/// J(phi) = int [phi(0,x) rho0 - phi(1,x) rho1] dx.
double dual_objective(const AdmmState& state, const DensityPair& densities);

struct RunResult {
    AdmmState state;
    RunReport report;
};

/// Iterates A -> B -> C from init_state until residual <= res_tol or max_iter
/// sweeps. Errors from the sub-steps are rethrown with the iteration index.
RunResult run(const SolverConfig& config, const DensityPair& densities, const CostModel& cost,
              const ProgressCallback& progress = {});

} // namespace mot
