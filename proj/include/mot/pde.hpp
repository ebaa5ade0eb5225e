#pragma once

#include <memory>

#include <Eigen/SparseCore>

#include "mot/density.hpp"
#include "mot/lattice.hpp"
#include "mot/state.hpp"

namespace mot {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete r(-d_tt + d_xxxx) for the potential update.
///
/// Unknowns are phi at every time row and every interior spatial column;
/// the boundary columns are pinned to zero. In time, the Neumann data enters
/// through a ghost row eliminated with the centered difference
/// (phi_1 - phi_-1) / (2 dt) = g, so the boundary rows of the strong-form
/// operator read 2 (phi_0 - phi_1) / dt^2. In space, phi = 0 and d_xx phi = 0
/// at both ends give the ghost value phi_-1 = -phi_1 in the 5-point
/// fourth-difference stencil.
///
/// The stored matrix is the strong form scaled by the trapezoidal time weights
/// (1/2 on the first and last rows), which makes it symmetric positive
/// definite. It is factorized once and reused by every solve.
class StepAOperator {
public:
    StepAOperator(const Lattice& lattice, double r);
    ~StepAOperator();
    StepAOperator(StepAOperator&&) noexcept;
    StepAOperator& operator=(StepAOperator&&) noexcept;

    const Lattice& lattice() const noexcept { return lattice_; }
    double r() const noexcept { return r_; }

    /// Symmetric (time-weighted) system matrix over the interior unknowns.
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    std::size_t unknowns() const noexcept;

    /// Strong-form r(-d_tt + d_xxxx) phi with homogeneous boundary data.
    /// Boundary columns of the result are zero; phi's boundary columns are
    /// ignored (treated as zero).
    Field apply(const Field& phi) const;

    /// Field <-> unknown vector over interior columns.
    Eigen::VectorXd pack(const Field& f) const;
    Field unpack(const Eigen::VectorXd& v) const;

    /// Row weights that turn the strong form into the symmetric system.
    Eigen::VectorXd weights() const;

    Eigen::VectorXd solve_packed(const Eigen::VectorXd& rhs) const;

    /// Upper bound on the 2-norm of matrix().
    double norm_estimate() const noexcept { return norm_estimate_; }

private:
    struct Factor;

    Lattice lattice_;
    double r_;
    SparseMatrix matrix_;
    double norm_estimate_ = 0.0;
    std::unique_ptr<Factor> factor_;
};

/// Assembles and factorizes the operator, then probes it: 10 random pairs must
/// satisfy |<Au,v> - <u,Av>| <= 1e-10 |u||v| and 10 random u must give
/// <Au,u> > 0. Throws Error(Assembly) on failure.
StepAOperator assemble_operator(const Lattice& lattice, double r);

/// Strong-form right-hand side: d_t(rho - r a) - d_xx(m - r b) with the flux
/// term zeroed on the spatial boundary, plus the Neumann data
///     r d_t phi(0) = rho0 - rho(0) + r a(0),  r d_t phi(1) = rho1 - rho(1) + r a(1)
/// folded into the first and last rows by ghost elimination.
struct StepARhs {
    Field values;
};

StepARhs build_rhs(const AdmmState& state, const DensityPair& densities, double r);

struct PhiSolution {
    Field phi;
    /// |A phi - rhs| / |rhs| in the symmetric (time-weighted) system.
    double relative_residual = 0.0;
    /// |A phi - rhs| / (|A| |phi| + |rhs|).
    double backward_error = 0.0;
    int refinement_steps = 0;
};

inline constexpr double default_lin_tol = 1e-10;

/// Solves the weighted system for phi (boundary columns exactly zero) with the
/// stored factorization plus iterative refinement until
/// |A phi - rhs| / |rhs| <= lin_tol. On fine grids |A| is large enough that
/// this can sit below the double-precision floor; once refinement stagnates
/// the solve is accepted if the normwise backward error is <= lin_tol.
/// Throws Error(LinearSolver) otherwise.
PhiSolution solve_phi(const StepAOperator& op, const StepARhs& rhs,
                      double lin_tol = default_lin_tol);

} // namespace mot
