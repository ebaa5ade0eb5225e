#include "mot/pde.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/SparseCholesky>

#include "mot/error.hpp"

namespace mot {

struct StepAOperator::Factor {
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

namespace {

constexpr int max_refinement_steps = 8;
constexpr int probe_count = 10;
constexpr double symmetry_tol = 1e-10;

} // namespace

StepAOperator::StepAOperator(const Lattice& lattice, double r)
    : lattice_(lattice), r_(r), factor_(std::make_unique<Factor>()) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        std::ostringstream msg;
        msg << "solver.r must be > 0 (got " << r << ")";
        throw Error(ErrorKind::Validation, msg.str());
    }
    const auto nt = static_cast<int>(lattice.nt());
    const auto ni = static_cast<int>(lattice.nx()) - 2;
    const double inv_dt2 = 1.0 / (lattice.dt() * lattice.dt());
    const double dx = lattice.dx();
    const double inv_dx4 = 1.0 / (dx * dx * dx * dx);
    const int n = nt * ni;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 8);
    const auto idx = [ni](int j, int i) { return j * ni + i; };

    for (int j = 0; j < nt; ++j) {
        const bool edge = (j == 0 || j == nt - 1);
        const double w = edge ? 0.5 : 1.0;
        for (int i = 0; i < ni; ++i) {
            const int row = idx(j, i);
            // -d_tt with Neumann ghosts eliminated.
            if (edge) {
                const int other = j == 0 ? 1 : nt - 2;
                triplets.emplace_back(row, row, r * w * 2.0 * inv_dt2);
                triplets.emplace_back(row, idx(other, i), -r * w * 2.0 * inv_dt2);
            } else {
                triplets.emplace_back(row, row, r * 2.0 * inv_dt2);
                triplets.emplace_back(row, idx(j - 1, i), -r * inv_dt2);
                triplets.emplace_back(row, idx(j + 1, i), -r * inv_dt2);
            }
            // d_xxxx with simply supported ends: ghost = -(first interior).
            const double c = r * w * inv_dx4;
            const double diag = (i == 0 || i == ni - 1) ? 5.0 : 6.0;
            triplets.emplace_back(row, row, c * diag);
            if (i - 1 >= 0) triplets.emplace_back(row, idx(j, i - 1), -4.0 * c);
            if (i + 1 < ni) triplets.emplace_back(row, idx(j, i + 1), -4.0 * c);
            if (i - 2 >= 0) triplets.emplace_back(row, idx(j, i - 2), c);
            if (i + 2 < ni) triplets.emplace_back(row, idx(j, i + 2), c);
        }
    }
    matrix_.resize(n, n);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();

    // Frobenius norm bounds the spectral norm used in the backward error.
    norm_estimate_ = matrix_.norm();

    factor_->ldlt.compute(matrix_);
    if (factor_->ldlt.info() != Eigen::Success)
        throw Error(ErrorKind::Assembly, "factorization of the potential operator failed");
}

StepAOperator::~StepAOperator() = default;
StepAOperator::StepAOperator(StepAOperator&&) noexcept = default;
StepAOperator& StepAOperator::operator=(StepAOperator&&) noexcept = default;

std::size_t StepAOperator::unknowns() const noexcept {
    return lattice_.nt() * (lattice_.nx() - 2);
}

Eigen::VectorXd StepAOperator::weights() const {
    const auto ni = static_cast<Eigen::Index>(lattice_.nx() - 2);
    const auto nt = static_cast<Eigen::Index>(lattice_.nt());
    Eigen::VectorXd w = Eigen::VectorXd::Ones(nt * ni);
    w.head(ni).setConstant(0.5);
    w.tail(ni).setConstant(0.5);
    return w;
}

Eigen::VectorXd StepAOperator::pack(const Field& f) const {
    const auto ni = static_cast<Eigen::Index>(lattice_.nx() - 2);
    const auto nt = static_cast<Eigen::Index>(lattice_.nt());
    Eigen::VectorXd v(nt * ni);
    for (Eigen::Index j = 0; j < nt; ++j)
        v.segment(j * ni, ni) = f.values().row(j).segment(1, ni).transpose();
    return v;
}

Field StepAOperator::unpack(const Eigen::VectorXd& v) const {
    const auto ni = static_cast<Eigen::Index>(lattice_.nx() - 2);
    const auto nt = static_cast<Eigen::Index>(lattice_.nt());
    Field f(lattice_);
    for (Eigen::Index j = 0; j < nt; ++j)
        f.values().row(j).segment(1, ni) = v.segment(j * ni, ni).transpose();
    return f;
}

Field StepAOperator::apply(const Field& phi) const {
    const Eigen::VectorXd y = (matrix_ * pack(phi)).cwiseQuotient(weights());
    return unpack(y);
}

Eigen::VectorXd StepAOperator::solve_packed(const Eigen::VectorXd& rhs) const {
    return factor_->ldlt.solve(rhs);
}

StepAOperator assemble_operator(const Lattice& lattice, double r) {
    StepAOperator op(lattice, r);
    const auto n = static_cast<Eigen::Index>(op.unknowns());
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto random_vector = [&] {
        Eigen::VectorXd v(n);
        for (Eigen::Index k = 0; k < n; ++k) v(k) = unit(rng);
        return v;
    };
    const SparseMatrix& a = op.matrix();
    for (int probe = 0; probe < probe_count; ++probe) {
        const Eigen::VectorXd u = random_vector();
        const Eigen::VectorXd v = random_vector();
        const Eigen::VectorXd au = a * u;
        const Eigen::VectorXd av = a * v;
        // Scale by |A| so the check is about asymmetry, not magnitude.
        const double scale = au.norm() * v.norm() + u.norm() * av.norm();
        const double asym = std::abs(au.dot(v) - u.dot(av));
        if (asym > symmetry_tol * scale)
            throw Error(ErrorKind::Assembly, "potential operator failed the symmetry probe");
        if (!(au.dot(u) > 0.0))
            throw Error(ErrorKind::Assembly, "potential operator failed the positivity probe");
    }
    return op;
}

StepARhs build_rhs(const AdmmState& state, const DensityPair& densities, double r) {
    const Lattice& l = state.lattice();
    const auto nt = static_cast<Eigen::Index>(l.nt());
    const auto nx = static_cast<Eigen::Index>(l.nx());

    Field flux = state.m - r * state.b;
    flux.values().col(0).setZero();
    flux.values().col(nx - 1).setZero();

    Field rhs = d_t(state.rho - r * state.a) - d_xx(flux);

    const double scale = 2.0 / l.dt();
    const Grid& rho = state.rho.values();
    const Grid& a = state.a.values();
    rhs.values().row(0) -=
        scale * (densities.rho0().transpose() - rho.row(0) + r * a.row(0));
    rhs.values().row(nt - 1) +=
        scale * (densities.rho1().transpose() - rho.row(nt - 1) + r * a.row(nt - 1));
    return {std::move(rhs)};
}

PhiSolution solve_phi(const StepAOperator& op, const StepARhs& rhs, double lin_tol) {
    if (!(rhs.values.lattice() == op.lattice()))
        throw Error(ErrorKind::InvalidDimensions, "right-hand side and operator lattices differ");
    const Eigen::VectorXd b = op.pack(rhs.values).cwiseProduct(op.weights());
    const double b_norm = b.norm();
    if (b_norm == 0.0) return {Field(op.lattice()), 0.0, 0.0, 0};

    Eigen::VectorXd x = op.solve_packed(b);
    Eigen::VectorXd res = b - op.matrix() * x;
    double rel = res.norm() / b_norm;
    int steps = 0;
    while (rel > lin_tol && steps < max_refinement_steps) {
        Eigen::VectorXd candidate = x + op.solve_packed(res);
        Eigen::VectorXd candidate_res = b - op.matrix() * candidate;
        const double next = candidate_res.norm() / b_norm;
        ++steps;
        if (!(next < rel)) break;  // stagnated at the rounding floor
        x = std::move(candidate);
        res = std::move(candidate_res);
        rel = next;
    }
    const double backward = res.norm() / (op.norm_estimate() * x.norm() + b_norm);
    if (!(rel <= lin_tol) && !(backward <= lin_tol)) {
        std::ostringstream msg;
        msg << "potential solve reached relative residual " << rel << " (backward error "
            << backward << ") > lin_tol " << lin_tol;
        throw Error(ErrorKind::LinearSolver, msg.str());
    }
    return {op.unpack(x), rel, backward, steps};
}

} // namespace mot
