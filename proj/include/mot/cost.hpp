#pragma once

#include <limits>

namespace mot {

enum class CostKind {
    /// F(g) = (g - g_bar)^2 for g >= 0, +inf for g < 0.
    QuadraticPositive,
};

/// Convex cost on the diffusion coefficient gamma = sigma^2 / 2, together
/// with its convex conjugate F*(b) = sup_g { b g - F(g) }.
///
/// For the quadratic family the supremum is attained at g* = g_bar + b/2
/// when that is nonnegative and at g* = 0 otherwise, so
///
///     F*(b) = g_bar b + b^2 / 4    for b >= -2 g_bar
///     F*(b) = -g_bar^2             for b <  -2 g_bar
///
/// F* is C^1, convex and nondecreasing; its derivative is the optimal g*.
class CostModel {
public:
    static constexpr double infinity = std::numeric_limits<double>::infinity();

    explicit CostModel(double gamma_bar, CostKind kind = CostKind::QuadraticPositive);

    CostKind kind() const noexcept { return kind_; }
    double gamma_bar() const noexcept { return gamma_bar_; }

    /// F(gamma); +infinity for gamma < 0.
    double value(double gamma) const noexcept;
    /// F'(gamma) on gamma >= 0.
    double derivative(double gamma) const noexcept;
    /// F*(b).
    double conjugate(double b) const noexcept;
    /// dF*/db; right-hand derivative at the kink b = -2 g_bar.
    double conjugate_slope(double b) const noexcept;
    /// d^2F*/db^2 (right-hand at the kink).
    double conjugate_curvature(double b) const noexcept;
    /// Location of the conjugate's kink.
    double kink() const noexcept { return -2.0 * gamma_bar_; }

private:
    double gamma_bar_;
    CostKind kind_;
};

/// A point of the dual constraint set K = { (a, b) : a + F*(b) <= 0 }.
struct KPoint {
    double a = 0.0;
    double b = 0.0;
};

/// a + F*(b) at or below this counts as inside K.
inline constexpr double k_membership_tol = 1e-12;

/// Euclidean projection of (alpha, beta) onto K.
///
/// Points already in K are returned unchanged. Otherwise the projection lies
/// on the boundary a = -F*(b) and b minimizes
///     h(b) = (F*(b) + alpha)^2 + (b - beta)^2,
/// located by Newton's method on h'(b) = 0 inside a sign-change bracket, with
/// bisection whenever a Newton step leaves the bracket. Throws
/// Error(NoConvergence) after 200 iterations.
KPoint project_to_k(const CostModel& cost, double alpha, double beta);

} // namespace mot
