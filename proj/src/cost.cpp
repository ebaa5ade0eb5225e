#include "mot/cost.hpp"

#include <cmath>
#include <sstream>

#include "mot/error.hpp"

namespace mot {

namespace {

constexpr int max_projection_iterations = 200;
constexpr double stationarity_tol = 1e-12;
constexpr double bracket_tol = 1e-14;

} // namespace

CostModel::CostModel(double gamma_bar, CostKind kind) : gamma_bar_(gamma_bar), kind_(kind) {
    if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) {
        std::ostringstream msg;
        msg << "cost.gamma_bar must be > 0 (got " << gamma_bar << ")";
        throw Error(ErrorKind::Validation, msg.str());
    }
}

double CostModel::value(double gamma) const noexcept {
    if (gamma < 0.0) return infinity;
    const double d = gamma - gamma_bar_;
    return d * d;
}

double CostModel::derivative(double gamma) const noexcept { return 2.0 * (gamma - gamma_bar_); }

double CostModel::conjugate(double b) const noexcept {
    if (b >= kink()) return b * (gamma_bar_ + 0.25 * b);
    return -gamma_bar_ * gamma_bar_;
}

double CostModel::conjugate_slope(double b) const noexcept {
    return b >= kink() ? gamma_bar_ + 0.5 * b : 0.0;
}

double CostModel::conjugate_curvature(double b) const noexcept { return b >= kink() ? 0.5 : 0.0; }

KPoint project_to_k(const CostModel& cost, double alpha, double beta) {
    if (alpha + cost.conjugate(beta) <= k_membership_tol) return {alpha, beta};

    // Half the derivative of h. Outside K its unique zero lies in
    // [b*, beta] where F*(b*) = -alpha; g < 0 to the left of it.
    const auto g = [&](double b) {
        return (cost.conjugate(b) + alpha) * cost.conjugate_slope(b) + (b - beta);
    };
    const auto g_prime = [&](double b) {
        const double s = cost.conjugate_slope(b);
        return s * s + (cost.conjugate(b) + alpha) * cost.conjugate_curvature(b) + 1.0;
    };

    double hi = beta + 1.0;
    double lo = beta - 1.0;
    double width = 1.0;
    int iter = 0;
    while (g(lo) > 0.0) {
        if (++iter > max_projection_iterations) break;
        width *= 2.0;
        lo = beta - width;
    }

    double b = beta;
    for (; iter < max_projection_iterations; ++iter) {
        const double gb = g(b);
        if (std::abs(gb) <= stationarity_tol) return {-cost.conjugate(b), b};
        if (gb > 0.0)
            hi = b;
        else
            lo = b;
        if (hi - lo <= bracket_tol) return {-cost.conjugate(b), b};

        const double dg = g_prime(b);
        double next = b - gb / dg;
        const bool near_kink = std::abs(next - cost.kink()) <= 1e-12;
        if (!(dg > 0.0) || !(next > lo && next < hi) || near_kink) next = 0.5 * (lo + hi);
        b = next;
    }

    std::ostringstream msg;
    msg.precision(17);
    msg << "projection onto K did not converge for (alpha, beta) = (" << alpha << ", " << beta
        << ")";
    throw Error(ErrorKind::NoConvergence, msg.str());
}

} // namespace mot
