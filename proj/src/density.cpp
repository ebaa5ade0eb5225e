#include "mot/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mot/error.hpp"

namespace mot {

namespace {

void require_row(const Eigen::Ref<const Row>& row, const Lattice& lattice, const char* name) {
    if (row.size() != static_cast<Eigen::Index>(lattice.nx())) {
        std::ostringstream msg;
        msg << name << " has " << row.size() << " values, lattice has nx=" << lattice.nx();
        throw Error(ErrorKind::InvalidDimensions, msg.str());
    }
}

} // namespace

Row normalize(const Eigen::Ref<const Row>& row, const Lattice& lattice) {
    require_row(row, lattice, "density row");
    const double mass = integrate_x(row, lattice);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw Error(ErrorKind::ZeroMass, "cannot normalize a row with non-positive mass");
    return row / mass;
}

double mean_x(const Eigen::Ref<const Row>& rho, const Lattice& lattice) {
    require_row(rho, lattice, "density row");
    return integrate_x(rho * lattice.x_nodes(), lattice);
}

Row sample_normal_pdf(const Lattice& lattice, double mean, double sd) {
    if (!(sd > 0.0)) throw Error(ErrorKind::Validation, "normal sd must be > 0");
    const double scale = 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
    Row out(static_cast<Eigen::Index>(lattice.nx()));
    for (std::size_t i = 0; i < lattice.nx(); ++i) {
        const double z = (lattice.x(i) - mean) / sd;
        out(static_cast<Eigen::Index>(i)) = scale * std::exp(-0.5 * z * z);
    }
    return out;
}

Row gaussian_density(const Lattice& lattice, double mean, double sd,
                     std::vector<std::string>* warnings) {
    Row raw = sample_normal_pdf(lattice, mean, sd);
    if ((raw < 1e-300).all())
        throw Error(ErrorKind::DegenerateDensity,
                    "normal density is numerically zero on every lattice node");
    if (warnings) {
        const auto cdf = [&](double x) {
            return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
        };
        const double inside = cdf(lattice.x_hi()) - cdf(lattice.x_lo());
        if (inside < 0.99) {
            std::ostringstream msg;
            msg << "N(" << mean << ", " << sd << "^2) has only " << inside
                << " of its mass inside [" << lattice.x_lo() << ", " << lattice.x_hi()
                << "]; the truncated density is renormalized";
            warnings->push_back(msg.str());
        }
    }
    return normalize(raw, lattice);
}

Row density_from_calls(std::span<const double> strikes, std::span<const double> prices,
                       const Lattice& lattice) {
    const std::size_t n = strikes.size();
    if (n != prices.size())
        throw Error(ErrorKind::Validation, "strike and price vectors differ in length");
    if (n < 5) {
        std::ostringstream msg;
        msg << "insufficient strikes: need at least 5, got " << n;
        throw Error(ErrorKind::InsufficientStrikes, msg.str());
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(strikes[k]) || !std::isfinite(prices[k]))
            throw Error(ErrorKind::Validation, "non-finite strike or price in option chain");
        if (k > 0 && !(strikes[k] > strikes[k - 1]))
            throw Error(ErrorKind::Validation, "strikes must be strictly increasing");
    }

    // Density at interior strikes.
    std::vector<double> ks(strikes.begin() + 1, strikes.end() - 1);
    std::vector<double> dens(n - 2);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double hl = strikes[k] - strikes[k - 1];
        const double hr = strikes[k + 1] - strikes[k];
        const double slope_l = (prices[k] - prices[k - 1]) / hl;
        const double slope_r = (prices[k + 1] - prices[k]) / hr;
        // Slope changes at the rounding level of the slopes are not convexity.
        const double jump = slope_r - slope_l;
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                             std::max(std::abs(slope_l), std::abs(slope_r));
        dens[k - 1] = jump > noise ? 2.0 * jump / (hl + hr) : 0.0;
    }

    Row out = Row::Zero(static_cast<Eigen::Index>(lattice.nx()));
    for (std::size_t i = 0; i < lattice.nx(); ++i) {
        const double x = lattice.x(i);
        if (x < ks.front() || x > ks.back()) continue;
        auto it = std::upper_bound(ks.begin(), ks.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - ks.begin());
        if (hi >= ks.size()) {
            out(static_cast<Eigen::Index>(i)) = dens.back();
            continue;
        }
        const std::size_t lo = hi - 1;
        const double w = (x - ks[lo]) / (ks[hi] - ks[lo]);
        out(static_cast<Eigen::Index>(i)) = (1.0 - w) * dens[lo] + w * dens[hi];
    }

    if (!(integrate_x(out, lattice) > 0.0))
        throw Error(ErrorKind::DegenerateDensity,
                    "all-zero density recovered from option chain (prices have no convexity)");
    return normalize(out, lattice);
}

Row call_prices_on_nodes(const Eigen::Ref<const Row>& rho, const Lattice& lattice) {
    require_row(rho, lattice, "density row");
    const Row xs = lattice.x_nodes();
    Row out(xs.size());
    for (Eigen::Index k = 0; k < xs.size(); ++k) {
        const Row payoff = (xs - xs(k)).max(0.0);
        out(k) = integrate_x(payoff * rho, lattice);
    }
    return out;
}

ConvexOrderVerdict check_convex_order(const Eigen::Ref<const Row>& rho0,
                                      const Eigen::Ref<const Row>& rho1, const Lattice& lattice) {
    const double m0 = mean_x(rho0, lattice);
    const double m1 = mean_x(rho1, lattice);
    if (std::abs(m0 - m1) > mean_tolerance) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "means differ: " << m0 << " vs " << m1;
        return {false, std::nullopt, msg.str()};
    }

    const Row c0 = call_prices_on_nodes(rho0, lattice);
    const Row c1 = call_prices_on_nodes(rho1, lattice);
    const Row excess = c0 - c1;
    Eigen::Index worst = 0;
    const double max_excess = excess.maxCoeff(&worst);
    if (max_excess > call_order_tolerance) {
        const double strike = lattice.x(static_cast<std::size_t>(worst));
        std::ostringstream msg;
        msg.precision(10);
        msg << "convex order fails at strike " << strike << ": call price under rho0 exceeds rho1 by "
            << max_excess;
        return {false, strike, msg.str()};
    }
    return {true, std::nullopt, "convex order holds"};
}

DensityPair::DensityPair(const Lattice& lattice, Row rho0, Row rho1)
    : lattice_(lattice), rho0_(std::move(rho0)), rho1_(std::move(rho1)) {
    require_row(rho0_, lattice_, "rho0");
    require_row(rho1_, lattice_, "rho1");
    if (!rho0_.allFinite() || !rho1_.allFinite() || (rho0_ < 0.0).any() || (rho1_ < 0.0).any())
        throw Error(ErrorKind::Validation, "marginal densities must be finite and nonnegative");
    for (const Row* r : {&rho0_, &rho1_}) {
        const double mass = integrate_x(*r, lattice_);
        if (std::abs(mass - 1.0) > mass_tolerance) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "marginal density has mass " << mass << ", expected 1";
            throw Error(ErrorKind::Validation, msg.str());
        }
    }
    const ConvexOrderVerdict verdict = check_convex_order(rho0_, rho1_, lattice_);
    if (!verdict.holds)
        throw Error(ErrorKind::Validation, "marginals are not in convex order: " + verdict.reason);
}

} // namespace mot
