#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mot/lattice.hpp"

namespace mot {

inline constexpr double mass_tolerance = 1e-10;
inline constexpr double mean_tolerance = 1e-6;
inline constexpr double call_order_tolerance = 1e-9;

/// Outcome of the convex-order test. On failure `strike` holds the grid node
/// with the largest call-price violation, or is empty when the means differ.
struct ConvexOrderVerdict {
    bool holds = true;
    std::optional<double> strike;
    std::string reason;
};

/// Validated pair of marginals (rho0 at t = 0, rho1 at t = 1) on one lattice.
class DensityPair {
public:
    /// Throws Error(Validation) unless both rows are nonnegative, have unit
    /// mass, share a mean, and are in convex order.
    DensityPair(const Lattice& lattice, Row rho0, Row rho1);

    const Lattice& lattice() const noexcept { return lattice_; }
    const Row& rho0() const noexcept { return rho0_; }
    const Row& rho1() const noexcept { return rho1_; }

private:
    Lattice lattice_;
    Row rho0_;
    Row rho1_;
};

/// Raw normal pdf at the lattice nodes (no renormalization).
Row sample_normal_pdf(const Lattice& lattice, double mean, double sd);

/// Normal pdf sampled at the nodes and rescaled to unit trapezoidal mass.
/// Appends a message to `warnings` (when given) if less than 99% of the
/// normal mass lies inside [x_lo, x_hi].
Row gaussian_density(const Lattice& lattice, double mean, double sd,
                     std::vector<std::string>* warnings = nullptr);

/// Breeden-Litzenberger: the density is the second strike-derivative of the
/// call price curve. Second differences at interior strikes, negatives clipped
/// to zero, linear interpolation onto the lattice nodes (zero outside the
/// interior strike span), then renormalized.
Row density_from_calls(std::span<const double> strikes, std::span<const double> prices,
                       const Lattice& lattice);

/// Undiscounted call prices C(K) = int (x - K)^+ rho(x) dx at every lattice
/// node K, by the trapezoidal rule on the nodes.
Row call_prices_on_nodes(const Eigen::Ref<const Row>& rho, const Lattice& lattice);

/// Strassen check with call payoffs: equal means plus C0(K) <= C1(K) + 1e-9
/// at every node.
ConvexOrderVerdict check_convex_order(const Eigen::Ref<const Row>& rho0,
                                      const Eigen::Ref<const Row>& rho1, const Lattice& lattice);

/// Rescale to unit trapezoidal mass. Throws Error(ZeroMass) if the mass is
/// not positive.
Row normalize(const Eigen::Ref<const Row>& row, const Lattice& lattice);

double mean_x(const Eigen::Ref<const Row>& rho, const Lattice& lattice);

} // namespace mot
