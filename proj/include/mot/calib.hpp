#pragma once

#include <cstddef>

#include "mot/lattice.hpp"
#include "mot/state.hpp"

namespace mot {

inline constexpr double default_mask_fraction = 0.01;

/// Local variance sigma^2 = 2 m / rho where the density is reliable.
struct VolSurface {
    /// Variance per unit time; NaN where masked.
    Grid sigma2;
    /// true = reliable (rho >= threshold).
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mask;
    Field rho;
    Field m;
    double threshold_used = 0.0;
    /// Unmasked nodes whose raw 2 m / rho was negative and got clipped to 0.
    std::size_t clip_count = 0;

    bool reliable(std::size_t j, std::size_t i) const { return mask(j, i); }
};

/// Threshold = mask_fraction * max rho; unmasked nodes get max(0, 2 m / rho).
/// Throws Error(Validation) for mask_fraction outside (0,1) and
/// Error(EmptyMask) if no node reaches the threshold.
VolSurface extract_sigma2(const AdmmState& state, double mask_fraction = default_mask_fraction);

struct SurfaceSummary {
    double unmasked_fraction = 0.0;
    double sigma2_mean = 0.0;
    double sigma2_min = 0.0;
    double sigma2_max = 0.0;
    std::size_t clip_count = 0;
};

SurfaceSummary summarize(const VolSurface& surface);

} // namespace mot
