#include "mot/calib.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "mot/error.hpp"

namespace mot {

VolSurface extract_sigma2(const AdmmState& state, double mask_fraction) {
    if (!(mask_fraction > 0.0 && mask_fraction < 1.0)) {
        std::ostringstream msg;
        msg << "mask_fraction must lie in (0, 1) (got " << mask_fraction << ")";
        throw Error(ErrorKind::Validation, msg.str());
    }
    const Grid& rho = state.rho.values();
    const Grid& m = state.m.values();
    const double peak = rho.maxCoeff();
    if (!(peak > 0.0))
        throw Error(ErrorKind::EmptyMask, "density has no positive node; nothing to unmask");

    VolSurface s;
    s.threshold_used = mask_fraction * peak;
    s.mask = rho >= s.threshold_used;
    s.rho = state.rho;
    s.m = state.m;
    s.sigma2 = Grid::Constant(rho.rows(), rho.cols(), std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index j = 0; j < rho.rows(); ++j) {
        for (Eigen::Index i = 0; i < rho.cols(); ++i) {
            if (!s.mask(j, i)) continue;
            const double raw = 2.0 * m(j, i) / rho(j, i);
            if (raw < 0.0) ++s.clip_count;
            s.sigma2(j, i) = std::max(0.0, raw);
        }
    }
    if (!s.mask.any())
        throw Error(ErrorKind::EmptyMask, "no node reaches the density threshold");
    return s;
}

SurfaceSummary summarize(const VolSurface& surface) {
    SurfaceSummary out;
    out.clip_count = surface.clip_count;
    const auto count = surface.mask.count();
    if (count == 0) return out;
    out.unmasked_fraction = static_cast<double>(count) / static_cast<double>(surface.mask.size());
    double sum = 0.0;
    out.sigma2_min = std::numeric_limits<double>::infinity();
    out.sigma2_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < surface.sigma2.rows(); ++j) {
        for (Eigen::Index i = 0; i < surface.sigma2.cols(); ++i) {
            if (!surface.mask(j, i)) continue;
            const double v = surface.sigma2(j, i);
            sum += v;
            out.sigma2_min = std::min(out.sigma2_min, v);
            out.sigma2_max = std::max(out.sigma2_max, v);
        }
    }
    out.sigma2_mean = sum / static_cast<double>(count);
    return out;
}

} // namespace mot
