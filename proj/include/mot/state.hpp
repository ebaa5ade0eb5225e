#pragma once

#include "mot/lattice.hpp"

namespace mot {

/// ADMM iterate: the potential phi, the pair q = (a, b) constrained to K, and
/// the multiplier mu = (rho, m) with m = rho * gamma.
struct AdmmState {
    Field phi;
    Field a;
    Field b;
    Field rho;
    Field m;

    explicit AdmmState(const Lattice& lattice)
        : phi(lattice), a(lattice), b(lattice), rho(lattice), m(lattice) {}

    const Lattice& lattice() const noexcept { return phi.lattice(); }

    bool all_finite() const {
        return phi.all_finite() && a.all_finite() && b.all_finite() && rho.all_finite() &&
               m.all_finite();
    }
};

} // namespace mot
