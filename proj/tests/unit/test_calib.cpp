#include <cmath>
#include <random>

#include "doctest.h"

#include "mot/calib.hpp"
#include "mot/error.hpp"

using namespace mot;

namespace {

AdmmState state_with(const Lattice& l, const Grid& rho, const Grid& m) {
    AdmmState s(l);
    s.rho = Field(l, rho);
    s.m = Field(l, m);
    return s;
}

} // namespace

TEST_CASE("sigma2 is twice m over rho on reliable nodes") {
    const Lattice l = make_lattice(3, 5, 0.0, 1.0);
    Grid rho = Grid::Constant(3, 5, 2.0);
    Grid m = Grid::Constant(3, 5, 0.0075);
    rho(1, 2) = 0.01;   // below 1% of the peak 2.0 -> masked
    m(2, 3) = -0.001;   // negative m -> clipped
    const VolSurface s = extract_sigma2(state_with(l, rho, m), 0.01);
    CHECK(s.threshold_used == doctest::Approx(0.02));
    CHECK(s.sigma2(0, 0) == doctest::Approx(0.0075));
    CHECK_FALSE(s.reliable(1, 2));
    CHECK(std::isnan(s.sigma2(1, 2)));
    CHECK(s.reliable(2, 3));
    CHECK(s.sigma2(2, 3) == 0.0);
    CHECK(s.clip_count == 1);

    const SurfaceSummary sum = summarize(s);
    CHECK(sum.unmasked_fraction == doctest::Approx(14.0 / 15.0));
    CHECK(sum.sigma2_min == 0.0);
    CHECK(sum.sigma2_max == doctest::Approx(0.0075));
    CHECK(sum.sigma2_mean == doctest::Approx(0.0075 * 13.0 / 14.0));
    CHECK(sum.clip_count == 1);
}

TEST_CASE("threshold is inclusive and tracks the mask fraction") {
    const Lattice l = make_lattice(3, 5, 0.0, 1.0);
    Grid rho = Grid::Constant(3, 5, 1.0);
    rho(0, 0) = 0.1;
    const Grid m = Grid::Constant(3, 5, 0.01);
    CHECK(extract_sigma2(state_with(l, rho, m), 0.1).reliable(0, 0));
    CHECK_FALSE(extract_sigma2(state_with(l, rho, m), 0.11).reliable(0, 0));
}

TEST_CASE("property: sigma2 is invariant under a common rescaling of rho and m") {
    const Lattice l = make_lattice(6, 9, 0.0, 1.0);
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        Grid rho(6, 9), m(6, 9);
        for (Eigen::Index k = 0; k < rho.size(); ++k) {
            rho(k) = u(rng);
            m(k) = 0.01 * (u(rng) - 0.2);
        }
        const double c = scale(rng);
        const VolSurface a = extract_sigma2(state_with(l, rho, m), 0.05);
        const VolSurface b = extract_sigma2(state_with(l, c * rho, c * m), 0.05);
        CHECK((a.mask == b.mask).all());
        CHECK(a.clip_count == b.clip_count);
        for (Eigen::Index k = 0; k < rho.size(); ++k) {
            if (!a.mask(k)) continue;
            CHECK(b.sigma2(k) == doctest::Approx(a.sigma2(k)).epsilon(1e-12));
            CHECK(a.sigma2(k) >= 0.0);
        }
    }
}

TEST_CASE("invalid mask fraction and empty density") {
    const Lattice l = make_lattice(3, 5, 0.0, 1.0);
    const AdmmState ok = state_with(l, Grid::Ones(3, 5), Grid::Zero(3, 5));
    for (double bad : {0.0, 1.0, -0.5, 2.0}) {
        try {
            extract_sigma2(ok, bad);
            FAIL("expected a validation error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Validation);
        }
    }
    try {
        extract_sigma2(state_with(l, Grid::Zero(3, 5), Grid::Zero(3, 5)));
        FAIL("expected an empty mask");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyMask);
        CHECK_FALSE(e.is_input_error());
    }
}
