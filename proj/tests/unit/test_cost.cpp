#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"

#include "mot/cost.hpp"
#include "mot/error.hpp"

using namespace mot;

namespace {

constexpr double gbar = 0.00375;

// Maximizer of a concave function on [lo, hi] by golden-section search.
double golden_max(const std::function<double(double)>& f, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    for (int k = 0; k < 300 && hi - lo > 1e-15; ++k) {
        if (f(c) > f(d)) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - inv_phi * (hi - lo);
        d = lo + inv_phi * (hi - lo);
    }
    return 0.5 * (lo + hi);
}

// sup_g { b g - F(g) } computed directly from F.
double conjugate_oracle(double b) {
    const auto f = [b](double g) { return b * g - (g - gbar) * (g - gbar); };
    const double g = golden_max(f, 0.0, 10.0);
    return std::max(f(g), f(0.0));
}

// Nearest point of the curve a = -F*(b) to (alpha, beta), from a dense scan
// followed by a local golden-section refinement.
KPoint projection_oracle(const CostModel& cost, double alpha, double beta) {
    const auto dist2 = [&](double b) {
        const double a = -cost.conjugate(b);
        return (a - alpha) * (a - alpha) + (b - beta) * (b - beta);
    };
    double best = -1.0;
    double best_d = CostModel::infinity;
    const double step = 1e-4;
    for (double b = beta - 2.0; b <= beta + 2.0; b += step) {
        const double d = dist2(b);
        if (d < best_d) {
            best_d = d;
            best = b;
        }
    }
    const double b = golden_max([&](double s) { return -dist2(s); }, best - step, best + step);
    return {-cost.conjugate(b), b};
}

} // namespace

TEST_CASE("cost values at worked points") {
    const CostModel cost(gbar);
    CHECK(cost.value(gbar) == 0.0);
    CHECK(cost.value(0.0) == doctest::Approx(gbar * gbar));
    CHECK(cost.value(0.01) == doctest::Approx((0.01 - gbar) * (0.01 - gbar)));
    CHECK(std::isinf(cost.value(-1e-9)));
    CHECK(cost.derivative(gbar) == 0.0);
    CHECK(cost.derivative(0.01) == doctest::Approx(2.0 * (0.01 - gbar)));
    CHECK(cost.kink() == doctest::Approx(-0.0075));
}

TEST_CASE("invalid gamma_bar rejected") {
    CHECK_THROWS_AS(CostModel(0.0), Error);
    CHECK_THROWS_AS(CostModel(-1.0), Error);
    try {
        CostModel bad(0.0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
    }
}

TEST_CASE("conjugate matches a direct supremum") {
    const CostModel cost(gbar);
    // Hand-evaluated: b = 2 g_bar gives g* = 2 g_bar and F* = 3 g_bar^2;
    // the kink value is -g_bar^2.
    CHECK(conjugate_oracle(2.0 * gbar) == doctest::Approx(3.0 * gbar * gbar).epsilon(1e-9));
    CHECK(cost.conjugate(2.0 * gbar) == doctest::Approx(3.0 * gbar * gbar).epsilon(1e-14));
    CHECK(cost.conjugate(-2.0 * gbar) == doctest::Approx(-gbar * gbar).epsilon(1e-14));
    CHECK(cost.conjugate(-1.0) == doctest::Approx(-gbar * gbar).epsilon(1e-14));
    CHECK(cost.conjugate(0.0) == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 500; ++k) {
        const double b = u(rng);
        CHECK(std::abs(cost.conjugate(b) - conjugate_oracle(b)) < 1e-12);
    }
}

TEST_CASE("conjugate slope and curvature agree with finite differences") {
    const CostModel cost(gbar);
    const double h = 1e-6;
    for (double b : {-0.5, -0.01, -0.0074, 0.0, 0.003, 0.2, 1.5}) {
        const double fd = (cost.conjugate(b + h) - cost.conjugate(b - h)) / (2.0 * h);
        CHECK(cost.conjugate_slope(b) == doctest::Approx(fd).epsilon(1e-6).scale(1e-9));
        const double fd2 = (cost.conjugate_slope(b + h) - cost.conjugate_slope(b - h)) / (2.0 * h);
        CHECK(cost.conjugate_curvature(b) == doctest::Approx(fd2).epsilon(1e-6));
    }
    CHECK(cost.conjugate_slope(cost.kink()) == 0.0);
    CHECK(cost.conjugate_curvature(cost.kink()) == 0.5);
    CHECK(cost.conjugate_slope(0.0) == gbar);
}

TEST_CASE("property: biconjugate recovers F on gamma >= 0") {
    const CostModel cost(gbar);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 0.05);
    for (int k = 0; k < 1000; ++k) {
        const double g = u(rng);
        const auto f = [&](double b) { return b * g - cost.conjugate(b); };
        // The supremum is at b = F'(g) = 2 (g - g_bar).
        const double b = golden_max(f, -1.0, 1.0);
        CHECK(std::abs(f(b) - cost.value(g)) < 1e-8);
    }
    // Off the domain the biconjugate is unbounded: the objective grows
    // without limit as b -> -inf.
    const auto f = [&](double b) { return b * -0.01 - cost.conjugate(b); };
    CHECK(f(-1e6) > 1e3);
}

TEST_CASE("property: Young-Fenchel inequality with equality at the slope") {
    const CostModel cost(gbar);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ug(0.0, 0.05);
    std::uniform_real_distribution<double> ub(-0.5, 0.5);
    for (int k = 0; k < 2000; ++k) {
        const double g = ug(rng);
        const double b = ub(rng);
        CHECK(cost.value(g) + cost.conjugate(b) >= g * b - 1e-10);
        const double gstar = cost.conjugate_slope(b);
        CHECK(std::abs(cost.value(gstar) + cost.conjugate(b) - gstar * b) < 1e-10);
    }
}

TEST_CASE("projection leaves interior points alone") {
    const CostModel cost(gbar);
    const KPoint p = project_to_k(cost, -1.0, 0.1);
    CHECK(p.a == -1.0);
    CHECK(p.b == 0.1);
    const KPoint q = project_to_k(cost, -cost.conjugate(0.2), 0.2);
    CHECK(q.b == 0.2);
}

TEST_CASE("projection matches a scan oracle") {
    const CostModel cost(gbar);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int outside = 0;
    for (int k = 0; k < 200; ++k) {
        const double alpha = u(rng);
        const double beta = u(rng);
        if (alpha + cost.conjugate(beta) <= k_membership_tol) continue;
        ++outside;
        const KPoint p = project_to_k(cost, alpha, beta);
        const KPoint o = projection_oracle(cost, alpha, beta);
        CHECK(std::abs(p.a - o.a) < 1e-7);
        CHECK(std::abs(p.b - o.b) < 1e-7);
    }
    CHECK(outside > 50);
}

TEST_CASE("projection near and below the kink") {
    const CostModel cost(gbar);
    // Left of the kink the boundary is flat at a = g_bar^2, so a point just
    // above it drops straight down.
    const KPoint flat = project_to_k(cost, 0.5, -3.0);
    CHECK(flat.b == doctest::Approx(-3.0));
    CHECK(flat.a == doctest::Approx(gbar * gbar));
    for (double beta : {cost.kink(), cost.kink() + 1e-9, cost.kink() - 1e-9}) {
        const KPoint p = project_to_k(cost, 0.01, beta);
        const KPoint o = projection_oracle(cost, 0.01, beta);
        CHECK(std::abs(p.b - o.b) < 1e-7);
        CHECK(p.a + cost.conjugate(p.b) <= 1e-12);
    }
}

TEST_CASE("property: projection KKT conditions and idempotence") {
    const CostModel cost(gbar);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> small(-0.05, 0.05);
    for (int k = 0; k < 5000; ++k) {
        const bool near = k % 2 == 0;
        const double alpha = near ? small(rng) : u(rng);
        const double beta = near ? small(rng) : u(rng);
        const KPoint p = project_to_k(cost, alpha, beta);
        const double g = p.a + cost.conjugate(p.b);
        CHECK(g <= 1e-12);

        if (alpha + cost.conjugate(beta) > k_membership_tol) {
            // On the boundary, the displacement is along the outward normal
            // (1, F*'(b)) with a nonnegative multiplier.
            CHECK(std::abs(g) <= 1e-12);
            const double da = alpha - p.a;
            const double db = beta - p.b;
            CHECK(da >= -1e-12);
            CHECK(std::abs(da * cost.conjugate_slope(p.b) - db) <= 1e-6);
        }

        const KPoint pp = project_to_k(cost, p.a, p.b);
        CHECK(pp.a == doctest::Approx(p.a).epsilon(1e-12).scale(1e-12));
        CHECK(pp.b == doctest::Approx(p.b).epsilon(1e-12).scale(1e-12));
    }
}

TEST_CASE("property: projection satisfies the obtuse-angle condition") {
    const CostModel cost(gbar);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> depth(0.0, 0.5);
    for (int k = 0; k < 300; ++k) {
        const double alpha = u(rng);
        const double beta = u(rng);
        const KPoint p = project_to_k(cost, alpha, beta);
        for (int s = 0; s < 20; ++s) {
            const double b = u(rng);
            const double a = -cost.conjugate(b) - depth(rng);
            const double inner = (alpha - p.a) * (a - p.a) + (beta - p.b) * (b - p.b);
            CHECK(inner <= 1e-6);
        }
    }
}

TEST_CASE("projection is nonexpansive") {
    const CostModel cost(gbar);
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
        const KPoint p1 = project_to_k(cost, a1, b1);
        const KPoint p2 = project_to_k(cost, a2, b2);
        const double before = std::hypot(a1 - a2, b1 - b2);
        const double after = std::hypot(p1.a - p2.a, p1.b - p2.b);
        CHECK(after <= before + 1e-9);
    }
}
