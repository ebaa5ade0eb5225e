#pragma once

#include <cstddef>
#include <utility>

#include <Eigen/Core>

namespace mot {

/// Row-major nt x nx array: row j is the time slice t_j, column i the node x_i.
using Grid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One spatial slice (length nx).
using Row = Eigen::ArrayXd;

/// Uniform space-time discretization of [0,1] x [x_lo, x_hi]. Node counts
/// include both endpoints on each axis.
class Lattice {
public:
    Lattice() = default;

    std::size_t nt() const noexcept { return nt_; }
    std::size_t nx() const noexcept { return nx_; }
    double x_lo() const noexcept { return x_lo_; }
    double x_hi() const noexcept { return x_hi_; }
    double dt() const noexcept { return 1.0 / static_cast<double>(nt_ - 1); }
    double dx() const noexcept { return (x_hi_ - x_lo_) / static_cast<double>(nx_ - 1); }
    double length() const noexcept { return x_hi_ - x_lo_; }

    double t(std::size_t j) const noexcept { return static_cast<double>(j) * dt(); }
    double x(std::size_t i) const noexcept {
        // Pin the last node so x(nx-1) == x_hi exactly.
        return i + 1 == nx_ ? x_hi_ : x_lo_ + static_cast<double>(i) * dx();
    }

    Row x_nodes() const;

    bool operator==(const Lattice&) const = default;

    friend Lattice make_lattice(std::size_t nt, std::size_t nx, double x_lo, double x_hi);

private:
    std::size_t nt_ = 0;
    std::size_t nx_ = 0;
    double x_lo_ = 0.0;
    double x_hi_ = 1.0;
};

/// Throws Error(InvalidDimensions) unless nt >= 3, nx >= 5 and x_lo < x_hi.
Lattice make_lattice(std::size_t nt, std::size_t nx, double x_lo, double x_hi);

/// A real-valued function sampled at every lattice node.
class Field {
public:
    Field() = default;
    explicit Field(const Lattice& lattice);
    Field(const Lattice& lattice, Grid values);

    template <class Fn>
    static Field from_function(const Lattice& lattice, Fn&& fn) {
        Field f(lattice);
        for (std::size_t j = 0; j < lattice.nt(); ++j)
            for (std::size_t i = 0; i < lattice.nx(); ++i)
                f.values_(j, i) = fn(lattice.t(j), lattice.x(i));
        return f;
    }

    const Lattice& lattice() const noexcept { return lattice_; }
    const Grid& values() const noexcept { return values_; }
    Grid& values() noexcept { return values_; }

    double operator()(std::size_t j, std::size_t i) const { return values_(j, i); }
    double& operator()(std::size_t j, std::size_t i) { return values_(j, i); }

    Row row(std::size_t j) const { return values_.row(static_cast<Eigen::Index>(j)).transpose(); }

    bool all_finite() const { return values_.allFinite(); }

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);

private:
    Lattice lattice_;
    Grid values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Time derivative: central differences inside, second-order one-sided at
/// t = 0 and t = 1. Exact on quadratics in t.
Field d_t(const Field& f);

/// Spatial second difference: 3-point stencil at interior nodes, zero on the
/// two boundary columns.
Field d_xx(const Field& f);

/// (d_t(phi), d_xx(phi)).
std::pair<Field, Field> grad_txx(const Field& phi);

/// Trapezoidal rule over [0,1] x [x_lo, x_hi].
double integrate(const Field& f);

/// Trapezoidal rule in x over one slice; row.size() must equal nx.
double integrate_x(const Eigen::Ref<const Row>& row, const Lattice& lattice);

/// Trapezoidal weights for the spatial rule (dx/2 at the ends, dx inside).
Row trapezoid_weights_x(const Lattice& lattice);

} // namespace mot
