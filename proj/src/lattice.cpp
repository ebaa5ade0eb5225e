#include "mot/lattice.hpp"

#include <cmath>
#include <sstream>

#include "mot/error.hpp"

namespace mot {

Lattice make_lattice(std::size_t nt, std::size_t nx, double x_lo, double x_hi) {
    if (nt < 3 || nx < 5 || !(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
        std::ostringstream msg;
        msg << "invalid lattice dimensions: nt=" << nt << " (need >= 3), nx=" << nx
            << " (need >= 5), x_lo=" << x_lo << ", x_hi=" << x_hi << " (need x_lo < x_hi)";
        throw Error(ErrorKind::InvalidDimensions, msg.str());
    }
    Lattice l;
    l.nt_ = nt;
    l.nx_ = nx;
    l.x_lo_ = x_lo;
    l.x_hi_ = x_hi;
    return l;
}

Row Lattice::x_nodes() const {
    Row xs(static_cast<Eigen::Index>(nx_));
    for (std::size_t i = 0; i < nx_; ++i) xs(static_cast<Eigen::Index>(i)) = x(i);
    return xs;
}

Field::Field(const Lattice& lattice)
    : lattice_(lattice),
      values_(Grid::Zero(static_cast<Eigen::Index>(lattice.nt()),
                         static_cast<Eigen::Index>(lattice.nx()))) {}

Field::Field(const Lattice& lattice, Grid values) : lattice_(lattice), values_(std::move(values)) {
    if (values_.rows() != static_cast<Eigen::Index>(lattice.nt()) ||
        values_.cols() != static_cast<Eigen::Index>(lattice.nx())) {
        std::ostringstream msg;
        msg << "field shape " << values_.rows() << "x" << values_.cols()
            << " does not match lattice " << lattice.nt() << "x" << lattice.nx();
        throw Error(ErrorKind::InvalidDimensions, msg.str());
    }
}

Field& Field::operator+=(const Field& o) {
    values_ += o.values_;
    return *this;
}

Field& Field::operator-=(const Field& o) {
    values_ -= o.values_;
    return *this;
}

Field& Field::operator*=(double s) {
    values_ *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field d_t(const Field& f) {
    const Lattice& l = f.lattice();
    const Grid& v = f.values();
    const auto nt = static_cast<Eigen::Index>(l.nt());
    const double inv2dt = 0.5 / l.dt();
    Grid out(v.rows(), v.cols());
    out.row(0) = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)) * inv2dt;
    for (Eigen::Index j = 1; j + 1 < nt; ++j) out.row(j) = (v.row(j + 1) - v.row(j - 1)) * inv2dt;
    out.row(nt - 1) = (3.0 * v.row(nt - 1) - 4.0 * v.row(nt - 2) + v.row(nt - 3)) * inv2dt;
    return Field(l, std::move(out));
}

Field d_xx(const Field& f) {
    const Lattice& l = f.lattice();
    const Grid& v = f.values();
    const auto nx = static_cast<Eigen::Index>(l.nx());
    const double inv_dx2 = 1.0 / (l.dx() * l.dx());
    Grid out = Grid::Zero(v.rows(), v.cols());
    out.middleCols(1, nx - 2) =
        (v.rightCols(nx - 2) - 2.0 * v.middleCols(1, nx - 2) + v.leftCols(nx - 2)) * inv_dx2;
    return Field(l, std::move(out));
}

std::pair<Field, Field> grad_txx(const Field& phi) { return {d_t(phi), d_xx(phi)}; }

Row trapezoid_weights_x(const Lattice& lattice) {
    Row w = Row::Constant(static_cast<Eigen::Index>(lattice.nx()), lattice.dx());
    w(0) *= 0.5;
    w(w.size() - 1) *= 0.5;
    return w;
}

double integrate_x(const Eigen::Ref<const Row>& row, const Lattice& lattice) {
    if (row.size() != static_cast<Eigen::Index>(lattice.nx()))
        throw Error(ErrorKind::InvalidDimensions, "row length does not match lattice nx");
    const Eigen::Index n = row.size();
    return lattice.dx() * (row.segment(1, n - 2).sum() + 0.5 * (row(0) + row(n - 1)));
}

double integrate(const Field& f) {
    const Lattice& l = f.lattice();
    const auto nt = static_cast<Eigen::Index>(l.nt());
    double total = 0.0;
    for (Eigen::Index j = 0; j < nt; ++j) {
        const double w = (j == 0 || j == nt - 1) ? 0.5 : 1.0;
        total += w * integrate_x(f.values().row(j).transpose(), l);
    }
    return total * l.dt();
}

} // namespace mot
