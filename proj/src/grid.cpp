#include "stark/grid.hpp"

#include <cmath>
#include <numbers>

#include "stark/errors.hpp"

namespace stark {

GridSpec::GridSpec(int dim, std::size_t points_per_axis, double half_width)
    : dim_(dim), n_(points_per_axis), half_width_(half_width) {
    if (dim != 2 && dim != 3) throw InvalidInput("grid dimension must be 2 or 3");
    if (n_ < 8 || (n_ & (n_ - 1)) != 0) throw InvalidInput("points per axis must be a power of two >= 8");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InvalidInput("half width must be positive");
    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= n_;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim_); }

double GridSpec::momentum_spacing() const { return std::numbers::pi / half_width_; }

double GridSpec::nyquist() const { return std::numbers::pi / spacing(); }

double GridSpec::wavenumber(std::size_t i) const {
    const auto k = static_cast<double>(i < n_ / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n_));
    return k * momentum_spacing();
}

void GridSpec::unravel(std::size_t flat, std::size_t* idx) const {
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = flat % n_;
        flat /= n_;
    }
}

static std::vector<std::vector<double>> expand(const GridSpec& g, bool momentum) {
    std::vector<std::vector<double>> out(g.dim(), std::vector<double>(g.size()));
    std::size_t idx[3];
    for (std::size_t f = 0; f < g.size(); ++f) {
        g.unravel(f, idx);
        for (int a = 0; a < g.dim(); ++a)
            out[a][f] = momentum ? g.wavenumber(idx[a]) : g.coordinate(idx[a]);
    }
    return out;
}

std::vector<std::vector<double>> GridSpec::coordinate_axes() const { return expand(*this, false); }
std::vector<std::vector<double>> GridSpec::wavenumber_axes() const { return expand(*this, true); }

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace stark
