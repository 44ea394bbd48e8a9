#pragma once

#include <cstddef>
#include <vector>

namespace stark {

// Uniform periodic lattice on [-L, L)^dim, n points per axis, axis 0 slowest.
class GridSpec {
public:
    GridSpec(int dim, std::size_t points_per_axis, double half_width);

    int dim() const { return dim_; }
    std::size_t points_per_axis() const { return n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return 2.0 * half_width_ / static_cast<double>(n_); }
    std::size_t size() const { return size_; }
    double cell_volume() const;
    // Lattice momentum spacing pi/L and Nyquist pi/h.
    double momentum_spacing() const;
    double nyquist() const;

    double coordinate(std::size_t i) const { return -half_width_ + static_cast<double>(i) * spacing(); }
    double wavenumber(std::size_t i) const;

    // Per-axis index of a flat index.
    void unravel(std::size_t flat, std::size_t* idx) const;

    // Flattened coordinate arrays, one per axis.
    std::vector<std::vector<double>> coordinate_axes() const;
    std::vector<std::vector<double>> wavenumber_axes() const;

    bool operator==(const GridSpec& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && half_width_ == o.half_width_;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

private:
    int dim_;
    std::size_t n_;
    double half_width_;
    std::size_t size_;
};

// Radius in momentum space outside which a state carries negligible mass.
struct MomentumCutoff {
    double eta;
    double leak_tolerance = 1e-10;
};

using Vec = std::vector<double>;

double norm2(const Vec& v);
double dot(const Vec& a, const Vec& b);

}  // namespace stark
