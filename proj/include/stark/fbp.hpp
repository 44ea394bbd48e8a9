#pragma once

#include <string>
#include <vector>

#include "stark/grid.hpp"
#include "stark/potentials.hpp"

namespace stark {

// One sample of the line-integral data of d_j V: the line through
// b = offset * omega_perp with direction omega = (cos angle, sin angle),
// omega_perp = (-sin angle, cos angle).
struct XRayEntry {
    int j;
    double omega_angle;
    double offset;
    Vec b;
    double value;
    double residual = 0.0;
    bool converged = true;
};

struct XRayDataset {
    std::vector<XRayEntry> entries;
    double angle_step;          // nominal spacing of the direction fan over [0, pi)
    double omega_cap = 1.0;     // directions with |omega . e_1| > cap are absent
    double probe_width = 0.0;   // Gaussian probe width the data are smeared with (0: none)

    std::vector<double> angles() const;
    std::vector<double> offsets() const;
    std::size_t flagged() const;
};

// Direction fan k pi / count, k = 0..count-1, without the cone |omega . e_1| > cap.
std::vector<double> direction_fan(std::size_t count, double omega_cap);
Vec direction(double angle);
Vec normal(double angle);

// Dataset from the analytic line integrals of the smooth parts, optionally
// convolved with the density of a Gaussian probe of the given width.
XRayDataset oracle_dataset(const CompositePotential& v, const std::vector<double>& angles,
                           const std::vector<double>& offsets, double angle_step, double omega_cap,
                           double probe_width = 0.0, const std::vector<int>& axes = {1, 2});

struct FbpOptions {
    double max_missing_fraction = 0.25;  // above this a limited-angle warning is attached
    // Known support radius for the limited-angle completion; 0 disables it.
    double support_radius = 0.0;
    int completion_iterations = 400;
};

struct FbpResult {
    GridSpec grid;
    std::vector<double> values;                  // V_rec
    std::vector<std::vector<double>> gradient;   // D_j, one per axis
    double missing_fraction;
    std::vector<std::string> warnings;
};

// Ramp-filtered backprojection of each axis, then the spectral anti-gradient
// with the constant fixed by V_rec = 0 at the box corners.
FbpResult invert_fbp(const XRayDataset& data, const GridSpec& grid, const FbpOptions& options = {});

// V sampled on the grid, optionally convolved with a Gaussian probe density.
std::vector<double> sample_potential(const CompositePotential& v, const GridSpec& grid, double probe_width = 0.0);

// ||a - b|| / ||b|| over the disk |x| <= radius.
double relative_l2_error(const std::vector<double>& a, const std::vector<double>& b, const GridSpec& grid,
                         double radius);
double l2_norm_inside(const std::vector<double>& a, const GridSpec& grid, double radius);

}  // namespace stark
