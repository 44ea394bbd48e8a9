#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stark/estimates.hpp"
#include "stark/fbp.hpp"
#include "stark/scattering.hpp"

namespace stark {

// One speed of the velocity sweep with the lattice used there.
struct SweepLevel {
    double speed;
    std::size_t points = 64;
    double half_width = 6.0;
    std::vector<double> taus{2.5, 5.0, 10.0};  // horizons tau / |v| (tau itself when not scaled)
    bool scale_horizons = true;
    double dt = 0.0;                           // 0: min(0.25 / |v|, kinetic limit)
};

// A level whose box keeps the freely spreading probe away from the boundary
// band up to the last horizon, with spacing at most max_spacing.
SweepLevel sized_level(double speed, double probe_width, std::vector<double> taus = {2.5, 5.0, 10.0},
                       double max_spacing = 0.3);

struct ReconstructionTask {
    CompositePotential potential;  // ground truth; only the scattering runs see it
    std::vector<double> angles;    // omega = (cos a, sin a)
    double angle_step;             // nominal fan spacing (for the inversion weights)
    std::vector<double> offsets;   // b = offset * omega_perp
    double probe_width = 0.3;      // Gaussian probe Phi0 = Psi0 centred at the origin
    std::vector<SweepLevel> levels;
    std::vector<int> axes{1, 2};
    double omega_cap = 0.95;
    double convergence_tol = 1e-4;
    double min_valid_fraction = 0.9;

    void validate() const;
};

// Fit value(v) = a + c |v|^power by least squares; a is the extrapolant.
struct Extrapolation {
    cplx value;
    cplx slope_coefficient;
    double residual;  // rms misfit of the model over the sweep
};
Extrapolation extrapolate(const std::vector<double>& speeds, const std::vector<cplx>& values, double power = -1.0);

struct Extraction {
    int j;
    Extrapolation fit;
    std::vector<double> speeds;
    std::vector<cplx> samples;
    std::vector<double> gaps;
    bool converged;
};

// Remainder power of the sweep: -1 for short range data, 3 - 8 gamma_D with a
// Dollard class long range part.
double remainder_power(const CompositePotential& v);

// The scattering setup used at one level for direction omega and impact
// parameter b (the potential is translated by b instead of the probe).
ScatteringConfig level_config(const SweepLevel& level, const CompositePotential& v, const Vec& omega, const Vec& b,
                              double convergence_tol);

std::vector<Extraction> extract_highvelocity(const std::vector<int>& axes, const Vec& omega, const Vec& b,
                                             const ReconstructionTask& task);
Extraction extract_highvelocity(int j, const Vec& omega, const Vec& b, const ReconstructionTask& task);

// Right side of the reconstruction identity: the t-integral of
//   (V_vs(x + omega t) p_j Phi0, Psi0) - (V_vs(x + omega t) Phi0, p_j Psi0)
//   + i ((d_j V_s + d_j V_l)(x + omega t) Phi0, Psi0).
cplx rhs_reference(int j, const Vec& omega, const WaveFunction& phi0, const WaveFunction& psi0,
                   const CompositePotential& v);

// Data for the inversion: g_j(omega, b) = Im(extrapolant) per (j, angle, offset).
XRayDataset assemble_xray(const ReconstructionTask& task, unsigned jobs = 1);

// |element(v) - rhs| over a velocity sweep, for one (j, omega, b).
struct IdentitySweep {
    std::vector<double> speeds;
    std::vector<cplx> elements;
    cplx rhs;
    std::vector<double> gaps;
    double peak_scale;  // max |rhs| reference scale used for relative gaps
    SlopeFit fit;       // log gap against log |v|
};
IdentitySweep identity_sweep(int j, const Vec& omega, const Vec& b, const ReconstructionTask& task,
                             double peak_scale);

}  // namespace stark
