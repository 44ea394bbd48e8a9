#pragma once

#include <complex>
#include <span>

#include "stark/grid.hpp"
#include "stark/spectral.hpp"

namespace stark {

// Immutable sampled state. Operations return new values.
class WaveFunction {
public:
    WaveFunction(GridSpec grid, Field amplitudes);

    const GridSpec& grid() const { return grid_; }
    const Field& amplitudes() const { return amp_; }
    double norm() const;

    WaveFunction scaled(cplx factor) const;
    WaveFunction normalized() const;

    // exp(-|x-c|^2/(2 w^2)) exp(i k.x), unit norm.
    static WaveFunction gaussian(const GridSpec& grid, double width, const Vec& center = {},
                                 const Vec& momentum = {});
    static WaveFunction from_momentum(const GridSpec& grid, Field momentum_amplitudes);

private:
    GridSpec grid_;
    Field amp_;
};

// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> xs);
cplx pairwise_sum(std::span<const cplx> xs);

// sum conj(a) b h^n.
cplx inner_product(const WaveFunction& a, const WaveFunction& b);
double distance(const WaveFunction& a, const WaveFunction& b);
WaveFunction add(const WaveFunction& a, const WaveFunction& b, cplx scale_b = 1.0);

Field momentum_amplitudes(const WaveFunction& psi);

// Spectral p_j psi for 1 <= j <= dim.
WaveFunction apply_momentum(const WaveFunction& psi, int j);

// exp(i v.x) psi; the state's momentum support shifted by v must stay below Nyquist.
WaveFunction boost(const WaveFunction& psi, const Vec& v, const MomentumCutoff& cutoff);
WaveFunction boost(const WaveFunction& psi, const Vec& v);

// exp(-i a.p) psi, i.e. psi(x - a).
WaveFunction translate(const WaveFunction& psi, const Vec& shift);

// || <x>^k psi || with <x> = sqrt(1 + |x|^2).
double weighted_norm(const WaveFunction& psi, int k);

// Mass fraction in the outer band max_a |x_a| > 0.8 L.
double boundary_mass_fraction(const GridSpec& grid, std::span<const cplx> amplitudes);
double boundary_mass_fraction(const WaveFunction& psi);
void require_interior(const GridSpec& grid, std::span<const cplx> amplitudes, const char* where,
                      double tolerance = 1e-6);

Vec position_centroid(const WaveFunction& psi);
Vec momentum_centroid(const WaveFunction& psi);

// Mass fraction with |xi| > eta, and the smallest radius leaving at most tol outside.
double momentum_mass_outside(const WaveFunction& psi, double eta);
double effective_momentum_radius(const WaveFunction& psi, double tol = 1e-10);

}  // namespace stark
