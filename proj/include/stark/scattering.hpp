#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "stark/propagators.hpp"

namespace stark {

struct NoModifier {};
// Scalar Graf phases; S is recovered as I_{G,v} (Omega_+)^* Omega_-.
struct GrafModifier {};
// Momentum-space Dollard phases built from the long range part.
struct DollardModifier {
    std::optional<PotentialSpec> long_range;
};
using Modifier = std::variant<NoModifier, GrafModifier, DollardModifier>;

struct ScatteringConfig {
    // (T_-, T_+) pairs with T_- < 0 < T_+, each |T| at least double the previous.
    std::vector<std::pair<double, double>> horizons;
    double convergence_tol = 1e-6;
    PropagationPlan plan;
    Modifier modifier = NoModifier{};

    void validate() const;
};

// Horizon pairs (-tau/|v|, tau/|v|) for the given tau values.
std::vector<std::pair<double, double>> scaled_horizons(const std::vector<double>& taus, double speed);

struct HorizonRecord {
    double t_minus;
    double t_plus;
    cplx value;
};

struct ScatteredState {
    WaveFunction state;
    std::vector<HorizonRecord> history;  // value = <Phi0, S Phi0> per horizon
    double cauchy_gap;                   // || S_k Phi0 - S_{k-1} Phi0 || for the last two horizons
    bool converged;
};

struct ScatteringElement {
    int j;
    Vec velocity;
    cplx value;
    double cauchy_gap;
    bool converged;
    std::vector<HorizonRecord> history;
};

// S_v Phi0 = lim exp(i T+ p^2/2) U(T+, T-) exp(-i T- p^2/2) Phi0 in the comoving gauge.
ScatteredState scattering_apply(const WaveFunction& phi0, const Vec& v, const ScatteringConfig& cfg);
// Same with M_{D,v}(T+)^* ... M_{D,v}(T-) around the propagator.
ScatteredState dollard_scattering_apply(const WaveFunction& phi0, const Vec& v, const ScatteringConfig& cfg);

// |v| (i [S_v, p_j] Phi0, Psi0), with the bracket linear in its first slot.
ScatteringElement commutator_element(int j, const WaveFunction& phi0, const WaveFunction& psi0, const Vec& v,
                                     const ScatteringConfig& cfg);
std::vector<ScatteringElement> commutator_elements(const std::vector<int>& js, const WaveFunction& phi0,
                                                   const WaveFunction& psi0, const Vec& v,
                                                   const ScatteringConfig& cfg);

}  // namespace stark
