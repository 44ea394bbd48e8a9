#pragma once

#include <variant>
#include <vector>

#include "stark/potentials.hpp"
#include "stark/wavefunction.hpp"

namespace stark {

struct LabGauge {};
struct ComovingGauge {
    Vec velocity;
};
using Gauge = std::variant<LabGauge, ComovingGauge>;

// Fixed-step second-order Strang splitting: half potential phase, exact
// kinetic step, half potential phase; potential phases are taken at the
// step boundaries.
struct PropagationPlan {
    GridSpec grid;
    double dt;
    CompositePotential potential;
    Gauge gauge = LabGauge{};

    // dt * kmax^2 / 2 < pi, features resolved by at least two cells, matching dimensions.
    void validate() const;
    // Largest admissible step for this grid: 0.9 * 2 pi / kmax^2.
    static double kinetic_step_limit(const GridSpec& grid);
};

// Comoving trajectory X(t) = v t + e_1 t^2 / 2 of the boosted free Stark flow.
Vec stark_trajectory(const Vec& v, double t);

// exp(-i t p^2/2) psi, exact on the lattice.
WaveFunction free_kinetic_propagate(const WaveFunction& psi, double t);

// exp(-i t H0) psi with H0 = p^2/2 - x_1, by the exact factorisation
// exp(-i t^3/6) exp(i t x_1) exp(-i t^2 p_1 / 2) exp(-i t p^2/2).
WaveFunction free_stark_propagate(const WaveFunction& psi, double t);

// u(t1) from u(t0) for i du/dt = (p^2/2 + V(x + X(t))) u.
WaveFunction comoving_full_propagate(const WaveFunction& u, const Vec& v, double t0, double t1,
                                     const PropagationPlan& plan);
std::vector<WaveFunction> comoving_full_propagate(const std::vector<WaveFunction>& states, const Vec& v, double t0,
                                                  double t1, const PropagationPlan& plan);

// Lab frame i dpsi/dt = (p^2/2 - x_1 + V) psi with the same splitting.
WaveFunction lab_frame_propagate(const WaveFunction& psi, double t0, double t1, const PropagationPlan& plan);

// Lab state T(t) u for a comoving state u at time t.
WaveFunction comoving_to_lab(const WaveFunction& u, const Vec& v, double t);

// In-place batch evolution on raw position amplitudes.
class ComovingStepper {
public:
    ComovingStepper(const PropagationPlan& plan, Vec velocity);
    void propagate(const std::vector<Field*>& states, double t0, double t1) const;
    std::size_t steps_between(double t0, double t1) const;

private:
    void potential_phase(const std::vector<Field*>& states, double t, double weight, std::vector<double>& vbuf,
                         Field& phase) const;
    PropagationPlan plan_;
    Vec velocity_;
};

// theta(xi, t) = int_0^t V_l(xi tau + e_1 tau^2/2) dtau.
double dollard_phase(const Vec& xi, double t, const PotentialSpec& vl);

// Phases theta(xi + v, t) over the momentum lattice, advanced monotonically
// away from t = 0 in additive segments. Lattice points outside the mask keep
// phase 0.
class DollardPhaseTable {
public:
    DollardPhaseTable(const GridSpec& grid, Vec velocity, PotentialSpec vl, std::vector<char> mask = {});
    // Moves to time t (same sign as, and not closer to 0 than, the current time).
    const std::vector<double>& advance(double t);
    const std::vector<double>& phases() const { return phase_; }
    double time() const { return time_; }

private:
    GridSpec grid_;
    Vec velocity_;
    PotentialSpec vl_;
    std::vector<std::size_t> active_;
    std::vector<std::vector<double>> xi_;
    std::vector<double> phase_;
    double time_ = 0.0;
};

// M_{D,v}(t) psi = exp(-i theta(p + v, t)) psi.
WaveFunction apply_dollard_modifier(const WaveFunction& psi, double t, const PotentialSpec& vl, const Vec& v);
void apply_momentum_phase(Field& amplitudes, const GridSpec& grid, const std::vector<double>& phase, double sign);

// Scalar phase int_0^t V_s(v tau + e_1 tau^2/2) dtau and its limits t -> +-inf.
double graf_phase(const Vec& v, double t, const PotentialSpec& vs);

struct GrafLimit {
    double phase;
    double tail_bound;
    double horizon;
};
GrafLimit graf_phase_limit(const Vec& v, int sign, const PotentialSpec& vs, double tol = 1e-10);
// I_{G,v} = I_+ conj(I_-), I_pm = exp(-i theta_pm).
cplx graf_limit_factor(const Vec& v, const PotentialSpec& vs, double tol = 1e-10);

}  // namespace stark
