#pragma once

#include <string>
#include <vector>

#include "stark/propagators.hpp"

namespace stark {

// Integrands of the free-evolution decay estimates (boosted frame).
enum class EstimateKind {
    VsFree,              // || V_vs(x + X) e^{-itp^2/2} Phi0 ||
    VsShortDiff,         // || (V_s(x + X) - V_s(X)) e^{-itp^2/2} Phi0 ||
    VsFreeDollard,       // as VsFree on M_{D,v}(t) Phi0
    VsShortDiffDollard,  // as VsShortDiff on M_{D,v}(t) Phi0
    VlDiffGraf,          // || (V_l(x + X) - V_l(p t + X)) e^{-itp^2/2} M_{D,v}(t) Phi0 ||, graf class
    VlDiffDollard,       // same, dollard class
};

std::string to_string(EstimateKind kind);
EstimateKind estimate_kind_from_string(const std::string& name);

struct EstimateOptions {
    double tail_fraction = 1e-4;   // extrapolated tail must fall below this share of the integral
    double core_width = 8.0;       // uniform sampling on |t| <= core_width / |v|
    double core_step = 0.05;       // spacing core_step / |v| there
    double growth = 1.04;          // geometric sampling ratio beyond the core
    double max_horizon = 1e8;
};

struct EstimateResult {
    EstimateKind kind;
    double speed;
    double value;       // trapezoid over [-T_max, T_max]
    double t_max;
    double tail_bound;  // extrapolated remainder beyond +-T_max
    std::size_t samples;
};

class EstimateIntegrand {
public:
    EstimateIntegrand(EstimateKind kind, Vec velocity, CompositePotential potential, WaveFunction phi0);
    // The integrand at time t. Times must be visited moving away from 0 on
    // each side (the Dollard phase table advances monotonically).
    double operator()(double t);

private:
    double near_field(double t, const Field& state, const Field* subtract);
    double far_field(double t, const Field& state, const Field* subtract);
    Field modified_state(double t, Field* lifted);

    EstimateKind kind_;
    Vec v_;
    CompositePotential pot_;
    WaveFunction phi0_;
    Field phi_hat_;
    std::vector<double> k2_;
    std::vector<std::vector<double>> k_;
    std::vector<std::vector<double>> x_;
    double switch_time_;
    std::unique_ptr<DollardPhaseTable> table_plus_, table_minus_;
};

EstimateResult estimate_integral(EstimateKind kind, const Vec& v, const CompositePotential& potential,
                                 const WaveFunction& phi0, const EstimateOptions& opt = {});

struct SlopeFit {
    double slope;
    double intercept;
    double r2;
    std::vector<double> residuals;
};

// Least squares log(value) = intercept + slope log|v|.
SlopeFit fit_order(const std::vector<double>& speeds, const std::vector<double>& values);

struct OrderCheck {
    double expected;
    double threshold;  // pass iff slope <= threshold (strictly below for the half-order case) and r2 >= 0.9
    bool strict;
};
OrderCheck expected_order(EstimateKind kind, const CompositePotential& potential, double eps2 = 0.0);
bool order_passes(const SlopeFit& fit, const OrderCheck& check);

struct GapProfile {
    std::vector<double> times;
    std::vector<double> gaps;
    double max_gap;
};

// || (e^{-itH} Omega_{G,v}^{sign} - U_{G,v}(t)) Phi_v || in the comoving gauge,
// started at the horizon (T_- for sign -1, T_+ for sign +1). With a long range
// part the Dollard-Graf free dynamics is used.
GapProfile corollary_gap(int sign, const Vec& v, const std::vector<double>& times, const PropagationPlan& plan,
                         double horizon, const WaveFunction& phi0);

// || <x>^k M_{D,v}(t) Phi0 || over the given (nonnegative, increasing) times.
std::vector<double> dollard_moments(const WaveFunction& phi0, const Vec& v, const PotentialSpec& vl,
                                    const std::vector<double>& times, int k);

}  // namespace stark
