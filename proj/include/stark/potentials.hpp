#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stark/grid.hpp"

namespace stark {

// Decay classes. Exponents of the envelope |d^b V| <= C_b <x>^{-e_b}:
//   very short: e_0 = 2 (a sufficient condition for the integrable-tail class)
//   short:      e_0 = gamma, e_1 = 1 + alpha
//   graf:       e_b = gamma + kappa |b|
//   dollard:    e_b = gamma + |b|/2  (both the narrow and the wide range)
struct VeryShortRange {};
struct ShortRange {
    double gamma;
    double alpha;
};
struct GrafRange {
    double gamma;
    double kappa;
};
struct DollardRange {
    double gamma;
};
struct DollardWideRange {
    double gamma;
};
using PotentialClassTag = std::variant<VeryShortRange, ShortRange, GrafRange, DollardRange, DollardWideRange>;

void check_class(const PotentialClassTag& tag);
std::array<std::optional<double>, 3> decay_exponents(const PotentialClassTag& tag);
std::string describe(const PotentialClassTag& tag);
bool is_long_range(const PotentialClassTag& tag);

class PotentialModel {
public:
    virtual ~PotentialModel() = default;
    virtual double value(const double* x, int dim) const = 0;
    virtual void gradient(const double* x, int dim, double* g) const = 0;
    virtual bool identically_zero() const { return false; }
    // Smallest length scale of the profile (0 when smooth on unit scale).
    virtual double feature_scale() const { return 0.0; }
};

// Immutable potential with its class tag and fitted envelope constants.
class PotentialSpec {
public:
    PotentialSpec(std::string kind, std::shared_ptr<const PotentialModel> model, PotentialClassTag tag,
                  int dim = 2);

    static PotentialSpec zero(int dim = 2);

    const std::string& kind() const { return kind_; }
    const PotentialClassTag& tag() const { return tag_; }
    int dim() const { return dim_; }
    bool is_zero() const { return model_->identically_zero(); }
    double feature_scale() const { return model_->feature_scale(); }
    const std::array<std::optional<double>, 3>& envelope_constants() const { return constants_; }

    double value(const double* x) const { return model_->value(x, dim_); }
    double value(const Vec& x) const { return model_->value(x.data(), dim_); }
    void gradient(const double* x, double* g) const { model_->gradient(x, dim_, g); }
    double partial(const Vec& x, int j) const;
    // Largest |second partial| by central differences of the gradient.
    double hessian_max(const double* x) const;

    // Same profile under another class tag; envelope constants are refitted.
    PotentialSpec with_class(PotentialClassTag tag) const;
    // x -> V(x + offset).
    PotentialSpec shifted(const Vec& offset) const;

    // out[i] = V(x_i + shift) on every lattice point.
    void sample(const GridSpec& grid, const double* shift, double* out) const;
    void add_sample(const GridSpec& grid, const double* shift, double* out) const;
    // out[i] = d_j V(x_i + shift), 1 <= j <= dim.
    void add_partial_sample(const GridSpec& grid, const double* shift, int j, double* out) const;

private:
    std::string kind_;
    std::shared_ptr<const PotentialModel> model_;
    PotentialClassTag tag_;
    int dim_;
    std::array<std::optional<double>, 3> constants_;
};

// V = V_vs + V_s + V_l, each part optional.
struct CompositePotential {
    std::optional<PotentialSpec> very_short;
    std::optional<PotentialSpec> short_range;
    std::optional<PotentialSpec> long_range;

    void check() const;
    bool is_zero() const;
    int dim() const;
    double value(const double* x) const;
    // Short-type part V_vs + V_s.
    double short_value(const double* x) const;
    double smallest_feature() const;
    std::vector<const PotentialSpec*> parts() const;
    CompositePotential shifted(const Vec& offset) const;
    void add_sample(const GridSpec& grid, const double* shift, double* out) const;
};

// Phantom catalogue.
//   gaussian_bump      [amplitude, width]                  A exp(-|x|^2/w^2)
//   smoothed_coulomb   [strength, core, (r_in, r_out)]     K (|x|^2+core^2)^(-1/2) with smooth cutoff
//   power_tail_short   [gamma, alpha, amplitude]
//   power_tail_graf    [gamma, kappa, amplitude]           c <x>^-gamma
//   power_tail_dollard [gamma, amplitude]                  c <x>^-gamma (1 + sin(<x>^(1/2))/4)
//   anisotropic_bump   [amplitude, w1, w2, (c1, c2)]
PotentialSpec make_phantom(const std::string& kind, const std::vector<double>& params, int dim = 2);

struct DecayReport {
    std::array<std::optional<double>, 3> max_ratio;
    std::array<std::optional<double>, 3> constants;
    double max_radius = 0.0;
    std::size_t samples = 0;
    bool pass = false;
    std::string detail;
};

// Samples radii log-spaced over [0, max_radius] and compares |d^b V| <x>^{e_b}
// against the envelope constants of the potential's class tag.
DecayReport validate_decay(const PotentialSpec& v, std::size_t samples = 1024, double max_radius = 200.0);

// Line integrals over x(t) = y + t omega, |omega| = 1.
double xray_transform(const PotentialSpec& v, const Vec& omega, const Vec& y);
double xray_transform(const CompositePotential& v, const Vec& omega, const Vec& y);
double xray_gradient_transform(const PotentialSpec& v, int j, const Vec& omega, const Vec& y);
double xray_gradient_transform(const CompositePotential& v, int j, const Vec& omega, const Vec& y);

void check_direction(const Vec& omega, int dim);

}  // namespace stark
