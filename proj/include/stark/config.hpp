#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stark/potentials.hpp"

namespace stark {

enum class Command { Simulate, Scatter, Estimate, Reconstruct, Validate };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

struct ClassConfig {
    std::string name;  // very_short | short | graf | dollard | dollard_wide
    double gamma = 0.0;
    double alpha = 0.0;
    double kappa = 0.0;

    PotentialClassTag tag() const;
    bool operator==(const ClassConfig&) const = default;
};

struct PartConfig {
    std::string kind;
    std::vector<double> params;
    std::optional<ClassConfig> decay_class;  // absent: the phantom's own class

    PotentialSpec build() const;
    bool operator==(const PartConfig&) const = default;
};

struct PotentialConfig {
    std::optional<PartConfig> very_short;
    std::optional<PartConfig> short_range;
    std::optional<PartConfig> long_range;

    CompositePotential build() const;
    bool operator==(const PotentialConfig&) const = default;
};

struct GridConfig {
    std::size_t points = 128;
    double half_width = 12.0;

    bool operator==(const GridConfig&) const = default;
};

struct ProbeConfig {
    double width = 1.0;
    std::vector<double> center{0.0, 0.0};
    std::vector<double> momentum{0.0, 0.0};

    bool operator==(const ProbeConfig&) const = default;
};

struct GeometryConfig {
    std::vector<double> omega_angles;  // omega = (cos a, sin a)
    std::vector<double> offsets;       // b = offset * (-sin a, cos a)
    std::vector<int> axes{1, 2};

    bool operator==(const GeometryConfig&) const = default;
};

struct ScatteringSettings {
    std::vector<double> taus{2.5, 5.0, 10.0};
    bool scaled = true;         // horizons tau / |v|
    double tolerance = 1e-4;
    std::string modifier = "auto";  // auto | none | graf | dollard

    bool operator==(const ScatteringSettings&) const = default;
};

struct SimulateSettings {
    std::vector<double> times{0.5, 1.0, 1.5, 2.0};
    double dt = 0.0;           // 0: kinetic limit
    std::vector<double> velocity;  // empty: lab frame; otherwise comoving gauge

    bool operator==(const SimulateSettings&) const = default;
};

struct EstimateSettings {
    std::vector<std::string> kinds{"vs_short_diff"};
    double omega_angle = 1.5707963267948966;
    double eps2 = 0.0;

    bool operator==(const EstimateSettings&) const = default;
};

struct ReconstructSettings {
    std::size_t directions = 64;  // fan k pi / directions before the cap
    double omega_cap = 0.95;
    double offset_step = 0.35;
    std::size_t offset_count = 25;
    double probe_width = 0.3;
    GridConfig grid{128, 6.0};
    double support_radius = 3.5;
    int iterations = 400;
    double inner_radius = 3.0;
    double min_valid_fraction = 0.9;

    bool operator==(const ReconstructSettings&) const = default;
};

struct IdentitySettings {
    int j = 1;
    double omega_angle = 1.5707963267948966;
    double offset = 0.7;
    double probe_width = 0.4;
    double max_relative_gap = 0.15;  // at the speed closest to 64
    double max_slope = -0.5;

    bool operator==(const IdentitySettings&) const = default;
};

struct ExperimentConfig {
    int format_version = 1;
    Command command = Command::Validate;
    unsigned jobs = 1;
    std::string output_dir;
    GridConfig grid;
    PotentialConfig potential;
    ProbeConfig probe;
    std::vector<double> velocities{16.0, 32.0, 64.0, 128.0};
    GeometryConfig geometry;
    ScatteringSettings scattering;
    SimulateSettings simulate;
    EstimateSettings estimate;
    ReconstructSettings reconstruct;
    IdentitySettings identity;

    bool operator==(const ExperimentConfig&) const = default;
};

inline constexpr int kFormatVersion = 1;

// Strict parse: unknown keys, wrong types and class constraints raise
// ConfigError naming the field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& config);

}  // namespace stark
