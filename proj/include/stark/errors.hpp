#pragma once

#include <stdexcept>
#include <string>

namespace stark {

// Rejected argument or malformed object (bad grid, mismatched grids, bad tag).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// State mass reached the periodic boundary band.
struct BoundaryContamination : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Multiplier would alias past the lattice Nyquist frequency.
struct AliasingRisk : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Norm drift or splitting defect above tolerance.
struct StepSizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A line integral or phase integral fails to converge.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature or tail certificate cannot reach the requested tolerance.
struct ToleranceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Horizon schedule or truncation horizon inadequate.
struct HorizonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fit or dataset problems (too few velocities, too few valid entries).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration problem with the offending field path.
struct ConfigError : std::runtime_error {
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), field(std::move(path)) {}
    std::string field;
};

// Output directory or file could not be read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stark
