#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stark/config.hpp"

namespace stark {

struct JobRecord {
    std::string id;
    std::string status;  // ok | flagged | failed | skipped
    std::string message;
};

struct OutputFile {
    std::string path;  // relative to the run directory
    std::string kind;  // trajectory | elements | estimates | slopes | xray | field | identity | validation | plot
};

struct RunManifest {
    std::string command;
    std::string config_hash;  // sha256 of the emitted config without output_dir and jobs
    std::vector<std::pair<std::string, std::string>> modules;
    std::vector<JobRecord> jobs;
    std::vector<OutputFile> files;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, double>> metrics;
    double wall_seconds = 0.0;

    bool partial_failure() const;
    std::string emit() const;
    static RunManifest parse(const std::string& text);
};

inline constexpr const char* kManifestName = "manifest.json";

std::string config_hash(const ExperimentConfig& config);

// Runs the configured command, writing CSV outputs and manifest.json into
// out_dir. Job failures are recorded and the run continues.
RunManifest run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

RunManifest load_manifest(const std::filesystem::path& out_dir);

// Tidy plot tables derived from a run: identity_gap {v, gap, j, omega_angle},
// slice {x, V_true, V_rec} at x2 = 0, slopes {kind, slope, r2, expected, pass}.
// The new file is registered in the manifest (the caller rewrites it).
std::filesystem::path export_plotdata(RunManifest& manifest, const std::filesystem::path& out_dir,
                                      const std::string& which);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);

// 0 success, 2 config error, 3 some jobs failed, 4 i/o error.
enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitPartial = 3, kExitIo = 4 };

}  // namespace stark
