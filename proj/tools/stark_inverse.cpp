// stark-inverse <simulate|scatter|estimate|reconstruct|validate> --config <path> --out <dir> [--jobs N]
#include <iostream>

#include <CLI11.hpp>

#include "stark/errors.hpp"
#include "stark/pipeline.hpp"

int main(int argc, char** argv) {
    using namespace stark;
    CLI::App app{"Stark-effect inverse scattering experiments"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir;
    unsigned jobs = 0;
    for (const char* name : {"simulate", "scatter", "estimate", "reconstruct", "validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--jobs", jobs, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        auto cfg = load_config(config_path);
        if (to_string(cfg.command) != command)
            throw ConfigError("command", "config is for '" + to_string(cfg.command) + "', not '" + command + "'");
        if (jobs > 0) cfg.jobs = jobs;
        const auto manifest = run(cfg, out_dir);
        for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& j : manifest.jobs)
            if (j.status == "failed") std::cerr << "failed: " << j.id << ": " << j.message << "\n";
        return manifest.partial_failure() ? kExitPartial : kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartial;
    }
}
