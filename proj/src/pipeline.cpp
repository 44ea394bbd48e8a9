#include "stark/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "stark/csv.hpp"
#include "stark/errors.hpp"
#include "stark/estimates.hpp"
#include "stark/fbp.hpp"
#include "stark/parallel.hpp"
#include "stark/reconstruct.hpp"

namespace stark {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Context {
    const ExperimentConfig& cfg;
    fs::path dir;
    RunManifest& manifest;

    void save(const std::string& name, const std::string& kind, const CsvTable& table) {
        write_csv(dir / name, table);
        manifest.files.push_back({name, kind});
    }
    void job(std::string id, std::string status, std::string message = {}) {
        manifest.jobs.push_back({std::move(id), std::move(status), std::move(message)});
    }
    void metric(std::string name, double value) { manifest.metrics.emplace_back(std::move(name), value); }
};

GridSpec grid_of(const GridConfig& g) { return {2, g.points, g.half_width}; }

WaveFunction probe_of(const ExperimentConfig& cfg, const GridSpec& grid) {
    return WaveFunction::gaussian(grid, cfg.probe.width, cfg.probe.center, cfg.probe.momentum);
}

std::vector<double> centred_offsets(std::size_t count, double step) {
    std::vector<double> out;
    const double mid = 0.5 * static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) out.push_back((static_cast<double>(k) - mid) * step);
    return out;
}

Modifier modifier_of(const ExperimentConfig& cfg, const CompositePotential& v) {
    const auto& m = cfg.scattering.modifier;
    if (m == "none") return NoModifier{};
    if (m == "graf") return GrafModifier{};
    if (m == "dollard" || (m == "auto" && v.long_range)) return DollardModifier{v.long_range};
    return NoModifier{};
}

void run_simulate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto grid = grid_of(cfg.grid);
    const auto potential = cfg.potential.build();
    const bool comoving = !cfg.simulate.velocity.empty();
    const double dt = cfg.simulate.dt > 0.0 ? cfg.simulate.dt
                                            : std::min(0.01, PropagationPlan::kinetic_step_limit(grid));
    PropagationPlan plan{grid, dt, potential};
    if (comoving) plan.gauge = ComovingGauge{cfg.simulate.velocity};

    CsvTable t{{"t", "x1", "x2", "p1", "p2", "norm", "boundary_fraction"}, {}};
    auto record = [&](double time, const WaveFunction& psi) {
        const auto x = position_centroid(psi), p = momentum_centroid(psi);
        t.add(time, x[0], x[1], p[0], p[1], psi.norm(), boundary_mass_fraction(psi));
    };
    auto psi = probe_of(cfg, grid);
    record(0.0, psi);
    double now = 0.0;
    auto times = cfg.simulate.times;
    std::sort(times.begin(), times.end());
    try {
        for (double next : times) {
            psi = comoving ? comoving_full_propagate(psi, cfg.simulate.velocity, now, next, plan)
                           : lab_frame_propagate(psi, now, next, plan);
            now = next;
            record(now, psi);
        }
        ctx.job("simulate", "ok");
    } catch (const std::exception& e) {
        ctx.job("simulate", "failed", e.what());
    }
    ctx.save("trajectory.csv", "trajectory", t);
}

void run_scatter(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto potential = cfg.potential.build();
    const auto& geo = cfg.geometry;
    struct Job {
        double angle, offset, speed;
    };
    std::vector<Job> work;
    for (double a : geo.omega_angles)
        for (double s : geo.offsets)
            for (double v : cfg.velocities) work.push_back({a, s, v});

    struct Result {
        std::vector<ScatteringElement> elements;
        std::string error;
    };
    std::vector<Result> results(work.size());
    parallel_for(work.size(), cfg.jobs, [&](std::size_t i) {
        const auto [a, s, speed] = work[i];
        try {
            const Vec omega = direction(a), n = normal(a), b{s * n[0], s * n[1]};
            SweepLevel level{speed, cfg.grid.points, cfg.grid.half_width, cfg.scattering.taus, cfg.scattering.scaled};
            auto sc = level_config(level, potential, omega, b, cfg.scattering.tolerance);
            sc.modifier = modifier_of(cfg, potential);
            const auto probe = probe_of(cfg, sc.plan.grid);
            results[i].elements = commutator_elements(geo.axes, probe, probe, {speed * omega[0], speed * omega[1]}, sc);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    CsvTable t{{"j", "omega_angle", "b1", "b2", "v", "re", "im", "cauchy_gap", "converged"}, {}};
    for (std::size_t i = 0; i < work.size(); ++i) {
        const auto [a, s, speed] = work[i];
        const std::string id = "scatter angle=" + csv_number(a) + " offset=" + csv_number(s) + " v=" + csv_number(speed);
        if (!results[i].error.empty()) {
            ctx.job(id, "failed", results[i].error);
            continue;
        }
        const Vec n = normal(a);
        bool converged = true;
        for (const auto& e : results[i].elements) {
            t.add(e.j, a, s * n[0], s * n[1], speed, e.value.real(), e.value.imag(), e.cauchy_gap, e.converged);
            converged = converged && e.converged;
        }
        ctx.job(id, converged ? "ok" : "flagged", converged ? "" : "horizon sweep did not meet the tolerance");
    }
    ctx.save("elements.csv", "elements", t);
}

void run_estimate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto potential = cfg.potential.build();
    const auto grid = grid_of(cfg.grid);
    const auto phi0 = probe_of(cfg, grid);
    const Vec omega = direction(cfg.estimate.omega_angle);
    struct Job {
        EstimateKind kind;
        double speed;
    };
    std::vector<Job> work;
    for (const auto& k : cfg.estimate.kinds)
        for (double v : cfg.velocities) work.push_back({estimate_kind_from_string(k), v});
    struct Result {
        EstimateResult value{};
        std::string error;
    };
    std::vector<Result> results(work.size());
    parallel_for(work.size(), cfg.jobs, [&](std::size_t i) {
        try {
            const double v = work[i].speed;
            results[i].value = estimate_integral(work[i].kind, {v * omega[0], v * omega[1]}, potential, phi0);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    CsvTable rows{{"kind", "v", "value", "T_max", "tail_bound"}, {}};
    CsvTable fits{{"kind", "slope", "r2", "expected", "threshold", "pass"}, {}};
    for (const auto& name : cfg.estimate.kinds) {
        const auto kind = estimate_kind_from_string(name);
        std::vector<double> speeds, values;
        bool complete = true;
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (work[i].kind != kind) continue;
            const std::string id = "estimate " + name + " v=" + csv_number(work[i].speed);
            if (!results[i].error.empty()) {
                ctx.job(id, "failed", results[i].error);
                complete = false;
                continue;
            }
            const auto& r = results[i].value;
            rows.add(name, r.speed, r.value, r.t_max, r.tail_bound);
            speeds.push_back(r.speed);
            values.push_back(r.value);
            ctx.job(id, "ok");
        }
        if (!complete) continue;
        try {
            const auto fit = fit_order(speeds, values);
            const auto check = expected_order(kind, potential, cfg.estimate.eps2);
            fits.add(name, fit.slope, fit.r2, check.expected, check.threshold, order_passes(fit, check));
            ctx.job("fit " + name, "ok");
        } catch (const std::exception& e) {
            ctx.job("fit " + name, "failed", e.what());
        }
    }
    ctx.save("estimates.csv", "estimates", rows);
    ctx.save("slopes.csv", "slopes", fits);
}

ReconstructionTask reconstruction_task(const ExperimentConfig& cfg, const CompositePotential& v) {
    const auto& r = cfg.reconstruct;
    ReconstructionTask task;
    task.potential = v;
    task.angles = direction_fan(r.directions, r.omega_cap);
    task.angle_step = std::numbers::pi / static_cast<double>(r.directions);
    task.offsets = centred_offsets(r.offset_count, r.offset_step);
    task.probe_width = r.probe_width;
    for (double s : cfg.velocities) task.levels.push_back(sized_level(s, r.probe_width, cfg.scattering.taus));
    for (auto& l : task.levels) l.scale_horizons = cfg.scattering.scaled;
    task.axes = cfg.geometry.axes;
    task.omega_cap = r.omega_cap;
    task.convergence_tol = cfg.scattering.tolerance;
    task.min_valid_fraction = r.min_valid_fraction;
    return task;
}

void run_reconstruct(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& r = cfg.reconstruct;
    const auto potential = cfg.potential.build();
    const auto task = reconstruction_task(cfg, potential);
    task.validate();
    if (task.axes != std::vector<int>{1, 2}) throw ConfigError("geometry.axes", "reconstruction needs both axes");

    XRayDataset data;
    try {
        data = assemble_xray(task, cfg.jobs);
    } catch (const DataError& e) {
        ctx.job("assemble_xray", "failed", e.what());
        return;
    }
    CsvTable x{{"j", "omega_angle", "b1", "b2", "value", "residual", "converged"}, {}};
    for (const auto& e : data.entries) x.add(e.j, e.omega_angle, e.b[0], e.b[1], e.value, e.residual, e.converged);
    ctx.save("xray.csv", "xray", x);
    const auto flagged = data.flagged();
    ctx.job("assemble_xray", flagged ? "flagged" : "ok",
            flagged ? std::to_string(flagged) + " of " + std::to_string(data.entries.size()) + " entries flagged" : "");

    const auto grid = grid_of(r.grid);
    FbpOptions opt;
    opt.support_radius = r.support_radius;
    opt.completion_iterations = r.iterations;
    const auto rec = invert_fbp(data, grid, opt);
    for (const auto& w : rec.warnings) ctx.manifest.warnings.push_back(w);
    const auto truth = sample_potential(potential, grid);
    const auto smeared = sample_potential(potential, grid, r.probe_width);
    CsvTable f{{"x1", "x2", "V_rec", "V_smeared", "V_true"}, {}};
    std::size_t idx[2];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.unravel(i, idx);
        f.add(grid.coordinate(idx[0]), grid.coordinate(idx[1]), rec.values[i], smeared[i], truth[i]);
    }
    ctx.save("field.csv", "field", f);
    ctx.job("invert_fbp", "ok");
    ctx.metric("missing_fraction", rec.missing_fraction);
    if (l2_norm_inside(smeared, grid, r.inner_radius) > 0.0) {
        ctx.metric("relative_error_smeared", relative_l2_error(rec.values, smeared, grid, r.inner_radius));
        ctx.metric("relative_error_true", relative_l2_error(rec.values, truth, grid, r.inner_radius));
    } else {
        ctx.metric("rec_norm_inside", l2_norm_inside(rec.values, grid, r.inner_radius));
    }
}

// Largest smeared line integral of d_j V across offsets for one direction.
double identity_peak(const CompositePotential& v, const IdentitySettings& id) {
    if (v.is_zero()) return 0.0;
    std::vector<double> offsets;
    for (int k = -80; k <= 80; ++k) offsets.push_back(0.05 * k);
    const auto data = oracle_dataset(v, {id.omega_angle}, offsets, 0.05, 1.0, id.probe_width, {id.j});
    double peak = 0.0;
    for (const auto& e : data.entries) peak = std::max(peak, std::abs(e.value));
    return peak;
}

void run_validate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto potential = cfg.potential.build();
    CsvTable rows{{"suite", "metric", "value", "threshold", "pass"}, {}};
    auto verdict = [&](const std::string& suite, const std::string& metric, double value, double threshold,
                       bool pass) {
        rows.add(suite, metric, value, threshold, pass);
        ctx.job(suite + " " + metric, pass ? "ok" : "failed",
                pass ? "" : metric + " = " + csv_number(value) + " against " + csv_number(threshold));
    };
    auto guarded = [&](const std::string& suite, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            ctx.job(suite, "failed", e.what());
        }
    };

    guarded("unitarity", [&] {
        const auto grid = grid_of(cfg.grid);
        const double speed = cfg.velocities.front();
        const Vec omega = direction(cfg.identity.omega_angle), vel{speed * omega[0], speed * omega[1]};
        const double dt = std::min(1e-3, PropagationPlan::kinetic_step_limit(grid));
        PropagationPlan plan{grid, dt, potential, ComovingGauge{vel}};
        const auto psi = probe_of(cfg, grid);
        const auto out = comoving_full_propagate(psi, vel, 0.0, 1000 * dt, plan);
        verdict("unitarity", "norm_drift_1000_steps", std::abs(out.norm() - psi.norm()), 1e-10,
                std::abs(out.norm() - psi.norm()) <= 1e-10);
    });

    for (const auto& [slot, part] : {std::pair{"very_short", &potential.very_short},
                                     std::pair{"short_range", &potential.short_range},
                                     std::pair{"long_range", &potential.long_range}}) {
        if (!*part) continue;
        guarded(std::string("decay ") + slot, [&] {
            const auto rep = validate_decay(**part);
            double worst = 0.0;
            for (int b = 0; b < 3; ++b)
                if (rep.max_ratio[b] && rep.constants[b] && *rep.constants[b] > 0.0)
                    worst = std::max(worst, *rep.max_ratio[b] / *rep.constants[b]);
            verdict(std::string("decay ") + slot, "envelope_ratio", worst, 1.0, rep.pass);
        });
    }

    const auto& id = cfg.identity;
    std::vector<SweepLevel> levels;
    for (double s : cfg.velocities) levels.push_back(sized_level(s, id.probe_width, cfg.scattering.taus));

    if (potential.is_zero()) {
        guarded("null", [&] {
            const auto angles = cfg.geometry.omega_angles.empty() ? std::vector<double>{id.omega_angle}
                                                                  : cfg.geometry.omega_angles;
            const auto offsets = cfg.geometry.offsets.empty() ? std::vector<double>{0.0} : cfg.geometry.offsets;
            double worst = 0.0;
            for (double a : angles)
                for (double s : offsets)
                    for (const auto& level : levels) {
                        const Vec omega = direction(a), n = normal(a);
                        const auto sc = level_config(level, potential, omega, {s * n[0], s * n[1]},
                                                     cfg.scattering.tolerance);
                        const auto probe = WaveFunction::gaussian(sc.plan.grid, id.probe_width);
                        const Vec vel{level.speed * omega[0], level.speed * omega[1]};
                        for (const auto& e : commutator_elements(cfg.geometry.axes, probe, probe, vel, sc))
                            worst = std::max(worst, std::abs(e.value));
                    }
            verdict("null", "max_element", worst, 1e-6, worst <= 1e-6);
        });
    }

    guarded("identity", [&] {
        ReconstructionTask task;
        task.potential = potential;
        task.angles = {id.omega_angle};
        task.angle_step = 0.05;
        task.offsets = {id.offset};
        task.probe_width = id.probe_width;
        task.levels = levels;
        task.convergence_tol = cfg.scattering.tolerance;
        const Vec omega = direction(id.omega_angle), n = normal(id.omega_angle);
        const double peak = identity_peak(potential, id);
        const auto sweep = identity_sweep(id.j, omega, {id.offset * n[0], id.offset * n[1]}, task, peak);
        CsvTable t{{"v", "gap", "j", "omega_angle", "element_re", "element_im", "rhs_re", "rhs_im"}, {}};
        for (std::size_t i = 0; i < sweep.speeds.size(); ++i)
            t.add(sweep.speeds[i], sweep.gaps[i], id.j, id.omega_angle, sweep.elements[i].real(),
                  sweep.elements[i].imag(), sweep.rhs.real(), sweep.rhs.imag());
        ctx.save("identity.csv", "identity", t);

        const double worst = *std::max_element(sweep.gaps.begin(), sweep.gaps.end());
        if (peak == 0.0 || worst <= 1e-6) {
            verdict("identity", "max_gap", worst, 1e-6, worst <= 1e-6);
            return;
        }
        std::size_t at = 0;
        for (std::size_t i = 1; i < sweep.speeds.size(); ++i)
            if (std::abs(std::log(sweep.speeds[i] / 64.0)) < std::abs(std::log(sweep.speeds[at] / 64.0))) at = i;
        verdict("identity", "relative_gap_v" + csv_number(sweep.speeds[at]), sweep.gaps[at] / peak,
                id.max_relative_gap, sweep.gaps[at] / peak <= id.max_relative_gap);
        verdict("identity", "gap_slope", sweep.fit.slope, id.max_slope, sweep.fit.slope <= id.max_slope);
    });
    ctx.save("validation.csv", "validation", rows);
}

std::string sha256_hex(const std::string& text) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (!EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

// Files a previous run left in the directory are removed so that the new
// manifest describes everything there.
void clear_previous(const fs::path& dir) {
    const auto path = dir / kManifestName;
    if (!fs::exists(path)) return;
    try {
        for (const auto& f : load_manifest(dir).files) fs::remove(dir / f.path);
    } catch (const std::exception&) {
        // An unreadable old manifest is simply replaced.
    }
    fs::remove(path);
}

}  // namespace

bool RunManifest::partial_failure() const {
    return std::any_of(jobs.begin(), jobs.end(), [](const JobRecord& j) { return j.status == "failed"; });
}

std::string RunManifest::emit() const {
    json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["modules"] = json::object();
    for (const auto& [k, v] : modules) j["modules"][k] = v;
    j["jobs"] = json::array();
    for (const auto& r : jobs) j["jobs"].push_back({{"id", r.id}, {"status", r.status}, {"message", r.message}});
    j["files"] = json::array();
    for (const auto& f : files) j["files"].push_back({{"path", f.path}, {"kind", f.kind}});
    j["warnings"] = warnings;
    j["metrics"] = json::object();
    for (const auto& [k, v] : metrics) j["metrics"][k] = v;
    j["wall_seconds"] = wall_seconds;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::parse(const std::string& text) {
    RunManifest m;
    try {
        const auto j = json::parse(text);
        m.command = j.at("command").get<std::string>();
        m.config_hash = j.at("config_hash").get<std::string>();
        for (const auto& [k, v] : j.at("modules").items()) m.modules.emplace_back(k, v.get<std::string>());
        for (const auto& r : j.at("jobs"))
            m.jobs.push_back({r.at("id").get<std::string>(), r.at("status").get<std::string>(),
                              r.at("message").get<std::string>()});
        for (const auto& f : j.at("files")) m.files.push_back({f.at("path").get<std::string>(), f.at("kind").get<std::string>()});
        m.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (const auto& [k, v] : j.at("metrics").items()) m.metrics.emplace_back(k, v.get<double>());
        m.wall_seconds = j.at("wall_seconds").get<double>();
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

std::string config_hash(const ExperimentConfig& config) {
    auto c = config;
    c.output_dir.clear();
    c.jobs = 1;
    return sha256_hex(emit_config(c));
}

void write_manifest(const RunManifest& manifest, const fs::path& out_dir) {
    std::ofstream f(out_dir / kManifestName, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write manifest in " + out_dir.string());
    f << manifest.emit();
    if (!f) throw IoError("failed writing manifest in " + out_dir.string());
}

RunManifest load_manifest(const fs::path& out_dir) {
    std::ifstream f(out_dir / kManifestName, std::ios::binary);
    if (!f) throw IoError("no manifest in " + out_dir.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return RunManifest::parse(ss.str());
}

RunManifest run(const ExperimentConfig& config, const fs::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());
    clear_previous(out_dir);

    RunManifest m;
    m.command = to_string(config.command);
    m.config_hash = config_hash(config);
    m.modules = {{"field-core", kVersion}, {"potentials", kVersion}, {"propagators", kVersion},
                 {"scattering", kVersion}, {"estimates", kVersion},  {"reconstruct", kVersion},
                 {"cli", kVersion}};
    Context ctx{config, out_dir, m};
    switch (config.command) {
        case Command::Simulate:
            run_simulate(ctx);
            break;
        case Command::Scatter:
            run_scatter(ctx);
            break;
        case Command::Estimate:
            run_estimate(ctx);
            export_plotdata(m, out_dir, "slopes");
            break;
        case Command::Reconstruct:
            run_reconstruct(ctx);
            if (std::any_of(m.files.begin(), m.files.end(), [](const auto& f) { return f.kind == "field"; }))
                export_plotdata(m, out_dir, "slice");
            break;
        case Command::Validate:
            run_validate(ctx);
            export_plotdata(m, out_dir, "identity_gap");
            break;
    }
    for (const auto& j : m.jobs)
        if (j.status == "flagged") m.warnings.push_back(j.id + ": " + j.message);
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(m, out_dir);
    return m;
}

fs::path export_plotdata(RunManifest& manifest, const fs::path& out_dir, const std::string& which) {
    std::vector<std::string> missing;
    for (const auto& f : manifest.files)
        if (!fs::exists(out_dir / f.path)) missing.push_back(f.path);
    if (!missing.empty()) {
        std::string list;
        for (const auto& p : missing) list += (list.empty() ? "" : ", ") + p;
        throw DataError("missing outputs: " + list);
    }
    auto sources = [&](const std::string& kind) {
        std::vector<CsvTable> out;
        for (const auto& f : manifest.files)
            if (f.kind == kind) out.push_back(read_csv(out_dir / f.path));
        return out;
    };

    CsvTable t;
    if (which == "identity_gap") {
        t.header = {"v", "gap", "j", "omega_angle"};
        for (const auto& src : sources("identity")) {
            const auto v = src.column("v"), g = src.column("gap"), j = src.column("j"), a = src.column("omega_angle");
            for (const auto& r : src.rows) t.rows.push_back({r[v], r[g], r[j], r[a]});
        }
    } else if (which == "slice") {
        t.header = {"x", "V_true", "V_rec"};
        for (const auto& src : sources("field")) {
            const auto x1 = src.column("x1"), x2 = src.column("x2"), tr = src.column("V_true"),
                       rec = src.column("V_rec");
            // The lattice row closest to x2 = 0.
            double nearest = INFINITY;
            for (const auto& r : src.rows) nearest = std::min(nearest, std::abs(std::stod(r[x2])));
            for (const auto& r : src.rows)
                if (std::abs(std::stod(r[x2])) == nearest) t.rows.push_back({r[x1], r[tr], r[rec]});
        }
    } else if (which == "slopes") {
        t.header = {"kind", "slope", "r2", "expected", "pass"};
        for (const auto& src : sources("slopes")) {
            const auto k = src.column("kind"), s = src.column("slope"), r2 = src.column("r2"),
                       e = src.column("expected"), p = src.column("pass");
            for (const auto& r : src.rows) t.rows.push_back({r[k], r[s], r[r2], r[e], r[p]});
        }
    } else {
        throw InvalidInput("unknown plot export '" + which + "'");
    }
    const std::string name = "plot_" + which + ".csv";
    write_csv(out_dir / name, t);
    if (std::none_of(manifest.files.begin(), manifest.files.end(), [&](const auto& f) { return f.path == name; }))
        manifest.files.push_back({name, "plot"});
    return out_dir / name;
}

}  // namespace stark
