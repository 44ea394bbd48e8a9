// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "stark/csv.hpp"
#include "stark/estimates.hpp"
#include "stark/fbp.hpp"
#include "stark/pipeline.hpp"
#include "stark/reconstruct.hpp"

using namespace stark;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

class Report {
public:
    void check(bool ok, const std::string& what) {
        pass_ = pass_ && ok;
        if (!detail_.empty()) detail_ += "; ";
        detail_ += (ok ? "" : "FAILED ") + what;
    }
    Outcome done() const { return {pass_, detail_}; }

private:
    bool pass_ = true;
    std::string detail_;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

const fs::path kRoot = fs::temp_directory_path() / ("stark_acceptance_" + std::to_string(::getpid()));

fs::path workdir(const std::string& name) {
    const auto dir = kRoot / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

CompositePotential bump() {
    CompositePotential v;
    v.short_range = make_phantom("gaussian_bump", {1.0, 1.0});
    return v;
}

// Rows of validation.csv as (metric, value, pass).
std::vector<std::tuple<std::string, double, bool>> validation_rows(const fs::path& dir) {
    const auto t = read_csv(dir / "validation.csv");
    const auto suite = t.column("suite"), metric = t.column("metric"), value = t.column("value"), pass = t.column("pass");
    std::vector<std::tuple<std::string, double, bool>> out;
    for (const auto& r : t.rows) out.emplace_back(r[suite] + " " + r[metric], std::stod(r[value]), r[pass] == "true");
    return out;
}

Outcome propagator_exactness() {
    Report rep;
    const GridSpec g(2, 256, 20.0);
    const auto psi = WaveFunction::gaussian(g, 1.0);
    const auto out = free_stark_propagate(psi, 2.0);
    const auto x = position_centroid(out), p = momentum_centroid(out);
    const double drift = std::max({std::abs(x[0] - 2.0), std::abs(x[1]), std::abs(p[0] - 2.0), std::abs(p[1])});
    rep.check(drift <= 1e-6, "centroid and momentum drift error at t = 2: " + num(drift));
    const double law = std::max(distance(free_stark_propagate(free_stark_propagate(psi, 0.7), 1.3), out),
                                distance(free_stark_propagate(out, -2.0), psi));
    rep.check(law <= 1e-10, "group law: " + num(law));
    return rep.done();
}

Outcome gauge_equivalence() {
    Report rep;
    const GridSpec g(2, 128, 12.0);
    const Vec v{0.0, 5.0};
    const double dt = 0.002;
    const PropagationPlan comoving{g, dt, bump(), ComovingGauge{v}};
    const PropagationPlan lab{g, dt, bump(), LabGauge{}};
    auto u = WaveFunction::gaussian(g, 1.0, {0.0, -2.5});
    auto psi = comoving_to_lab(u, v, 0.0);
    double worst = 0.0, t = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double next = 0.1 * k;
        u = comoving_full_propagate(u, v, t, next, comoving);
        psi = lab_frame_propagate(psi, t, next, lab);
        t = next;
        worst = std::max(worst, distance(comoving_to_lab(u, v, t), psi));
    }
    rep.check(worst <= 1e-6, "max L2 gap over t in [0, 1]: " + num(worst));
    return rep.done();
}

Outcome unitarity() {
    Report rep;
    const GridSpec g(2, 128, 12.0);
    const Vec v{0.0, 5.0};
    CompositePotential pot = bump();
    pot.very_short = make_phantom("smoothed_coulomb", {1.0, 0.5});
    pot.long_range = make_phantom("power_tail_graf", {0.4, 0.8});
    const auto psi = WaveFunction::gaussian(g, 1.0);
    const double dt = 1e-3;

    const auto com = comoving_full_propagate(psi, v, 0.0, 1000 * dt, PropagationPlan{g, dt, pot, ComovingGauge{v}});
    const double d1 = std::abs(com.norm() - 1.0);
    rep.check(d1 <= 1e-10, "comoving 1000 steps: " + num(d1));

    const auto lab = lab_frame_propagate(psi, 0.0, 1000 * dt, PropagationPlan{g, dt, pot});
    const double d2 = std::abs(lab.norm() - 1.0);
    rep.check(d2 <= 1e-10, "lab 1000 steps: " + num(d2));

    auto free = psi;
    for (int k = 0; k < 1000; ++k) free = free_stark_propagate(free, k % 2 ? -1e-3 : 1e-3);
    const double d3 = std::abs(free.norm() - 1.0);
    rep.check(d3 <= 1e-10, "free Stark 1000 applications: " + num(d3));

    DollardPhaseTable table(g, v, make_phantom("power_tail_dollard", {0.45}));
    Field f(psi.amplitudes());
    for (int k = 1; k <= 1000; ++k) {
        table.advance(0.01 * k);
        apply_momentum_phase(f, g, table.phases(), k % 2 ? 1.0 : -1.0);
    }
    const double d4 = std::abs(WaveFunction(g, f).norm() - 1.0);
    rep.check(d4 <= 1e-10, "dollard modifier 1000 applications: " + num(d4));
    return rep.done();
}

Outcome moment_bounds() {
    Report rep;
    const GridSpec g(2, 128, 12.0);
    const auto phi = WaveFunction::gaussian(g, 1.0);
    std::vector<double> ts;
    for (double t = 0.0; t <= 2.0001; t += 0.25) ts.push_back(t);
    for (double t = 3.0; t <= 50.0; t *= 1.3) ts.push_back(t);
    ts.push_back(50.0);

    // Graf class: O(1) caps. The moment keeps growing until t ~ 2|v| before it
    // saturates, so the cap fitted on [0, 2] carries a factor 1.1.
    const auto graf = make_phantom("power_tail_graf", {0.4, 0.8});
    double graf_worst = 0.0;
    for (double s : {5.0, 20.0})
        for (int k : {1, 2}) {
            const auto m = dollard_moments(phi, {0.0, s}, graf, ts, k);
            double cap = 0.0, late = 0.0;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                if (ts[i] <= 2.0) cap = std::max(cap, m[i]);
                else late = std::max(late, m[i]);
            }
            graf_worst = std::max(graf_worst, late / cap);
        }
    rep.check(graf_worst <= 1.1, "graf late / early cap " + num(graf_worst) + " (allowed 1.1)");

    for (double gamma : {0.3, 0.45}) {
        const auto vl = make_phantom("power_tail_dollard", {gamma}).with_class(DollardWideRange{gamma});
        double worst = 0.0;
        for (double s : {5.0, 20.0})
            for (int k : {1, 2}) {
                const auto m = dollard_moments(phi, {0.0, s}, vl, ts, k);
                auto bound = [&](double t) {
                    const double a = std::pow(t, 1.0 - 2.0 * gamma);
                    return k == 1 ? 1.0 + a : 1.0 + a + std::pow(t, 2.0 - 4.0 * gamma);
                };
                double c = 0.0;
                for (std::size_t i = 0; i < ts.size(); ++i)
                    if (ts[i] <= 2.0) c = std::max(c, m[i] / bound(ts[i]));
                for (std::size_t i = 0; i < ts.size(); ++i)
                    if (ts[i] > 2.0) worst = std::max(worst, m[i] / (c * bound(ts[i])));
            }
        rep.check(worst <= 1.0, "dollard gamma " + num(gamma) + " worst ratio " + num(worst));
    }
    return rep.done();
}

Outcome estimate_orders() {
    Report rep;
    const GridSpec g(2, 128, 12.0);
    const auto phi = WaveFunction::gaussian(g, 1.0);
    const std::vector<double> speeds{8, 16, 32, 64};
    CompositePotential graf;
    graf.very_short = make_phantom("smoothed_coulomb", {1.0, 0.5});
    graf.short_range = make_phantom("gaussian_bump", {1.0, 1.0});
    graf.long_range = make_phantom("power_tail_graf", {0.4, 0.8});
    CompositePotential dollard = graf;
    dollard.long_range = make_phantom("power_tail_dollard", {0.45});

    struct Case {
        EstimateKind kind;
        const CompositePotential* potential;
        const char* label;
    };
    const std::vector<Case> cases{
        {EstimateKind::VsFree, &graf, "vs_free"},
        {EstimateKind::VsShortDiff, &graf, "vs_short_diff"},
        {EstimateKind::VsFreeDollard, &graf, "vs_free_dollard/graf"},
        {EstimateKind::VsShortDiffDollard, &graf, "vs_short_diff_dollard/graf"},
        {EstimateKind::VsFreeDollard, &dollard, "vs_free_dollard/dollard"},
        {EstimateKind::VsShortDiffDollard, &dollard, "vs_short_diff_dollard/dollard"},
        {EstimateKind::VlDiffGraf, &graf, "vl_diff_graf"},
        {EstimateKind::VlDiffDollard, &dollard, "vl_diff_dollard"},
    };
    for (const auto& c : cases) {
        std::vector<double> values;
        for (double s : speeds) values.push_back(estimate_integral(c.kind, {0.0, s}, *c.potential, phi).value);
        const auto fit = fit_order(speeds, values);
        const auto order = expected_order(c.kind, *c.potential);
        rep.check(order_passes(fit, order), std::string(c.label) + " slope " + num(fit.slope) + " (limit " +
                                                num(order.threshold) + ")");
    }
    return rep.done();
}

Outcome identity_check() {
    Report rep;
    struct Case {
        const char* label;
        const char* potential;
        const char* taus;
    };
    const std::vector<Case> cases{
        {"gaussian", R"({"short_range": {"kind": "gaussian_bump", "params": [1, 1]}})", "[2.5, 5, 10]"},
        {"graf tail", R"({"short_range": {"kind": "gaussian_bump", "params": [1, 1]},
                          "long_range": {"kind": "power_tail_graf", "params": [0.4, 0.8, 1.0]}})",
         "[10, 20, 40]"},
    };
    for (const auto& c : cases) {
        const std::string text = std::string(R"({"format_version": 1, "command": "validate",
            "velocities": [16, 32, 64, 128], "grid": {"points": 64, "half_width": 8},
            "scattering": {"taus": )") + c.taus + R"(}, "potential": )" + c.potential + "}";
        const auto dir = workdir(std::string("identity_") + c.label[0]);
        run(parse_config(text), dir);
        int seen = 0;
        for (const auto& [metric, value, pass] : validation_rows(dir)) {
            if (metric.rfind("identity", 0) != 0) continue;
            ++seen;
            rep.check(pass, std::string(c.label) + " " + metric.substr(9) + " " + num(value));
        }
        rep.check(seen == 2, std::string(c.label) + " identity verdicts present");
    }
    return rep.done();
}

Outcome zero_null() {
    Report rep;
    const auto dir = workdir("null");
    // The three canonical geometries |omega . e_1| = 0, 0.5, 0.9, both axes, several impact parameters.
    const std::string text = R"({"format_version": 1, "command": "validate", "velocities": [16, 32, 64, 128],
        "grid": {"points": 64, "half_width": 8},
        "geometry": {"omega_angles": [1.5707963267948966, 1.0471975511965979, 0.45102681179626236],
                     "offsets": [-1.0, 0.0, 0.7], "axes": [1, 2]}})";
    run(parse_config(text), dir);
    bool found = false;
    for (const auto& [metric, value, pass] : validation_rows(dir)) {
        if (metric != "null max_element") continue;
        found = true;
        rep.check(pass && value <= 1e-6, "max |element| " + num(value));
    }
    rep.check(found, "null suite ran");
    return rep.done();
}

struct FieldDump {
    std::vector<double> rec, truth;
};

FieldDump read_field(const fs::path& dir) {
    const auto t = read_csv(dir / "field.csv");
    const auto r = t.column("V_rec"), v = t.column("V_true");
    FieldDump out;
    for (const auto& row : t.rows) {
        out.rec.push_back(std::stod(row[r]));
        out.truth.push_back(std::stod(row[v]));
    }
    return out;
}

Outcome inversion_quality() {
    Report rep;
    const auto angles = direction_fan(64, 0.95);
    std::vector<double> offsets;
    for (int k = -12; k <= 12; ++k) offsets.push_back(0.35 * k);
    const GridSpec grid(2, 128, 6.0);
    FbpOptions opt;
    opt.support_radius = 3.5;
    const auto oracle = invert_fbp(oracle_dataset(bump(), angles, offsets, kPi / 64, 0.95), grid, opt);
    const double e_oracle = relative_l2_error(oracle.values, sample_potential(bump(), grid), grid, 3.0);
    rep.check(e_oracle <= 0.05, "oracle-driven error " + num(e_oracle));

    // Scattering-driven runs for two phantoms.
    auto scattered = [&](const std::string& name, const std::string& part) {
        const auto dir = workdir("reconstruct_" + name);
        const std::string text = R"({"format_version": 1, "command": "reconstruct", "velocities": [32, 64, 128],
            "potential": {"short_range": )" + part + "}}";
        const auto m = run(parse_config(text), dir);
        rep.check(!m.partial_failure(), name + " run complete");
        double err = 1.0;
        for (const auto& [k, v] : m.metrics)
            if (k == "relative_error_true") err = v;
        return std::pair{read_field(dir), err};
    };
    const auto [gauss, e_gauss] = scattered("gaussian", R"({"kind": "gaussian_bump", "params": [1, 1]})");
    rep.check(e_gauss <= 0.20, "end-to-end error " + num(e_gauss));
    const auto [aniso, e_aniso] =
        scattered("anisotropic", R"({"kind": "anisotropic_bump", "params": [1, 0.8, 1.4, 0.5, -0.3]})");
    std::vector<double> drec(grid.size()), dtrue(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        drec[i] = gauss.rec[i] - aniso.rec[i];
        dtrue[i] = gauss.truth[i] - aniso.truth[i];
    }
    const double ratio = l2_norm_inside(drec, grid, 3.0) / l2_norm_inside(dtrue, grid, 3.0);
    rep.check(ratio >= 0.5, "distinguishability ratio " + num(ratio) + " (anisotropic error " + num(e_aniso) + ")");
    return rep.done();
}

Outcome determinism() {
    Report rep;
    const auto dir = workdir("determinism");
    std::ofstream(dir / "scatter.json") << R"({"format_version": 1, "command": "scatter", "velocities": [16, 32, 64],
        "grid": {"points": 64, "half_width": 8}, "probe": {"width": 0.5},
        "potential": {"short_range": {"kind": "gaussian_bump", "params": [1, 1]},
                      "long_range": {"kind": "power_tail_dollard", "params": [0.45]}},
        "geometry": {"omega_angles": [1.5707963267948966, 1.2], "offsets": [-0.7, 0.0, 0.7], "axes": [1, 2]}})";
    std::ofstream(dir / "estimate.json") << R"({"format_version": 1, "command": "estimate", "velocities": [8, 16, 32, 64],
        "potential": {"very_short": {"kind": "smoothed_coulomb", "params": [1, 0.5]},
                      "short_range": {"kind": "gaussian_bump", "params": [1, 1]}},
        "estimate": {"kinds": ["vs_free", "vs_short_diff"]}})";
    for (const std::string command : {"scatter", "estimate"}) {
        std::vector<std::string> bodies;
        for (const std::string run_name : {"a", "b"}) {
            const auto out = dir / (command + "_" + run_name);
            const std::string cmd = std::string("\"") + STARK_INVERSE_EXE + "\" " + command + " --config \"" +
                                    (dir / (command + ".json")).string() + "\" --out \"" + out.string() +
                                    "\" --jobs " + (run_name == "a" ? "1" : "2") + " >/dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            rep.check(WIFEXITED(status) && WEXITSTATUS(status) == 0, command + " run " + run_name + " exit 0");
            std::string all;
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(out))
                if (e.path().extension() == ".csv") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) all += f.filename().string() + "\n" + slurp(f);
            bodies.push_back(all);
        }
        rep.check(!bodies[0].empty() && bodies[0] == bodies[1], command + " CSV outputs byte-identical");
    }
    return rep.done();
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"propagator exactness", propagator_exactness},
        {"gauge equivalence", gauge_equivalence},
        {"unitarity", unitarity},
        {"moment bounds", moment_bounds},
        {"estimate orders", estimate_orders},
        {"reconstruction identity", identity_check},
        {"zero-potential null", zero_null},
        {"inversion quality", inversion_quality},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::error_code ec;
    fs::remove_all(kRoot, ec);
    return failures == 0 ? 0 : 1;
}
