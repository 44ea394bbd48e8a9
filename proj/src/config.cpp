#include "stark/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "stark/errors.hpp"
#include "stark/estimates.hpp"

namespace stark {

using nlohmann::json;

namespace {

constexpr const char* kCommands[] = {"simulate", "scatter", "estimate", "reconstruct", "validate"};

// Walks one JSON object, remembering its path and which keys were consumed.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <class T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        seen_.insert(key);
        out = convert<T>(j_.at(key), at(key));
    }
    template <class T>
    void require(const std::string& key, T& out) {
        if (!has(key)) throw ConfigError(at(key), "missing required field");
        read(key, out);
    }
    Node child(const std::string& key) {
        seen_.insert(key);
        return {j_.at(key), at(key)};
    }

    // Unknown keys are errors so misspelt class exponents cannot slip through.
    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError(at(k), "unknown field");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    template <class T>
    static T convert(const json& v, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
            const auto x = v.get<long long>();
            if (std::is_unsigned_v<T> && x < 0) throw ConfigError(path, "must not be negative");
            return static_cast<T>(x);
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(path, "expected a number");
            return v.get<double>();
        } else {
            if (!v.is_array()) throw ConfigError(path, "expected an array");
            T out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
            return out;
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void check(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ConfigError(path, what);
}

ClassConfig parse_class(Node n) {
    ClassConfig c;
    n.require("name", c.name);
    if (c.name == "short") {
        n.require("gamma", c.gamma);
        n.require("alpha", c.alpha);
    } else if (c.name == "graf") {
        n.require("gamma", c.gamma);
        n.require("kappa", c.kappa);
    } else if (c.name == "dollard" || c.name == "dollard_wide") {
        n.require("gamma", c.gamma);
    } else if (c.name != "very_short") {
        throw ConfigError(n.at("name"), "unknown class '" + c.name + "'");
    }
    n.finish();
    try {
        check_class(c.tag());
    } catch (const InvalidInput& e) {
        throw ConfigError(n.at("name"), e.what());
    }
    return c;
}

PartConfig parse_part(Node n, const std::string& slot) {
    PartConfig p;
    n.require("kind", p.kind);
    n.read("params", p.params);
    if (n.has("class")) p.decay_class = parse_class(n.child("class"));
    n.finish();
    PotentialSpec spec = PotentialSpec::zero();
    try {
        spec = p.build();
    } catch (const InvalidInput& e) {
        throw ConfigError(n.at("kind"), e.what());
    }
    const bool long_tag = is_long_range(spec.tag());
    const bool very_short = std::holds_alternative<VeryShortRange>(spec.tag());
    if (slot == "long_range" && !long_tag && !spec.is_zero())
        throw ConfigError(n.at("kind"), "long range slot needs a graf or dollard class");
    if (slot != "long_range" && long_tag) throw ConfigError(n.at("kind"), "long range class in a short range slot");
    if (slot == "short_range" && very_short) throw ConfigError(n.at("kind"), "very short class in the short slot");
    return p;
}

GridConfig parse_grid(Node n) {
    GridConfig g;
    n.read("points", g.points);
    n.read("half_width", g.half_width);
    n.finish();
    check(g.points >= 8 && (g.points & (g.points - 1)) == 0, n.at("points"), "must be a power of two >= 8");
    check(g.half_width > 0.0, n.at("half_width"), "must be positive");
    return g;
}

void positive_list(const std::vector<double>& xs, const std::string& path, bool allow_empty = false) {
    check(allow_empty || !xs.empty(), path, "must not be empty");
    for (std::size_t i = 0; i < xs.size(); ++i)
        check(xs[i] > 0.0, path + "[" + std::to_string(i) + "]", "must be positive");
}

json emit_class(const ClassConfig& c) {
    json j{{"name", c.name}};
    if (c.name == "short") {
        j["gamma"] = c.gamma;
        j["alpha"] = c.alpha;
    } else if (c.name == "graf") {
        j["gamma"] = c.gamma;
        j["kappa"] = c.kappa;
    } else if (c.name != "very_short") {
        j["gamma"] = c.gamma;
    }
    return j;
}

json emit_part(const PartConfig& p) {
    json j{{"kind", p.kind}, {"params", p.params}};
    if (p.decay_class) j["class"] = emit_class(*p.decay_class);
    return j;
}

json emit_grid(const GridConfig& g) { return {{"points", g.points}, {"half_width", g.half_width}}; }

}  // namespace

std::string to_string(Command c) { return kCommands[static_cast<int>(c)]; }

Command command_from_string(const std::string& name) {
    for (int i = 0; i < 5; ++i)
        if (name == kCommands[i]) return static_cast<Command>(i);
    throw InvalidInput("unknown command '" + name + "'");
}

PotentialClassTag ClassConfig::tag() const {
    if (name == "very_short") return VeryShortRange{};
    if (name == "short") return ShortRange{gamma, alpha};
    if (name == "graf") return GrafRange{gamma, kappa};
    if (name == "dollard") return DollardRange{gamma};
    if (name == "dollard_wide") return DollardWideRange{gamma};
    throw InvalidInput("unknown class '" + name + "'");
}

PotentialSpec PartConfig::build() const {
    auto spec = make_phantom(kind, params);
    return decay_class ? spec.with_class(decay_class->tag()) : spec;
}

CompositePotential PotentialConfig::build() const {
    CompositePotential v;
    if (very_short) v.very_short = very_short->build();
    if (short_range) v.short_range = short_range->build();
    if (long_range) v.long_range = long_range->build();
    v.check();
    return v;
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("not valid JSON: ") + e.what());
    }
    Node n(root, "");
    ExperimentConfig c;
    n.require("format_version", c.format_version);
    check(c.format_version == kFormatVersion, "format_version",
          "unsupported version " + std::to_string(c.format_version) + " (expected " +
              std::to_string(kFormatVersion) + ")");
    std::string command;
    n.require("command", command);
    try {
        c.command = command_from_string(command);
    } catch (const InvalidInput& e) {
        throw ConfigError("command", e.what());
    }
    n.read("jobs", c.jobs);
    check(c.jobs >= 1, "jobs", "must be at least 1");
    n.read("output_dir", c.output_dir);
    if (n.has("grid")) c.grid = parse_grid(n.child("grid"));

    if (n.has("potential")) {
        auto p = n.child("potential");
        for (const auto& [key, slot] : {std::pair{"very_short", &c.potential.very_short},
                                        std::pair{"short_range", &c.potential.short_range},
                                        std::pair{"long_range", &c.potential.long_range}})
            if (p.has(key)) *slot = parse_part(p.child(key), key);
        p.finish();
    }

    if (n.has("probe")) {
        auto p = n.child("probe");
        p.read("width", c.probe.width);
        p.read("center", c.probe.center);
        p.read("momentum", c.probe.momentum);
        p.finish();
        check(c.probe.width > 0.0, "probe.width", "must be positive");
        check(c.probe.center.size() == 2, "probe.center", "must have two components");
        check(c.probe.momentum.size() == 2, "probe.momentum", "must have two components");
    }

    n.read("velocities", c.velocities);
    positive_list(c.velocities, "velocities");

    if (n.has("geometry")) {
        auto g = n.child("geometry");
        g.read("omega_angles", c.geometry.omega_angles);
        g.read("offsets", c.geometry.offsets);
        g.read("axes", c.geometry.axes);
        g.finish();
        for (std::size_t i = 0; i < c.geometry.axes.size(); ++i)
            check(c.geometry.axes[i] == 1 || c.geometry.axes[i] == 2, "geometry.axes[" + std::to_string(i) + "]",
                  "must be 1 or 2");
        check(!c.geometry.axes.empty(), "geometry.axes", "must not be empty");
    }

    if (n.has("scattering")) {
        auto s = n.child("scattering");
        s.read("taus", c.scattering.taus);
        s.read("scaled", c.scattering.scaled);
        s.read("tolerance", c.scattering.tolerance);
        s.read("modifier", c.scattering.modifier);
        s.finish();
        positive_list(c.scattering.taus, "scattering.taus");
        check(c.scattering.taus.size() >= 3, "scattering.taus", "needs at least three horizons");
        check(c.scattering.tolerance > 0.0, "scattering.tolerance", "must be positive");
        const auto& m = c.scattering.modifier;
        check(m == "auto" || m == "none" || m == "graf" || m == "dollard", "scattering.modifier",
              "must be auto, none, graf or dollard");
    }

    if (n.has("simulate")) {
        auto s = n.child("simulate");
        s.read("times", c.simulate.times);
        s.read("dt", c.simulate.dt);
        s.read("velocity", c.simulate.velocity);
        s.finish();
        positive_list(c.simulate.times, "simulate.times");
        check(c.simulate.dt >= 0.0, "simulate.dt", "must not be negative");
        check(c.simulate.velocity.empty() || c.simulate.velocity.size() == 2, "simulate.velocity",
              "must be empty or have two components");
    }

    if (n.has("estimate")) {
        auto s = n.child("estimate");
        s.read("kinds", c.estimate.kinds);
        s.read("omega_angle", c.estimate.omega_angle);
        s.read("eps2", c.estimate.eps2);
        s.finish();
        check(!c.estimate.kinds.empty(), "estimate.kinds", "must not be empty");
        for (std::size_t i = 0; i < c.estimate.kinds.size(); ++i) {
            try {
                estimate_kind_from_string(c.estimate.kinds[i]);
            } catch (const InvalidInput& e) {
                throw ConfigError("estimate.kinds[" + std::to_string(i) + "]", e.what());
            }
        }
        check(c.estimate.eps2 >= 0.0, "estimate.eps2", "must not be negative");
    }

    if (n.has("reconstruct")) {
        auto s = n.child("reconstruct");
        auto& r = c.reconstruct;
        s.read("directions", r.directions);
        s.read("omega_cap", r.omega_cap);
        s.read("offset_step", r.offset_step);
        s.read("offset_count", r.offset_count);
        s.read("probe_width", r.probe_width);
        if (s.has("grid")) r.grid = parse_grid(s.child("grid"));
        s.read("support_radius", r.support_radius);
        s.read("iterations", r.iterations);
        s.read("inner_radius", r.inner_radius);
        s.read("min_valid_fraction", r.min_valid_fraction);
        s.finish();
        check(r.directions >= 4, "reconstruct.directions", "needs at least four directions");
        check(r.omega_cap > 0.0 && r.omega_cap < 1.0, "reconstruct.omega_cap", "must lie in (0, 1)");
        check(r.offset_step > 0.0, "reconstruct.offset_step", "must be positive");
        check(r.offset_count >= 4, "reconstruct.offset_count", "needs at least four offsets");
        check(r.probe_width > 0.0, "reconstruct.probe_width", "must be positive");
        check(r.support_radius >= 0.0, "reconstruct.support_radius", "must not be negative");
        check(r.iterations >= 0, "reconstruct.iterations", "must not be negative");
        check(r.inner_radius > 0.0, "reconstruct.inner_radius", "must be positive");
        check(r.min_valid_fraction >= 0.0 && r.min_valid_fraction <= 1.0, "reconstruct.min_valid_fraction",
              "must lie in [0, 1]");
    }

    if (n.has("identity")) {
        auto s = n.child("identity");
        auto& d = c.identity;
        s.read("j", d.j);
        s.read("omega_angle", d.omega_angle);
        s.read("offset", d.offset);
        s.read("probe_width", d.probe_width);
        s.read("max_relative_gap", d.max_relative_gap);
        s.read("max_slope", d.max_slope);
        s.finish();
        check(d.j == 1 || d.j == 2, "identity.j", "must be 1 or 2");
        check(d.probe_width > 0.0, "identity.probe_width", "must be positive");
        check(d.max_relative_gap > 0.0, "identity.max_relative_gap", "must be positive");
    }
    n.finish();

    if (c.command == Command::Scatter) {
        check(!c.geometry.omega_angles.empty(), "geometry.omega_angles", "scatter needs directions");
        check(!c.geometry.offsets.empty(), "geometry.offsets", "scatter needs impact offsets");
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
    json pot = json::object();
    if (c.potential.very_short) pot["very_short"] = emit_part(*c.potential.very_short);
    if (c.potential.short_range) pot["short_range"] = emit_part(*c.potential.short_range);
    if (c.potential.long_range) pot["long_range"] = emit_part(*c.potential.long_range);
    const auto& r = c.reconstruct;
    const auto& d = c.identity;
    json root{
        {"format_version", c.format_version},
        {"command", to_string(c.command)},
        {"jobs", c.jobs},
        {"output_dir", c.output_dir},
        {"grid", emit_grid(c.grid)},
        {"potential", pot},
        {"probe", {{"width", c.probe.width}, {"center", c.probe.center}, {"momentum", c.probe.momentum}}},
        {"velocities", c.velocities},
        {"geometry",
         {{"omega_angles", c.geometry.omega_angles}, {"offsets", c.geometry.offsets}, {"axes", c.geometry.axes}}},
        {"scattering",
         {{"taus", c.scattering.taus},
          {"scaled", c.scattering.scaled},
          {"tolerance", c.scattering.tolerance},
          {"modifier", c.scattering.modifier}}},
        {"simulate", {{"times", c.simulate.times}, {"dt", c.simulate.dt}, {"velocity", c.simulate.velocity}}},
        {"estimate",
         {{"kinds", c.estimate.kinds}, {"omega_angle", c.estimate.omega_angle}, {"eps2", c.estimate.eps2}}},
        {"reconstruct",
         {{"directions", r.directions},
          {"omega_cap", r.omega_cap},
          {"offset_step", r.offset_step},
          {"offset_count", r.offset_count},
          {"probe_width", r.probe_width},
          {"grid", emit_grid(r.grid)},
          {"support_radius", r.support_radius},
          {"iterations", r.iterations},
          {"inner_radius", r.inner_radius},
          {"min_valid_fraction", r.min_valid_fraction}}},
        {"identity",
         {{"j", d.j},
          {"omega_angle", d.omega_angle},
          {"offset", d.offset},
          {"probe_width", d.probe_width},
          {"max_relative_gap", d.max_relative_gap},
          {"max_slope", d.max_slope}}},
    };
    return root.dump(2) + "\n";
}

}  // namespace stark
