#include "stark/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stark/errors.hpp"
#include "stark/quadrature.hpp"

namespace stark {

namespace {

template <class... F>
struct overloaded : F... {
    using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

double japanese(const double* x, int dim) {
    double r2 = 1.0;
    for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
    return std::sqrt(r2);
}

struct ZeroModel final : PotentialModel {
    double value(const double*, int) const override { return 0.0; }
    void gradient(const double*, int dim, double* g) const override { std::fill(g, g + dim, 0.0); }
    bool identically_zero() const override { return true; }
};

struct GaussianBump final : PotentialModel {
    double amp, width;
    GaussianBump(double a, double w) : amp(a), width(w) {}
    double value(const double* x, int dim) const override {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
        return amp * std::exp(-r2 / (width * width));
    }
    void gradient(const double* x, int dim, double* g) const override {
        const double v = value(x, dim);
        for (int a = 0; a < dim; ++a) g[a] = -2.0 * x[a] / (width * width) * v;
    }
    bool identically_zero() const override { return amp == 0.0; }
};

struct AnisotropicBump final : PotentialModel {
    double amp, w1, w2, c1, c2;
    AnisotropicBump(double a, double w1_, double w2_, double c1_, double c2_)
        : amp(a), w1(w1_), w2(w2_), c1(c1_), c2(c2_) {}
    double exponent(const double* x, int dim) const {
        double e = (x[0] - c1) * (x[0] - c1) / (w1 * w1) + (x[1] - c2) * (x[1] - c2) / (w2 * w2);
        for (int a = 2; a < dim; ++a) e += x[a] * x[a] / (w2 * w2);
        return e;
    }
    double value(const double* x, int dim) const override { return amp * std::exp(-exponent(x, dim)); }
    void gradient(const double* x, int dim, double* g) const override {
        const double v = value(x, dim);
        g[0] = -2.0 * (x[0] - c1) / (w1 * w1) * v;
        g[1] = -2.0 * (x[1] - c2) / (w2 * w2) * v;
        for (int a = 2; a < dim; ++a) g[a] = -2.0 * x[a] / (w2 * w2) * v;
    }
    bool identically_zero() const override { return amp == 0.0; }
};

// Smooth step: 0 for t <= 0, 1 for t >= 1, C-infinity in between.
double smooth_step(double t, double* deriv) {
    if (t <= 0.0) {
        *deriv = 0.0;
        return 0.0;
    }
    if (t >= 1.0) {
        *deriv = 0.0;
        return 1.0;
    }
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    const double da = a / (t * t), db = -b / ((1.0 - t) * (1.0 - t));
    const double s = a + b;
    *deriv = (da * s - a * (da + db)) / (s * s);
    return a / s;
}

struct SmoothedCoulomb final : PotentialModel {
    double strength, core, r_in, r_out;
    SmoothedCoulomb(double k, double c, double ri, double ro) : strength(k), core(c), r_in(ri), r_out(ro) {}
    double value(const double* x, int dim) const override {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
        double d;
        const double cut = 1.0 - smooth_step((std::sqrt(r2) - r_in) / (r_out - r_in), &d);
        return cut == 0.0 ? 0.0 : strength * cut / std::sqrt(r2 + core * core);
    }
    void gradient(const double* x, int dim, double* g) const override {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
        const double r = std::sqrt(r2);
        double ds;
        const double cut = 1.0 - smooth_step((r - r_in) / (r_out - r_in), &ds);
        const double dcut = -ds / (r_out - r_in);
        const double q = 1.0 / std::sqrt(r2 + core * core);
        for (int a = 0; a < dim; ++a) {
            const double radial = r > 0.0 ? x[a] / r : 0.0;
            g[a] = strength * (-cut * q * q * q * x[a] + dcut * radial * q);
        }
    }
    bool identically_zero() const override { return strength == 0.0; }
    double feature_scale() const override { return core; }
};

// c <x>^-g (1 + sin(<x>^(g-a))/4 + x_1/(4<x>)); the gradient decays like <x>^(-1-a).
struct PowerTailShort final : PotentialModel {
    double gamma, alpha, amp;
    PowerTailShort(double g, double a, double c) : gamma(g), alpha(a), amp(c) {}
    double shape(const double* x, double q) const {
        return 1.0 + 0.25 * std::sin(std::pow(q, gamma - alpha)) + 0.25 * x[0] / q;
    }
    double value(const double* x, int dim) const override {
        const double q = japanese(x, dim);
        return amp * std::pow(q, -gamma) * shape(x, q);
    }
    void gradient(const double* x, int dim, double* g) const override {
        const double q = japanese(x, dim);
        const double b = gamma - alpha;
        const double s = shape(x, q);
        const double osc = 0.25 * std::cos(std::pow(q, b)) * b * std::pow(q, b - 1.0);
        const double qg = std::pow(q, -gamma);
        for (int a = 0; a < dim; ++a) {
            double ds = osc * x[a] / q - 0.25 * x[0] * x[a] / (q * q * q);
            if (a == 0) ds += 0.25 / q;
            g[a] = amp * (-gamma * qg * x[a] / (q * q) * s + qg * ds);
        }
    }
    bool identically_zero() const override { return amp == 0.0; }
};

struct PowerTail final : PotentialModel {
    double gamma, amp;
    PowerTail(double g, double c) : gamma(g), amp(c) {}
    double value(const double* x, int dim) const override { return amp * std::pow(japanese(x, dim), -gamma); }
    void gradient(const double* x, int dim, double* g) const override {
        const double q = japanese(x, dim);
        const double f = -amp * gamma * std::pow(q, -gamma - 2.0);
        for (int a = 0; a < dim; ++a) g[a] = f * x[a];
    }
    bool identically_zero() const override { return amp == 0.0; }
};

// c <x>^-g (1 + sin(<x>^(1/2))/4): derivatives lose exactly half a power each.
struct OscillatingTail final : PotentialModel {
    double gamma, amp;
    OscillatingTail(double g, double c) : gamma(g), amp(c) {}
    double value(const double* x, int dim) const override {
        const double q = japanese(x, dim);
        return amp * std::pow(q, -gamma) * (1.0 + 0.25 * std::sin(std::sqrt(q)));
    }
    void gradient(const double* x, int dim, double* g) const override {
        const double q = japanese(x, dim);
        const double sq = std::sqrt(q);
        const double qg = std::pow(q, -gamma);
        const double s = 1.0 + 0.25 * std::sin(sq);
        const double radial = amp * (-gamma * qg / q * s + qg * 0.125 * std::cos(sq) / sq);
        for (int a = 0; a < dim; ++a) g[a] = radial * x[a] / q;
    }
    bool identically_zero() const override { return amp == 0.0; }
};

struct ShiftedModel final : PotentialModel {
    std::shared_ptr<const PotentialModel> base;
    Vec offset;
    ShiftedModel(std::shared_ptr<const PotentialModel> b, Vec o) : base(std::move(b)), offset(std::move(o)) {}
    double value(const double* x, int dim) const override {
        double y[3];
        for (int a = 0; a < dim; ++a) y[a] = x[a] + offset[a];
        return base->value(y, dim);
    }
    void gradient(const double* x, int dim, double* g) const override {
        double y[3];
        for (int a = 0; a < dim; ++a) y[a] = x[a] + offset[a];
        base->gradient(y, dim, g);
    }
    bool identically_zero() const override { return base->identically_zero(); }
    double feature_scale() const override { return base->feature_scale(); }
};

// Deterministic sample directions on the unit circle or sphere.
std::vector<std::array<double, 3>> directions(int dim, std::size_t count) {
    std::vector<std::array<double, 3>> out(count);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
        if (dim == 2) {
            const double th = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
            out[k] = {std::cos(th), std::sin(th), 0.0};
        } else {
            const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
            const double r = std::sqrt(1.0 - z * z);
            const double phi = golden * static_cast<double>(k);
            out[k] = {r * std::cos(phi), r * std::sin(phi), z};
        }
    }
    return out;
}

std::vector<double> log_radii(std::size_t count, double max_radius) {
    std::vector<double> r(count);
    const double top = std::log1p(max_radius);
    for (std::size_t k = 0; k < count; ++k)
        r[k] = std::expm1(top * static_cast<double>(k) / static_cast<double>(count - 1));
    return r;
}

// Largest |d^b V| <x>^{e_b} over the sample, per order with a defined exponent.
std::array<std::optional<double>, 3> max_ratios(const PotentialSpec& v, std::size_t n_radii, std::size_t n_dirs,
                                                double max_radius) {
    const auto ex = decay_exponents(v.tag());
    std::array<std::optional<double>, 3> best;
    for (int b = 0; b < 3; ++b)
        if (ex[b]) best[b] = 0.0;
    const int dim = v.dim();
    const auto dirs = directions(dim, n_dirs);
    double x[3], g[3];
    for (double r : log_radii(n_radii, max_radius)) {
        for (const auto& d : dirs) {
            for (int a = 0; a < dim; ++a) x[a] = r * d[a];
            const double q = japanese(x, dim);
            if (ex[0]) best[0] = std::max(*best[0], std::abs(v.value(x)) * std::pow(q, *ex[0]));
            if (ex[1]) {
                v.gradient(x, g);
                double gm = 0.0;
                for (int a = 0; a < dim; ++a) gm = std::max(gm, std::abs(g[a]));
                best[1] = std::max(*best[1], gm * std::pow(q, *ex[1]));
            }
            if (ex[2]) best[2] = std::max(*best[2], v.hessian_max(x) * std::pow(q, *ex[2]));
            if (r == 0.0) break;
        }
    }
    return best;
}

constexpr double kFitRadius = 100.0;
constexpr double kFitMargin = 1.01;

}  // namespace

void check_class(const PotentialClassTag& tag) {
    std::visit(overloaded{
                   [](const VeryShortRange&) {},
                   [](const ShortRange& t) {
                       if (!(t.gamma > 0.5 && t.gamma <= 1.0)) throw InvalidInput("short range gamma outside (1/2, 1]");
                       if (!(t.alpha > 0.0 && t.alpha <= t.gamma))
                           throw InvalidInput("short range alpha outside (0, gamma]");
                   },
                   [](const GrafRange& t) {
                       if (!(t.gamma > 0.0 && t.gamma <= 0.5)) throw InvalidInput("graf gamma outside (0, 1/2]");
                       if (!(t.kappa > 1.0 - t.gamma && t.kappa <= 1.0))
                           throw InvalidInput("graf kappa outside (1 - gamma, 1]");
                   },
                   [](const DollardRange& t) {
                       if (!(t.gamma > 0.375 && t.gamma <= 0.5)) throw InvalidInput("dollard gamma outside (3/8, 1/2]");
                   },
                   [](const DollardWideRange& t) {
                       if (!(t.gamma > 0.25 && t.gamma <= 0.5))
                           throw InvalidInput("wide dollard gamma outside (1/4, 1/2]");
                   },
               },
               tag);
}

std::array<std::optional<double>, 3> decay_exponents(const PotentialClassTag& tag) {
    return std::visit(
        overloaded{
            [](const VeryShortRange&) -> std::array<std::optional<double>, 3> { return {2.0, {}, {}}; },
            [](const ShortRange& t) -> std::array<std::optional<double>, 3> {
                return {t.gamma, 1.0 + t.alpha, {}};
            },
            [](const GrafRange& t) -> std::array<std::optional<double>, 3> {
                return {t.gamma, t.gamma + t.kappa, t.gamma + 2.0 * t.kappa};
            },
            [](const DollardRange& t) -> std::array<std::optional<double>, 3> {
                return {t.gamma, t.gamma + 0.5, t.gamma + 1.0};
            },
            [](const DollardWideRange& t) -> std::array<std::optional<double>, 3> {
                return {t.gamma, t.gamma + 0.5, t.gamma + 1.0};
            },
        },
        tag);
}

std::string describe(const PotentialClassTag& tag) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const VeryShortRange&) { os << "very_short"; },
                   [&](const ShortRange& t) { os << "short(gamma=" << t.gamma << ",alpha=" << t.alpha << ")"; },
                   [&](const GrafRange& t) { os << "graf(gamma=" << t.gamma << ",kappa=" << t.kappa << ")"; },
                   [&](const DollardRange& t) { os << "dollard(gamma=" << t.gamma << ")"; },
                   [&](const DollardWideRange& t) { os << "dollard_wide(gamma=" << t.gamma << ")"; },
               },
               tag);
    return os.str();
}

bool is_long_range(const PotentialClassTag& tag) {
    return std::holds_alternative<GrafRange>(tag) || std::holds_alternative<DollardRange>(tag) ||
           std::holds_alternative<DollardWideRange>(tag);
}

PotentialSpec::PotentialSpec(std::string kind, std::shared_ptr<const PotentialModel> model, PotentialClassTag tag,
                             int dim)
    : kind_(std::move(kind)), model_(std::move(model)), tag_(tag), dim_(dim) {
    if (dim != 2 && dim != 3) throw InvalidInput("potential dimension must be 2 or 3");
    check_class(tag_);
    const auto fitted = max_ratios(*this, 96, dim == 2 ? 24 : 48, kFitRadius);
    for (int b = 0; b < 3; ++b)
        if (fitted[b]) constants_[b] = *fitted[b] * kFitMargin;
}

PotentialSpec PotentialSpec::zero(int dim) {
    return PotentialSpec("zero", std::make_shared<ZeroModel>(), VeryShortRange{}, dim);
}

double PotentialSpec::partial(const Vec& x, int j) const {
    if (j < 1 || j > dim_) throw InvalidInput("partial derivative index out of range");
    double g[3];
    model_->gradient(x.data(), dim_, g);
    return g[j - 1];
}

double PotentialSpec::hessian_max(const double* x) const {
    const double h = 1e-5 * japanese(x, dim_);
    double y[3], gp[3], gm[3];
    double best = 0.0;
    for (int a = 0; a < dim_; ++a) {
        std::copy(x, x + dim_, y);
        y[a] = x[a] + h;
        model_->gradient(y, dim_, gp);
        y[a] = x[a] - h;
        model_->gradient(y, dim_, gm);
        for (int b = 0; b < dim_; ++b) best = std::max(best, std::abs(gp[b] - gm[b]) / (2.0 * h));
    }
    return best;
}

PotentialSpec PotentialSpec::with_class(PotentialClassTag tag) const { return {kind_, model_, tag, dim_}; }

PotentialSpec PotentialSpec::shifted(const Vec& offset) const {
    if (static_cast<int>(offset.size()) != dim_) throw InvalidInput("shift has wrong dimension");
    PotentialSpec out(*this);
    out.model_ = std::make_shared<ShiftedModel>(model_, offset);
    return out;
}

void PotentialSpec::sample(const GridSpec& grid, const double* shift, double* out) const {
    std::fill(out, out + grid.size(), 0.0);
    add_sample(grid, shift, out);
}

namespace {
// Calls fn(flat, x) for every lattice point with x = lattice coordinate + shift.
template <class Fn>
void for_each_point(const GridSpec& grid, const double* shift, Fn&& fn) {
    const std::size_t n = grid.points_per_axis();
    const int dim = grid.dim();
    std::vector<double> axis[3];
    for (int a = 0; a < dim; ++a) {
        axis[a].resize(n);
        for (std::size_t i = 0; i < n; ++i) axis[a][i] = grid.coordinate(i) + (shift ? shift[a] : 0.0);
    }
    double x[3];
    std::size_t flat = 0;
    const std::size_t n2 = dim == 3 ? n : 1;
    for (std::size_t i0 = 0; i0 < n; ++i0) {
        x[0] = axis[0][i0];
        for (std::size_t i1 = 0; i1 < n; ++i1) {
            x[1] = axis[1][i1];
            for (std::size_t i2 = 0; i2 < n2; ++i2) {
                if (dim == 3) x[2] = axis[2][i2];
                fn(flat++, x);
            }
        }
    }
}
}  // namespace

void PotentialSpec::add_sample(const GridSpec& grid, const double* shift, double* out) const {
    if (grid.dim() != dim_) throw InvalidInput("potential and grid dimensions differ");
    if (model_->identically_zero()) return;
    const PotentialModel& m = *model_;
    const int dim = dim_;
    for_each_point(grid, shift, [&](std::size_t i, const double* x) { out[i] += m.value(x, dim); });
}

void PotentialSpec::add_partial_sample(const GridSpec& grid, const double* shift, int j, double* out) const {
    if (grid.dim() != dim_) throw InvalidInput("potential and grid dimensions differ");
    if (j < 1 || j > dim_) throw InvalidInput("partial derivative index out of range");
    if (model_->identically_zero()) return;
    const PotentialModel& m = *model_;
    const int dim = dim_;
    double g[3];
    for_each_point(grid, shift, [&](std::size_t i, const double* x) {
        m.gradient(x, dim, g);
        out[i] += g[j - 1];
    });
}

void CompositePotential::check() const {
    if (very_short && !std::holds_alternative<VeryShortRange>(very_short->tag()))
        throw InvalidInput("very short part must carry the very short class tag");
    if (short_range && !std::holds_alternative<ShortRange>(short_range->tag()))
        throw InvalidInput("short range part must carry the short range class tag");
    if (long_range && !is_long_range(long_range->tag()))
        throw InvalidInput("long range part must carry a long range class tag");
    const auto ps = parts();
    for (const auto* p : ps)
        if (p->dim() != ps.front()->dim()) throw InvalidInput("potential parts have different dimensions");
}

std::vector<const PotentialSpec*> CompositePotential::parts() const {
    std::vector<const PotentialSpec*> out;
    if (very_short) out.push_back(&*very_short);
    if (short_range) out.push_back(&*short_range);
    if (long_range) out.push_back(&*long_range);
    return out;
}

bool CompositePotential::is_zero() const {
    for (const auto* p : parts())
        if (!p->is_zero()) return false;
    return true;
}

int CompositePotential::dim() const {
    const auto ps = parts();
    return ps.empty() ? 2 : ps.front()->dim();
}

double CompositePotential::value(const double* x) const {
    double s = 0.0;
    for (const auto* p : parts()) s += p->value(x);
    return s;
}

double CompositePotential::short_value(const double* x) const {
    double s = 0.0;
    if (very_short) s += very_short->value(x);
    if (short_range) s += short_range->value(x);
    return s;
}

double CompositePotential::smallest_feature() const {
    double f = 0.0;
    for (const auto* p : parts())
        if (p->feature_scale() > 0.0) f = f == 0.0 ? p->feature_scale() : std::min(f, p->feature_scale());
    return f;
}

CompositePotential CompositePotential::shifted(const Vec& offset) const {
    CompositePotential out;
    if (very_short) out.very_short = very_short->shifted(offset);
    if (short_range) out.short_range = short_range->shifted(offset);
    if (long_range) out.long_range = long_range->shifted(offset);
    return out;
}

void CompositePotential::add_sample(const GridSpec& grid, const double* shift, double* out) const {
    for (const auto* p : parts()) p->add_sample(grid, shift, out);
}

namespace {
double param(const std::vector<double>& p, std::size_t i, const std::string& kind) {
    if (i >= p.size()) throw InvalidInput(kind + ": missing parameter " + std::to_string(i));
    if (!std::isfinite(p[i])) throw InvalidInput(kind + ": non-finite parameter");
    return p[i];
}
double param_or(const std::vector<double>& p, std::size_t i, double fallback) {
    return i < p.size() ? p[i] : fallback;
}
}  // namespace

PotentialSpec make_phantom(const std::string& kind, const std::vector<double>& p, int dim) {
    if (kind == "zero") return PotentialSpec::zero(dim);
    if (kind == "gaussian_bump") {
        const double w = param(p, 1, kind);
        if (!(w > 0.0)) throw InvalidInput("gaussian_bump width must be positive");
        return {kind, std::make_shared<GaussianBump>(param(p, 0, kind), w), ShortRange{1.0, 1.0}, dim};
    }
    if (kind == "smoothed_coulomb") {
        const double core = param(p, 1, kind);
        const double r_in = param_or(p, 2, 3.0), r_out = param_or(p, 3, 5.0);
        if (!(core > 0.0)) throw InvalidInput("smoothed_coulomb core must be positive");
        if (!(r_in > 0.0 && r_out > r_in)) throw InvalidInput("smoothed_coulomb cutoff radii must increase");
        return {kind, std::make_shared<SmoothedCoulomb>(param(p, 0, kind), core, r_in, r_out), VeryShortRange{}, dim};
    }
    if (kind == "power_tail_short") {
        const double g = param(p, 0, kind), a = param(p, 1, kind);
        return {kind, std::make_shared<PowerTailShort>(g, a, param_or(p, 2, 1.0)), ShortRange{g, a}, dim};
    }
    if (kind == "power_tail_graf") {
        const double g = param(p, 0, kind), k = param_or(p, 1, 1.0);
        return {kind, std::make_shared<PowerTail>(g, param_or(p, 2, 1.0)), GrafRange{g, k}, dim};
    }
    if (kind == "power_tail_dollard") {
        const double g = param(p, 0, kind);
        PotentialClassTag tag = g > 0.375 ? PotentialClassTag{DollardRange{g}} : PotentialClassTag{DollardWideRange{g}};
        return {kind, std::make_shared<OscillatingTail>(g, param_or(p, 1, 1.0)), tag, dim};
    }
    if (kind == "anisotropic_bump") {
        const double w1 = param(p, 1, kind), w2 = param(p, 2, kind);
        if (!(w1 > 0.0 && w2 > 0.0)) throw InvalidInput("anisotropic_bump widths must be positive");
        return {kind,
                std::make_shared<AnisotropicBump>(param(p, 0, kind), w1, w2, param_or(p, 3, 0.0), param_or(p, 4, 0.0)),
                ShortRange{1.0, 1.0}, dim};
    }
    throw InvalidInput("unknown phantom kind '" + kind + "'");
}

DecayReport validate_decay(const PotentialSpec& v, std::size_t samples, double max_radius) {
    if (samples < 1000) throw InvalidInput("decay validation needs at least 1000 samples");
    if (!(max_radius > 0.0)) throw InvalidInput("decay validation radius must be positive");
    const std::size_t dirs = v.dim() == 2 ? 16 : 32;
    const std::size_t radii = (samples + dirs - 1) / dirs;
    DecayReport rep;
    rep.max_ratio = max_ratios(v, radii, dirs, max_radius);
    rep.constants = v.envelope_constants();
    rep.max_radius = max_radius;
    rep.samples = radii * dirs;
    rep.pass = true;
    std::ostringstream os;
    for (int b = 0; b < 3; ++b) {
        if (!rep.max_ratio[b]) continue;
        const double c = rep.constants[b].value_or(0.0);
        if (*rep.max_ratio[b] > c * (1.0 + 1e-9)) {
            rep.pass = false;
            os << "order " << b << ": ratio " << *rep.max_ratio[b] << " exceeds envelope " << c << "; ";
        }
    }
    rep.detail = rep.pass ? "within envelope (" + describe(v.tag()) + ")" : os.str() + describe(v.tag());
    return rep;
}

void check_direction(const Vec& omega, int dim) {
    if (static_cast<int>(omega.size()) != dim) throw InvalidInput("direction has wrong dimension");
    if (std::abs(norm2(omega) - 1.0) > 1e-12) throw InvalidInput("direction must be a unit vector");
}

namespace {
LineOptions xray_options() {
    LineOptions o;
    o.abs_tol = 1e-10;
    o.first_segment = 4.0;
    return o;
}
}  // namespace

double xray_transform(const PotentialSpec& v, const Vec& omega, const Vec& y) {
    check_direction(omega, v.dim());
    if (static_cast<int>(y.size()) != v.dim()) throw InvalidInput("offset has wrong dimension");
    if (v.is_zero()) return 0.0;
    const int dim = v.dim();
    auto f = [&](double t) {
        double x[3];
        for (int a = 0; a < dim; ++a) x[a] = y[a] + t * omega[a];
        return v.value(x);
    };
    return integrate_line(f, xray_options()).value;
}

double xray_gradient_transform(const PotentialSpec& v, int j, const Vec& omega, const Vec& y) {
    check_direction(omega, v.dim());
    if (j < 1 || j > v.dim()) throw InvalidInput("gradient component out of range");
    if (static_cast<int>(y.size()) != v.dim()) throw InvalidInput("offset has wrong dimension");
    if (v.is_zero()) return 0.0;
    const int dim = v.dim();
    auto f = [&](double t) {
        double x[3], g[3];
        for (int a = 0; a < dim; ++a) x[a] = y[a] + t * omega[a];
        v.gradient(x, g);
        return g[j - 1];
    };
    return integrate_line(f, xray_options()).value;
}

double xray_transform(const CompositePotential& v, const Vec& omega, const Vec& y) {
    double s = 0.0;
    for (const auto* p : v.parts()) s += xray_transform(*p, omega, y);
    return s;
}

// Smooth parts only: the very short part need not be differentiable.
double xray_gradient_transform(const CompositePotential& v, int j, const Vec& omega, const Vec& y) {
    double s = 0.0;
    if (v.short_range) s += xray_gradient_transform(*v.short_range, j, omega, y);
    if (v.long_range) s += xray_gradient_transform(*v.long_range, j, omega, y);
    return s;
}

}  // namespace stark
