#include "stark/propagators.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "stark/errors.hpp"
#include "stark/quadrature.hpp"

namespace stark {

namespace {

constexpr std::size_t kBoundaryCheckEvery = 64;

std::vector<double> half_k2(const GridSpec& g) {
    const auto k = g.wavenumber_axes();
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int a = 0; a < g.dim(); ++a) out[i] += 0.5 * k[a][i] * k[a][i];
    return out;
}

double max_k2_half(const GridSpec& g) {
    const double k = g.nyquist();
    return 0.5 * g.dim() * k * k;
}

void check_norm(double before, double after, const char* where) {
    if (std::abs(after - before) > 1e-9 * std::max(before, 1e-300))
        throw StepSizeError(std::string(where) + ": norm drift " + std::to_string(after - before));
}

double field_norm(const GridSpec& g, const Field& f) {
    std::vector<double> m(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) m[i] = std::norm(f[i]);
    return std::sqrt(pairwise_sum(m) * g.cell_volume());
}

// Integral of f over [0, t] in geometrically growing pieces.
double segmented_integral(const ScalarFn& f, double t, double first, double rel_tol) {
    if (t == 0.0) return 0.0;
    const double s = t > 0.0 ? 1.0 : -1.0;
    const double T = std::abs(t);
    double a = 0.0, b = std::min(first, T), acc = 0.0;
    while (true) {
        auto g = [&](double tau) { return f(s * tau); };
        double err = 0.0;
        double piece = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, 0, rel_tol, &err);
        // The Kronrod error estimate bottoms out near a few ulps of the
        // integrand, so short pieces cannot meet a tight relative tolerance.
        const double floor = 1e-14;
        if (err > std::max(rel_tol * std::abs(piece), floor)) {
            const double tol = std::max(rel_tol, floor / std::max(std::abs(piece), floor));
            piece = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, 10, tol, &err);
        }
        acc += piece;
        if (b >= T) break;
        a = b;
        b = std::min(2.0 * b, T);
    }
    return s * acc;
}

}  // namespace

double PropagationPlan::kinetic_step_limit(const GridSpec& grid) {
    return 0.9 * std::numbers::pi / max_k2_half(grid);
}

void PropagationPlan::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive");
    if (dt * max_k2_half(grid) >= std::numbers::pi)
        throw StepSizeError("time step " + std::to_string(dt) + " wraps the kinetic phase (limit " +
                            std::to_string(std::numbers::pi / max_k2_half(grid)) + ")");
    potential.check();
    if (!potential.parts().empty() && potential.dim() != grid.dim())
        throw InvalidInput("potential and grid dimensions differ");
    const double feature = potential.smallest_feature();
    if (feature > 0.0 && feature < 2.0 * grid.spacing())
        throw InvalidInput("potential feature scale " + std::to_string(feature) + " is below two grid cells");
    if (const auto* c = std::get_if<ComovingGauge>(&gauge))
        if (static_cast<int>(c->velocity.size()) != grid.dim()) throw InvalidInput("velocity has wrong dimension");
}

Vec stark_trajectory(const Vec& v, double t) {
    Vec x(v.size());
    for (std::size_t a = 0; a < v.size(); ++a) x[a] = v[a] * t;
    if (!x.empty()) x[0] += 0.5 * t * t;
    return x;
}

WaveFunction free_kinetic_propagate(const WaveFunction& psi, double t) {
    const auto& g = psi.grid();
    auto spec = Spectral::for_grid(g);
    const auto k2 = half_k2(g);
    Field f(psi.amplitudes());
    spec->forward_raw(f.data());
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(s, -t * k2[i]);
    spec->inverse_raw(f.data());
    return {g, std::move(f)};
}

WaveFunction free_stark_propagate(const WaveFunction& psi, double t) {
    const auto& g = psi.grid();
    const double eta = effective_momentum_radius(psi);
    if (eta + std::abs(t) >= g.nyquist()) throw AliasingRisk("free Stark flow pushes momentum past Nyquist");
    auto spec = Spectral::for_grid(g);
    const auto k = g.wavenumber_axes();
    const auto x = g.coordinate_axes();
    const auto k2 = half_k2(g);
    Field f(psi.amplitudes());
    spec->forward_raw(f.data());
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(s, -t * k2[i] - 0.5 * t * t * k[0][i]);
    spec->inverse_raw(f.data());
    const double global = -t * t * t / 6.0;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(1.0, t * x[0][i] + global);
    require_interior(g, f, "free_stark_propagate");
    return {g, std::move(f)};
}

ComovingStepper::ComovingStepper(const PropagationPlan& plan, Vec velocity)
    : plan_(plan), velocity_(std::move(velocity)) {
    plan_.validate();
    if (static_cast<int>(velocity_.size()) != plan_.grid.dim()) throw InvalidInput("velocity has wrong dimension");
}

std::size_t ComovingStepper::steps_between(double t0, double t1) const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(t1 - t0) / plan_.dt - 1e-9)));
}

void ComovingStepper::potential_phase(const std::vector<Field*>& states, double t, double weight,
                                      std::vector<double>& vbuf, Field& phase) const {
    const auto& g = plan_.grid;
    std::fill(vbuf.begin(), vbuf.end(), 0.0);
    const Vec X = stark_trajectory(velocity_, t);
    plan_.potential.add_sample(g, X.data(), vbuf.data());
    for (std::size_t i = 0; i < g.size(); ++i) phase[i] = std::polar(1.0, -weight * vbuf[i]);
    for (Field* f : states)
        for (std::size_t i = 0; i < g.size(); ++i) (*f)[i] *= phase[i];
}

void ComovingStepper::propagate(const std::vector<Field*>& states, double t0, double t1) const {
    if (t0 == t1 || states.empty()) return;
    const auto& g = plan_.grid;
    for (Field* f : states)
        if (f->size() != g.size()) throw InvalidInput("state does not match the propagation grid");
    std::vector<double> before;
    for (Field* f : states) before.push_back(field_norm(g, *f));

    const std::size_t n = steps_between(t0, t1);
    const double h = (t1 - t0) / static_cast<double>(n);
    auto spec = Spectral::for_grid(g);
    const auto k2 = half_k2(g);
    Field kin(g.size());
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) kin[i] = std::polar(s, -h * k2[i]);

    const bool free = plan_.potential.is_zero();
    std::vector<double> vbuf(free ? 0 : g.size());
    Field phase(free ? 0 : g.size());
    if (!free) potential_phase(states, t0, 0.5 * h, vbuf, phase);
    for (std::size_t step = 1; step <= n; ++step) {
        for (Field* f : states) {
            spec->forward_raw(f->data());
            for (std::size_t i = 0; i < g.size(); ++i) (*f)[i] *= kin[i];
            spec->inverse_raw(f->data());
        }
        const double t = step == n ? t1 : t0 + static_cast<double>(step) * h;
        if (!free) potential_phase(states, t, step == n ? 0.5 * h : h, vbuf, phase);
        if (step % kBoundaryCheckEvery == 0)
            for (Field* f : states) require_interior(g, *f, "comoving_full_propagate");
    }
    for (std::size_t k = 0; k < states.size(); ++k) {
        require_interior(g, *states[k], "comoving_full_propagate");
        check_norm(before[k], field_norm(g, *states[k]), "comoving_full_propagate");
    }
}

std::vector<WaveFunction> comoving_full_propagate(const std::vector<WaveFunction>& states, const Vec& v, double t0,
                                                  double t1, const PropagationPlan& plan) {
    ComovingStepper stepper(plan, v);
    std::vector<Field> fields;
    for (const auto& s : states) {
        if (s.grid() != plan.grid) throw InvalidInput("state does not match the propagation grid");
        fields.push_back(s.amplitudes());
    }
    std::vector<Field*> ptrs;
    for (auto& f : fields) ptrs.push_back(&f);
    stepper.propagate(ptrs, t0, t1);
    std::vector<WaveFunction> out;
    for (auto& f : fields) out.emplace_back(plan.grid, std::move(f));
    return out;
}

WaveFunction comoving_full_propagate(const WaveFunction& u, const Vec& v, double t0, double t1,
                                     const PropagationPlan& plan) {
    return comoving_full_propagate(std::vector<WaveFunction>{u}, v, t0, t1, plan).front();
}

WaveFunction lab_frame_propagate(const WaveFunction& psi, double t0, double t1, const PropagationPlan& plan) {
    plan.validate();
    const auto& g = plan.grid;
    if (psi.grid() != g) throw InvalidInput("state does not match the propagation grid");
    const std::size_t n =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(t1 - t0) / plan.dt - 1e-9)));
    const double h = (t1 - t0) / static_cast<double>(n);
    auto spec = Spectral::for_grid(g);
    const auto k2 = half_k2(g);
    const auto x = g.coordinate_axes();
    std::vector<double> pot(g.size(), 0.0);
    plan.potential.add_sample(g, nullptr, pot.data());
    for (std::size_t i = 0; i < g.size(); ++i) pot[i] -= x[0][i];
    Field half(g.size()), full(g.size()), kin(g.size());
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        half[i] = std::polar(1.0, -0.5 * h * pot[i]);
        full[i] = half[i] * half[i];
        kin[i] = std::polar(s, -h * k2[i]);
    }
    Field f(psi.amplitudes());
    const double before = field_norm(g, f);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] *= half[i];
    for (std::size_t step = 1; step <= n; ++step) {
        spec->forward_raw(f.data());
        for (std::size_t i = 0; i < g.size(); ++i) f[i] *= kin[i];
        spec->inverse_raw(f.data());
        const Field& ph = step == n ? half : full;
        for (std::size_t i = 0; i < g.size(); ++i) f[i] *= ph[i];
        if (step % kBoundaryCheckEvery == 0) require_interior(g, f, "lab_frame_propagate");
    }
    require_interior(g, f, "lab_frame_propagate");
    check_norm(before, field_norm(g, f), "lab_frame_propagate");
    return {g, std::move(f)};
}

WaveFunction comoving_to_lab(const WaveFunction& u, const Vec& v, double t) {
    const auto& g = u.grid();
    if (static_cast<int>(v.size()) != g.dim()) throw InvalidInput("velocity has wrong dimension");
    auto spec = Spectral::for_grid(g);
    const auto k = g.wavenumber_axes();
    const auto x = g.coordinate_axes();
    Field f(u.amplitudes());
    spec->forward_raw(f.data());
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double ph = -0.5 * t * t * k[0][i];
        for (int a = 0; a < g.dim(); ++a) ph -= t * v[a] * k[a][i];
        f[i] *= std::polar(s, ph);
    }
    spec->inverse_raw(f.data());
    const double global = -t * t * t / 6.0 - 0.5 * t * dot(v, v) - 0.5 * t * t * v[0];
    for (std::size_t i = 0; i < f.size(); ++i) {
        double ph = global + t * x[0][i];
        for (int a = 0; a < g.dim(); ++a) ph += v[a] * x[a][i];
        f[i] *= std::polar(1.0, ph);
    }
    return {g, std::move(f)};
}

double dollard_phase(const Vec& xi, double t, const PotentialSpec& vl) {
    if (static_cast<int>(xi.size()) != vl.dim()) throw InvalidInput("momentum has wrong dimension");
    if (vl.is_zero() || t == 0.0) return 0.0;
    const int dim = vl.dim();
    auto f = [&](double tau) {
        double x[3];
        for (int a = 0; a < dim; ++a) x[a] = xi[a] * tau;
        x[0] += 0.5 * tau * tau;
        return vl.value(x);
    };
    const double first = 0.25 / (1.0 + norm2(xi));
    const double val = segmented_integral(f, t, first, 1e-13);
    if (!std::isfinite(val)) throw ToleranceError("dollard phase is not finite");
    return val;
}

DollardPhaseTable::DollardPhaseTable(const GridSpec& grid, Vec velocity, PotentialSpec vl, std::vector<char> mask)
    : grid_(grid), velocity_(std::move(velocity)), vl_(std::move(vl)), phase_(grid.size(), 0.0) {
    if (static_cast<int>(velocity_.size()) != grid.dim()) throw InvalidInput("velocity has wrong dimension");
    if (vl_.dim() != grid.dim()) throw InvalidInput("potential and grid dimensions differ");
    if (!mask.empty() && mask.size() != grid.size()) throw InvalidInput("mask does not match grid");
    const auto k = grid.wavenumber_axes();
    xi_.assign(grid.dim(), {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!mask.empty() && !mask[i]) continue;
        active_.push_back(i);
        for (int a = 0; a < grid.dim(); ++a) xi_[a].push_back(k[a][i] + velocity_[a]);
    }
}

const std::vector<double>& DollardPhaseTable::advance(double t) {
    if (t == time_) return phase_;
    if (time_ != 0.0 && (t * time_ < 0.0 || std::abs(t) < std::abs(time_)))
        throw InvalidInput("dollard phase table only advances away from t = 0");
    if (vl_.is_zero()) {
        time_ = t;
        return phase_;
    }
    const int dim = grid_.dim();
    const double a = time_, b = t;
    for (std::size_t m = 0; m < active_.size(); ++m) {
        double xi[3];
        for (int d = 0; d < dim; ++d) xi[d] = xi_[d][m];
        auto f = [&](double tau) {
            double x[3];
            for (int d = 0; d < dim; ++d) x[d] = xi[d] * tau;
            x[0] += 0.5 * tau * tau;
            return vl_.value(x);
        };
        double piece = 0.0;
        if (a == 0.0) {
            Vec v(xi, xi + dim);
            piece = dollard_phase(v, b, vl_);
        } else {
            // Fixed Gauss-Legendre on pieces short against the local scale of
            // tau -> V_l(xi tau + e_1 tau^2/2).
            double speed = 0.0;
            for (int d = 0; d < dim; ++d) speed += xi[d] * xi[d];
            const double scale = 0.1 * std::max(std::abs(a), 1.0 / (1.0 + std::sqrt(speed)));
            const auto pieces = static_cast<std::size_t>(std::ceil(std::abs(b - a) / scale));
            const double w = (b - a) / static_cast<double>(pieces);
            for (std::size_t q = 0; q < pieces; ++q)
                piece += boost::math::quadrature::gauss<double, 8>::integrate(f, a + q * w, a + (q + 1) * w);
        }
        phase_[active_[m]] += piece;
    }
    time_ = t;
    return phase_;
}

void apply_momentum_phase(Field& f, const GridSpec& g, const std::vector<double>& phase, double sign) {
    auto spec = Spectral::for_grid(g);
    spec->forward_raw(f.data());
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(s, -sign * phase[i]);
    spec->inverse_raw(f.data());
}

WaveFunction apply_dollard_modifier(const WaveFunction& psi, double t, const PotentialSpec& vl, const Vec& v) {
    DollardPhaseTable table(psi.grid(), v, vl);
    Field f(psi.amplitudes());
    apply_momentum_phase(f, psi.grid(), table.advance(t), 1.0);
    return {psi.grid(), std::move(f)};
}

double graf_phase(const Vec& v, double t, const PotentialSpec& vs) { return dollard_phase(v, t, vs); }

GrafLimit graf_phase_limit(const Vec& v, int sign, const PotentialSpec& vs, double tol) {
    if (static_cast<int>(v.size()) != vs.dim()) throw InvalidInput("velocity has wrong dimension");
    if (is_long_range(vs.tag())) throw DivergenceError("graf phase limit needs a short range potential");
    const double s = sign >= 0 ? 1.0 : -1.0;
    if (vs.is_zero()) return {0.0, 0.0, 0.0};
    const double gamma = *decay_exponents(vs.tag())[0];
    const double c0 = vs.envelope_constants()[0].value_or(0.0);
    const double speed = norm2(v);
    const double delta = speed > 0.0 ? std::abs(v[0]) / speed : 1.0;
    const double lower = std::sqrt(std::max(0.0, 1.0 - delta * delta));
    const int dim = vs.dim();
    auto f = [&](double tau) {
        double x[3];
        for (int a = 0; a < dim; ++a) x[a] = v[a] * tau;
        x[0] += 0.5 * tau * tau;
        return vs.value(x);
    };
    // |X(tau)| >= sqrt(1 - delta^2) max(|v| tau, tau^2 / 2).
    auto tail = [&](double T) {
        if (lower == 0.0) return std::numeric_limits<double>::infinity();
        return c0 * std::pow(0.5 * lower, -gamma) * std::pow(T, 1.0 - 2.0 * gamma) / (2.0 * gamma - 1.0);
    };
    double T = 1.0;
    double acc = segmented_integral(f, s * T, 0.25 / (1.0 + speed), 1e-13);
    while (tail(T) > tol) {
        if (T > 1e15) throw ToleranceError("graf phase tail bound cannot reach tolerance");
        double err = 0.0;
        acc += s * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                       [&](double tau) { return f(s * tau); }, T, 2.0 * T, 12, 1e-13, &err);
        T *= 2.0;
    }
    return {acc, tail(T), s * T};
}

cplx graf_limit_factor(const Vec& v, const PotentialSpec& vs, double tol) {
    const auto plus = graf_phase_limit(v, +1, vs, tol);
    const auto minus = graf_phase_limit(v, -1, vs, tol);
    return std::polar(1.0, -plus.phase) * std::conj(std::polar(1.0, -minus.phase));
}

}  // namespace stark
