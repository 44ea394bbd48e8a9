#include "stark/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "stark/errors.hpp"

namespace stark {

namespace {

const std::map<std::string, EstimateKind>& kind_names() {
    static const std::map<std::string, EstimateKind> m{
        {"vs_free", EstimateKind::VsFree},
        {"vs_short_diff", EstimateKind::VsShortDiff},
        {"vs_free_dollard", EstimateKind::VsFreeDollard},
        {"vs_short_diff_dollard", EstimateKind::VsShortDiffDollard},
        {"vl_diff_graf", EstimateKind::VlDiffGraf},
        {"vl_diff_dollard", EstimateKind::VlDiffDollard},
    };
    return m;
}

bool uses_dollard(EstimateKind k) {
    return k == EstimateKind::VsFreeDollard || k == EstimateKind::VsShortDiffDollard ||
           k == EstimateKind::VlDiffGraf || k == EstimateKind::VlDiffDollard;
}

bool is_vl(EstimateKind k) { return k == EstimateKind::VlDiffGraf || k == EstimateKind::VlDiffDollard; }

bool is_free(EstimateKind k) { return k == EstimateKind::VsFree || k == EstimateKind::VsFreeDollard; }

}  // namespace

std::string to_string(EstimateKind kind) {
    for (const auto& [name, k] : kind_names())
        if (k == kind) return name;
    return "unknown";
}

EstimateKind estimate_kind_from_string(const std::string& name) {
    auto it = kind_names().find(name);
    if (it == kind_names().end()) throw InvalidInput("unknown estimate kind '" + name + "'");
    return it->second;
}

EstimateIntegrand::EstimateIntegrand(EstimateKind kind, Vec velocity, CompositePotential potential, WaveFunction phi0)
    : kind_(kind), v_(std::move(velocity)), pot_(std::move(potential)), phi0_(std::move(phi0)) {
    const auto& g = phi0_.grid();
    pot_.check();
    if (static_cast<int>(v_.size()) != g.dim()) throw InvalidInput("velocity has wrong dimension");
    if (!(norm2(v_) > 0.0)) throw InvalidInput("estimate velocity must be nonzero");
    if (is_free(kind_) && !pot_.very_short) throw InvalidInput(to_string(kind_) + " needs a very short range part");
    if ((kind_ == EstimateKind::VsShortDiff || kind_ == EstimateKind::VsShortDiffDollard) && !pot_.short_range)
        throw InvalidInput(to_string(kind_) + " needs a short range part");
    if (uses_dollard(kind_) && !pot_.long_range) throw InvalidInput(to_string(kind_) + " needs a long range part");
    if (kind_ == EstimateKind::VlDiffGraf && !std::holds_alternative<GrafRange>(pot_.long_range->tag()))
        throw InvalidInput("vl_diff_graf needs a graf class long range part");
    if (kind_ == EstimateKind::VlDiffDollard && std::holds_alternative<GrafRange>(pot_.long_range->tag()))
        throw InvalidInput("vl_diff_dollard needs a dollard class long range part");
    require_interior(g, phi0_.amplitudes(), "estimate probe");

    phi_hat_ = phi0_.amplitudes();
    Spectral::for_grid(g)->forward_raw(phi_hat_.data());
    k_ = g.wavenumber_axes();
    x_ = g.coordinate_axes();
    k2_.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int a = 0; a < g.dim(); ++a) k2_[i] += 0.5 * k_[a][i] * k_[a][i];

    double peak = 0.0, xpeak = 0.0;
    for (const auto& z : phi_hat_) peak = std::max(peak, std::norm(z));
    for (const auto& z : phi0_.amplitudes()) xpeak = std::max(xpeak, std::norm(z));
    std::vector<char> mask(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) mask[i] = std::norm(phi_hat_[i]) > 1e-24 * peak;
    double support = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::norm(phi0_.amplitudes()[i]) <= 1e-24 * xpeak) continue;
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) r2 += x_[a][i] * x_[a][i];
        support = std::max(support, std::sqrt(r2));
    }
    const double eta = effective_momentum_radius(phi0_);
    if (eta >= g.nyquist()) throw AliasingRisk("probe momentum reaches the lattice Nyquist");
    // The far-field transform needs the chirp |y|/t resolved by the lattice.
    switch_time_ = std::max(1.0, 2.0 * support / (g.nyquist() - eta));
    if (uses_dollard(kind_)) {
        table_plus_ = std::make_unique<DollardPhaseTable>(g, v_, *pot_.long_range, mask);
        table_minus_ = std::make_unique<DollardPhaseTable>(g, v_, *pot_.long_range, mask);
    }
}

Field EstimateIntegrand::modified_state(double t, Field* lifted) {
    const auto& g = phi0_.grid();
    Field hat(phi_hat_);
    if (uses_dollard(kind_) && t != 0.0) {
        auto& table = t >= 0.0 ? *table_plus_ : *table_minus_;
        const auto& th = table.advance(t);
        for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= std::polar(1.0, -th[i]);
    }
    if (lifted) {
        // V_l(xi t + X) on the momentum lattice.
        const Vec X = stark_trajectory(v_, t);
        *lifted = hat;
        double y[3];
        for (std::size_t i = 0; i < hat.size(); ++i) {
            for (int a = 0; a < g.dim(); ++a) y[a] = k_[a][i] * t + X[a];
            (*lifted)[i] *= pot_.long_range->value(y);
        }
    }
    return hat;
}

double EstimateIntegrand::near_field(double t, const Field& hat, const Field* sub_hat) {
    const auto& g = phi0_.grid();
    auto spec = Spectral::for_grid(g);
    const double s = 1.0 / static_cast<double>(g.size());
    auto evolve = [&](const Field& h) {
        Field f(h);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(s, -t * k2_[i]);
        spec->inverse_raw(f.data());
        require_interior(g, f, "estimate near field");
        return f;
    };
    const Field psi = evolve(hat);
    Field w;
    if (sub_hat) w = evolve(*sub_hat);
    const Vec X = stark_trajectory(v_, t);
    std::vector<double> pot(g.size(), 0.0);
    double offset = 0.0;
    if (is_free(kind_)) {
        pot_.very_short->add_sample(g, X.data(), pot.data());
    } else if (is_vl(kind_)) {
        pot_.long_range->add_sample(g, X.data(), pot.data());
    } else {
        pot_.short_range->add_sample(g, X.data(), pot.data());
        offset = pot_.short_range->value(X);
    }
    std::vector<double> m(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        cplx z = (pot[i] - offset) * psi[i];
        if (sub_hat) z -= w[i];
        m[i] = std::norm(z);
    }
    return std::sqrt(pairwise_sum(m) * g.cell_volume());
}

double EstimateIntegrand::far_field(double t, const Field& hat, const Field* sub_hat) {
    const auto& g = phi0_.grid();
    auto spec = Spectral::for_grid(g);
    const double s = 1.0 / static_cast<double>(g.size());
    // psi_t(t xi_m) = c exp(i t |xi_m|^2/2) sum_y exp(-i xi_m y) exp(i|y|^2/(2t)) psi_0(y);
    // the common phase drops out of the norm.
    auto transform = [&](const Field& h) {
        Field f(h);
        for (auto& z : f) z *= s;
        spec->inverse_raw(f.data());
        require_interior(g, f, "estimate modified state");
        for (std::size_t i = 0; i < f.size(); ++i) {
            double r2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) r2 += x_[a][i] * x_[a][i];
            f[i] *= std::polar(1.0, r2 / (2.0 * t));
        }
        spec->forward_raw(f.data());
        return f;
    };
    const Field psi = transform(hat);
    Field w;
    if (sub_hat) w = transform(*sub_hat);
    const double at = std::abs(t);
    const double amp = std::pow(g.spacing() / std::sqrt(2.0 * std::numbers::pi * at), g.dim());
    const double cell = std::pow(at * g.momentum_spacing(), g.dim());
    const Vec X = stark_trajectory(v_, t);
    const PotentialSpec& vpart =
        is_free(kind_) ? *pot_.very_short : (is_vl(kind_) ? *pot_.long_range : *pot_.short_range);
    const double offset = (is_free(kind_) || is_vl(kind_)) ? 0.0 : pot_.short_range->value(X);
    std::vector<double> m(g.size());
    double y[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int a = 0; a < g.dim(); ++a) y[a] = t * k_[a][i] + X[a];
        cplx z = (vpart.value(y) - offset) * psi[i];
        if (sub_hat) z -= w[i];
        m[i] = std::norm(z) * amp * amp;
    }
    return std::sqrt(pairwise_sum(m) * cell);
}

double EstimateIntegrand::operator()(double t) {
    Field lifted;
    const Field hat = modified_state(t, is_vl(kind_) ? &lifted : nullptr);
    const Field* sub = is_vl(kind_) ? &lifted : nullptr;
    if (std::abs(t) <= switch_time_) return near_field(t, hat, sub);
    return far_field(t, hat, sub);
}

EstimateResult estimate_integral(EstimateKind kind, const Vec& v, const CompositePotential& potential,
                                 const WaveFunction& phi0, const EstimateOptions& opt) {
    const double speed = norm2(v);
    if (potential.is_zero()) return {kind, speed, 0.0, 0.0, 0.0, 0};
    EstimateIntegrand integrand(kind, v, potential, phi0);

    const double core = opt.core_width / speed;
    const double step = opt.core_step / speed;
    double value = 0.0, tail = 0.0, reach = 0.0;
    std::size_t samples = 0;
    // One side at a time, accumulating the trapezoid and watching the decay.
    for (int side : {+1, -1}) {
        std::vector<double> ts{0.0}, fs{integrand(0.0)};
        ++samples;
        double acc = 0.0;
        auto push = [&](double t) {
            const double f = integrand(side * t);
            acc += 0.5 * (t - ts.back()) * (f + fs.back());
            ts.push_back(t);
            fs.push_back(f);
            ++samples;
        };
        const auto ncore = static_cast<std::size_t>(std::ceil(core / step));
        for (std::size_t k = 1; k <= ncore; ++k) push(static_cast<double>(k) * core / static_cast<double>(ncore));
        double side_tail = std::numeric_limits<double>::infinity();
        while (true) {
            const double T = ts.back();
            push(T * opt.growth);
            // Power-law decay measured over the last factor of two.
            const double Tn = ts.back(), fn = fs.back();
            if (Tn >= 2.0 * core) {
                const auto it = std::lower_bound(ts.begin(), ts.end(), 0.5 * Tn);
                const std::size_t k = static_cast<std::size_t>(it - ts.begin());
                const double fh = fs[k];
                if (fn == 0.0) {
                    side_tail = 0.0;
                } else if (fh > 0.0) {
                    const double q = -std::log(fn / fh) / std::log(Tn / ts[k]);
                    side_tail = q > 1.05 ? Tn * fn / (q - 1.0) : std::numeric_limits<double>::infinity();
                }
                // Each side must meet half of the budget on its own.
                if (side_tail <= 0.5 * opt.tail_fraction * std::max(acc, 1e-300) || acc == 0.0) break;
            }
            if (Tn > opt.max_horizon)
                throw HorizonError(to_string(kind) + ": integrand tail does not fall below the budget by T = " +
                                   std::to_string(Tn));
        }
        value += acc;
        tail += side_tail;
        reach = std::max(reach, ts.back());
    }
    return {kind, speed, value, reach, tail, samples};
}

SlopeFit fit_order(const std::vector<double>& speeds, const std::vector<double>& values) {
    if (speeds.size() != values.size()) throw InvalidInput("speeds and values differ in length");
    if (speeds.size() < 4) throw DataError("order fit needs at least four velocities");
    for (std::size_t i = 0; i < speeds.size(); ++i)
        if (!(speeds[i] > 0.0) || !(values[i] > 0.0)) throw DataError("order fit needs positive speeds and values");
    const auto [lo, hi] = std::minmax_element(speeds.begin(), speeds.end());
    if (*hi / *lo < 8.0 * (1.0 - 1e-12)) throw DataError("velocities must span at least three doublings");
    const std::size_t n = speeds.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(speeds[i]), y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    SlopeFit fit{slope, icpt, 0.0, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double y = std::log(values[i]);
        const double r = y - (icpt + slope * std::log(speeds[i]));
        fit.residuals.push_back(r);
        ss_res += r * r;
        ss_tot += (y - sy / n) * (y - sy / n);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

OrderCheck expected_order(EstimateKind kind, const CompositePotential& potential, double eps2) {
    if (kind == EstimateKind::VlDiffGraf) return {-0.5, -0.5, true};
    if (kind == EstimateKind::VlDiffDollard) {
        if (!potential.long_range) throw InvalidInput("dollard order needs the long range part");
        const auto& tag = potential.long_range->tag();
        double gamma = 0.0;
        if (const auto* d = std::get_if<DollardRange>(&tag)) gamma = d->gamma;
        else if (const auto* w = std::get_if<DollardWideRange>(&tag)) gamma = w->gamma;
        else throw InvalidInput("dollard order needs a dollard class tag");
        const double e = 1.0 - 4.0 * gamma + eps2;
        return {e, e + 0.3, false};
    }
    return {-1.0, -0.7, false};
}

bool order_passes(const SlopeFit& fit, const OrderCheck& c) {
    const bool slope_ok = c.strict ? fit.slope < c.threshold : fit.slope <= c.threshold;
    return slope_ok && fit.r2 >= 0.9;
}

GapProfile corollary_gap(int sign, const Vec& v, const std::vector<double>& times, const PropagationPlan& plan,
                         double horizon, const WaveFunction& phi0) {
    const auto& g = plan.grid;
    if (phi0.grid() != g) throw InvalidInput("state does not match the propagation grid");
    const double s = sign >= 0 ? 1.0 : -1.0;
    if (!(horizon * s > 0.0)) throw HorizonError("horizon has the wrong sign");
    std::vector<double> ts(times);
    // Visit times moving away from the horizon.
    std::sort(ts.begin(), ts.end(), [&](double a, double b) { return s > 0 ? a > b : a < b; });
    for (double t : ts)
        if ((s < 0 && t < horizon) || (s > 0 && t > horizon)) throw HorizonError("time lies beyond the horizon");

    ComovingStepper stepper(plan, v);
    const auto k = g.wavenumber_axes();
    std::vector<double> k2(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int a = 0; a < g.dim(); ++a) k2[i] += 0.5 * k[a][i] * k[a][i];
    const auto& vl = plan.potential.long_range;
    const auto& vs = plan.potential.short_range;
    auto dollard = [&](double t) {
        std::vector<double> ph(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) ph[i] = t * k2[i];
        if (vl) {
            DollardPhaseTable table(g, v, *vl);
            const auto& th = table.advance(t);
            for (std::size_t i = 0; i < g.size(); ++i) ph[i] += th[i];
        }
        return ph;
    };
    auto graf = [&](double t) { return vs ? std::polar(1.0, -graf_phase(v, t, *vs)) : cplx(1.0); };

    Field state(phi0.amplitudes());
    apply_momentum_phase(state, g, dollard(horizon), 1.0);
    require_interior(g, state, "corollary_gap (horizon)");
    const cplx start_phase = graf(horizon);
    GapProfile out{{}, {}, 0.0};
    double now = horizon;
    for (double t : ts) {
        stepper.propagate({&state}, now, t);
        now = t;
        Field reference(phi0.amplitudes());
        apply_momentum_phase(reference, g, dollard(t), 1.0);
        const cplx ref_phase = graf(t);
        std::vector<double> m(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) m[i] = std::norm(start_phase * state[i] - ref_phase * reference[i]);
        const double gap = std::sqrt(pairwise_sum(m) * g.cell_volume());
        out.times.push_back(t);
        out.gaps.push_back(gap);
        out.max_gap = std::max(out.max_gap, gap);
    }
    return out;
}

std::vector<double> dollard_moments(const WaveFunction& phi0, const Vec& v, const PotentialSpec& vl,
                                    const std::vector<double>& times, int k) {
    const auto& g = phi0.grid();
    DollardPhaseTable table(g, v, vl);
    std::vector<double> out;
    for (double t : times) {
        if (t < 0.0) throw InvalidInput("moment times must be nonnegative");
        Field f(phi0.amplitudes());
        apply_momentum_phase(f, g, table.advance(t), 1.0);
        out.push_back(weighted_norm(WaveFunction(g, std::move(f)), k));
    }
    return out;
}

}  // namespace stark
