#include "stark/scattering.hpp"

#include <cmath>
#include <string>

#include "stark/errors.hpp"

namespace stark {

void ScatteringConfig::validate() const {
    if (horizons.size() < 3) throw HorizonError("need at least three horizon pairs");
    for (std::size_t k = 0; k < horizons.size(); ++k) {
        const auto [tm, tp] = horizons[k];
        if (!(tm < 0.0 && tp > 0.0)) throw HorizonError("horizon pair must satisfy T- < 0 < T+");
        if (k > 0) {
            const auto [pm, pp] = horizons[k - 1];
            if (std::abs(tm) < 2.0 * std::abs(pm) * (1.0 - 1e-12) || tp < 2.0 * pp * (1.0 - 1e-12))
                throw HorizonError("horizons must at least double from pair to pair");
        }
    }
    if (!(convergence_tol > 0.0)) throw InvalidInput("convergence tolerance must be positive");
    plan.validate();
}

std::vector<std::pair<double, double>> scaled_horizons(const std::vector<double>& taus, double speed) {
    if (!(speed > 0.0)) throw InvalidInput("speed must be positive");
    std::vector<std::pair<double, double>> out;
    for (double t : taus) out.emplace_back(-t / speed, t / speed);
    return out;
}

namespace {

cplx field_inner(const GridSpec& g, const Field& a, const Field& b) {
    std::vector<cplx> t(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) t[i] = std::conj(a[i]) * b[i];
    return pairwise_sum(t) * g.cell_volume();
}

double field_distance(const GridSpec& g, const Field& a, const Field& b) {
    std::vector<double> t(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) t[i] = std::norm(a[i] - b[i]);
    return std::sqrt(pairwise_sum(t) * g.cell_volume());
}

enum class Mode { Plain, Graf, Dollard };

class Scatterer {
public:
    Scatterer(const ScatteringConfig& cfg, Vec v, Mode mode)
        : cfg_(cfg), v_(std::move(v)), stepper_(cfg.plan, v_), mode_(mode) {
        cfg_.validate();
        const auto& g = cfg_.plan.grid;
        const auto k = g.wavenumber_axes();
        k2_.assign(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            for (int a = 0; a < g.dim(); ++a) k2_[i] += 0.5 * k[a][i] * k[a][i];
        if (mode_ == Mode::Dollard) {
            const auto* dm = std::get_if<DollardModifier>(&cfg_.modifier);
            if (dm && dm->long_range)
                vl_ = dm->long_range;
            else if (cfg_.plan.potential.long_range)
                vl_ = cfg_.plan.potential.long_range;
            else
                vl_ = PotentialSpec::zero(g.dim());
        }
        if (mode_ == Mode::Graf && cfg_.plan.potential.short_range) {
            vs_ = cfg_.plan.potential.short_range;
            plus_ = graf_phase_limit(v_, +1, *vs_).phase;
            minus_ = graf_phase_limit(v_, -1, *vs_).phase;
        }
    }

    // S approximant at one horizon pair applied to each input.
    std::vector<Field> run(const std::vector<const Field*>& in, double tm, double tp) {
        const auto& g = cfg_.plan.grid;
        std::vector<Field> fields;
        for (const Field* f : in) fields.push_back(*f);
        std::vector<double> ph_in(g.size()), ph_out(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            ph_in[i] = tm * k2_[i];
            ph_out[i] = -tp * k2_[i];
        }
        if (vl_) {
            // Horizons grow from pair to pair, so the tables only ever advance.
            if (!before_) {
                before_.emplace(g, v_, *vl_);
                after_.emplace(g, v_, *vl_);
            }
            const auto& a = before_->advance(tm);
            const auto& b = after_->advance(tp);
            for (std::size_t i = 0; i < g.size(); ++i) {
                ph_in[i] += a[i];
                ph_out[i] -= b[i];
            }
        }
        std::vector<Field*> ptrs;
        for (auto& f : fields) {
            apply_momentum_phase(f, g, ph_in, 1.0);
            require_interior(g, f, "scattering (incoming horizon)");
            ptrs.push_back(&f);
        }
        stepper_.propagate(ptrs, tm, tp);
        cplx scalar = 1.0;
        if (vs_) {
            const double inner = graf_phase(v_, tp, *vs_) - graf_phase(v_, tm, *vs_);
            scalar = std::polar(1.0, -((plus_ - minus_) - inner));
        }
        for (auto& f : fields) {
            apply_momentum_phase(f, g, ph_out, 1.0);
            if (scalar != 1.0)
                for (auto& z : f) z *= scalar;
        }
        return fields;
    }

private:
    ScatteringConfig cfg_;
    Vec v_;
    ComovingStepper stepper_;
    Mode mode_;
    std::vector<double> k2_;
    std::optional<PotentialSpec> vl_;
    std::optional<PotentialSpec> vs_;
    std::optional<DollardPhaseTable> before_, after_;
    double plus_ = 0.0, minus_ = 0.0;
};

Mode mode_for(const ScatteringConfig& cfg) {
    if (std::holds_alternative<GrafModifier>(cfg.modifier)) return Mode::Graf;
    if (std::holds_alternative<DollardModifier>(cfg.modifier)) return Mode::Dollard;
    return Mode::Plain;
}

ScatteredState apply_with(const WaveFunction& phi0, const Vec& v, const ScatteringConfig& cfg, Mode mode) {
    if (phi0.grid() != cfg.plan.grid) throw InvalidInput("state does not match the scattering grid");
    Scatterer sc(cfg, v, mode);
    const auto& g = cfg.plan.grid;
    std::vector<HorizonRecord> hist;
    Field prev, cur;
    double gap = 0.0;
    for (const auto& [tm, tp] : cfg.horizons) {
        cur = std::move(sc.run({&phi0.amplitudes()}, tm, tp).front());
        hist.push_back({tm, tp, field_inner(g, phi0.amplitudes(), cur)});
        if (!prev.empty()) gap = field_distance(g, prev, cur);
        prev = cur;
    }
    return {WaveFunction(g, std::move(cur)), std::move(hist), gap, gap <= cfg.convergence_tol};
}

}  // namespace

ScatteredState scattering_apply(const WaveFunction& phi0, const Vec& v, const ScatteringConfig& cfg) {
    return apply_with(phi0, v, cfg, mode_for(cfg));
}

ScatteredState dollard_scattering_apply(const WaveFunction& phi0, const Vec& v, const ScatteringConfig& cfg) {
    return apply_with(phi0, v, cfg, Mode::Dollard);
}

std::vector<ScatteringElement> commutator_elements(const std::vector<int>& js, const WaveFunction& phi0,
                                                   const WaveFunction& psi0, const Vec& v,
                                                   const ScatteringConfig& cfg) {
    const auto& g = cfg.plan.grid;
    if (phi0.grid() != g || psi0.grid() != g) throw InvalidInput("states do not match the scattering grid");
    for (int j : js)
        if (j < 1 || j > g.dim()) throw InvalidInput("momentum component out of range");
    const double speed = norm2(v);
    if (!(speed > 0.0)) throw InvalidInput("scattering velocity must be nonzero");
    Scatterer sc(cfg, v, mode_for(cfg));

    std::vector<WaveFunction> p_phi, p_psi;
    std::vector<const Field*> inputs{&phi0.amplitudes()};
    for (int j : js) {
        p_phi.push_back(apply_momentum(phi0, j));
        p_psi.push_back(apply_momentum(psi0, j));
    }
    for (const auto& w : p_phi) inputs.push_back(&w.amplitudes());

    std::vector<ScatteringElement> out;
    for (int j : js) out.push_back({j, v, 0.0, 0.0, false, {}});
    for (const auto& [tm, tp] : cfg.horizons) {
        const auto s = sc.run(inputs, tm, tp);
        for (std::size_t k = 0; k < js.size(); ++k) {
            // (a, b) linear in a: inner_product(b, a).
            const cplx first = field_inner(g, psi0.amplitudes(), s[k + 1]);
            const cplx second = field_inner(g, p_psi[k].amplitudes(), s[0]);
            const cplx value = speed * cplx(0.0, 1.0) * (first - second);
            auto& e = out[k];
            if (!e.history.empty()) e.cauchy_gap = std::abs(value - e.history.back().value);
            e.history.push_back({tm, tp, value});
            e.value = value;
        }
    }
    for (auto& e : out) e.converged = e.cauchy_gap <= cfg.convergence_tol;
    return out;
}

ScatteringElement commutator_element(int j, const WaveFunction& phi0, const WaveFunction& psi0, const Vec& v,
                                     const ScatteringConfig& cfg) {
    return commutator_elements({j}, phi0, psi0, v, cfg).front();
}

}  // namespace stark
