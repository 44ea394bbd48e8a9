#include "stark/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include "stark/errors.hpp"
#include "stark/parallel.hpp"
#include "stark/quadrature.hpp"

namespace stark {

void ReconstructionTask::validate() const {
    potential.check();
    if (!potential.parts().empty() && potential.dim() != 2) throw InvalidInput("reconstruction runs in two dimensions");
    if (!(omega_cap > 0.0 && omega_cap < 1.0)) throw InvalidInput("omega cap must lie in (0, 1)");
    if (angles.empty()) throw InvalidInput("reconstruction needs directions");
    for (double a : angles)
        if (std::abs(std::cos(a)) > omega_cap + 1e-12)
            throw InvalidInput("direction angle " + std::to_string(a) + " exceeds the omega cap");
    if (!(angle_step > 0.0)) throw InvalidInput("angle step must be positive");
    if (offsets.empty()) throw InvalidInput("reconstruction needs impact offsets");
    if (!(probe_width > 0.0)) throw InvalidInput("probe width must be positive");
    if (levels.size() < 3) throw InvalidInput("velocity sweep needs at least three speeds");
    std::vector<double> speeds;
    for (const auto& l : levels) {
        if (!(l.speed > 0.0)) throw InvalidInput("sweep speeds must be positive");
        speeds.push_back(l.speed);
    }
    const auto [lo, hi] = std::minmax_element(speeds.begin(), speeds.end());
    if (*hi < 4.0 * *lo * (1.0 - 1e-12)) throw InvalidInput("velocity sweep must span two doublings");
    for (int j : axes)
        if (j < 1 || j > 2) throw InvalidInput("axis out of range");
    if (!(min_valid_fraction >= 0.0 && min_valid_fraction <= 1.0))
        throw InvalidInput("valid fraction must lie in [0, 1]");
}

SweepLevel sized_level(double speed, double probe_width, std::vector<double> taus, double max_spacing) {
    if (!(speed > 0.0) || !(probe_width > 0.0) || !(max_spacing > 0.0) || taus.empty())
        throw InvalidInput("level sizing needs positive speed, width, spacing and horizons");
    const double t = *std::max_element(taus.begin(), taus.end()) / speed;
    const double w2 = probe_width * probe_width;
    const double spread = probe_width * std::sqrt(1.0 + t * t / (w2 * w2));
    // The boundary band starts at 0.8 of the half width; 4.5 widths keep the
    // Gaussian tail there below the interior check.
    SweepLevel level{speed};
    level.taus = std::move(taus);
    level.half_width = std::max(6.0, 4.5 * spread / 0.8);
    level.points = 64;
    while (2.0 * level.half_width / static_cast<double>(level.points) > max_spacing) level.points *= 2;
    return level;
}

Extrapolation extrapolate(const std::vector<double>& speeds, const std::vector<cplx>& values, double power) {
    if (speeds.size() != values.size()) throw InvalidInput("speeds and values differ in length");
    if (speeds.size() < 2) throw DataError("extrapolation needs at least two speeds");
    // Normal equations of value = a + c u, u = |v|^power.
    double su = 0.0, suu = 0.0;
    cplx sy = 0.0, suy = 0.0;
    const auto n = static_cast<double>(speeds.size());
    for (std::size_t i = 0; i < speeds.size(); ++i) {
        if (!(speeds[i] > 0.0)) throw DataError("speeds must be positive");
        const double u = std::pow(speeds[i], power);
        su += u;
        suu += u * u;
        sy += values[i];
        suy += u * values[i];
    }
    const double det = n * suu - su * su;
    if (!(std::abs(det) > 1e-300)) throw DataError("extrapolation speeds are degenerate");
    const cplx c = (n * suy - su * sy) / det;
    const cplx a = (sy - c * su) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < speeds.size(); ++i) ss += std::norm(values[i] - a - c * std::pow(speeds[i], power));
    return {a, c, std::sqrt(ss / n)};
}

double remainder_power(const CompositePotential& v) {
    if (v.long_range) {
        const auto& tag = v.long_range->tag();
        if (const auto* d = std::get_if<DollardRange>(&tag)) return 3.0 - 8.0 * d->gamma;
        if (const auto* w = std::get_if<DollardWideRange>(&tag)) return 3.0 - 8.0 * w->gamma;
    }
    return -1.0;
}

ScatteringConfig level_config(const SweepLevel& level, const CompositePotential& v, const Vec& omega, const Vec& b,
                              double convergence_tol) {
    const GridSpec grid(2, level.points, level.half_width);
    const double dt = level.dt > 0.0 ? level.dt : std::min(0.25 / level.speed, PropagationPlan::kinetic_step_limit(grid));
    const Vec vel{level.speed * omega[0], level.speed * omega[1]};
    PropagationPlan plan{grid, dt, v.shifted(b), ComovingGauge{vel}};
    std::vector<std::pair<double, double>> horizons;
    if (level.scale_horizons)
        horizons = scaled_horizons(level.taus, level.speed);
    else
        for (double t : level.taus) horizons.emplace_back(-t, t);
    Modifier modifier = NoModifier{};
    // The Dollard phase is a function of p, so it keeps the untranslated V_l.
    if (v.long_range) modifier = DollardModifier{v.long_range};
    return {horizons, convergence_tol, plan, modifier};
}

std::vector<Extraction> extract_highvelocity(const std::vector<int>& axes, const Vec& omega, const Vec& b,
                                             const ReconstructionTask& task) {
    check_direction(omega, 2);
    if (std::abs(omega[0]) > task.omega_cap + 1e-12) throw InvalidInput("direction exceeds the omega cap");
    std::vector<Extraction> out;
    for (int j : axes) out.push_back({j, {}, {}, {}, {}, true});
    for (const auto& level : task.levels) {
        const auto cfg = level_config(level, task.potential, omega, b, task.convergence_tol);
        const auto probe = WaveFunction::gaussian(cfg.plan.grid, task.probe_width);
        const Vec vel{level.speed * omega[0], level.speed * omega[1]};
        const auto elements = commutator_elements(axes, probe, probe, vel, cfg);
        for (std::size_t k = 0; k < axes.size(); ++k) {
            out[k].speeds.push_back(level.speed);
            out[k].samples.push_back(elements[k].value);
            out[k].gaps.push_back(elements[k].cauchy_gap);
            out[k].converged = out[k].converged && elements[k].converged;
        }
    }
    const double power = remainder_power(task.potential);
    for (auto& e : out) e.fit = extrapolate(e.speeds, e.samples, power);
    return out;
}

Extraction extract_highvelocity(int j, const Vec& omega, const Vec& b, const ReconstructionTask& task) {
    return extract_highvelocity(std::vector<int>{j}, omega, b, task).front();
}

cplx rhs_reference(int j, const Vec& omega, const WaveFunction& phi0, const WaveFunction& psi0,
                   const CompositePotential& v) {
    const auto& g = phi0.grid();
    if (psi0.grid() != g) throw InvalidInput("states do not share a grid");
    if (j < 1 || j > g.dim()) throw InvalidInput("axis out of range");
    check_direction(omega, g.dim());
    if (v.is_zero()) return 0.0;
    if (v.dim() != g.dim()) throw InvalidInput("potential and grid dimensions differ");

    const auto& a = phi0.amplitudes();
    const auto& c = psi0.amplitudes();
    const auto pa = apply_momentum(phi0, j).amplitudes();
    const auto pc = apply_momentum(psi0, j).amplitudes();
    // Weights of V_vs and of d_j(V_s + V_l) in the grid sums.
    std::vector<cplx> wvs(g.size()), wsmooth(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        wvs[i] = std::conj(c[i]) * pa[i] - std::conj(pc[i]) * a[i];
        wsmooth[i] = cplx(0.0, 1.0) * std::conj(c[i]) * a[i];
    }
    std::vector<double> buf(g.size());
    std::vector<cplx> terms(g.size());
    auto integrand = [&](double t) {
        std::vector<double> shift(g.dim());
        for (int d = 0; d < g.dim(); ++d) shift[static_cast<std::size_t>(d)] = omega[static_cast<std::size_t>(d)] * t;
        std::fill(terms.begin(), terms.end(), cplx(0.0));
        if (v.very_short) {
            v.very_short->sample(g, shift.data(), buf.data());
            for (std::size_t i = 0; i < g.size(); ++i) terms[i] += buf[i] * wvs[i];
        }
        for (const auto* part : {&v.short_range, &v.long_range}) {
            if (!*part) continue;
            std::fill(buf.begin(), buf.end(), 0.0);
            (*part)->add_partial_sample(g, shift.data(), j, buf.data());
            for (std::size_t i = 0; i < g.size(); ++i) terms[i] += buf[i] * wsmooth[i];
        }
        return pairwise_sum(terms) * g.cell_volume();
    };
    LineOptions opt;
    opt.abs_tol = 1e-10;
    opt.rel_tol = 1e-10;
    opt.first_segment = 4.0;
    try {
        const double re = integrate_line([&](double t) { return integrand(t).real(); }, opt).value;
        const double im = integrate_line([&](double t) { return integrand(t).imag(); }, opt).value;
        return {re, im};
    } catch (const DivergenceError& e) {
        throw HorizonError(std::string("reconstruction integrand tail not certified: ") + e.what());
    } catch (const ToleranceError& e) {
        throw HorizonError(std::string("reconstruction integrand tail not certified: ") + e.what());
    }
}

XRayDataset assemble_xray(const ReconstructionTask& task, unsigned jobs) {
    task.validate();
    struct Job {
        double angle;
        double offset;
    };
    std::vector<Job> work;
    for (double a : task.angles)
        for (double s : task.offsets) work.push_back({a, s});
    std::vector<std::vector<XRayEntry>> results(work.size());
    parallel_for(work.size(), jobs, [&](std::size_t i) {
        const auto [a, s] = work[i];
        const Vec omega = direction(a), n = normal(a);
        const Vec b{s * n[0], s * n[1]};
        try {
            for (const auto& e : extract_highvelocity(task.axes, omega, b, task))
                results[i].push_back({e.j, a, s, b, e.fit.value.imag(), e.fit.residual, e.converged});
        } catch (const std::exception&) {
            for (int j : task.axes) results[i].push_back({j, a, s, b, 0.0, 0.0, false});
        }
    });
    XRayDataset out{{}, task.angle_step, task.omega_cap, task.probe_width};
    for (auto& r : results)
        for (auto& e : r) out.entries.push_back(std::move(e));
    const double valid = 1.0 - static_cast<double>(out.flagged()) / static_cast<double>(std::max<std::size_t>(out.entries.size(), 1));
    if (valid < task.min_valid_fraction)
        throw DataError("only " + std::to_string(valid) + " of the extracted entries are valid");
    return out;
}

IdentitySweep identity_sweep(int j, const Vec& omega, const Vec& b, const ReconstructionTask& task,
                             double peak_scale) {
    IdentitySweep out;
    // The probe is the same at every level, so the cheapest lattice will do.
    const auto& smallest = *std::min_element(task.levels.begin(), task.levels.end(),
                                             [](const auto& a, const auto& b) { return a.points < b.points; });
    const GridSpec grid(2, smallest.points, smallest.half_width);
    const auto probe = WaveFunction::gaussian(grid, task.probe_width);
    out.rhs = rhs_reference(j, omega, probe, probe, task.potential.shifted(b));
    out.peak_scale = peak_scale;
    for (const auto& level : task.levels) {
        const auto cfg = level_config(level, task.potential, omega, b, task.convergence_tol);
        const auto p = WaveFunction::gaussian(cfg.plan.grid, task.probe_width);
        const Vec vel{level.speed * omega[0], level.speed * omega[1]};
        const auto e = commutator_element(j, p, p, vel, cfg);
        out.speeds.push_back(level.speed);
        out.elements.push_back(e.value);
        out.gaps.push_back(std::abs(e.value - out.rhs));
    }
    out.fit = fit_order(out.speeds, out.gaps);
    return out;
}

}  // namespace stark
