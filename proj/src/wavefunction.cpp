#include "stark/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stark/errors.hpp"

namespace stark {

namespace {

template <class T>
T pairwise(const T* x, std::size_t n) {
    if (n <= 32) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t m = n / 2;
    return pairwise(x, m) + pairwise(x + m, n - m);
}

void require_same_grid(const WaveFunction& a, const WaveFunction& b) {
    if (a.grid() != b.grid()) throw InvalidInput("wave functions live on different grids");
}

double sum_sq(std::span<const cplx> a) {
    std::vector<double> m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) m[i] = std::norm(a[i]);
    return pairwise_sum(m);
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise(xs.data(), xs.size()); }
cplx pairwise_sum(std::span<const cplx> xs) { return pairwise(xs.data(), xs.size()); }

WaveFunction::WaveFunction(GridSpec grid, Field amplitudes) : grid_(grid), amp_(std::move(amplitudes)) {
    if (amp_.size() != grid_.size()) throw InvalidInput("amplitude count does not match grid");
    for (const auto& z : amp_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidInput("non-finite amplitude");
}

double WaveFunction::norm() const { return std::sqrt(sum_sq(amp_) * grid_.cell_volume()); }

WaveFunction WaveFunction::scaled(cplx factor) const {
    Field out(amp_);
    for (auto& z : out) z *= factor;
    return {grid_, std::move(out)};
}

WaveFunction WaveFunction::normalized() const {
    const double n = norm();
    if (n == 0.0) throw InvalidInput("cannot normalize the zero state");
    return scaled(1.0 / n);
}

WaveFunction WaveFunction::gaussian(const GridSpec& grid, double width, const Vec& center, const Vec& momentum) {
    if (!(width > 0.0)) throw InvalidInput("gaussian width must be positive");
    const auto x = grid.coordinate_axes();
    Field f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double r2 = 0.0, phase = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double c = a < static_cast<int>(center.size()) ? center[a] : 0.0;
            const double k = a < static_cast<int>(momentum.size()) ? momentum[a] : 0.0;
            r2 += (x[a][i] - c) * (x[a][i] - c);
            phase += k * x[a][i];
        }
        f[i] = std::exp(-r2 / (2.0 * width * width)) * std::polar(1.0, phase);
    }
    return WaveFunction(grid, std::move(f)).normalized();
}

WaveFunction WaveFunction::from_momentum(const GridSpec& grid, Field m) {
    if (m.size() != grid.size()) throw InvalidInput("amplitude count does not match grid");
    Spectral::for_grid(grid)->to_position(m);
    return {grid, std::move(m)};
}

cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
    require_same_grid(a, b);
    const auto& x = a.amplitudes();
    const auto& y = b.amplitudes();
    std::vector<cplx> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) terms[i] = std::conj(x[i]) * y[i];
    return pairwise_sum(terms) * a.grid().cell_volume();
}

double distance(const WaveFunction& a, const WaveFunction& b) {
    require_same_grid(a, b);
    std::vector<double> m(a.grid().size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::norm(a.amplitudes()[i] - b.amplitudes()[i]);
    return std::sqrt(pairwise_sum(m) * a.grid().cell_volume());
}

WaveFunction add(const WaveFunction& a, const WaveFunction& b, cplx scale_b) {
    require_same_grid(a, b);
    Field out(a.amplitudes());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale_b * b.amplitudes()[i];
    return {a.grid(), std::move(out)};
}

Field momentum_amplitudes(const WaveFunction& psi) {
    Field m(psi.amplitudes());
    Spectral::for_grid(psi.grid())->to_momentum(m);
    return m;
}

WaveFunction apply_momentum(const WaveFunction& psi, int j) {
    const auto& g = psi.grid();
    if (j < 1 || j > g.dim()) throw InvalidInput("momentum component out of range");
    auto spec = Spectral::for_grid(g);
    Field f(psi.amplitudes());
    spec->forward_raw(f.data());
    std::size_t idx[3];
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        g.unravel(i, idx);
        f[i] *= g.wavenumber(idx[j - 1]) * s;
    }
    spec->inverse_raw(f.data());
    return {g, std::move(f)};
}

WaveFunction boost(const WaveFunction& psi, const Vec& v, const MomentumCutoff& cutoff) {
    const auto& g = psi.grid();
    if (static_cast<int>(v.size()) != g.dim()) throw InvalidInput("boost velocity has wrong dimension");
    if (norm2(v) + cutoff.eta >= g.nyquist())
        throw AliasingRisk("boost |v| + eta = " + std::to_string(norm2(v) + cutoff.eta) +
                           " reaches the lattice Nyquist " + std::to_string(g.nyquist()));
    const auto x = g.coordinate_axes();
    Field f(psi.amplitudes());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double phase = 0.0;
        for (int a = 0; a < g.dim(); ++a) phase += v[a] * x[a][i];
        f[i] *= std::polar(1.0, phase);
    }
    return {g, std::move(f)};
}

WaveFunction boost(const WaveFunction& psi, const Vec& v) {
    return boost(psi, v, MomentumCutoff{effective_momentum_radius(psi)});
}

WaveFunction translate(const WaveFunction& psi, const Vec& shift) {
    const auto& g = psi.grid();
    auto spec = Spectral::for_grid(g);
    Field f(psi.amplitudes());
    spec->forward_raw(f.data());
    const auto k = g.wavenumber_axes();
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double phase = 0.0;
        for (int a = 0; a < g.dim() && a < static_cast<int>(shift.size()); ++a) phase -= k[a][i] * shift[a];
        f[i] *= std::polar(s, phase);
    }
    spec->inverse_raw(f.data());
    return {g, std::move(f)};
}

double boundary_mass_fraction(const GridSpec& g, std::span<const cplx> amp) {
    const double edge = 0.8 * g.half_width();
    std::vector<double> all(amp.size()), band(amp.size(), 0.0);
    std::size_t idx[3];
    for (std::size_t i = 0; i < amp.size(); ++i) {
        all[i] = std::norm(amp[i]);
        g.unravel(i, idx);
        for (int a = 0; a < g.dim(); ++a)
            if (std::abs(g.coordinate(idx[a])) > edge) {
                band[i] = all[i];
                break;
            }
    }
    const double total = pairwise_sum(all);
    return total > 0.0 ? pairwise_sum(band) / total : 0.0;
}

double boundary_mass_fraction(const WaveFunction& psi) {
    return boundary_mass_fraction(psi.grid(), psi.amplitudes());
}

void require_interior(const GridSpec& g, std::span<const cplx> amp, const char* where, double tol) {
    const double frac = boundary_mass_fraction(g, amp);
    if (frac > tol)
        throw BoundaryContamination(std::string(where) + ": boundary mass fraction " + std::to_string(frac) +
                                    " exceeds " + std::to_string(tol));
}

double weighted_norm(const WaveFunction& psi, int k) {
    if (k < 0 || k > 2) throw InvalidInput("weight exponent must be 0, 1 or 2");
    require_interior(psi.grid(), psi.amplitudes(), "weighted_norm");
    const auto& g = psi.grid();
    const auto x = g.coordinate_axes();
    std::vector<double> m(g.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) r2 += x[a][i] * x[a][i];
        m[i] = std::pow(1.0 + r2, k) * std::norm(psi.amplitudes()[i]);
    }
    return std::sqrt(pairwise_sum(m) * g.cell_volume());
}

namespace {
Vec centroid(const GridSpec& g, const Field& f, const std::vector<std::vector<double>>& axes) {
    std::vector<double> w(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) w[i] = std::norm(f[i]);
    const double total = pairwise_sum(w);
    if (total == 0.0) throw InvalidInput("centroid of the zero state");
    Vec c(g.dim());
    std::vector<double> t(f.size());
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < f.size(); ++i) t[i] = w[i] * axes[a][i];
        c[a] = pairwise_sum(t) / total;
    }
    return c;
}
}  // namespace

Vec position_centroid(const WaveFunction& psi) {
    return centroid(psi.grid(), psi.amplitudes(), psi.grid().coordinate_axes());
}

Vec momentum_centroid(const WaveFunction& psi) {
    return centroid(psi.grid(), momentum_amplitudes(psi), psi.grid().wavenumber_axes());
}

double momentum_mass_outside(const WaveFunction& psi, double eta) {
    const auto m = momentum_amplitudes(psi);
    const auto k = psi.grid().wavenumber_axes();
    std::vector<double> all(m.size()), out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        all[i] = std::norm(m[i]);
        double r2 = 0.0;
        for (int a = 0; a < psi.grid().dim(); ++a) r2 += k[a][i] * k[a][i];
        if (r2 > eta * eta) out[i] = all[i];
    }
    const double total = pairwise_sum(all);
    return total > 0.0 ? pairwise_sum(out) / total : 0.0;
}

double effective_momentum_radius(const WaveFunction& psi, double tol) {
    const auto m = momentum_amplitudes(psi);
    const auto k = psi.grid().wavenumber_axes();
    std::vector<std::pair<double, double>> rw(m.size());
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double r2 = 0.0;
        for (int a = 0; a < psi.grid().dim(); ++a) r2 += k[a][i] * k[a][i];
        rw[i] = {std::sqrt(r2), std::norm(m[i])};
        total += rw[i].second;
    }
    if (total == 0.0) return 0.0;
    std::sort(rw.begin(), rw.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double tail = 0.0;
    for (const auto& [r, w] : rw) {
        if (tail + w > tol * total) return r;
        tail += w;
    }
    return 0.0;
}

}  // namespace stark
