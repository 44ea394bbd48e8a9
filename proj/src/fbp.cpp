#include "stark/fbp.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "stark/errors.hpp"
#include "stark/spectral.hpp"
#include "stark/wavefunction.hpp"

namespace stark {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kPi);
    return a < 0.0 ? a + kPi : a;
}

// Band-limited ramp kernel (1/2pi) int_{|k|<K} |k| e^{iku} dk.
double ramp_kernel(double u, double K) {
    const double ku = K * u;
    if (std::abs(ku) < 1e-3) return (0.5 * K * K - K * K * K * K * u * u / 8.0) / kPi;
    return (K * std::sin(ku) / u + (std::cos(ku) - 1.0) / (u * u)) / kPi;
}

// Uniform offset lattice shared by every projection.
struct OffsetLattice {
    double start;
    double step;
    std::size_t count;
};

OffsetLattice offset_lattice(const std::vector<double>& offsets) {
    if (offsets.size() < 4) throw DataError("projection needs at least four offsets");
    const double step = (offsets.back() - offsets.front()) / static_cast<double>(offsets.size() - 1);
    for (std::size_t m = 0; m < offsets.size(); ++m)
        if (std::abs(offsets[m] - (offsets.front() + static_cast<double>(m) * step)) > 1e-9 * (1.0 + std::abs(step)))
            throw DataError("offsets must be uniformly spaced");
    return {offsets.front(), step, offsets.size()};
}

}  // namespace

Vec direction(double angle) { return {std::cos(angle), std::sin(angle)}; }
Vec normal(double angle) { return {-std::sin(angle), std::cos(angle)}; }

std::vector<double> direction_fan(std::size_t count, double omega_cap) {
    if (count == 0) throw InvalidInput("direction fan needs at least one angle");
    if (!(omega_cap > 0.0 && omega_cap <= 1.0)) throw InvalidInput("omega cap must lie in (0, 1]");
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double a = kPi * static_cast<double>(k) / static_cast<double>(count);
        if (std::abs(std::cos(a)) <= omega_cap + 1e-12) out.push_back(a);
    }
    return out;
}

std::vector<double> XRayDataset::angles() const {
    std::vector<double> a;
    for (const auto& e : entries) a.push_back(e.omega_angle);
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

std::vector<double> XRayDataset::offsets() const {
    std::vector<double> s;
    for (const auto& e : entries) s.push_back(e.offset);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

std::size_t XRayDataset::flagged() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.converged; }));
}

XRayDataset oracle_dataset(const CompositePotential& v, const std::vector<double>& angles,
                           const std::vector<double>& offsets, double angle_step, double omega_cap,
                           double probe_width, const std::vector<int>& axes) {
    if (v.dim() != 2) throw InvalidInput("line-integral data are two dimensional");
    XRayDataset out{{}, angle_step, omega_cap, probe_width};
    using Rule = boost::math::quadrature::gauss<double, 30>;
    for (double a : angles) {
        const Vec w = direction(a), n = normal(a);
        for (double s : offsets) {
            const Vec b{s * n[0], s * n[1]};
            for (int j : axes) {
                auto line = [&](double u) { return xray_gradient_transform(v, j, w, {u * n[0], u * n[1]}); };
                double value;
                if (probe_width > 0.0) {
                    // Marginal of the probe density across the line: exp(-u^2/w^2)/(sqrt(pi) w).
                    const double reach = 6.0 * probe_width;
                    value = Rule::integrate(
                        [&](double u) {
                            return line(s - u) * std::exp(-u * u / (probe_width * probe_width)) /
                                   (std::sqrt(kPi) * probe_width);
                        },
                        -reach, reach);
                } else {
                    value = line(s);
                }
                out.entries.push_back({j, a, s, b, value, 0.0, true});
            }
        }
    }
    return out;
}

namespace {

// Filtered backprojection plus anti-gradient for one set of entry values.
class Inverter {
public:
    Inverter(const XRayDataset& data, const GridSpec& grid)
        : data_(data), grid_(grid), lattice_(offset_lattice(data.offsets())), x_(grid.coordinate_axes()),
          k_(grid.wavenumber_axes()), spec_(Spectral::for_grid(grid)) {
        for (const auto& e : data_.entries) {
            if (e.j < 1 || e.j > 2) throw DataError("axis out of range in dataset");
            keys_.emplace(std::make_pair(e.j, e.omega_angle), keys_.size());
        }
        slot_.resize(data_.entries.size());
        index_.resize(data_.entries.size());
        for (std::size_t i = 0; i < data_.entries.size(); ++i) {
            const auto& e = data_.entries[i];
            slot_[i] = keys_.at({e.j, e.omega_angle});
            index_[i] = static_cast<std::size_t>(std::llround((e.offset - lattice_.start) / lattice_.step));
        }
    }

    // D_j by ramp-filtered backprojection of the given entry values.
    std::vector<std::vector<double>> gradient(const std::vector<double>& values) const {
        std::vector<std::vector<double>> proj(keys_.size(), std::vector<double>(lattice_.count, 0.0));
        for (std::size_t i = 0; i < values.size(); ++i) proj[slot_[i]][index_[i]] = values[i];

        const double K = kPi / std::abs(lattice_.step);
        const double reach = std::sqrt(2.0) * grid_.half_width() + std::abs(lattice_.step);
        const double fine = std::abs(lattice_.step) / 8.0;
        const auto nfine = static_cast<std::size_t>(std::ceil(2.0 * reach / fine)) + 1;
        const double weight = data_.angle_step / (2.0 * kPi);
        std::vector<std::vector<double>> d(2, std::vector<double>(grid_.size(), 0.0));
        std::vector<double> q(nfine);
        for (const auto& [key, slot] : keys_) {
            const auto [j, angle] = key;
            const auto& p = proj[slot];
            // Filtered projection on a fine offset lattice, then linear interpolation.
            for (std::size_t f = 0; f < nfine; ++f) {
                const double u = -reach + static_cast<double>(f) * fine;
                double acc = 0.0;
                for (std::size_t m = 0; m < lattice_.count; ++m)
                    acc += p[m] * ramp_kernel(u - (lattice_.start + static_cast<double>(m) * lattice_.step), K);
                q[f] = acc * std::abs(lattice_.step);
            }
            const Vec n = normal(angle);
            auto& dj = d[static_cast<std::size_t>(j - 1)];
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                const double u = (x_[0][i] * n[0] + x_[1][i] * n[1] + reach) / fine;
                const auto f = static_cast<std::size_t>(u);
                const double r = u - static_cast<double>(f);
                dj[i] += weight * ((1.0 - r) * q[f] + r * q[std::min(f + 1, nfine - 1)]);
            }
        }
        return d;
    }

    // Normalized spectrum of V from V^ = -i k.D^ / |k|^2 (zero mean).
    Field anti_gradient(const std::vector<std::vector<double>>& d) const {
        Field d1(d[0].begin(), d[0].end()), d2(d[1].begin(), d[1].end()), vh(grid_.size());
        spec_->forward_raw(d1.data());
        spec_->forward_raw(d2.data());
        const double scale = 1.0 / static_cast<double>(grid_.size());
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double k2 = k_[0][i] * k_[0][i] + k_[1][i] * k_[1][i];
            vh[i] = k2 > 0.0 ? cplx(0.0, -scale / k2) * (k_[0][i] * d1[i] + k_[1][i] * d2[i]) : cplx(0.0);
        }
        return vh;
    }

    std::vector<double> to_position(Field spectrum) const {
        spec_->inverse_raw(spectrum.data());
        std::vector<double> v(grid_.size());
        for (std::size_t i = 0; i < grid_.size(); ++i) v[i] = spectrum[i].real();
        return v;
    }

    Field to_spectrum(const std::vector<double>& v) const {
        Field f(v.begin(), v.end());
        spec_->forward_raw(f.data());
        const double scale = 1.0 / static_cast<double>(grid_.size());
        for (auto& z : f) z *= scale;
        return f;
    }

    // V^(xi) on the measured lattice points by the Fourier slice theorem:
    // int g_j(theta, s) e^{-iks} ds = i k n_j V^(k n), so
    // V^(k n) = -i (n_1 g^_1 + n_2 g^_2) / k, interpolated linearly in angle.
    // Returned in the normalized lattice convention of to_spectrum.
    Field slice_spectrum(const std::vector<double>& angles, const std::vector<char>& measured) const {
        std::map<double, std::array<std::vector<double>, 2>> proj;
        for (std::size_t i = 0; i < data_.entries.size(); ++i) {
            const auto& e = data_.entries[i];
            auto& p = proj[e.omega_angle][static_cast<std::size_t>(e.j - 1)];
            if (p.empty()) p.assign(lattice_.count, 0.0);
            p[index_[i]] = e.value;
        }
        for (const auto& [a, p] : proj)
            if (p[0].empty() || p[1].empty()) throw DataError("limited-angle completion needs both gradient axes");
        auto transform = [&](double angle, double k) {
            const auto& p = proj.at(angle);
            const Vec n = normal(angle);
            cplx g1 = 0.0, g2 = 0.0;
            for (std::size_t m = 0; m < lattice_.count; ++m) {
                const cplx e = std::polar(std::abs(lattice_.step), -k * (lattice_.start + static_cast<double>(m) * lattice_.step));
                g1 += p[0][m] * e;
                g2 += p[1][m] * e;
            }
            return cplx(0.0, -1.0) * (n[0] * g1 + n[1] * g2) / k;
        };
        const double K = kPi / std::abs(lattice_.step);
        const double L = grid_.half_width();
        const double area = 4.0 * L * L;
        Field out(grid_.size(), cplx(0.0));
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (!measured[i]) continue;
            const double kk = std::hypot(k_[0][i], k_[1][i]);
            if (kk >= K) continue;
            const double theta = wrap_angle(std::atan2(k_[1][i], k_[0][i]) - 0.5 * kPi);
            // Bracketing fan angles; the fan wraps from pi back to 0 with n -> -n.
            auto hi = std::lower_bound(angles.begin(), angles.end(), theta);
            double a0, a1, t0, t1;
            bool flip0 = false, flip1 = false;
            if (hi == angles.end()) {
                a0 = angles.back(), t0 = a0;
                a1 = angles.front(), t1 = a1 + kPi, flip1 = true;
            } else if (hi == angles.begin()) {
                a1 = *hi, t1 = a1;
                a0 = angles.back(), t0 = a0 - kPi, flip0 = true;
            } else {
                a1 = *hi, t1 = a1;
                a0 = *(hi - 1), t0 = a0;
            }
            const Vec n = normal(theta);
            const double k = k_[0][i] * n[0] + k_[1][i] * n[1];
            const cplx s0 = transform(a0, flip0 ? -k : k);
            const cplx s1 = transform(a1, flip1 ? -k : k);
            const double r = t1 > t0 ? (theta - t0) / (t1 - t0) : 0.0;
            const cplx v = (1.0 - r) * s0 + r * s1;
            out[i] = v * std::polar(1.0 / area, -(k_[0][i] + k_[1][i]) * L);
        }
        return out;
    }

private:
    const XRayDataset& data_;
    GridSpec grid_;
    OffsetLattice lattice_;
    std::vector<std::vector<double>> x_, k_;
    std::shared_ptr<const Spectral> spec_;
    std::map<std::pair<int, double>, std::size_t> keys_;
    std::vector<std::size_t> slot_, index_;
};

}  // namespace

FbpResult invert_fbp(const XRayDataset& data, const GridSpec& grid, const FbpOptions& options) {
    if (grid.dim() != 2) throw InvalidInput("filtered backprojection is two dimensional");
    if (!(data.angle_step > 0.0)) throw InvalidInput("dataset needs a positive angle step");
    const std::size_t nominal = static_cast<std::size_t>(std::llround(kPi / data.angle_step));
    FbpResult out{grid, std::vector<double>(grid.size(), 0.0), {}, 0.0, {}};
    if (data.entries.empty()) {
        out.gradient.assign(2, std::vector<double>(grid.size(), 0.0));
        out.missing_fraction = 1.0;
        out.warnings.push_back("empty dataset");
        return out;
    }
    const auto angles = data.angles();
    out.missing_fraction = 1.0 - static_cast<double>(angles.size()) / static_cast<double>(nominal);
    if (out.missing_fraction > options.max_missing_fraction)
        out.warnings.push_back("limited angle: " + std::to_string(out.missing_fraction) +
                               " of the direction fan is missing");

    const Inverter inv(data, grid);
    std::vector<double> measured_values;
    for (const auto& e : data.entries) measured_values.push_back(e.value);
    out.gradient = inv.gradient(measured_values);
    Field vh = inv.anti_gradient(out.gradient);

    if (options.support_radius > 0.0 && out.missing_fraction > 0.0) {
        // Fill the missing Fourier wedge by alternating projections onto the
        // measured wedge (values from the Fourier slice theorem) and the known
        // support, starting from the backprojection.
        const auto x = grid.coordinate_axes();
        const auto k = grid.wavenumber_axes();
        std::vector<char> measured(grid.size(), 0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (k[0][i] == 0.0 && k[1][i] == 0.0) continue;
            const double a = wrap_angle(std::atan2(k[1][i], k[0][i]) - 0.5 * kPi);
            for (double b : angles) {
                double diff = std::abs(a - b);
                diff = std::min(diff, kPi - diff);
                if (diff <= 0.5 * data.angle_step + 1e-12) {
                    measured[i] = 1;
                    break;
                }
            }
        }
        const Field known = inv.slice_spectrum(angles, measured);
        const double r2max = options.support_radius * options.support_radius;
        Field cur = vh;
        for (int it = 0; it < options.completion_iterations; ++it) {
            auto v = inv.to_position(cur);
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (x[0][i] * x[0][i] + x[1][i] * x[1][i] > r2max) v[i] = 0.0;
            cur = inv.to_spectrum(v);
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (measured[i]) cur[i] = known[i];
        }
        vh = cur;
    }

    out.values = inv.to_position(vh);
    // Corner gauge: the potential decays, so V_rec vanishes at the box corners.
    const std::size_t n = grid.points_per_axis();
    const double corner = 0.25 * (out.values[0] + out.values[n - 1] + out.values[(n - 1) * n] +
                                  out.values[n * n - 1]);
    for (auto& v : out.values) v -= corner;
    return out;
}

std::vector<double> sample_potential(const CompositePotential& v, const GridSpec& grid, double probe_width) {
    std::vector<double> out(grid.size(), 0.0);
    v.add_sample(grid, nullptr, out.data());
    if (probe_width <= 0.0) return out;
    auto spec = Spectral::for_grid(grid);
    const auto k = grid.wavenumber_axes();
    Field f(out.begin(), out.end());
    spec->forward_raw(f.data());
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double k2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) k2 += k[a][i] * k[a][i];
        f[i] *= scale * std::exp(-0.25 * k2 * probe_width * probe_width);
    }
    spec->inverse_raw(f.data());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f[i].real();
    return out;
}

double l2_norm_inside(const std::vector<double>& a, const GridSpec& grid, double radius) {
    if (a.size() != grid.size()) throw InvalidInput("field does not match grid");
    const auto x = grid.coordinate_axes();
    std::vector<double> m;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double r2 = 0.0;
        for (int d = 0; d < grid.dim(); ++d) r2 += x[d][i] * x[d][i];
        if (r2 <= radius * radius) m.push_back(a[i] * a[i]);
    }
    return std::sqrt(pairwise_sum(m) * grid.cell_volume());
}

double relative_l2_error(const std::vector<double>& a, const std::vector<double>& b, const GridSpec& grid,
                         double radius) {
    if (a.size() != b.size()) throw InvalidInput("fields differ in size");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double ref = l2_norm_inside(b, grid, radius);
    if (!(ref > 0.0)) throw DataError("reference field vanishes on the comparison disk");
    return l2_norm_inside(d, grid, radius) / ref;
}

}  // namespace stark
