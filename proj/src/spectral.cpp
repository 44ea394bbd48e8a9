#include "stark/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <new>
#include <mutex>
#include <numbers>
#include <tuple>

namespace stark {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void* aligned_alloc_bytes(std::size_t bytes) {
    void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
    if (!p) throw std::bad_alloc();
    return p;
}

void aligned_free(void* p) noexcept { fftw_free(p); }

struct Spectral::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

Spectral::Spectral(const GridSpec& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
    const double h = grid.spacing();
    const int d = grid.dim();
    fwd_scale_ = std::pow(h / std::sqrt(2.0 * std::numbers::pi), d);
    inv_scale_ = 1.0 / (fwd_scale_ * static_cast<double>(grid.size()));

    int dims[3];
    for (int a = 0; a < d; ++a) dims[a] = static_cast<int>(grid.points_per_axis());
    Field scratch(grid.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    // Planning is not thread safe; execution with new arrays is.
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE;
    plans_->fwd = fftw_plan_dft(d, dims, buf, buf, FFTW_FORWARD, flags);
    plans_->inv = fftw_plan_dft(d, dims, buf, buf, FFTW_BACKWARD, flags);
}

Spectral::~Spectral() {
    std::lock_guard lock(planner_mutex());
    if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
    if (plans_->inv) fftw_destroy_plan(plans_->inv);
}

std::shared_ptr<const Spectral> Spectral::for_grid(const GridSpec& grid) {
    static std::mutex cache_mutex;
    static std::map<std::tuple<int, std::size_t, double>, std::shared_ptr<const Spectral>> cache;
    std::lock_guard lock(cache_mutex);
    auto key = std::make_tuple(grid.dim(), grid.points_per_axis(), grid.half_width());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto s = std::make_shared<const Spectral>(grid);
    cache.emplace(key, s);
    return s;
}

void Spectral::forward_raw(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plans_->fwd, p, p);
}

void Spectral::inverse_raw(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plans_->inv, p, p);
}

void Spectral::to_momentum(Field& f) const {
    forward_raw(f.data());
    for (auto& z : f) z *= fwd_scale_;
}

void Spectral::to_position(Field& f) const {
    inverse_raw(f.data());
    for (auto& z : f) z *= inv_scale_;
}

}  // namespace stark
