#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "stark/grid.hpp"

namespace stark {

using cplx = std::complex<double>;

// SIMD-aligned storage so every buffer can share one set of FFT plans.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) {}
    T* allocate(std::size_t n);
    void deallocate(T* p, std::size_t) noexcept;
    template <class U>
    bool operator==(const AlignedAllocator<U>&) const { return true; }
};

void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p) noexcept;

template <class T>
T* AlignedAllocator<T>::allocate(std::size_t n) {
    return static_cast<T*>(aligned_alloc_bytes(n * sizeof(T)));
}
template <class T>
void AlignedAllocator<T>::deallocate(T* p, std::size_t) noexcept {
    aligned_free(p);
}

using Field = std::vector<cplx, AlignedAllocator<cplx>>;

// Cached in-place FFT plans for one grid shape. Raw transforms are unscaled;
// to_momentum/to_position apply the unitary continuum scaling.
class Spectral {
public:
    static std::shared_ptr<const Spectral> for_grid(const GridSpec& grid);

    void forward_raw(cplx* data) const;
    void inverse_raw(cplx* data) const;

    void to_momentum(Field& f) const;
    void to_position(Field& f) const;

    // Scale factors: momentum amplitude = forward_scale * raw DFT, and the
    // round trip inverse_scale * forward_scale * N = 1.
    double forward_scale() const { return fwd_scale_; }
    double inverse_scale() const { return inv_scale_; }

    struct Plans;
    explicit Spectral(const GridSpec& grid);
    ~Spectral();

private:
    GridSpec grid_;
    double fwd_scale_;
    double inv_scale_;
    std::unique_ptr<Plans> plans_;
};

}  // namespace stark
