#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stark/errors.hpp"
#include "stark/wavefunction.hpp"

using namespace stark;
using doctest::Approx;

namespace {

// Smooth random state: a few Gaussians with random centres, momenta and weights.
WaveFunction random_state(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto psi = WaveFunction::gaussian(g, 1.0, {u(rng), u(rng)}, {u(rng), u(rng)});
    for (int k = 0; k < 3; ++k)
        psi = add(psi, WaveFunction::gaussian(g, 0.8 + 0.3 * u(rng), {2.0 * u(rng), 2.0 * u(rng)}, {u(rng), u(rng)}),
                  cplx(u(rng), u(rng)));
    return psi.normalized();
}

}  // namespace

TEST_CASE("grid rejects bad shapes") {
    CHECK_THROWS_AS(GridSpec(2, 12, 5.0), InvalidInput);
    CHECK_THROWS_AS(GridSpec(2, 4, 5.0), InvalidInput);
    CHECK_THROWS_AS(GridSpec(2, 64, -1.0), InvalidInput);
    const GridSpec g(2, 64, 8.0);
    CHECK(g.spacing() == Approx(0.25));
    CHECK(g.nyquist() == Approx(std::numbers::pi / 0.25));
}

TEST_CASE("inner product") {
    const GridSpec g(2, 64, 8.0);
    const auto psi = WaveFunction::gaussian(g, 1.0);
    CHECK(std::abs(inner_product(psi, psi) - 1.0) < 1e-12);
    CHECK(std::abs(inner_product(psi, psi.scaled({0.0, 1.0})) - cplx(0.0, 1.0)) < 1e-12);

    SUBCASE("gaussian overlap at offset 2") {
        const auto b = WaveFunction::gaussian(g, 1.0, {2.0, 0.0});
        CHECK(std::abs(inner_product(psi, b) - std::exp(-1.0)) < 1e-12);
    }
    SUBCASE("conjugate symmetry") {
        const auto a = random_state(g, 1), b = random_state(g, 2);
        CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) < 1e-14);
    }
    SUBCASE("grid mismatch") {
        const auto other = WaveFunction::gaussian(GridSpec(2, 32, 8.0), 1.0);
        CHECK_THROWS_AS(inner_product(psi, other), InvalidInput);
    }
}

TEST_CASE("parseval and round trip") {
    const GridSpec g(2, 64, 8.0);
    const auto psi = random_state(g, 3);
    Field f = psi.amplitudes();
    const auto spec = Spectral::for_grid(g);
    spec->to_momentum(f);
    const auto mom_norm = [&] {
        std::vector<double> t(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) t[i] = std::norm(f[i]);
        return std::sqrt(pairwise_sum(t) * std::pow(g.momentum_spacing(), 2));
    }();
    CHECK(mom_norm == Approx(psi.norm()).epsilon(1e-12));
    spec->to_position(f);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(f[i] - psi.amplitudes()[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("momentum operator") {
    const GridSpec g(2, 64, 8.0);
    SUBCASE("plane wave factor shifts the mean momentum") {
        const auto psi = WaveFunction::gaussian(g, 1.0, {}, {2.0, 0.0});
        CHECK(std::abs(inner_product(psi, apply_momentum(psi, 1)) - 2.0) < 1e-8);
    }
    SUBCASE("symmetric gaussian has zero mean momentum") {
        const auto psi = WaveFunction::gaussian(g, 1.0);
        CHECK(std::abs(inner_product(psi, apply_momentum(psi, 1))) < 1e-10);
        CHECK(std::abs(inner_product(psi, apply_momentum(psi, 2))) < 1e-10);
    }
    SUBCASE("second moment of the unit gaussian") {
        const auto p1 = apply_momentum(WaveFunction::gaussian(g, 1.0), 1);
        CHECK(p1.norm() * p1.norm() == Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("self adjoint") {
        const auto a = random_state(g, 4), b = random_state(g, 5);
        for (int j : {1, 2})
            CHECK(std::abs(inner_product(apply_momentum(a, j), b) - inner_product(a, apply_momentum(b, j))) < 1e-10);
    }
    CHECK_THROWS_AS(apply_momentum(WaveFunction::gaussian(g, 1.0), 3), InvalidInput);
}

TEST_CASE("boost") {
    const GridSpec g(2, 64, 8.0);
    const auto psi = WaveFunction::gaussian(g, 1.0);
    CHECK(distance(boost(psi, {0.0, 0.0}), psi) < 1e-15);
    CHECK(distance(boost(boost(psi, {3.0, -1.0}), {-3.0, 1.0}), psi) < 1e-12);
    const auto m = momentum_centroid(boost(psi, {3.0, 0.0}));
    CHECK(m[0] == Approx(3.0).epsilon(1e-8));
    CHECK(std::abs(m[1]) < 1e-8);
    CHECK(boost(psi, {3.0, 0.0}).norm() == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(boost(psi, {10.0, 0.0}), AliasingRisk);

    SUBCASE("momentum commutes with the boost up to the shift") {
        const auto a = random_state(g, 6);
        const Vec v{1.5, -0.5};
        for (int j : {1, 2}) {
            const auto lhs = apply_momentum(boost(a, v), j);
            const auto rhs = add(boost(apply_momentum(a, j), v), boost(a, v), v[static_cast<std::size_t>(j - 1)]);
            CHECK(distance(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("weighted norms") {
    const GridSpec g(2, 64, 8.0);
    const auto psi = WaveFunction::gaussian(g, 1.0);
    CHECK(weighted_norm(psi, 0) == psi.norm());
    CHECK(weighted_norm(psi, 1) == Approx(std::sqrt(2.0)).epsilon(1e-6));
    double last = 0.0;
    for (double d : {0.0, 0.5, 1.0, 2.0}) {
        const double w = weighted_norm(WaveFunction::gaussian(g, 1.0, {d, 0.0}), 2);
        CHECK(w > last);
        last = w;
    }
    CHECK_THROWS_AS(weighted_norm(WaveFunction::gaussian(g, 1.0, {6.5, 0.0}), 1), BoundaryContamination);
    CHECK_THROWS_AS(weighted_norm(psi, 3), InvalidInput);
}

TEST_CASE("pairwise sums are order fixed") {
    std::vector<double> xs(1000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / static_cast<double>(i + 1);
    CHECK(pairwise_sum(xs) == pairwise_sum(xs));
    CHECK(pairwise_sum(xs) == Approx(7.485470860550345).epsilon(1e-14));
}
