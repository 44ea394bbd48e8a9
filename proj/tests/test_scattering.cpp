#include <doctest.h>

#include <cmath>

#include "stark/errors.hpp"
#include "stark/reconstruct.hpp"
#include "stark/scattering.hpp"

using namespace stark;
using doctest::Approx;

namespace {

CompositePotential bump() {
    CompositePotential v;
    v.short_range = make_phantom("gaussian_bump", {1.0, 1.0});
    return v;
}

ScatteringConfig small_config(const CompositePotential& v, const Vec& vel, Modifier modifier = NoModifier{}) {
    auto cfg = level_config(sized_level(norm2(vel), 0.5), v, {vel[0] / norm2(vel), vel[1] / norm2(vel)}, {-0.7, 0.0},
                            1e-4);
    cfg.modifier = std::move(modifier);
    return cfg;
}

}  // namespace

TEST_CASE("horizon validation") {
    auto cfg = small_config(bump(), {0.0, 8.0});
    CHECK_NOTHROW(cfg.validate());
    cfg.horizons = {{-1.0, 1.0}, {-1.5, 1.5}, {-3.0, 3.0}};
    CHECK_THROWS_AS(cfg.validate(), HorizonError);
    cfg.horizons = {{-1.0, 1.0}, {-2.0, 2.0}};
    CHECK_THROWS_AS(cfg.validate(), HorizonError);
    cfg.horizons = {{1.0, 2.0}, {-4.0, 4.0}, {-8.0, 8.0}};
    CHECK_THROWS_AS(cfg.validate(), HorizonError);
    CHECK_THROWS_AS(scaled_horizons({2.5}, 0.0), InvalidInput);
}

TEST_CASE("zero potential scatters trivially") {
    const Vec vel{0.0, 8.0};
    const auto cfg = small_config(CompositePotential{}, vel);
    const auto probe = WaveFunction::gaussian(cfg.plan.grid, 0.5);
    const auto out = scattering_apply(probe, vel, cfg);
    CHECK(distance(out.state, probe) < 1e-12);
    CHECK(out.converged);
    for (const auto& e : commutator_elements({1, 2}, probe, probe, vel, cfg)) CHECK(std::abs(e.value) < 1e-10);
}

TEST_CASE("the scattering operator is unitary") {
    const Vec vel{0.0, 8.0};
    const auto cfg = small_config(bump(), vel);
    const auto probe = WaveFunction::gaussian(cfg.plan.grid, 0.5);
    const auto out = scattering_apply(probe, vel, cfg);
    CHECK(std::abs(out.state.norm() - 1.0) < 1e-10);
    CHECK(distance(out.state, probe) > 1e-3);
}

TEST_CASE("graf modifier reproduces the unmodified operator") {
    const Vec vel{0.0, 8.0};
    const auto plain = small_config(bump(), vel);
    const auto graf = small_config(bump(), vel, GrafModifier{});
    const auto probe = WaveFunction::gaussian(plain.plan.grid, 0.5);
    const auto a = commutator_element(1, probe, probe, vel, plain);
    const auto b = commutator_element(1, probe, probe, vel, graf);
    CHECK(std::abs(a.value - b.value) < 1e-12);
}

TEST_CASE("elements at speed 20") {
    const Vec omega{0.0, 1.0}, b{-0.7, 0.0};

    SUBCASE("short range bump") {
        const auto level = sized_level(20.0, 0.4, {2.5, 5.0, 10.0, 20.0});
        const auto cfg = level_config(level, bump(), omega, b, 1e-4);
        const auto probe = WaveFunction::gaussian(cfg.plan.grid, 0.4);
        const auto els = commutator_elements({1, 2}, probe, probe, {0.0, 20.0}, cfg);
        CHECK(els[0].converged);
        // Frozen baseline.
        CHECK(els[0].value.real() == Approx(0.0700109909).epsilon(1e-7));
        CHECK(els[0].value.imag() == Approx(1.3003415134).epsilon(1e-7));
        // The component along the motion carries no line integral.
        CHECK(std::abs(els[1].value) < 1e-10);
        // Successive horizons differ less and less.
        const auto& h = els[0].history;
        for (std::size_t k = 2; k < h.size(); ++k)
            CHECK(std::abs(h[k].value - h[k - 1].value) <= std::abs(h[k - 1].value - h[k - 2].value) + 1e-13);

        // Through the centre the transverse element vanishes as |v| grows; the
        // field bends the path, so at finite speed it is small but not zero.
        const auto centred = level_config(level, bump(), omega, {0.0, 0.0}, 1e-4);
        CHECK(std::abs(commutator_element(1, probe, probe, {0.0, 20.0}, centred).value) < 0.01);
    }

    SUBCASE("graf class tail") {
        auto pot = bump();
        pot.long_range = make_phantom("power_tail_graf", {0.4, 0.8});
        const auto level = sized_level(20.0, 0.4, {10.0, 20.0, 40.0});
        const auto cfg = level_config(level, pot, omega, b, 1e-4);
        const auto probe = WaveFunction::gaussian(cfg.plan.grid, 0.4);
        const auto e = commutator_element(1, probe, probe, {0.0, 20.0}, cfg);
        // Frozen baseline.
        CHECK(e.value.real() == Approx(0.0738646172).epsilon(1e-7));
        CHECK(e.value.imag() == Approx(1.7854137119).epsilon(1e-7));
        const auto& h = e.history;
        CHECK(std::abs(h[2].value - h[1].value) < std::abs(h[1].value - h[0].value));
    }
}
