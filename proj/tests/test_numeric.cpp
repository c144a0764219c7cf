#include <doctest.h>

#include <chrono>
#include <cmath>

#include "oracles.hpp"
#include "sqz/analytic.hpp"
#include "sqz/ensemble.hpp"
#include "sqz/errors.hpp"
#include "sqz/numeric.hpp"

using namespace sqz;
using oracle::kPi;

namespace {

const OscillatorConfig kNatural = OscillatorConfig::natural();

GaussianStateSpec pure(double A0, double dA, double phi_sq, double X = 0.0, double phi_c = 0.0,
                       const OscillatorConfig& osc = kNatural)
{
    return GaussianStateSpec::pure(osc, SqueezeDynamics(A0, dA, phi_sq), CenterTrajectory(X, phi_c));
}

double infidelity_after(const GaussianStateSpec& spec, const GridSpec& grid, Scheme scheme, double t,
                        std::size_t steps)
{
    auto psi = eval_pure_wavefunction(spec, grid, 0.0);
    const auto out = propagate(psi, spec.osc(), {scheme, t / static_cast<double>(steps), steps});
    return 1.0 - fidelity(out, eval_pure_wavefunction(spec, grid, t));
}

}  // namespace

TEST_CASE("scheme names and config validation")
{
    CHECK(scheme_from_string("implicit-unitary") == Scheme::implicit_unitary);
    CHECK(scheme_from_string("spectral-split-step") == Scheme::spectral_split_step);
    CHECK(to_string(Scheme::implicit_unitary) == "implicit-unitary");
    CHECK_THROWS_AS(scheme_from_string("euler"), ParseError);
    CHECK_THROWS_AS((PropagatorConfig{Scheme::spectral_split_step, 0.0, 1}.validate()), InvariantError);
    CHECK_THROWS_AS((PropagatorConfig{Scheme::spectral_split_step, 0.1, 0}.validate()), InvariantError);
}

TEST_CASE("fidelity")
{
    const auto ground = pure(1.0, 0.0, 0.0);
    const auto grid = GridSpec(-12.0, 12.0, 1024);
    const auto a = eval_pure_wavefunction(ground, grid, 0.0);
    CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-13));

    auto rotated = a;
    for (auto& v : rotated.values) {
        v *= std::exp(cplx(0.0, 0.77));
    }
    CHECK(fidelity(a, rotated) == doctest::Approx(1.0).epsilon(1e-13));

    // Ground state against the real Gaussian of twice the variance.
    const auto wide = eval_pure_wavefunction(pure(1.25, 0.75, 0.0), grid, 0.0);
    const double overlap = oracle::integrate_line(
        [](double x) { return oracle::real_gaussian(x, 0.5) * oracle::real_gaussian(x, 1.0); });
    const double expected = overlap * overlap;
    CHECK(expected == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-12));
    CHECK(fidelity(a, wide) == doctest::Approx(expected).epsilon(1e-10));

    CHECK_THROWS_AS(fidelity(a, eval_pure_wavefunction(ground, GridSpec(-12.0, 12.0, 512), 0.0)), DomainError);
}

TEST_CASE("purity")
{
    const auto grid = GridSpec(-14.0, 14.0, 256);
    CHECK(std::abs(purity(eval_pure_density(pure(1.25, 0.75, 0.3, 1.0), grid, 0.6)) - 1.0) < 1e-6);

    const GaussianStateSpec p4(kNatural, SqueezeDynamics(2.0, 0.0, 0.0), CenterTrajectory::at_rest(), 4.0);
    CHECK(std::abs(purity(eval_mixed_density(p4, grid, 0.2)) - 0.5) < 1e-5);

    const GaussianStateSpec p121(kNatural, SqueezeDynamics(1.1, 0.0, 0.0), CenterTrajectory::at_rest(), 1.21);
    CHECK(std::abs(purity(eval_mixed_density(p121, grid, 1.4)) - 1.0 / 1.1) < 1e-5);
}

TEST_CASE("energy")
{
    const OscillatorConfig osc(1.5, 0.8, 0.4);
    const double sg = std::sqrt(osc.ground_variance());
    const auto ground = pure(1.0, 0.0, 0.0, 0.0, 0.0, osc);
    CHECK(energy(eval_pure_wavefunction(ground, GridSpec::default_for(ground), 0.0), osc) ==
          doctest::Approx(0.5 * osc.hbar() * osc.omega()).epsilon(1e-10));

    // hbar omega A0 / 2 plus the classical energy of the center.
    const double X = 2.0 * sg;
    const auto spec = pure(1.25, 0.75, 0.9, X, 0.4, osc);
    const double expected = 0.5 * osc.hbar() * osc.omega() * 1.25 +
                            0.5 * osc.mass() * osc.omega() * osc.omega() * X * X;
    for (double t : {0.0, 1.3, 4.0}) {
        CHECK(energy(eval_pure_wavefunction(spec, GridSpec::default_for(spec), t), osc) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("split-step propagation")
{
    const double T = kNatural.period();
    SUBCASE("ground state is stationary over one period")
    {
        const auto ground = pure(1.0, 0.0, 0.0);
        const auto grid = GridSpec::default_for(ground, 1024);
        const auto psi0 = eval_pure_wavefunction(ground, grid, 0.0);
        const auto out = propagate(psi0, kNatural, {Scheme::spectral_split_step, T / 8192.0, 8192});
        CHECK(std::abs(fidelity(out, psi0) - 1.0) <= 1e-8);
        CHECK(out.t == doctest::Approx(T));
    }
    SUBCASE("coherent state follows Ehrenfest")
    {
        const double sg = std::sqrt(kNatural.ground_variance());
        const auto coh = pure(1.0, 0.0, 0.0, 2.0 * sg, 0.5);
        const auto grid = GridSpec::default_for(coh, 1024);
        auto psi = eval_pure_wavefunction(coh, grid, 0.0);
        Propagator prop(grid, kNatural, Scheme::spectral_split_step, T / 8192.0);
        for (int k = 1; k <= 8; ++k) {
            prop.advance(psi, 1024);
            const double t = k * T / 8.0;
            psi.t = t;
            const auto m = moments(psi, kNatural.hbar());
            CHECK(std::abs(m.mean_x - 2.0 * sg * std::cos(t + 0.5)) <= 1e-6 * sg);
        }
    }
    SUBCASE("squeezed vacuum D = 2 sigma_gr^2 over one period")
    {
        const auto sq = squeeze_from_initial_variance(2.0 * kNatural.ground_variance(), kNatural);
        const auto spec = GaussianStateSpec::pure(kNatural, sq, CenterTrajectory::at_rest());
        CHECK(infidelity_after(spec, GridSpec::default_for(spec, 1024), Scheme::spectral_split_step, T, 8192) <= 1e-6);
    }
    SUBCASE("norm preserved")
    {
        const auto spec = pure(1.25, 0.75, 0.4, 1.0, 0.2);
        const auto grid = GridSpec::default_for(spec, 512);
        const auto out = propagate(eval_pure_wavefunction(spec, grid, 0.0), kNatural,
                                   {Scheme::spectral_split_step, T / 1000.0, 1000});
        CHECK(std::abs(trapezoid_norm(out) - 1.0) < 1e-12);
    }
}

TEST_CASE("implicit-unitary propagation")
{
    const double T = kNatural.period();
    const auto spec = pure(1.25, 0.75, 0.4, 1.0, 0.2);
    const auto grid = GridSpec::default_for(spec, 512);

    SUBCASE("agrees with the closed form")
    {
        CHECK(infidelity_after(spec, grid, Scheme::implicit_unitary, T / 4.0, 1024) <= 1e-8);
    }
    SUBCASE("unitary to solver tolerance")
    {
        const auto out = propagate(eval_pure_wavefunction(spec, grid, 0.0), kNatural,
                                   {Scheme::implicit_unitary, 0.05, 40});
        CHECK(std::abs(trapezoid_norm(out) - 1.0) < 1e-11);
    }
    SUBCASE("second order in dt")
    {
        // Infidelity goes as dt^4, so its square root drops by 4 per halving.
        const double t = T / 4.0;
        const double e1 = std::sqrt(infidelity_after(spec, grid, Scheme::implicit_unitary, t, 16));
        const double e2 = std::sqrt(infidelity_after(spec, grid, Scheme::implicit_unitary, t, 32));
        const double e3 = std::sqrt(infidelity_after(spec, grid, Scheme::implicit_unitary, t, 64));
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
        CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
    }
    SUBCASE("both schemes agree")
    {
        const auto psi0 = eval_pure_wavefunction(spec, grid, 0.0);
        const auto a = propagate(psi0, kNatural, {Scheme::implicit_unitary, T / 2048.0, 512});
        const auto b = propagate(psi0, kNatural, {Scheme::spectral_split_step, T / 2048.0, 512});
        CHECK(1.0 - fidelity(a, b) <= 1e-8);
    }
}

TEST_CASE("propagation errors")
{
    const auto grid = GridSpec(-6.0, 6.0, 256);
    WavefunctionSample psi{grid, std::vector<cplx>(grid.size()), 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        psi.values[i] = oracle::real_gaussian(grid.x(i) - 3.5, 0.5);
    }
    for (Scheme s : {Scheme::spectral_split_step, Scheme::implicit_unitary}) {
        auto copy = psi;
        Propagator prop(grid, kNatural, s, 0.01);
        CHECK_THROWS_AS(prop.advance(copy, 100), BoundaryError);
    }

    auto unnormalized = eval_pure_wavefunction(pure(1.0, 0.0, 0.0), grid, 0.0);
    unnormalized.values[128] *= 2.0;
    CHECK_THROWS_AS(propagate(unnormalized, kNatural, {Scheme::spectral_split_step, 0.01, 1}), DomainError);
}
