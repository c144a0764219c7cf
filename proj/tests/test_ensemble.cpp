#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sqz/analytic.hpp"
#include "sqz/ensemble.hpp"
#include "sqz/errors.hpp"
#include "sqz/numeric.hpp"

using namespace sqz;
using oracle::kPi;

namespace {

const OscillatorConfig kNatural = OscillatorConfig::natural();

GaussianStateSpec pure(double A0, double dA, double phi_sq, double X = 0.0, double phi_c = 0.0)
{
    return GaussianStateSpec::pure(kNatural, SqueezeDynamics(A0, dA, phi_sq), CenterTrajectory(X, phi_c));
}

double max_abs_difference(const DensityMatrixSample& a, const DensityMatrixSample& b)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
    }
    return worst;
}

}  // namespace

TEST_CASE("reparameterize")
{
    const auto same = reparameterize(MixedGaussianSpec(pure(1.25, 0.75, 0.3, 1.0, 0.2), 0.0));
    CHECK(same.squeeze().A0() == 1.25);
    CHECK(same.purity_product() == doctest::Approx(1.0));

    const auto p4 = reparameterize(MixedGaussianSpec(pure(1.0, 0.0, 0.0), std::sqrt(kNatural.ground_variance())));
    CHECK(p4.squeeze().A0() == doctest::Approx(2.0));
    CHECK(p4.purity_product() == doctest::Approx(4.0));

    const auto p25 = reparameterize(MixedGaussianSpec(pure(1.25, 0.75, 0.3, 1.0, 0.2),
                                                      std::sqrt(0.5 * kNatural.ground_variance())));
    CHECK(p25.squeeze().A0() == doctest::Approx(1.75));
    CHECK(p25.squeeze().dA() == 0.75);
    CHECK(p25.squeeze().phi_sq() == 0.3);
    CHECK(p25.center().X_amp() == 1.0);
    CHECK(p25.purity_product() == doctest::Approx(2.5));

    double prev = 1.0;
    for (double sa = 0.1; sa < 3.0; sa += 0.1) {
        const double P = reparameterize(MixedGaussianSpec(pure(1.25, 0.75, 0.0), sa)).purity_product();
        CHECK(P > prev);
        prev = P;
    }

    CHECK_THROWS_AS(MixedGaussianSpec(pure(1.0, 0.0, 0.0), -0.1), InvariantError);
    CHECK_THROWS_AS(MixedGaussianSpec(p4, 0.1), InvariantError);
}

TEST_CASE("closed-form mixed density")
{
    SUBCASE("P = 1 reduces to the pure density")
    {
        const auto spec = pure(1.25, 0.75, 0.5, 1.2, 0.1);
        const auto grid = GridSpec::default_for(spec, 128);
        CHECK(max_abs_difference(eval_mixed_density(spec, grid, 0.8), eval_pure_density(spec, grid, 0.8)) < 1e-14);
    }
    SUBCASE("trace, hermiticity and moments")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double sg2 = kNatural.ground_variance();
        for (int k = 0; k < 12; ++k) {
            const double target_P = 1.0 + 99.0 * u(rng);
            const double sa = std::sqrt((std::sqrt(target_P) - 1.0) * sg2);
            const auto state = reparameterize(MixedGaussianSpec(pure(1.0, 0.0, 0.0, 0.7, 0.3), sa));
            CHECK(state.purity_product() == doctest::Approx(target_P));
            const auto grid = GridSpec::default_for(state, 256);
            const double t = 10.0 * u(rng);
            const auto dm = eval_mixed_density(state, grid, t);
            CHECK(std::abs(trace(dm) - 1.0) < 1e-8);
            CHECK(hermiticity_defect(dm) < 1e-14);
            const auto m = moments(dm, kNatural.hbar());
            CHECK(m.var_x == doctest::Approx(sg2 * quadrature_shape(state.squeeze(), 1.0, t).A).epsilon(1e-8));
            CHECK(m.uncertainty_product >= 0.5 * std::sqrt(target_P) * (1.0 - 1e-8));
        }
    }
    SUBCASE("squeezed mixture moments against the classical sum")
    {
        const double sg2 = kNatural.ground_variance();
        const double sa2 = 0.5 * sg2;
        const auto base = pure(1.25, 0.75, 0.4, 1.0, 0.6);
        const auto state = reparameterize(MixedGaussianSpec(base, std::sqrt(sa2)));
        const auto grid = GridSpec::default_for(state, 256);
        for (double t : {0.0, 0.9, 2.2}) {
            const auto q = quadrature_shape(base.squeeze(), 1.0, t);
            const auto m = moments(eval_mixed_density(state, grid, t), 1.0);
            CHECK(m.var_x == doctest::Approx(sg2 * q.A + sa2).epsilon(1e-9));
            CHECK(m.var_p == doctest::Approx((1.0 + q.B * q.B) / (4.0 * sg2 * q.A) + sa2).epsilon(1e-9));
            CHECK(m.cov_xp == doctest::Approx(-0.5 * q.B).epsilon(1e-9));
            const auto c = center_state(base.center(), kNatural, t);
            CHECK(m.mean_x == doctest::Approx(c.x).epsilon(1e-10));
            CHECK(m.mean_p == doctest::Approx(c.p).epsilon(1e-10));
        }
    }
}

TEST_CASE("Gauss-Hermite rule")
{
    for (std::size_t n : {1u, 2u, 5u, 16u, 32u, 64u}) {
        const auto rule = gauss_hermite(n);
        REQUIRE(rule.nodes.size() == n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += rule.weights[i];
            CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[n - 1 - i]).epsilon(1e-12));
            if (i > 0) {
                CHECK(rule.nodes[i] > rule.nodes[i - 1]);
            }
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        // E[Z^2k] = (2k-1)!! is reproduced for 2k <= 2n - 1.
        double double_factorial = 1.0;
        for (std::size_t k = 1; 2 * k <= 2 * n - 1 && k <= 10; ++k) {
            double_factorial *= static_cast<double>(2 * k - 1);
            double moment = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                moment += rule.weights[i] * std::pow(rule.nodes[i], 2.0 * static_cast<double>(k));
            }
            CHECK(moment == doctest::Approx(double_factorial).epsilon(1e-11));
        }
    }
    CHECK_THROWS_AS(gauss_hermite(0), DomainError);
}

TEST_CASE("ensemble average against the closed form")
{
    const double sg = std::sqrt(kNatural.ground_variance());
    SUBCASE("sigma_a = 0 gives the pure density")
    {
        const auto base = pure(1.25, 0.75, 0.2, 0.8, 0.1);
        const auto grid = GridSpec::default_for(base, 64);
        for (std::size_t n : {16u, 24u}) {
            const auto avg = ensemble_average_density(MixedGaussianSpec(base, 0.0), grid, 0.5, n);
            CHECK(max_abs_difference(avg, eval_pure_density(base, grid, 0.5)) < 1e-14);
        }
    }
    SUBCASE("ground state with sigma_a = sigma_gr (P = 4)")
    {
        const MixedGaussianSpec mixed(pure(1.0, 0.0, 0.0), sg);
        const auto state = reparameterize(mixed);
        const auto grid = GridSpec::default_for(state, 256);
        for (double t : {0.0, 1.3}) {
            const auto avg = ensemble_average_density(mixed, grid, t, 32);
            CHECK(peak_relative_difference(avg, eval_mixed_density(state, grid, t)) <= 1e-8);
        }
    }
    SUBCASE("too few nodes are detected")
    {
        const MixedGaussianSpec mixed(pure(1.25, 0.75, 0.0), 2.0 * sg);
        const auto grid = GridSpec::default_for(reparameterize(mixed), 128);
        CHECK_THROWS_AS(ensemble_average_density(mixed, grid, 0.3, 32), ConvergenceError);
        CHECK_THROWS_AS(ensemble_average_density(mixed, grid, 0.3, 8), DomainError);
    }
}

TEST_CASE("Monte Carlo average")
{
    const double sg = std::sqrt(kNatural.ground_variance());
    const MixedGaussianSpec mixed(pure(1.25, 0.75, 0.3, 1.0, 0.4), sg);
    const auto state = reparameterize(mixed);
    const auto grid = GridSpec::default_for(state, 96);
    const auto exact = eval_mixed_density(state, grid, 0.7);

    MonteCarloOptions opts;
    const auto a = monte_carlo_density(mixed, grid, 0.7, opts);
    CHECK(peak_relative_difference(a, exact) <= 1e-3);
    CHECK(monte_carlo_density(mixed, grid, 0.7, opts).values == a.values);
    opts.seed += 1;
    CHECK(monte_carlo_density(mixed, grid, 0.7, opts).values != a.values);

    opts.sampler = Sampler::pseudorandom;
    CHECK(peak_relative_difference(monte_carlo_density(mixed, grid, 0.7, opts), exact) <= 2e-2);

    opts.samples = 0;
    CHECK_THROWS_AS(monte_carlo_density(mixed, grid, 0.7, opts), DomainError);

    CHECK(sampler_from_string("scrambled-sobol") == Sampler::scrambled_sobol);
    CHECK(to_string(Sampler::pseudorandom) == "pseudorandom");
    CHECK_THROWS_AS(sampler_from_string("halton"), ParseError);
}

TEST_CASE("Gaussian integral identities")
{
    SUBCASE("shifted convolution")
    {
        const double s1 = 0.8;
        const double narrow = gaussian_identity_shifted(0.3, 0.0, s1, 1e-14).real();
        CHECK(narrow == doctest::Approx(std::exp(-0.09 / (2 * s1)) / std::sqrt(2 * kPi * s1)).epsilon(1e-12));
        CHECK(gaussian_identity_shifted(0.0, 0.0, 1.0, 1.0).real() == doctest::Approx(1.0 / std::sqrt(4.0 * kPi)));

        const double x = 0.2, s2 = 0.5;
        const cplx a(0.7, 0.3);
        const cplx lhs = oracle::integrate_through_saddle([&](cplx y) {
            return -((x + y) * (x + y) + a * (x + y)) / (2.0 * s1) - y * y / (2.0 * s2) -
                   0.5 * std::log(4.0 * kPi * kPi * s1 * s2);
        });
        CHECK(std::abs(gaussian_identity_shifted(x, a, s1, s2) - lhs) <= 1e-10 * std::abs(lhs));

        // Plain real-axis quadrature agrees for this mild parameter set.
        auto integrand = [&](double y) {
            return std::exp(-((x + y) * (x + y) + a * (x + y)) / (2.0 * s1) - y * y / (2.0 * s2)) /
                   std::sqrt(4.0 * kPi * kPi * s1 * s2);
        };
        const cplx direct(oracle::integrate_line([&](double y) { return integrand(y).real(); }),
                          oracle::integrate_line([&](double y) { return integrand(y).imag(); }));
        CHECK(std::abs(direct - lhs) <= 1e-12 * std::abs(lhs));

        CHECK_THROWS_AS(gaussian_identity_shifted(0.0, 0.0, 0.0, 1.0), DomainError);
        CHECK_THROWS_AS(gaussian_identity_shifted(0.0, 0.0, 1.0, -1.0), DomainError);
    }
    SUBCASE("exponential average")
    {
        CHECK(gaussian_identity_exponential(0.4, 0.0, 0.7) == cplx(1.0, 0.0));
        CHECK(gaussian_identity_exponential(0.0, 1.0, 1.0).real() == doctest::Approx(std::exp(0.5)));
        const cplx v = gaussian_identity_exponential(0.5, cplx(0.0, 2.0), 0.6);
        const cplx expected = std::exp(cplx(0.0, 1.0)) * std::exp(-1.2);
        CHECK(std::abs(v - expected) < 1e-15);
        const cplx lhs = oracle::integrate_through_saddle([&](cplx y) {
            return cplx(0.0, 2.0) * (0.5 + y) - y * y / 1.2 - 0.5 * std::log(2.0 * kPi * 0.6);
        });
        CHECK(std::abs(v - lhs) <= 1e-10 * std::abs(lhs));
        CHECK_THROWS_AS(gaussian_identity_exponential(0.0, 1.0, 0.0), DomainError);
    }
}
