#ifndef SQZ_ENSEMBLE_HPP
#define SQZ_ENSEMBLE_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "sqz/grid.hpp"
#include "sqz/types.hpp"

namespace sqz {

/// Pure state whose center is smeared by an isotropic Gaussian in the
/// (x_c, p_c / m omega) plane with standard deviation sigma_a. The mean
/// center follows base.center().
class MixedGaussianSpec {
public:
    MixedGaussianSpec(GaussianStateSpec base, double sigma_a);

    const GaussianStateSpec& base() const noexcept { return base_; }
    double sigma_a() const noexcept { return sigma_a_; }
    /// (x_bar, p_bar) at t = 0.
    PhasePoint mean_center() const noexcept;

private:
    GaussianStateSpec base_;
    double sigma_a_;
};

/// A0 -> A0 + sigma_a^2 / sigma_gr^2 with dA, phi_sq and the mean center kept;
/// P recomputed from the shifted A0. This is the only place P is derived from sigma_a.
GaussianStateSpec reparameterize(const MixedGaussianSpec& spec);

/// Closed-form Gaussian density matrix with mixedness factor P (P >= 1).
DensityMatrixSample eval_mixed_density(const GaussianStateSpec& spec, const GridSpec& grid, double t);

/// Probabilists' Gauss-Hermite rule: sum_i w_i f(z_i) ~ E[f(Z)], Z ~ N(0,1).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_hermite(std::size_t n);

enum class Sampler {
    /// 2-D Sobol points with a seeded linear scramble and digital shift,
    /// Box-Muller mapped to normals.
    scrambled_sobol,
    /// mt19937_64 with std::normal_distribution.
    pseudorandom,
};
std::string_view to_string(Sampler s) noexcept;
Sampler sampler_from_string(std::string_view name);

struct EnsembleOptions {
    std::size_t n_nodes = 32;
    /// Re-run with 2 n_nodes and throw ConvergenceError if the peak-relative
    /// difference exceeds convergence_tol.
    bool check_convergence = true;
    double convergence_tol = 1e-8;
};

/// Gauss-Hermite tensor average of pure density matrices over the initial
/// center distribution; each member is carried classically to t.
DensityMatrixSample ensemble_average_density(const MixedGaussianSpec& spec, const GridSpec& grid,
                                             double t, const EnsembleOptions& opts);
DensityMatrixSample ensemble_average_density(const MixedGaussianSpec& spec, const GridSpec& grid,
                                             double t, std::size_t n_nodes);

struct MonteCarloOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 20240611;
    Sampler sampler = Sampler::scrambled_sobol;
};

DensityMatrixSample monte_carlo_density(const MixedGaussianSpec& spec, const GridSpec& grid,
                                        double t, const MonteCarloOptions& opts);

/// max |a - b| / max |b|
double peak_relative_difference(const DensityMatrixSample& a, const DensityMatrixSample& b);

/// Closed form of the integral over y of
///   exp[-((x+y)^2 + a(x+y)) / 2 s1] / sqrt(2 pi s1) * exp(-y^2 / 2 s2) / sqrt(2 pi s2)
/// with s1 = sigma1^2, s2 = sigma2^2 > 0 (DomainError otherwise).
cplx gaussian_identity_shifted(double x, cplx a, double sigma1_sq, double sigma2_sq);

/// Closed form of E[exp(a (x + Y))], Y ~ N(0, sigma^2).
cplx gaussian_identity_exponential(double x, cplx a, double sigma_sq);

}  // namespace sqz

#endif
