#ifndef SQZ_ANALYTIC_HPP
#define SQZ_ANALYTIC_HPP

#include "sqz/grid.hpp"
#include "sqz/types.hpp"

// Closed-form evolution of pure squeezed states of the harmonic oscillator:
//
//   psi(x,t) = (2 pi sg2 A)^(-1/4) exp[-(x - x_c)^2 (1 + iB) / (4 sg2 A)]
//              * exp(i p_c x / hbar) * exp(-i phi),
//
// sg2 = hbar/(2 m omega), with A, B oscillating at 2 omega and (x_c, p_c)
// following the classical trajectory.

namespace sqz {

struct QuadratureShape {
    double A;
    double B;
};

QuadratureShape quadrature_shape(const SqueezeDynamics& sq, double omega, double t);

/// Pure-state dynamics whose t = 0 wavefunction is exp(-x^2 / 4D) (real, B = 0).
/// Narrow starts (D < sigma_gr^2) are expressed with phi_sq = pi, never negative dA.
SqueezeDynamics squeeze_from_initial_variance(double D, const OscillatorConfig& osc);

PhasePoint center_state(const CenterTrajectory& center, const OscillatorConfig& osc, double t);

/// Global phase phi(t) of a pure state. Continuous and monotone in the
/// squeeze part; phi(0) uses the principal atan branch and the center part
/// starts at zero. Throws DomainError unless (A0+dA)(A0-dA) = 1.
double accumulated_phase(const SqueezeDynamics& sq, const CenterTrajectory& center,
                         const OscillatorConfig& osc, double t);

/// Requires a pure spec (DomainError) and a covering grid (CoverageError).
WavefunctionSample eval_pure_wavefunction(const GaussianStateSpec& spec, const GridSpec& grid,
                                          double t);

/// rho(x,x') = psi(x) psi*(x') evaluated in center/relative coordinates.
DensityMatrixSample eval_pure_density(const GaussianStateSpec& spec, const GridSpec& grid, double t);

struct Moments {
    double mean_x;
    double mean_p;
    double var_x;
    double var_p;
    /// <{x - <x>, p - <p>}> / 2
    double cov_xp;
    double uncertainty_product;
};

/// Grid quadrature of first and second moments; momentum via spectral
/// differentiation. Input must be normalized to within 1e-6 (DomainError).
Moments moments(const WavefunctionSample& wf, double hbar);
Moments moments(const DensityMatrixSample& dm, double hbar);

struct OdeResiduals {
    double r1;  ///< |A' + 2 omega B| / omega
    double r2;  ///< |B A' - A B' - omega (1 - B^2 - A^2)| / omega
    double r3;  ///< |phi' - omega / 2A| / omega
};

/// Central-difference check of the A, B, phi equations of motion. For P != 1
/// the phase is still taken from the closed-form atan expression, so r2 and r3
/// expose the violated constraint.
OdeResiduals ode_residuals(const SqueezeDynamics& sq, const OscillatorConfig& osc, double t,
                           double dt_fd);
OdeResiduals ode_residuals(const SqueezeDynamics& sq, const OscillatorConfig& osc, double t);

/// ||i hbar d_t psi - H psi||_2 / ||H psi||_2 with d_t by central difference
/// and d_x^2 spectral.
double schrodinger_residual(const GaussianStateSpec& spec, const GridSpec& grid, double t,
                            double dt_fd);
double schrodinger_residual(const GaussianStateSpec& spec, const GridSpec& grid, double t);

}  // namespace sqz

#endif
