#ifndef SQZ_SRC_KERNELS_HPP
#define SQZ_SRC_KERNELS_HPP

#include <span>
#include <vector>

#include "sqz/grid.hpp"
#include "sqz/types.hpp"

// Unchecked evaluation kernels shared by the analytic and ensemble modules.

namespace sqz::detail {

struct GaussianShape {
    double A;       ///< dimensionless variance
    double B;       ///< chirp
    double x_c;
    double p_c;
    double sg2;     ///< sigma_gr^2
    double hbar;
};

/// (2 pi sg2 A)^(-1/4) exp[-(x-x_c)^2 (1+iB)/(4 sg2 A) + i p_c x/hbar - i phase]
void gaussian_wavepacket(const GaussianShape& g, double phase, std::span<const double> xs,
                         std::span<cplx> out);

/// Four-factor Gaussian density matrix with mixedness factor P, row-major.
/// P = 1 is the pure-state density psi(x) psi*(x').
void gaussian_density(const GaussianShape& g, double P, std::span<const double> xs,
                      std::span<cplx> out);

/// Squeeze part of the accumulated phase with the half-period branch count;
/// valid as an antiderivative of omega / 2A only when (A0+dA)(A0-dA) = 1.
double squeeze_phase(const SqueezeDynamics& sq, double omega, double t);

/// Center part of the accumulated phase, zero at t = 0.
double center_phase(const CenterTrajectory& c, const OscillatorConfig& osc, double t);

}  // namespace sqz::detail

#endif
