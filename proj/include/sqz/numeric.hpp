#ifndef SQZ_NUMERIC_HPP
#define SQZ_NUMERIC_HPP

#include <cstddef>
#include <memory>
#include <string_view>

#include "sqz/grid.hpp"
#include "sqz/types.hpp"

namespace sqz {

enum class Scheme {
    /// Cayley (Crank-Nicolson) step of the sine-spectral Hamiltonian with
    /// Dirichlet edges; exactly unitary up to the linear-solve tolerance.
    implicit_unitary,
    /// Strang split-step Fourier on the periodic grid.
    spectral_split_step,
};

std::string_view to_string(Scheme s) noexcept;
/// Accepts "implicit-unitary" and "spectral-split-step" (ParseError otherwise).
Scheme scheme_from_string(std::string_view name);

struct PropagatorConfig {
    Scheme scheme = Scheme::spectral_split_step;
    double dt = 0.0;
    std::size_t n_steps = 1;

    void validate() const;
};

/// Edge amplitude above which propagation is aborted with BoundaryError.
inline constexpr double kEdgeGuard = 1e-8;

/// Reusable time stepper for one grid, oscillator, scheme and dt. Owns its
/// transform plans and scratch buffers; not shareable across threads.
class Propagator {
public:
    Propagator(const GridSpec& grid, const OscillatorConfig& osc, Scheme scheme, double dt);
    ~Propagator();
    Propagator(Propagator&&) noexcept;
    Propagator& operator=(Propagator&&) noexcept;

    Scheme scheme() const noexcept;
    double dt() const noexcept;

    /// Advances `wf` in place by n_steps * dt, checking the edge guard after
    /// every step.
    void advance(WavefunctionSample& wf, std::size_t n_steps);

    /// GMRES iterations used by the most recent implicit step (0 for split-step).
    std::size_t last_iterations() const noexcept;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

/// psi0 at t0 -> psi at t0 + n_steps dt. psi0 must be normalized (1e-8).
WavefunctionSample propagate(const WavefunctionSample& psi0, const OscillatorConfig& osc,
                             const PropagatorConfig& cfg);

/// |<a|b>|^2 by trapezoid rule. Grids must match (DomainError).
double fidelity(const WavefunctionSample& a, const WavefunctionSample& b);

/// Tr rho^2 by double trapezoid quadrature.
double purity(const DensityMatrixSample& dm);

/// <H> with spectral kinetic energy.
double energy(const WavefunctionSample& wf, const OscillatorConfig& osc);

}  // namespace sqz

#endif
