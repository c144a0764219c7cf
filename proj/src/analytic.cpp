#include "sqz/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kernels.hpp"
#include "spectral.hpp"
#include "sqz/errors.hpp"

namespace sqz {

namespace detail {

void gaussian_wavepacket(const GaussianShape& g, double phase, std::span<const double> xs,
                         std::span<cplx> out)
{
    const double width = 4.0 * g.sg2 * g.A;
    const double pre = std::pow(2.0 * std::numbers::pi * g.sg2 * g.A, -0.25);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - g.x_c;
        const double q = d * d / width;
        out[i] = std::polar(pre * std::exp(-q), -q * g.B + g.p_c * xs[i] / g.hbar - phase);
    }
}

void gaussian_density(const GaussianShape& g, double P, std::span<const double> xs,
                      std::span<cplx> out)
{
    const std::size_t n = xs.size();
    const double s = 2.0 * g.sg2 * g.A;
    const double pre = 1.0 / std::sqrt(std::numbers::pi * s);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double mid = 0.5 * (xs[i] + xs[j]) - g.x_c;
            const double d = xs[i] - xs[j];
            const double half = 0.5 * d;
            const double mag = pre * std::exp(-(mid * mid + P * half * half) / s);
            const double arg = -g.B * mid * d / s + g.p_c * d / g.hbar;
            const cplx v = std::polar(mag, arg);
            out[i * n + j] = v;
            out[j * n + i] = std::conj(v);
        }
    }
}

double squeeze_phase(const SqueezeDynamics& sq, double omega, double t)
{
    // phi = (1/2) atan[(A0 - dA) tan u] + k pi/2, u = omega t + phi_sq/2, with
    // k = floor(u/pi + 1/2) counting the tangent discontinuities passed. The
    // reduced angle r = u - k pi lies in [-pi/2, pi/2], where atan2 is continuous.
    const double u = omega * t + 0.5 * sq.phi_sq();
    const double k = std::floor(u / std::numbers::pi + 0.5);
    const double r = u - k * std::numbers::pi;
    const double c = sq.A0() - sq.dA();
    return 0.5 * std::atan2(c * std::sin(r), std::cos(r)) + 0.5 * k * std::numbers::pi;
}

double center_phase(const CenterTrajectory& c, const OscillatorConfig& osc, double t)
{
    // integral of m omega^2 (X^2 - 2 x_c^2) / (2 hbar) from 0 to t
    const double X = c.X_amp();
    if (X == 0.0) {
        return 0.0;
    }
    const double w = osc.omega();
    const double scale = osc.mass() * w * X * X / (4.0 * osc.hbar());
    return -scale * (std::sin(2.0 * (w * t + c.phi_c())) - std::sin(2.0 * c.phi_c()));
}

}  // namespace detail

namespace {

void require_pure(const GaussianStateSpec& spec, const char* op)
{
    if (!spec.is_pure()) {
        std::ostringstream os;
        os.precision(17);
        os << op << " requires a pure state (P = 1), got P = " << spec.purity_product();
        throw DomainError(os.str());
    }
}

detail::GaussianShape shape_at(const GaussianStateSpec& spec, double t)
{
    const auto [A, B] = quadrature_shape(spec.squeeze(), spec.osc().omega(), t);
    const auto [xc, pc] = center_state(spec.center(), spec.osc(), t);
    return {A, B, xc, pc, spec.osc().ground_variance(), spec.osc().hbar()};
}

}  // namespace

QuadratureShape quadrature_shape(const SqueezeDynamics& sq, double omega, double t)
{
    const double theta = 2.0 * omega * t + sq.phi_sq();
    return {sq.A0() + sq.dA() * std::cos(theta), sq.dA() * std::sin(theta)};
}

SqueezeDynamics squeeze_from_initial_variance(double D, const OscillatorConfig& osc)
{
    if (!(std::isfinite(D) && D > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "initial variance D must be positive (got " << D << ")";
        throw DomainError(os.str());
    }
    const double a = D / osc.ground_variance();
    const double inv = 1.0 / a;
    const double A0 = 0.5 * (a + inv);
    const double dA = 0.5 * std::abs(a - inv);
    return {A0, dA, a >= 1.0 ? 0.0 : std::numbers::pi};
}

PhasePoint center_state(const CenterTrajectory& center, const OscillatorConfig& osc, double t)
{
    const double theta = osc.omega() * t + center.phi_c();
    const double X = center.X_amp();
    return {X * std::cos(theta), -osc.mass() * osc.omega() * X * std::sin(theta)};
}

double accumulated_phase(const SqueezeDynamics& sq, const CenterTrajectory& center,
                         const OscillatorConfig& osc, double t)
{
    if (std::abs(sq.purity_product() - 1.0) > kPurityTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "accumulated_phase requires (A0+dA)(A0-dA) = 1, got " << sq.purity_product();
        throw DomainError(os.str());
    }
    return detail::squeeze_phase(sq, osc.omega(), t) + detail::center_phase(center, osc, t);
}

WavefunctionSample eval_pure_wavefunction(const GaussianStateSpec& spec, const GridSpec& grid,
                                          double t)
{
    require_pure(spec, "eval_pure_wavefunction");
    grid.require_coverage(spec);
    const double phi = accumulated_phase(spec.squeeze(), spec.center(), spec.osc(), t);
    WavefunctionSample wf{grid, std::vector<cplx>(grid.size()), t};
    const auto xs = grid.points();
    detail::gaussian_wavepacket(shape_at(spec, t), phi, xs, wf.values);
    return wf;
}

DensityMatrixSample eval_pure_density(const GaussianStateSpec& spec, const GridSpec& grid, double t)
{
    require_pure(spec, "eval_pure_density");
    grid.require_coverage(spec);
    DensityMatrixSample dm{grid, std::vector<cplx>(grid.size() * grid.size()), t};
    const auto xs = grid.points();
    detail::gaussian_density(shape_at(spec, t), 1.0, xs, dm.values);
    return dm;
}

Moments moments(const WavefunctionSample& wf, double hbar)
{
    const double norm = trapezoid_norm(wf);
    if (!(std::abs(norm - 1.0) <= 1e-6)) {
        throw DomainError("moments requires a normalized wavefunction (norm = " +
                          std::to_string(norm) + ")");
    }
    const std::size_t n = wf.grid.size();
    const double h = wf.grid.spacing();
    const auto xs = wf.grid.points();

    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = xs[i] * std::norm(wf.values[i]);
    }
    const double mean_x = trapezoid(f, h) / norm;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - mean_x;
        f[i] = d * d * std::norm(wf.values[i]);
    }
    const double var_x = trapezoid(f, h) / norm;

    detail::SpectralDerivative deriv(n, h);
    std::vector<cplx> dpsi(n);
    deriv.first(wf.values, dpsi);

    std::vector<cplx> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = std::conj(wf.values[i]) * dpsi[i];
    }
    // <p> = -i hbar <psi|psi'>
    const double mean_p = hbar * trapezoid(g, h).imag() / norm;
    // Shift to the momentum frame of <p> before forming second moments.
    const cplx shift(0.0, mean_p / hbar);
    std::vector<cplx> cov_integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx dq = dpsi[i] - shift * wf.values[i];
        f[i] = std::norm(dq);
        cov_integrand[i] = std::conj(wf.values[i]) * (xs[i] - mean_x) * cplx(0.0, -hbar) * dq;
    }
    const double var_p = hbar * hbar * trapezoid(f, h) / norm;
    const double cov_xp = trapezoid(cov_integrand, h).real() / norm;
    return {mean_x, mean_p, var_x, var_p, cov_xp, std::sqrt(var_x * var_p)};
}

Moments moments(const DensityMatrixSample& dm, double hbar)
{
    const cplx tr = trace(dm);
    if (!(std::abs(tr - 1.0) <= 1e-6)) {
        throw DomainError("moments requires a unit-trace density matrix (trace = " +
                          std::to_string(tr.real()) + ")");
    }
    const double norm = tr.real();
    const std::size_t n = dm.size();
    const double h = dm.grid.spacing();
    const auto xs = dm.grid.points();

    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = xs[i] * dm(i, i).real();
    }
    const double mean_x = trapezoid(f, h) / norm;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - mean_x;
        f[i] = d * d * dm(i, i).real();
    }
    const double var_x = trapezoid(f, h) / norm;

    detail::SpectralDerivative deriv(n, h);
    std::vector<cplx> col(n), dcol(n);

    // Diagonal of d/dx applied to the first index of m.
    auto diag_of_dx = [&](const std::vector<cplx>& m) {
        std::vector<cplx> diag(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                col[i] = m[i * n + j];
            }
            deriv.first(col, dcol);
            diag[j] = dcol[j];
        }
        return diag;
    };

    // <p> = -i hbar Tr(d_x rho)
    const auto d0 = diag_of_dx(dm.values);
    const double mean_p = (cplx(0.0, -hbar) * trapezoid(d0, h)).real() / norm;

    // rho~(x,x') = rho(x,x') exp(-i <p> (x - x') / hbar) has zero mean momentum.
    std::vector<cplx> shifted(dm.values.size());
    const double kbar = mean_p / hbar;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            shifted[i * n + j] = dm(i, j) * std::polar(1.0, -kbar * (xs[i] - xs[j]));
        }
    }
    // G = d_x rho~, full matrix.
    std::vector<cplx> G(shifted.size());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = shifted[i * n + j];
        }
        deriv.first(col, dcol);
        for (std::size_t i = 0; i < n; ++i) {
            G[i * n + j] = dcol[i];
        }
    }
    std::vector<cplx> cov_integrand(n), p2_integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        cov_integrand[i] = (xs[i] - mean_x) * cplx(0.0, -hbar) * G[i * n + i];
        // d_x' of row i of G, at x' = x_i
        std::copy(G.begin() + static_cast<std::ptrdiff_t>(i * n),
                  G.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), col.begin());
        deriv.first(col, dcol);
        p2_integrand[i] = hbar * hbar * dcol[i];
    }
    const double cov_xp = trapezoid(cov_integrand, h).real() / norm;
    const double var_p = trapezoid(p2_integrand, h).real() / norm;
    return {mean_x, mean_p, var_x, var_p, cov_xp, std::sqrt(var_x * var_p)};
}

OdeResiduals ode_residuals(const SqueezeDynamics& sq, const OscillatorConfig& osc, double t,
                           double dt_fd)
{
    const double w = osc.omega();
    const auto [A, B] = quadrature_shape(sq, w, t);
    const auto plus = quadrature_shape(sq, w, t + dt_fd);
    const auto minus = quadrature_shape(sq, w, t - dt_fd);
    const double A_dot = (plus.A - minus.A) / (2.0 * dt_fd);
    const double B_dot = (plus.B - minus.B) / (2.0 * dt_fd);
    const double phi_dot = (detail::squeeze_phase(sq, w, t + dt_fd) -
                            detail::squeeze_phase(sq, w, t - dt_fd)) /
                           (2.0 * dt_fd);
    return {
        std::abs(A_dot + 2.0 * w * B) / w,
        std::abs(B * A_dot - A * B_dot - w * (1.0 - B * B - A * A)) / w,
        std::abs(phi_dot - w / (2.0 * A)) / w,
    };
}

OdeResiduals ode_residuals(const SqueezeDynamics& sq, const OscillatorConfig& osc, double t)
{
    return ode_residuals(sq, osc, t, 1e-6 / osc.omega());
}

double schrodinger_residual(const GaussianStateSpec& spec, const GridSpec& grid, double t,
                            double dt_fd)
{
    require_pure(spec, "schrodinger_residual");
    const auto now = eval_pure_wavefunction(spec, grid, t);
    const auto fwd = eval_pure_wavefunction(spec, grid, t + dt_fd);
    const auto back = eval_pure_wavefunction(spec, grid, t - dt_fd);

    const std::size_t n = grid.size();
    const auto& osc = spec.osc();
    const double hbar = osc.hbar();
    const double kin = -hbar * hbar / (2.0 * osc.mass());
    const double spring = 0.5 * osc.mass() * osc.omega() * osc.omega();

    detail::SpectralDerivative deriv(n, grid.spacing());
    std::vector<cplx> d2(n);
    deriv.second(now.values, d2);

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const cplx H_psi = kin * d2[i] + spring * x * x * now.values[i];
        const cplx lhs = cplx(0.0, hbar) * (fwd.values[i] - back.values[i]) / (2.0 * dt_fd);
        num += std::norm(lhs - H_psi);
        den += std::norm(H_psi);
    }
    return std::sqrt(num / den);
}

double schrodinger_residual(const GaussianStateSpec& spec, const GridSpec& grid, double t)
{
    return schrodinger_residual(spec, grid, t, 1e-6 / spec.osc().omega());
}

}  // namespace sqz
