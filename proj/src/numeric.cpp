#include "sqz/numeric.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spectral.hpp"
#include "sqz/errors.hpp"

namespace sqz {

std::string_view to_string(Scheme s) noexcept
{
    switch (s) {
    case Scheme::implicit_unitary:
        return "implicit-unitary";
    case Scheme::spectral_split_step:
        return "spectral-split-step";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view name)
{
    if (name == "implicit-unitary") {
        return Scheme::implicit_unitary;
    }
    if (name == "spectral-split-step") {
        return Scheme::spectral_split_step;
    }
    throw ParseError("unknown propagator scheme '" + std::string(name) +
                     "' (expected implicit-unitary or spectral-split-step)");
}

void PropagatorConfig::validate() const
{
    if (!(std::isfinite(dt) && dt > 0.0)) {
        throw InvariantError("propagator invariant dt > 0 violated");
    }
    if (n_steps < 1) {
        throw InvariantError("propagator invariant n_steps >= 1 violated");
    }
}

namespace {

using Vec = std::vector<cplx>;

cplx dot(const Vec& a, const Vec& b)
{
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

double norm2(const Vec& a)
{
    double s = 0.0;
    for (const cplx& v : a) {
        s += std::norm(v);
    }
    return std::sqrt(s);
}

[[noreturn]] void edge_violation(double t, double amplitude)
{
    std::ostringstream os;
    os.precision(6);
    os << "boundary contamination: |psi| at grid edge reached " << amplitude << " at t = " << t
       << " (guard " << kEdgeGuard << ")";
    throw BoundaryError(os.str());
}

}  // namespace

struct Propagator::Impl {
    virtual ~Impl() = default;
    virtual void step(Vec& psi) = 0;
    virtual double edge_amplitude(const Vec& psi) const = 0;
    virtual std::size_t iterations() const { return 0; }

    Scheme scheme{};
    double dt = 0.0;
};

namespace {

// Strang splitting exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2) on the periodic grid.
class SplitStep final : public Propagator::Impl {
public:
    SplitStep(const GridSpec& grid, const OscillatorConfig& osc, double step)
        : fft_(grid.size()), half_v_(grid.size()), kinetic_(grid.size()), buf_(grid.size())
    {
        scheme = Scheme::spectral_split_step;
        dt = step;
        const std::size_t n = grid.size();
        const double hbar = osc.hbar();
        const double spring = 0.5 * osc.mass() * osc.omega() * osc.omega();
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(i);
            half_v_[i] = std::polar(1.0, -spring * x * x * dt / (2.0 * hbar));
        }
        const auto k = detail::fft_wavenumbers(n, grid.spacing());
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t m = 0; m < n; ++m) {
            kinetic_[m] = std::polar(scale, -hbar * k[m] * k[m] * dt / (2.0 * osc.mass()));
        }
    }

    void step(Vec& psi) override
    {
        const std::size_t n = psi.size();
        for (std::size_t i = 0; i < n; ++i) {
            psi[i] *= half_v_[i];
        }
        fft_.forward(psi, buf_);
        for (std::size_t m = 0; m < n; ++m) {
            buf_[m] *= kinetic_[m];
        }
        fft_.backward(buf_, psi);
        for (std::size_t i = 0; i < n; ++i) {
            psi[i] *= half_v_[i];
        }
    }

    double edge_amplitude(const Vec& psi) const override
    {
        return std::max(std::abs(psi.front()), std::abs(psi.back()));
    }

private:
    detail::Fft fft_;
    Vec half_v_;
    Vec kinetic_;
    Vec buf_;
};

// Cayley step (1 + i tau H) psi' = (1 - i tau H) psi, tau = dt / 2hbar, with H
// = T + V discretized in the sine basis of the interior points (psi = 0 at both
// edges). The linear system is solved by GMRES right-preconditioned with the
// exactly invertible kinetic part (1 + i tau T)^-1.
class CayleyStep final : public Propagator::Impl {
public:
    static constexpr std::size_t kRestart = 40;
    static constexpr std::size_t kMaxRestarts = 50;
    static constexpr double kTolerance = 1e-13;

    CayleyStep(const GridSpec& grid, const OscillatorConfig& osc, double step)
        : m_(grid.size() - 2), dst_(m_), kin_(m_), precond_(m_), pot_(m_), tmp_(m_), tmp2_(m_)
    {
        scheme = Scheme::implicit_unitary;
        dt = step;
        tau_ = dt / (2.0 * osc.hbar());
        const double h = grid.spacing();
        const double cells = static_cast<double>(m_ + 1);
        const double inv_scale = 1.0 / (2.0 * cells);
        const double c = osc.hbar() * osc.hbar() / (2.0 * osc.mass());
        for (std::size_t k = 0; k < m_; ++k) {
            const double kk = std::numbers::pi * static_cast<double>(k + 1) / (cells * h);
            const double T = c * kk * kk;
            kin_[k] = T * inv_scale;
            precond_[k] = inv_scale / cplx(1.0, tau_ * T);
        }
        const double spring = 0.5 * osc.mass() * osc.omega() * osc.omega();
        for (std::size_t i = 0; i < m_; ++i) {
            const double x = grid.x(i + 1);
            pot_[i] = spring * x * x;
        }
        basis_.assign(kRestart + 1, Vec(m_));
        precond_basis_.assign(kRestart, Vec(m_));
    }

    void step(Vec& psi) override
    {
        // interior view
        Vec x(psi.begin() + 1, psi.end() - 1);
        Vec b(m_);
        apply_h(x, b);
        for (std::size_t i = 0; i < m_; ++i) {
            b[i] = x[i] - cplx(0.0, tau_) * b[i];
        }
        solve(b, x);
        psi.front() = 0.0;
        psi.back() = 0.0;
        std::copy(x.begin(), x.end(), psi.begin() + 1);
    }

    double edge_amplitude(const Vec& psi) const override
    {
        return std::max(std::abs(psi[1]), std::abs(psi[psi.size() - 2]));
    }

    std::size_t iterations() const override { return iterations_; }

private:
    void apply_h(const Vec& v, Vec& out)
    {
        dst_.apply(v, tmp_);
        for (std::size_t k = 0; k < m_; ++k) {
            tmp_[k] *= kin_[k];
        }
        dst_.apply(tmp_, out);
        for (std::size_t i = 0; i < m_; ++i) {
            out[i] += pot_[i] * v[i];
        }
    }

    // out = (1 + i tau H) v
    void apply_a(const Vec& v, Vec& out)
    {
        apply_h(v, out);
        for (std::size_t i = 0; i < m_; ++i) {
            out[i] = v[i] + cplx(0.0, tau_) * out[i];
        }
    }

    void apply_precond(const Vec& v, Vec& out)
    {
        dst_.apply(v, tmp2_);
        for (std::size_t k = 0; k < m_; ++k) {
            tmp2_[k] *= precond_[k];
        }
        dst_.apply(tmp2_, out);
    }

    void solve(const Vec& b, Vec& x)
    {
        const double target = kTolerance * norm2(b);
        Vec r(m_), w(m_);
        iterations_ = 0;
        for (std::size_t restart = 0; restart < kMaxRestarts; ++restart) {
            apply_a(x, r);
            for (std::size_t i = 0; i < m_; ++i) {
                r[i] = b[i] - r[i];
            }
            const double beta = norm2(r);
            if (beta <= target) {
                return;
            }
            // Arnoldi with modified Gram-Schmidt and Givens rotations.
            std::vector<std::vector<cplx>> hess(kRestart + 1, std::vector<cplx>(kRestart, 0.0));
            std::vector<cplx> cs(kRestart), sn(kRestart), g(kRestart + 1, 0.0);
            g[0] = beta;
            for (std::size_t i = 0; i < m_; ++i) {
                basis_[0][i] = r[i] / beta;
            }
            std::size_t used = 0;
            for (std::size_t j = 0; j < kRestart; ++j) {
                ++iterations_;
                apply_precond(basis_[j], precond_basis_[j]);
                apply_a(precond_basis_[j], w);
                for (std::size_t i = 0; i <= j; ++i) {
                    hess[i][j] = dot(basis_[i], w);
                    for (std::size_t q = 0; q < m_; ++q) {
                        w[q] -= hess[i][j] * basis_[i][q];
                    }
                }
                const double hn = norm2(w);
                hess[j + 1][j] = hn;
                if (hn > 0.0) {
                    for (std::size_t q = 0; q < m_; ++q) {
                        basis_[j + 1][q] = w[q] / hn;
                    }
                }
                for (std::size_t i = 0; i < j; ++i) {
                    const cplx t0 = hess[i][j];
                    const cplx t1 = hess[i + 1][j];
                    hess[i][j] = std::conj(cs[i]) * t0 + std::conj(sn[i]) * t1;
                    hess[i + 1][j] = -sn[i] * t0 + cs[i] * t1;
                }
                const cplx a = hess[j][j];
                const cplx bb = hess[j + 1][j];
                const double rho = std::sqrt(std::norm(a) + std::norm(bb));
                cs[j] = a / rho;
                sn[j] = bb / rho;
                hess[j][j] = rho;
                hess[j + 1][j] = 0.0;
                g[j + 1] = -sn[j] * g[j];
                g[j] = std::conj(cs[j]) * g[j];
                used = j + 1;
                if (std::abs(g[j + 1]) <= target || hn == 0.0) {
                    break;
                }
            }
            std::vector<cplx> y(used);
            for (std::size_t ii = used; ii-- > 0;) {
                cplx s = g[ii];
                for (std::size_t k = ii + 1; k < used; ++k) {
                    s -= hess[ii][k] * y[k];
                }
                y[ii] = s / hess[ii][ii];
            }
            for (std::size_t k = 0; k < used; ++k) {
                for (std::size_t q = 0; q < m_; ++q) {
                    x[q] += y[k] * precond_basis_[k][q];
                }
            }
        }
        apply_a(x, r);
        for (std::size_t i = 0; i < m_; ++i) {
            r[i] = b[i] - r[i];
        }
        if (norm2(r) > target) {
            throw ConvergenceError("implicit-unitary linear solve did not converge");
        }
    }

    std::size_t m_;
    double tau_ = 0.0;
    detail::SineTransform dst_;
    std::vector<double> kin_;
    Vec precond_;
    std::vector<double> pot_;
    Vec tmp_;
    Vec tmp2_;
    std::vector<Vec> basis_;
    std::vector<Vec> precond_basis_;
    std::size_t iterations_ = 0;
};

}  // namespace

Propagator::Propagator(const GridSpec& grid, const OscillatorConfig& osc, Scheme scheme, double dt)
{
    if (!(std::isfinite(dt) && dt > 0.0)) {
        throw InvariantError("propagator invariant dt > 0 violated");
    }
    switch (scheme) {
    case Scheme::implicit_unitary:
        impl_ = std::make_unique<CayleyStep>(grid, osc, dt);
        break;
    case Scheme::spectral_split_step:
        impl_ = std::make_unique<SplitStep>(grid, osc, dt);
        break;
    }
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

Scheme Propagator::scheme() const noexcept { return impl_->scheme; }
double Propagator::dt() const noexcept { return impl_->dt; }
std::size_t Propagator::last_iterations() const noexcept { return impl_->iterations(); }

void Propagator::advance(WavefunctionSample& wf, std::size_t n_steps)
{
    const double t0 = wf.t;
    for (std::size_t s = 1; s <= n_steps; ++s) {
        impl_->step(wf.values);
        const double t = t0 + static_cast<double>(s) * impl_->dt;
        const double edge = impl_->edge_amplitude(wf.values);
        if (!(edge <= kEdgeGuard)) {
            edge_violation(t, edge);
        }
    }
    wf.t = t0 + static_cast<double>(n_steps) * impl_->dt;
}

WavefunctionSample propagate(const WavefunctionSample& psi0, const OscillatorConfig& osc,
                             const PropagatorConfig& cfg)
{
    cfg.validate();
    const double norm = trapezoid_norm(psi0);
    if (!(std::abs(norm - 1.0) <= 1e-8)) {
        throw DomainError("propagate requires a normalized initial state (norm = " +
                          std::to_string(norm) + ")");
    }
    Propagator prop(psi0.grid, osc, cfg.scheme, cfg.dt);
    WavefunctionSample wf = psi0;
    prop.advance(wf, cfg.n_steps);
    return wf;
}

double fidelity(const WavefunctionSample& a, const WavefunctionSample& b)
{
    if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
        throw DomainError("fidelity requires both states on the same grid");
    }
    std::vector<cplx> f(a.values.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = std::conj(a.values[i]) * b.values[i];
    }
    return std::norm(trapezoid(f, a.grid.spacing()));
}

double purity(const DensityMatrixSample& dm)
{
    const std::size_t n = dm.size();
    const double h = dm.grid.spacing();
    auto weight = [&](std::size_t i) { return (i == 0 || i + 1 == n) ? 0.5 * h : h; };
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += weight(j) * (dm(i, j) * dm(j, i)).real();
        }
        s += weight(i) * row;
    }
    return s;
}

double energy(const WavefunctionSample& wf, const OscillatorConfig& osc)
{
    const std::size_t n = wf.grid.size();
    const double h = wf.grid.spacing();
    detail::SpectralDerivative deriv(n, h);
    std::vector<cplx> d(n);
    deriv.first(wf.values, d);
    const double spring = 0.5 * osc.mass() * osc.omega() * osc.omega();
    const double kin = osc.hbar() * osc.hbar() / (2.0 * osc.mass());
    std::vector<double> e(n), rho(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = wf.grid.x(i);
        rho[i] = std::norm(wf.values[i]);
        e[i] = kin * std::norm(d[i]) + spring * x * x * rho[i];
    }
    return trapezoid(e, h) / trapezoid(rho, h);
}

}  // namespace sqz
