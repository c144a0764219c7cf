#include "sqz/ensemble.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "kernels.hpp"
#include "sqz/analytic.hpp"
#include "sqz/errors.hpp"

namespace sqz {

MixedGaussianSpec::MixedGaussianSpec(GaussianStateSpec base, double sigma_a)
    : base_(std::move(base)), sigma_a_(sigma_a)
{
    if (!base_.is_pure()) {
        throw InvariantError("mixed spec requires a pure base state (P = 1)");
    }
    if (!(std::isfinite(sigma_a) && sigma_a >= 0.0)) {
        throw InvariantError("mixed spec invariant sigma_a >= 0 violated");
    }
}

PhasePoint MixedGaussianSpec::mean_center() const noexcept
{
    return center_state(base_.center(), base_.osc(), 0.0);
}

GaussianStateSpec reparameterize(const MixedGaussianSpec& spec)
{
    const auto& base = spec.base();
    if (spec.sigma_a() == 0.0) {
        return base;
    }
    const double r = spec.sigma_a() * spec.sigma_a() / base.osc().ground_variance();
    const SqueezeDynamics shifted(base.squeeze().A0() + r, base.squeeze().dA(),
                                  base.squeeze().phi_sq());
    return {base.osc(), shifted, base.center(), shifted.purity_product()};
}

DensityMatrixSample eval_mixed_density(const GaussianStateSpec& spec, const GridSpec& grid, double t)
{
    if (spec.purity_product() < 1.0 - kPurityTolerance) {
        throw DomainError("eval_mixed_density requires P >= 1");
    }
    grid.require_coverage(spec);
    const auto [A, B] = quadrature_shape(spec.squeeze(), spec.osc().omega(), t);
    const auto [xc, pc] = center_state(spec.center(), spec.osc(), t);
    const detail::GaussianShape g{A, B, xc, pc, spec.osc().ground_variance(), spec.osc().hbar()};
    DensityMatrixSample dm{grid, std::vector<cplx>(grid.size() * grid.size()), t};
    const auto xs = grid.points();
    detail::gaussian_density(g, spec.purity_product(), xs, dm.values);
    return dm;
}

QuadratureRule gauss_hermite(std::size_t n)
{
    if (n == 0) {
        throw DomainError("Gauss-Hermite rule needs at least one node");
    }
    // Newton iteration on orthonormal physicists' Hermite polynomials,
    // then rescaled to the standard normal weight.
    std::vector<double> x(n), w(n);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const double dn = static_cast<double>(n);
    const std::size_t half = (n + 1) / 2;
    double z = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(dn, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double dj = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / (dj + 1.0)) * p2 - std::sqrt(dj / (dj + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * dn) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw ConvergenceError("Gauss-Hermite node iteration did not converge");
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // ascending order
        rule.nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];
        rule.weights[i] = w[n - 1 - i] / std::sqrt(std::numbers::pi);
    }
    return rule;
}

std::string_view to_string(Sampler s) noexcept
{
    switch (s) {
    case Sampler::scrambled_sobol:
        return "scrambled-sobol";
    case Sampler::pseudorandom:
        return "pseudorandom";
    }
    return "?";
}

Sampler sampler_from_string(std::string_view name)
{
    if (name == "scrambled-sobol") {
        return Sampler::scrambled_sobol;
    }
    if (name == "pseudorandom") {
        return Sampler::pseudorandom;
    }
    throw ParseError("unknown sampler '" + std::string(name) +
                     "' (expected scrambled-sobol or pseudorandom)");
}

namespace {

/// Sum of w_k psi_k psi_k^dagger, upper triangle only, split re/im storage.
/// Members are processed in blocks so one accumulator row stays cached while
/// the block streams through it.
class DensityAccumulator {
public:
    static constexpr std::size_t kBlock = 32;

    explicit DensityAccumulator(const GridSpec& grid)
        : grid_(grid), n_(grid.size()), xs_(grid.points()), re_(n_ * n_, 0.0), im_(n_ * n_, 0.0),
          psi_(n_), bre_(kBlock * n_), bim_(kBlock * n_), weights_(kBlock)
    {
    }

    void add(const detail::GaussianShape& g, double weight)
    {
        detail::gaussian_wavepacket(g, 0.0, xs_, psi_);
        for (std::size_t i = 0; i < n_; ++i) {
            bre_[filled_ * n_ + i] = psi_[i].real();
            bim_[filled_ * n_ + i] = psi_[i].imag();
        }
        weights_[filled_] = weight;
        if (++filled_ == kBlock) {
            flush();
        }
    }

    DensityMatrixSample finish(double t)
    {
        flush();
        DensityMatrixSample dm{grid_, std::vector<cplx>(n_ * n_), t};
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                const cplx v(re_[i * n_ + j], im_[i * n_ + j]);
                dm.values[i * n_ + j] = v;
                dm.values[j * n_ + i] = std::conj(v);
            }
            // Diagonal of a sum of |psi|^2 is real.
            dm.values[i * n_ + i] = re_[i * n_ + i];
        }
        return dm;
    }

private:
    void flush()
    {
        for (std::size_t i = 0; i < n_; ++i) {
            double* row_re = re_.data() + i * n_;
            double* row_im = im_.data() + i * n_;
            for (std::size_t m = 0; m < filled_; ++m) {
                const double* b_re = bre_.data() + m * n_;
                const double* b_im = bim_.data() + m * n_;
                const double a_re = weights_[m] * b_re[i];
                const double a_im = weights_[m] * b_im[i];
                // rho_ij += a conj(b_j)
                for (std::size_t j = i; j < n_; ++j) {
                    row_re[j] += a_re * b_re[j] + a_im * b_im[j];
                    row_im[j] += a_im * b_re[j] - a_re * b_im[j];
                }
            }
        }
        filled_ = 0;
    }

    GridSpec grid_;
    std::size_t n_;
    std::vector<double> xs_;
    std::vector<double> re_;
    std::vector<double> im_;
    std::vector<cplx> psi_;
    std::vector<double> bre_;
    std::vector<double> bim_;
    std::vector<double> weights_;
    std::size_t filled_ = 0;
};

/// Shape of the member whose center sat at (x0, p0) at t = 0.
detail::GaussianShape member_at(const GaussianStateSpec& base, QuadratureShape shape, double x0,
                                double p0, double t)
{
    const auto& osc = base.osc();
    const double mw = osc.mass() * osc.omega();
    const double c = std::cos(osc.omega() * t);
    const double s = std::sin(osc.omega() * t);
    return {shape.A, shape.B, x0 * c + p0 / mw * s, p0 * c - mw * x0 * s, osc.ground_variance(),
            osc.hbar()};
}

DensityMatrixSample gauss_hermite_average(const MixedGaussianSpec& spec, const GridSpec& grid,
                                          double t, std::size_t n_nodes)
{
    const auto& base = spec.base();
    const auto shape = quadrature_shape(base.squeeze(), base.osc().omega(), t);
    const auto mean = spec.mean_center();
    const double sx = spec.sigma_a();
    const double sp = base.osc().mass() * base.osc().omega() * spec.sigma_a();
    const auto rule = gauss_hermite(n_nodes);
    DensityAccumulator acc(grid);
    for (std::size_t a = 0; a < n_nodes; ++a) {
        for (std::size_t b = 0; b < n_nodes; ++b) {
            acc.add(member_at(base, shape, mean.x + sx * rule.nodes[a], mean.p + sp * rule.nodes[b], t),
                    rule.weights[a] * rule.weights[b]);
        }
    }
    return acc.finish(t);
}

/// Two-dimensional Sobol sequence with a seeded random linear scramble and
/// digital shift applied to both coordinates.
class ScrambledSobol2D {
public:
    static constexpr int kBits = 32;

    explicit ScrambledSobol2D(std::uint64_t seed)
    {
        std::array<std::array<std::uint32_t, kBits>, 2> dir{};
        // Dimension 1: van der Corput. Dimension 2: primitive polynomial x + 1.
        std::uint32_t m = 1;
        for (int k = 0; k < kBits; ++k) {
            dir[0][k] = std::uint32_t{1} << (kBits - 1 - k);
            if (k > 0) {
                m = (m << 1) ^ m;
            }
            dir[1][k] = m << (kBits - 1 - k);
        }
        std::mt19937_64 rng(seed);
        for (int d = 0; d < 2; ++d) {
            // Lower-triangular scramble matrix, unit diagonal, digits MSB first.
            std::array<std::uint32_t, kBits> rows{};
            for (int r = 0; r < kBits; ++r) {
                const std::uint32_t diag = std::uint32_t{1} << (kBits - 1 - r);
                const std::uint32_t above = r == 0 ? 0u : ~((diag << 1) - 1u);
                rows[r] = diag | (static_cast<std::uint32_t>(rng()) & above);
            }
            for (int k = 0; k < kBits; ++k) {
                std::uint32_t v = 0;
                for (int r = 0; r < kBits; ++r) {
                    if (std::popcount(rows[r] & dir[d][k]) & 1) {
                        v |= std::uint32_t{1} << (kBits - 1 - r);
                    }
                }
                dir_[d][k] = v;
            }
            shift_[d] = static_cast<std::uint32_t>(rng());
        }
    }

    /// Point i in (0,1)^2.
    std::array<double, 2> point(std::uint64_t i) const
    {
        std::array<double, 2> u{};
        for (int d = 0; d < 2; ++d) {
            std::uint32_t v = shift_[d];
            for (int k = 0; k < kBits && (i >> k) != 0; ++k) {
                if ((i >> k) & 1u) {
                    v ^= dir_[d][k];
                }
            }
            u[d] = (static_cast<double>(v) + 0.5) / 4294967296.0;
        }
        return u;
    }

private:
    std::array<std::array<std::uint32_t, kBits>, 2> dir_{};
    std::array<std::uint32_t, 2> shift_{};
};

}  // namespace

DensityMatrixSample ensemble_average_density(const MixedGaussianSpec& spec, const GridSpec& grid,
                                             double t, const EnsembleOptions& opts)
{
    if (opts.n_nodes < 16) {
        throw DomainError("ensemble_average_density requires n_nodes >= 16 per axis");
    }
    auto result = gauss_hermite_average(spec, grid, t, opts.n_nodes);
    if (opts.check_convergence && spec.sigma_a() > 0.0) {
        const auto refined = gauss_hermite_average(spec, grid, t, 2 * opts.n_nodes);
        const double diff = peak_relative_difference(result, refined);
        if (!(diff <= opts.convergence_tol)) {
            std::ostringstream os;
            os.precision(3);
            os << "Gauss-Hermite average not converged at " << opts.n_nodes
               << " nodes/axis: node doubling changes rho by " << diff
               << " (peak-relative, tolerance " << opts.convergence_tol << ")";
            throw ConvergenceError(os.str());
        }
    }
    return result;
}

DensityMatrixSample ensemble_average_density(const MixedGaussianSpec& spec, const GridSpec& grid,
                                             double t, std::size_t n_nodes)
{
    EnsembleOptions opts;
    opts.n_nodes = n_nodes;
    return ensemble_average_density(spec, grid, t, opts);
}

DensityMatrixSample monte_carlo_density(const MixedGaussianSpec& spec, const GridSpec& grid,
                                        double t, const MonteCarloOptions& opts)
{
    if (opts.samples == 0) {
        throw DomainError("monte_carlo_density requires at least one sample");
    }
    const auto& base = spec.base();
    const auto shape = quadrature_shape(base.squeeze(), base.osc().omega(), t);
    const auto mean = spec.mean_center();
    const double sx = spec.sigma_a();
    const double sp = base.osc().mass() * base.osc().omega() * spec.sigma_a();
    const double weight = 1.0 / static_cast<double>(opts.samples);
    DensityAccumulator acc(grid);

    if (opts.sampler == Sampler::pseudorandom) {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> normal;
        for (std::size_t s = 0; s < opts.samples; ++s) {
            const double zx = normal(rng);
            const double zp = normal(rng);
            acc.add(member_at(base, shape, mean.x + sx * zx, mean.p + sp * zp, t), weight);
        }
    } else {
        const ScrambledSobol2D sobol(opts.seed);
        for (std::size_t s = 0; s < opts.samples; ++s) {
            const auto u = sobol.point(s);
            // Box-Muller
            const double r = std::sqrt(-2.0 * std::log(u[0]));
            const double th = 2.0 * std::numbers::pi * u[1];
            acc.add(member_at(base, shape, mean.x + sx * r * std::cos(th),
                              mean.p + sp * r * std::sin(th), t),
                    weight);
        }
    }
    return acc.finish(t);
}

double peak_relative_difference(const DensityMatrixSample& a, const DensityMatrixSample& b)
{
    if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
        throw DomainError("density matrices live on different grids");
    }
    double diff = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        peak = std::max(peak, std::abs(b.values[i]));
    }
    return diff / peak;
}

cplx gaussian_identity_shifted(double x, cplx a, double sigma1_sq, double sigma2_sq)
{
    if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0)) {
        throw DomainError("gaussian_identity_shifted requires positive variances");
    }
    const double s = sigma1_sq + sigma2_sq;
    return std::exp(-(x * x + a * x) / (2.0 * s)) / std::sqrt(2.0 * std::numbers::pi * s) *
           std::exp(a * a * sigma2_sq / (8.0 * sigma1_sq * s));
}

cplx gaussian_identity_exponential(double x, cplx a, double sigma_sq)
{
    if (!(sigma_sq > 0.0)) {
        throw DomainError("gaussian_identity_exponential requires a positive variance");
    }
    return std::exp(a * x) * std::exp(a * a * sigma_sq / 2.0);
}

}  // namespace sqz
