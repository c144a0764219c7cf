#include "sqz/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sqz/errors.hpp"

namespace sqz {

GridSpec::GridSpec(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points)
{
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        throw InvariantError("grid invariant x_min < x_max violated");
    }
    if (n_points < kMinPoints) {
        throw InvariantError("grid invariant n_points >= 16 violated (got " +
                             std::to_string(n_points) + ")");
    }
    if (!(spacing() > 0.0)) {
        throw InvariantError("grid invariant spacing > 0 violated");
    }
}

GridSpec::GridSpec(double x_min, double x_max, std::size_t n_points, const GaussianStateSpec& spec)
    : GridSpec(x_min, x_max, n_points)
{
    require_coverage(spec);
}

GridSpec GridSpec::default_for(const GaussianStateSpec& spec, std::size_t n_points)
{
    const double L = spec.center().X_amp() + kDefaultSigmas * spec.max_sigma_x();
    return {-L, L, n_points};
}

double GridSpec::x(std::size_t i) const noexcept
{
    // Pin the last point to x_max exactly.
    if (i + 1 == n_) {
        return x_max_;
    }
    return x_min_ + static_cast<double>(i) * spacing();
}

std::vector<double> GridSpec::points() const
{
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        xs[i] = x(i);
    }
    return xs;
}

bool GridSpec::covers(const GaussianStateSpec& spec) const noexcept
{
    const double need = spec.center().X_amp() + kCoverageSigmas * spec.max_sigma_x();
    const double slack = 1e-12 * std::max(1.0, need);
    return x_min_ <= -need + slack && x_max_ >= need - slack;
}

void GridSpec::require_coverage(const GaussianStateSpec& spec) const
{
    if (!covers(spec)) {
        const double need = spec.center().X_amp() + kCoverageSigmas * spec.max_sigma_x();
        std::ostringstream os;
        os.precision(17);
        os << "grid coverage invariant violated: need [x_min, x_max] to contain [" << -need << ", "
           << need << "] (X_amp + 8 max sigma_x), got [" << x_min_ << ", " << x_max_ << "]";
        throw CoverageError(os.str());
    }
}

double trapezoid(std::span<const double> f, double h)
{
    if (f.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double v : f) {
        s += v;
    }
    s -= 0.5 * (f.front() + f.back());
    return s * h;
}

cplx trapezoid(std::span<const cplx> f, double h)
{
    if (f.empty()) {
        return 0.0;
    }
    cplx s = 0.0;
    for (const cplx& v : f) {
        s += v;
    }
    s -= 0.5 * (f.front() + f.back());
    return s * h;
}

double trapezoid_norm(const WavefunctionSample& wf)
{
    std::vector<double> d(wf.values.size());
    std::transform(wf.values.begin(), wf.values.end(), d.begin(),
                   [](const cplx& v) { return std::norm(v); });
    return trapezoid(d, wf.grid.spacing());
}

cplx trace(const DensityMatrixSample& dm)
{
    const std::size_t n = dm.size();
    std::vector<cplx> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = dm(i, i);
    }
    return trapezoid(diag, dm.grid.spacing());
}

double hermiticity_defect(const DensityMatrixSample& dm)
{
    const std::size_t n = dm.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            worst = std::max(worst, std::abs(dm(i, j) - std::conj(dm(j, i))));
        }
    }
    return worst;
}

}  // namespace sqz
