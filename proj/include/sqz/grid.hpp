#ifndef SQZ_GRID_HPP
#define SQZ_GRID_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "sqz/types.hpp"

namespace sqz {

using cplx = std::complex<double>;

/// Uniform grid x_i = x_min + i h, i = 0 .. n_points-1, both endpoints included.
class GridSpec {
public:
    static constexpr std::size_t kMinPoints = 16;
    /// Minimum distance from the center extremum to each edge, in units of the
    /// largest position standard deviation of the state.
    static constexpr double kCoverageSigmas = 8.0;
    /// Half-width of the default grid beyond the center extremum, same units.
    static constexpr double kDefaultSigmas = 10.0;
    static constexpr std::size_t kDefaultPoints = 1024;

    GridSpec(double x_min, double x_max, std::size_t n_points);
    /// Same, and additionally throws CoverageError if the grid does not cover `spec`.
    GridSpec(double x_min, double x_max, std::size_t n_points, const GaussianStateSpec& spec);

    /// Symmetric grid [-L, L] with L = X_amp + 10 max sigma_x.
    static GridSpec default_for(const GaussianStateSpec& spec,
                                std::size_t n_points = kDefaultPoints);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return (x_max_ - x_min_) / static_cast<double>(n_ - 1); }
    double x(std::size_t i) const noexcept;
    std::vector<double> points() const;

    bool covers(const GaussianStateSpec& spec) const noexcept;
    void require_coverage(const GaussianStateSpec& spec) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
};

struct WavefunctionSample {
    GridSpec grid;
    std::vector<cplx> values;
    double t = 0.0;
};

/// Row-major n x n samples rho(x_i, x_j).
struct DensityMatrixSample {
    GridSpec grid;
    std::vector<cplx> values;
    double t = 0.0;

    std::size_t size() const noexcept { return grid.size(); }
    cplx& operator()(std::size_t i, std::size_t j) { return values[i * grid.size() + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return values[i * grid.size() + j]; }
};

/// Trapezoid rule for samples on a uniform grid of spacing h.
double trapezoid(std::span<const double> f, double h);
cplx trapezoid(std::span<const cplx> f, double h);

/// Integral of |psi|^2.
double trapezoid_norm(const WavefunctionSample& wf);
/// Integral of rho(x, x).
cplx trace(const DensityMatrixSample& dm);
/// max |rho(x_i,x_j) - conj(rho(x_j,x_i))|
double hermiticity_defect(const DensityMatrixSample& dm);

}  // namespace sqz

#endif
