#ifndef SQZ_SCENARIO_HPP
#define SQZ_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqz/ensemble.hpp"
#include "sqz/errors.hpp"
#include "sqz/grid.hpp"
#include "sqz/numeric.hpp"
#include "sqz/types.hpp"

namespace sqz {

enum class Product { timeseries, wavefunction, density, verify };

enum class EnsembleMethod { gauss_hermite, monte_carlo };

struct EnsembleSettings {
    EnsembleMethod method = EnsembleMethod::gauss_hermite;
    std::size_t n_nodes = 32;
    std::size_t samples = 100000;
    Sampler sampler = Sampler::scrambled_sobol;
};

struct Scenario {
    std::string name;
    GaussianStateSpec base;  ///< pure state; center is the mean center when sigma_a > 0
    double sigma_a = 0.0;
    GridSpec grid;
    Scheme scheme = Scheme::spectral_split_step;
    double dt = 0.0;
    std::vector<double> sample_times;
    std::vector<Product> outputs;
    std::optional<double> density_time;
    EnsembleSettings ensemble;

    bool mixed() const noexcept { return sigma_a > 0.0; }
    bool wants(Product p) const noexcept;
    /// The state actually evaluated: base, or its reparameterized mixture.
    GaussianStateSpec state() const;
};

/// Parses a scenario document. Malformed JSON, unknown keys and wrong value
/// types raise ParseError; physically invalid values raise InvariantError.
std::vector<Scenario> parse_scenarios(std::string_view text);
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = MonteCarloOptions{}.seed;
};

struct CheckResult {
    std::string name;
    double value;
    double threshold;
    std::string relation;  ///< "<=" or ">="
    bool pass;
};

struct ScenarioReport {
    std::string name;
    std::vector<CheckResult> checks;
    std::vector<std::filesystem::path> files;
    std::string error;  ///< set when the pipeline aborted
    std::optional<ErrorKind> error_kind;

    bool passed() const noexcept;
};

struct TimeseriesRow {
    double t;
    double A;
    double B;
    std::optional<double> phi;
    double x_c;
    double p_c;
    double var_x;
    double var_p;
    double cov_xp;
    double uncertainty_product;
    double purity;
    std::optional<double> fidelity_numeric;
};

/// One row per sample time; pure states are propagated numerically from t = 0.
std::vector<TimeseriesRow> compute_timeseries(const Scenario& sc);
void write_timeseries(const std::filesystem::path& path, const std::vector<TimeseriesRow>& rows);

/// Pass/fail checks of the closed forms against grid quadrature and numerics.
std::vector<CheckResult> verify_scenario(const Scenario& sc, const RunOptions& opts);

/// Writes the products requested in `sc.outputs` (all of them plus verify
/// when `force_verify`). Errors are captured into the report.
ScenarioReport run_scenario(const Scenario& sc, const RunOptions& opts, bool force_verify);
/// Runs scenarios concurrently; reports come back in input order.
std::vector<ScenarioReport> run_scenarios(const std::vector<Scenario>& scenarios,
                                          const RunOptions& opts, bool force_verify);

/// Closed-form density matrix of the scenario state at time t.
DensityMatrixSample scenario_density(const Scenario& sc, double t);

/// Density dump: header "n_points x_min x_max t", then n_points^2 lines "re,im"
/// in row-major order, all numbers with 17 significant digits.
void write_density_dump(const std::filesystem::path& path, const DensityMatrixSample& dm);
DensityMatrixSample read_density_dump(const std::filesystem::path& path);

std::string format_report(const std::vector<ScenarioReport>& reports);

/// printf("%.17g")
std::string format_number(double v);

}  // namespace sqz

#endif
