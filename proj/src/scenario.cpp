#include "sqz/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <future>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include "sqz/analytic.hpp"
#include "sqz/errors.hpp"

namespace sqz {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNormTol = 1e-8;
constexpr double kFidelityTol = 1e-6;
constexpr double kOdeTol = 1e-6;
constexpr double kSchrodingerTol = 1e-5;
constexpr double kVarianceTol = 1e-8;
constexpr double kUncertaintyTol = 1e-8;
constexpr double kHermiticityTol = 1e-10;
constexpr double kPurityTol = 1e-5;
constexpr double kEnsembleTol = 1e-8;
constexpr double kMonteCarloTol = 1e-3;

constexpr std::size_t kDefaultStepsPerPeriod = 8192;
constexpr std::size_t kDefaultSamplesPerPeriod = 64;

// ---- parsing helpers -------------------------------------------------------

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where)
{
    if (!obj.is_object()) {
        throw ParseError(where + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ParseError(where + ": unknown key '" + key + "'");
        }
    }
}

double number_at(const json& obj, const char* key, const std::string& where)
{
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ParseError(where + "." + key + ": expected a number");
    }
    return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where)
{
    return obj.contains(key) ? number_at(obj, key, where) : fallback;
}

std::size_t count_or(const json& obj, const char* key, std::size_t fallback,
                     const std::string& where)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ParseError(where + "." + key + ": expected an integer");
    }
    if (v.is_number_unsigned()) {
        return v.get<std::size_t>();
    }
    throw InvariantError(where + "." + key + " must be non-negative");
}

std::string string_at(const json& obj, const char* key, const std::string& where)
{
    const auto& v = obj.at(key);
    if (!v.is_string()) {
        throw ParseError(where + "." + key + ": expected a string");
    }
    return v.get<std::string>();
}

bool valid_name(const std::string& name)
{
    return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

Product product_from_string(const std::string& s)
{
    if (s == "timeseries") {
        return Product::timeseries;
    }
    if (s == "wavefunction") {
        return Product::wavefunction;
    }
    if (s == "density") {
        return Product::density;
    }
    if (s == "verify") {
        return Product::verify;
    }
    throw InvariantError("outputs invariant violated: product '" + s +
                         "' is not one of timeseries, wavefunction, density, verify");
}

std::vector<double> parse_sample_times(const json& node, const OscillatorConfig& osc,
                                       const std::string& where)
{
    std::vector<double> times;
    if (node.is_array()) {
        for (const auto& v : node) {
            if (!v.is_number()) {
                throw ParseError(where + ".sample_times: expected numbers");
            }
            times.push_back(v.get<double>());
        }
    } else if (node.is_object()) {
        check_keys(node, {"periods", "per_period"}, where + ".sample_times");
        const double periods = number_or(node, "periods", 1.0, where + ".sample_times");
        const std::size_t per = count_or(node, "per_period", kDefaultSamplesPerPeriod,
                                         where + ".sample_times");
        if (!(periods > 0.0) || per == 0) {
            throw InvariantError(where + ".sample_times: periods and per_period must be positive");
        }
        const auto count = static_cast<std::size_t>(std::llround(periods * static_cast<double>(per)));
        for (std::size_t k = 0; k <= count; ++k) {
            times.push_back(osc.period() * static_cast<double>(k) / static_cast<double>(per));
        }
    } else {
        throw ParseError(where + ".sample_times: expected an array or an object");
    }
    if (times.empty()) {
        throw InvariantError("sample_times invariant violated: list is empty");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0) {
            throw InvariantError("sample_times invariant violated: times must be >= 0");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw InvariantError("sample_times invariant violated: times must be strictly increasing");
        }
    }
    return times;
}

Scenario parse_one(const json& node, std::size_t index)
{
    std::string where = "scenarios[" + std::to_string(index) + "]";
    check_keys(node,
               {"name", "oscillator", "squeeze", "initial_variance", "center", "sigma_a", "grid",
                "propagator", "sample_times", "outputs", "density_time", "ensemble"},
               where);
    if (!node.contains("name")) {
        throw ParseError(where + ": missing required key 'name'");
    }
    const std::string name = string_at(node, "name", where);
    where = "scenario '" + name + "'";
    if (!valid_name(name)) {
        throw InvariantError(where + ": name must match [A-Za-z0-9_.-]+");
    }

    OscillatorConfig osc = OscillatorConfig::natural();
    if (node.contains("oscillator")) {
        const auto& o = node.at("oscillator");
        check_keys(o, {"mass", "omega", "hbar"}, where + ".oscillator");
        osc = OscillatorConfig(number_or(o, "mass", 1.0, where + ".oscillator"),
                               number_or(o, "omega", 1.0, where + ".oscillator"),
                               number_or(o, "hbar", 1.0, where + ".oscillator"));
    }

    if (node.contains("squeeze") && node.contains("initial_variance")) {
        throw ParseError(where + ": give either 'squeeze' or 'initial_variance', not both");
    }
    SqueezeDynamics squeeze = SqueezeDynamics::ground();
    if (node.contains("squeeze")) {
        const auto& s = node.at("squeeze");
        check_keys(s, {"A0", "dA", "phi_sq"}, where + ".squeeze");
        squeeze = SqueezeDynamics(number_at(s, "A0", where + ".squeeze"),
                                  number_or(s, "dA", 0.0, where + ".squeeze"),
                                  number_or(s, "phi_sq", 0.0, where + ".squeeze"));
    } else if (node.contains("initial_variance")) {
        try {
            squeeze = squeeze_from_initial_variance(number_at(node, "initial_variance", where), osc);
        } catch (const DomainError& e) {
            throw InvariantError(where + ": " + e.what());
        }
    }

    CenterTrajectory center = CenterTrajectory::at_rest();
    if (node.contains("center")) {
        const auto& c = node.at("center");
        check_keys(c, {"X_amp", "phi_c"}, where + ".center");
        center = CenterTrajectory(number_or(c, "X_amp", 0.0, where + ".center"),
                                  number_or(c, "phi_c", 0.0, where + ".center"));
    }
    const GaussianStateSpec base = GaussianStateSpec::pure(osc, squeeze, center);

    const double sigma_a = number_or(node, "sigma_a", 0.0, where);
    if (!(std::isfinite(sigma_a) && sigma_a >= 0.0)) {
        throw InvariantError(where + ": sigma_a >= 0 invariant violated");
    }
    const GaussianStateSpec state = reparameterize(MixedGaussianSpec(base, sigma_a));

    std::optional<GridSpec> grid;
    if (node.contains("grid")) {
        const auto& g = node.at("grid");
        check_keys(g, {"x_min", "x_max", "n_points"}, where + ".grid");
        const std::size_t n = count_or(g, "n_points", GridSpec::kDefaultPoints, where + ".grid");
        if (g.contains("x_min") != g.contains("x_max")) {
            throw ParseError(where + ".grid: give both x_min and x_max or neither");
        }
        if (g.contains("x_min")) {
            grid = GridSpec(number_at(g, "x_min", where + ".grid"),
                            number_at(g, "x_max", where + ".grid"), n);
        } else {
            grid = GridSpec::default_for(state, n);
        }
    } else {
        grid = GridSpec::default_for(state);
    }
    try {
        grid->require_coverage(state);
    } catch (const CoverageError& e) {
        throw InvariantError(where + ": " + e.what());
    }

    Scheme scheme = Scheme::spectral_split_step;
    double dt = osc.period() / static_cast<double>(kDefaultStepsPerPeriod);
    if (node.contains("propagator")) {
        const auto& p = node.at("propagator");
        check_keys(p, {"scheme", "dt"}, where + ".propagator");
        if (p.contains("scheme")) {
            scheme = scheme_from_string(string_at(p, "scheme", where + ".propagator"));
        }
        dt = number_or(p, "dt", dt, where + ".propagator");
        if (!(std::isfinite(dt) && dt > 0.0)) {
            throw InvariantError(where + ": propagator invariant dt > 0 violated");
        }
    }

    const json default_times = {{"periods", 1}, {"per_period", kDefaultSamplesPerPeriod}};
    const auto times =
        parse_sample_times(node.contains("sample_times") ? node.at("sample_times") : default_times,
                           osc, where);

    std::vector<Product> outputs{Product::timeseries};
    if (node.contains("outputs")) {
        const auto& o = node.at("outputs");
        if (!o.is_array()) {
            throw ParseError(where + ".outputs: expected an array of strings");
        }
        outputs.clear();
        for (const auto& v : o) {
            if (!v.is_string()) {
                throw ParseError(where + ".outputs: expected an array of strings");
            }
            const Product p = product_from_string(v.get<std::string>());
            if (std::find(outputs.begin(), outputs.end(), p) == outputs.end()) {
                outputs.push_back(p);
            }
        }
    }
    if (sigma_a > 0.0 && std::find(outputs.begin(), outputs.end(), Product::wavefunction) != outputs.end()) {
        throw InvariantError(where + ": wavefunction output requires a pure state (sigma_a = 0)");
    }

    std::optional<double> density_time;
    if (node.contains("density_time")) {
        density_time = number_at(node, "density_time", where);
        if (!std::isfinite(*density_time)) {
            throw InvariantError(where + ": density_time must be finite");
        }
    }

    EnsembleSettings ens;
    if (node.contains("ensemble")) {
        const auto& e = node.at("ensemble");
        check_keys(e, {"method", "n_nodes", "samples", "sampler"}, where + ".ensemble");
        if (e.contains("method")) {
            const auto m = string_at(e, "method", where + ".ensemble");
            if (m == "gauss-hermite") {
                ens.method = EnsembleMethod::gauss_hermite;
            } else if (m == "monte-carlo") {
                ens.method = EnsembleMethod::monte_carlo;
            } else {
                throw ParseError(where + ".ensemble.method: expected gauss-hermite or monte-carlo");
            }
        }
        ens.n_nodes = count_or(e, "n_nodes", ens.n_nodes, where + ".ensemble");
        ens.samples = count_or(e, "samples", ens.samples, where + ".ensemble");
        if (e.contains("sampler")) {
            ens.sampler = sampler_from_string(string_at(e, "sampler", where + ".ensemble"));
        }
        if (ens.n_nodes < 16) {
            throw InvariantError(where + ": ensemble invariant n_nodes >= 16 violated");
        }
        if (ens.samples == 0) {
            throw InvariantError(where + ": ensemble invariant samples >= 1 violated");
        }
    }

    return Scenario{
        .name = name,
        .base = base,
        .sigma_a = sigma_a,
        .grid = *grid,
        .scheme = scheme,
        .dt = dt,
        .sample_times = times,
        .outputs = outputs,
        .density_time = density_time,
        .ensemble = ens,
    };
}

// ---- output helpers --------------------------------------------------------

std::ofstream open_for_write(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    }
    return out;
}

void close_checked(std::ofstream& out, const fs::path& path)
{
    out.close();
    if (!out) {
        throw IoError("error while writing '" + path.string() + "'");
    }
}

CheckResult at_most(std::string name, double value, double threshold)
{
    return {std::move(name), value, threshold, "<=", value <= threshold};
}

CheckResult at_least(std::string name, double value, double threshold)
{
    return {std::move(name), value, threshold, ">=", value >= threshold};
}

std::vector<CheckResult> verify_pure(const Scenario& sc, const std::vector<TimeseriesRow>& rows)
{
    const auto& spec = sc.base;
    const auto& osc = spec.osc();
    const double hbar = osc.hbar();
    const double sg2 = osc.ground_variance();
    const double sg = std::sqrt(sg2);

    double norm_dev = 0.0, fid_min = 1.0, ode_max = 0.0, tdse_max = 0.0, var_err = 0.0,
           unc_err = 0.0, mean_err = 0.0;
    for (const auto& row : rows) {
        const auto wf = eval_pure_wavefunction(spec, sc.grid, row.t);
        norm_dev = std::max(norm_dev, std::abs(trapezoid_norm(wf) - 1.0));
        fid_min = std::min(fid_min, row.fidelity_numeric.value_or(0.0));
        const auto r = ode_residuals(spec.squeeze(), osc, row.t);
        ode_max = std::max({ode_max, r.r1, r.r2, r.r3});
        tdse_max = std::max(tdse_max, schrodinger_residual(spec, sc.grid, row.t));
        var_err = std::max(var_err, std::abs(row.var_x / (sg2 * row.A) - 1.0));
        const double expected_product = 0.5 * hbar * std::sqrt(1.0 + row.B * row.B);
        unc_err = std::max(unc_err, std::abs(row.uncertainty_product - expected_product) / hbar);
        const auto m = moments(wf, hbar);
        mean_err = std::max(mean_err, std::abs(m.mean_x - row.x_c) / sg);
    }
    return {
        at_most("norm_deviation_max", norm_dev, kNormTol),
        at_least("fidelity_numeric_min", fid_min, 1.0 - kFidelityTol),
        at_most("ode_residual_max", ode_max, kOdeTol),
        at_most("schrodinger_residual_max", tdse_max, kSchrodingerTol),
        at_most("var_x_relative_error_max", var_err, kVarianceTol),
        at_most("uncertainty_product_error_max", unc_err, kUncertaintyTol),
        at_most("mean_x_error_max", mean_err, kVarianceTol),
    };
}

std::vector<CheckResult> verify_mixed(const Scenario& sc, const std::vector<TimeseriesRow>& rows,
                                      const RunOptions& opts)
{
    const auto state = sc.state();
    const double sg2 = state.osc().ground_variance();
    const double purity_expected = 1.0 / std::sqrt(state.purity_product());

    double trace_dev = 0.0, herm = 0.0, pur_err = 0.0, var_err = 0.0;
    for (const auto& row : rows) {
        const auto dm = eval_mixed_density(state, sc.grid, row.t);
        trace_dev = std::max(trace_dev, std::abs(trace(dm) - 1.0));
        herm = std::max(herm, hermiticity_defect(dm));
        pur_err = std::max(pur_err, std::abs(row.purity - purity_expected));
        var_err = std::max(var_err, std::abs(row.var_x / (sg2 * row.A) - 1.0));
    }
    std::vector<CheckResult> checks{
        at_most("trace_deviation_max", trace_dev, kNormTol),
        at_most("hermiticity_defect_max", herm, kHermiticityTol),
        at_most("purity_error_max", pur_err, kPurityTol),
        at_most("var_x_relative_error_max", var_err, kVarianceTol),
    };

    const double t0 = sc.sample_times.front();
    const MixedGaussianSpec mixed(sc.base, sc.sigma_a);
    const auto closed = eval_mixed_density(state, sc.grid, t0);
    if (sc.ensemble.method == EnsembleMethod::gauss_hermite) {
        EnsembleOptions eo;
        eo.n_nodes = sc.ensemble.n_nodes;
        eo.check_convergence = false;
        const auto avg = ensemble_average_density(mixed, sc.grid, t0, eo);
        checks.push_back(
            at_most("ensemble_gauss_hermite_difference", peak_relative_difference(avg, closed), kEnsembleTol));
    } else {
        MonteCarloOptions mo;
        mo.samples = sc.ensemble.samples;
        mo.sampler = sc.ensemble.sampler;
        mo.seed = opts.seed;
        const auto avg = monte_carlo_density(mixed, sc.grid, t0, mo);
        checks.push_back(
            at_most("ensemble_monte_carlo_difference", peak_relative_difference(avg, closed), kMonteCarloTol));
    }
    return checks;
}

}  // namespace

bool Scenario::wants(Product p) const noexcept
{
    return std::find(outputs.begin(), outputs.end(), p) != outputs.end();
}

GaussianStateSpec Scenario::state() const
{
    return reparameterize(MixedGaussianSpec(base, sigma_a));
}

std::vector<Scenario> parse_scenarios(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(doc, {"scenarios"}, "config");
    if (!doc.contains("scenarios") || !doc.at("scenarios").is_array() || doc.at("scenarios").empty()) {
        throw ParseError("config: 'scenarios' must be a non-empty array");
    }
    std::vector<Scenario> out;
    const auto& list = doc.at("scenarios");
    for (std::size_t i = 0; i < list.size(); ++i) {
        try {
            out.push_back(parse_one(list.at(i), i));
        } catch (const json::exception& e) {
            throw ParseError("scenarios[" + std::to_string(i) + "]: " + e.what());
        }
        for (std::size_t j = 0; j + 1 < out.size(); ++j) {
            if (out[j].name == out.back().name) {
                throw InvariantError("scenario names must be unique ('" + out.back().name + "')");
            }
        }
    }
    return out;
}

std::vector<Scenario> load_scenarios(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config '" + path.string() + "': " + std::strerror(errno));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenarios(ss.str());
}

std::vector<TimeseriesRow> compute_timeseries(const Scenario& sc)
{
    std::vector<TimeseriesRow> rows;
    rows.reserve(sc.sample_times.size());
    const auto state = sc.state();
    const auto& osc = state.osc();

    if (sc.mixed()) {
        for (double t : sc.sample_times) {
            const auto [A, B] = quadrature_shape(state.squeeze(), osc.omega(), t);
            const auto c = center_state(state.center(), osc, t);
            const auto dm = eval_mixed_density(state, sc.grid, t);
            const auto m = moments(dm, osc.hbar());
            rows.push_back({t, A, B, std::nullopt, c.x, c.p, m.var_x, m.var_p, m.cov_xp,
                            m.uncertainty_product, purity(dm), std::nullopt});
        }
        return rows;
    }

    WavefunctionSample numeric = eval_pure_wavefunction(state, sc.grid, 0.0);
    std::optional<Propagator> prop;
    for (double t : sc.sample_times) {
        const double span = t - numeric.t;
        if (span > 0.0) {
            const auto n = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(span / sc.dt - 1e-9)));
            const double step = span / static_cast<double>(n);
            if (!prop || std::abs(prop->dt() - step) > 1e-12 * step) {
                prop.emplace(sc.grid, osc, sc.scheme, step);
            }
            prop->advance(numeric, n);
            numeric.t = t;
        }
        const auto [A, B] = quadrature_shape(state.squeeze(), osc.omega(), t);
        const auto c = center_state(state.center(), osc, t);
        const auto wf = eval_pure_wavefunction(state, sc.grid, t);
        const auto m = moments(wf, osc.hbar());
        const double norm = trapezoid_norm(wf);
        rows.push_back({t, A, B, accumulated_phase(state.squeeze(), state.center(), osc, t), c.x, c.p,
                        m.var_x, m.var_p, m.cov_xp, m.uncertainty_product, norm * norm,
                        fidelity(numeric, wf)});
    }
    return rows;
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_timeseries(const fs::path& path, const std::vector<TimeseriesRow>& rows)
{
    auto out = open_for_write(path);
    out << "t,A,B,phi,x_c,p_c,var_x,var_p,cov_xp,uncertainty_product,purity,fidelity_numeric\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& r : rows) {
        out << format_number(r.t) << ',' << format_number(r.A) << ',' << format_number(r.B) << ','
            << opt(r.phi) << ',' << format_number(r.x_c) << ',' << format_number(r.p_c) << ','
            << format_number(r.var_x) << ',' << format_number(r.var_p) << ','
            << format_number(r.cov_xp) << ',' << format_number(r.uncertainty_product) << ','
            << format_number(r.purity) << ',' << opt(r.fidelity_numeric) << '\n';
    }
    close_checked(out, path);
}

DensityMatrixSample scenario_density(const Scenario& sc, double t)
{
    if (sc.mixed()) {
        return eval_mixed_density(sc.state(), sc.grid, t);
    }
    return eval_pure_density(sc.base, sc.grid, t);
}

void write_density_dump(const fs::path& path, const DensityMatrixSample& dm)
{
    auto out = open_for_write(path);
    out << dm.size() << ' ' << format_number(dm.grid.x_min()) << ' '
        << format_number(dm.grid.x_max()) << ' ' << format_number(dm.t) << '\n';
    for (const cplx& v : dm.values) {
        out << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
    }
    close_checked(out, path);
}

DensityMatrixSample read_density_dump(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read density dump '" + path.string() + "': " + std::strerror(errno));
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": missing density dump header");
    }
    std::istringstream header(line);
    std::size_t n = 0;
    double x_min = 0.0, x_max = 0.0, t = 0.0;
    if (!(header >> n >> x_min >> x_max >> t)) {
        throw ParseError(path.string() + ": malformed header (expected 'n_points x_min x_max t')");
    }
    std::optional<GridSpec> grid;
    try {
        grid.emplace(x_min, x_max, n);
    } catch (const InvariantError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    DensityMatrixSample dm{*grid, std::vector<cplx>(n * n), t};
    for (std::size_t k = 0; k < n * n; ++k) {
        if (!std::getline(in, line)) {
            throw ParseError(path.string() + ": expected " + std::to_string(n * n) + " rows, got " +
                             std::to_string(k));
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError(path.string() + ": row " + std::to_string(k + 2) + " is not 're,im'");
        }
        const char* first = line.c_str();
        const char* second = first + comma + 1;
        char* end_re = nullptr;
        char* end_im = nullptr;
        const double re = std::strtod(first, &end_re);
        const double im = std::strtod(second, &end_im);
        if (end_re != first + comma || end_im == second || *end_im != '\0') {
            throw ParseError(path.string() + ": row " + std::to_string(k + 2) + " is not 're,im'");
        }
        dm.values[k] = {re, im};
    }
    return dm;
}

std::vector<CheckResult> verify_scenario(const Scenario& sc, const RunOptions& opts)
{
    const auto rows = compute_timeseries(sc);
    return sc.mixed() ? verify_mixed(sc, rows, opts) : verify_pure(sc, rows);
}

bool ScenarioReport::passed() const noexcept
{
    return error.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

ScenarioReport run_scenario(const Scenario& sc, const RunOptions& opts, bool force_verify)
{
    ScenarioReport report{sc.name, {}, {}, {}, std::nullopt};
    try {
        std::error_code ec;
        fs::create_directories(opts.out_dir, ec);
        if (ec) {
            throw IoError("cannot create output directory '" + opts.out_dir.string() +
                          "': " + ec.message());
        }
        const bool verify = force_verify || sc.wants(Product::verify);
        std::vector<TimeseriesRow> rows;
        if (sc.wants(Product::timeseries) || verify) {
            rows = compute_timeseries(sc);
        }
        if (sc.wants(Product::timeseries)) {
            const auto path = opts.out_dir / (sc.name + ".timeseries.csv");
            write_timeseries(path, rows);
            report.files.push_back(path);
        }
        if (sc.wants(Product::wavefunction)) {
            const auto path = opts.out_dir / (sc.name + ".wavefunction.csv");
            auto out = open_for_write(path);
            out << "t,x,re,im\n";
            for (double t : sc.sample_times) {
                const auto wf = eval_pure_wavefunction(sc.base, sc.grid, t);
                for (std::size_t i = 0; i < wf.values.size(); ++i) {
                    out << format_number(t) << ',' << format_number(sc.grid.x(i)) << ','
                        << format_number(wf.values[i].real()) << ','
                        << format_number(wf.values[i].imag()) << '\n';
                }
            }
            close_checked(out, path);
            report.files.push_back(path);
        }
        if (sc.wants(Product::density)) {
            const auto path = opts.out_dir / (sc.name + ".density.txt");
            write_density_dump(path, scenario_density(sc, sc.density_time.value_or(sc.sample_times.front())));
            report.files.push_back(path);
        }
        if (verify) {
            report.checks = sc.mixed() ? verify_mixed(sc, rows, opts) : verify_pure(sc, rows);
            const auto path = opts.out_dir / (sc.name + ".verify.txt");
            auto out = open_for_write(path);
            for (const auto& c : report.checks) {
                out << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << format_number(c.value) << ' '
                    << c.relation << ' ' << format_number(c.threshold) << '\n';
            }
            close_checked(out, path);
            report.files.push_back(path);
        }
    } catch (const Error& e) {
        report.error = e.what();
        report.error_kind = e.kind();
    } catch (const std::exception& e) {
        report.error = e.what();
    }
    return report;
}

std::vector<ScenarioReport> run_scenarios(const std::vector<Scenario>& scenarios,
                                          const RunOptions& opts, bool force_verify)
{
    std::vector<std::future<ScenarioReport>> jobs;
    jobs.reserve(scenarios.size());
    for (const auto& sc : scenarios) {
        jobs.push_back(std::async(std::launch::async,
                                  [&sc, &opts, force_verify] { return run_scenario(sc, opts, force_verify); }));
    }
    std::vector<ScenarioReport> reports;
    reports.reserve(jobs.size());
    for (auto& j : jobs) {
        reports.push_back(j.get());
    }
    return reports;
}

std::string format_report(const std::vector<ScenarioReport>& reports)
{
    std::ostringstream os;
    for (const auto& r : reports) {
        os << "scenario " << r.name << ": "
           << (!r.error.empty() ? "ERROR" : (r.passed() ? "PASS" : "FAIL")) << '\n';
        if (!r.error.empty()) {
            os << "  error: " << r.error << '\n';
        }
        for (const auto& c : r.checks) {
            os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << " = "
               << format_number(c.value) << " (" << c.relation << ' ' << format_number(c.threshold)
               << ")\n";
        }
        for (const auto& f : r.files) {
            os << "  wrote " << f.string() << '\n';
        }
    }
    return os.str();
}

}  // namespace sqz
