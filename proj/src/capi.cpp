#include "sqz/sqz.h"

#include <algorithm>
#include <cmath>
#include <new>
#include <string>
#include <vector>

#include "sqz/analytic.hpp"
#include "sqz/ensemble.hpp"
#include "sqz/errors.hpp"
#include "sqz/scenario.hpp"

struct sqz_state {
    sqz::GaussianStateSpec base;
    double sigma_a;

    sqz::GaussianStateSpec evaluated() const
    {
        return sqz::reparameterize(sqz::MixedGaussianSpec(base, sigma_a));
    }
};

struct sqz_scenario_set {
    std::vector<sqz::Scenario> scenarios;
    std::string report;
};

namespace {

thread_local std::string g_last_error;

sqz_status fail(sqz_status code, std::string msg)
{
    g_last_error = std::move(msg);
    return code;
}

template <class F>
sqz_status guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return SQZ_OK;
    } catch (const sqz::Error& e) {
        return fail(static_cast<sqz_status>(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SQZ_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SQZ_ERR_INTERNAL, e.what());
    }
}

void require(bool cond, const char* what)
{
    if (!cond) {
        throw sqz::Error(sqz::ErrorKind::argument, what);
    }
}

sqz::OscillatorConfig oscillator(const sqz_oscillator* osc)
{
    return osc ? sqz::OscillatorConfig(osc->mass, osc->omega, osc->hbar)
               : sqz::OscillatorConfig::natural();
}

void split(const std::vector<sqz::cplx>& v, double* re, double* im)
{
    for (std::size_t i = 0; i < v.size(); ++i) {
        re[i] = v[i].real();
        im[i] = v[i].imag();
    }
}

}  // namespace

extern "C" {

const char* sqz_last_error(void) { return g_last_error.c_str(); }

const char* sqz_version(void) { return "0.1.0"; }

sqz_status sqz_state_create(const sqz_oscillator* osc, double A0, double dA, double phi_sq,
                            double X_amp, double phi_c, double sigma_a, sqz_state** out)
{
    return guarded([&] {
        require(out != nullptr, "out must not be NULL");
        *out = nullptr;
        auto base = sqz::GaussianStateSpec::pure(oscillator(osc), sqz::SqueezeDynamics(A0, dA, phi_sq),
                                                 sqz::CenterTrajectory(X_amp, phi_c));
        sqz::MixedGaussianSpec check(base, sigma_a);
        *out = new sqz_state{base, sigma_a};
    });
}

sqz_status sqz_state_from_initial_variance(const sqz_oscillator* osc, double D, sqz_state** out)
{
    return guarded([&] {
        require(out != nullptr, "out must not be NULL");
        *out = nullptr;
        const auto o = oscillator(osc);
        auto base = sqz::GaussianStateSpec::pure(o, sqz::squeeze_from_initial_variance(D, o),
                                                 sqz::CenterTrajectory::at_rest());
        *out = new sqz_state{base, 0.0};
    });
}

void sqz_state_free(sqz_state* s) { delete s; }

sqz_status sqz_state_purity_product(const sqz_state* s, double* P)
{
    return guarded([&] {
        require(s && P, "NULL argument");
        *P = s->evaluated().purity_product();
    });
}

sqz_status sqz_state_shape(const sqz_state* s, double t, double* A, double* B, double* x_c,
                           double* p_c)
{
    return guarded([&] {
        require(s != nullptr, "state must not be NULL");
        const auto st = s->evaluated();
        const auto q = sqz::quadrature_shape(st.squeeze(), st.osc().omega(), t);
        const auto c = sqz::center_state(st.center(), st.osc(), t);
        if (A) *A = q.A;
        if (B) *B = q.B;
        if (x_c) *x_c = c.x;
        if (p_c) *p_c = c.p;
    });
}

sqz_status sqz_state_phase(const sqz_state* s, double t, double* phi)
{
    return guarded([&] {
        require(s && phi, "NULL argument");
        const auto st = s->evaluated();
        *phi = sqz::accumulated_phase(st.squeeze(), st.center(), st.osc(), t);
    });
}

sqz_status sqz_state_default_grid(const sqz_state* s, size_t n_points, double* x_min, double* x_max)
{
    return guarded([&] {
        require(s && x_min && x_max, "NULL argument");
        const auto g = sqz::GridSpec::default_for(s->evaluated(), n_points);
        *x_min = g.x_min();
        *x_max = g.x_max();
    });
}

sqz_status sqz_state_wavefunction(const sqz_state* s, double x_min, double x_max, size_t n_points,
                                  double t, double* re, double* im)
{
    return guarded([&] {
        require(s && re && im, "NULL argument");
        const auto wf = sqz::eval_pure_wavefunction(s->evaluated(), sqz::GridSpec(x_min, x_max, n_points), t);
        split(wf.values, re, im);
    });
}

sqz_status sqz_state_density(const sqz_state* s, double x_min, double x_max, size_t n_points,
                             double t, double* re, double* im)
{
    return guarded([&] {
        require(s && re && im, "NULL argument");
        const sqz::GridSpec grid(x_min, x_max, n_points);
        const auto st = s->evaluated();
        const auto dm = st.is_pure() ? sqz::eval_pure_density(st, grid, t)
                                     : sqz::eval_mixed_density(st, grid, t);
        split(dm.values, re, im);
    });
}

sqz_status sqz_state_moments(const sqz_state* s, double x_min, double x_max, size_t n_points,
                             double t, sqz_moments* out)
{
    return guarded([&] {
        require(s && out, "NULL argument");
        const sqz::GridSpec grid(x_min, x_max, n_points);
        const auto st = s->evaluated();
        const double hbar = st.osc().hbar();
        const auto m = st.is_pure() ? sqz::moments(sqz::eval_pure_wavefunction(st, grid, t), hbar)
                                    : sqz::moments(sqz::eval_mixed_density(st, grid, t), hbar);
        *out = {m.mean_x, m.mean_p, m.var_x, m.var_p, m.cov_xp, m.uncertainty_product};
    });
}

sqz_status sqz_state_schrodinger_residual(const sqz_state* s, double x_min, double x_max,
                                          size_t n_points, double t, double* residual)
{
    return guarded([&] {
        require(s && residual, "NULL argument");
        *residual = sqz::schrodinger_residual(s->evaluated(), sqz::GridSpec(x_min, x_max, n_points), t);
    });
}

sqz_status sqz_scenarios_load(const char* path, sqz_scenario_set** out)
{
    return guarded([&] {
        require(path && out, "NULL argument");
        *out = nullptr;
        *out = new sqz_scenario_set{sqz::load_scenarios(path), {}};
    });
}

sqz_status sqz_scenarios_parse(const char* json_text, sqz_scenario_set** out)
{
    return guarded([&] {
        require(json_text && out, "NULL argument");
        *out = nullptr;
        *out = new sqz_scenario_set{sqz::parse_scenarios(json_text), {}};
    });
}

void sqz_scenarios_free(sqz_scenario_set* set) { delete set; }

size_t sqz_scenarios_size(const sqz_scenario_set* set) { return set ? set->scenarios.size() : 0; }

const char* sqz_scenarios_name(const sqz_scenario_set* set, size_t index)
{
    if (!set || index >= set->scenarios.size()) {
        return nullptr;
    }
    return set->scenarios[index].name.c_str();
}

int sqz_scenarios_uses_monte_carlo(const sqz_scenario_set* set)
{
    if (!set) {
        return 0;
    }
    return std::any_of(set->scenarios.begin(), set->scenarios.end(), [](const sqz::Scenario& sc) {
        return sc.mixed() && sc.ensemble.method == sqz::EnsembleMethod::monte_carlo;
    }) ? 1 : 0;
}

sqz_status sqz_scenarios_run(sqz_scenario_set* set, const char* out_dir, uint64_t seed, int verify)
{
    if (!set || !out_dir) {
        return fail(SQZ_ERR_ARGUMENT, "NULL argument");
    }
    sqz_status status = SQZ_OK;
    const sqz_status caught = guarded([&] {
        const auto reports = sqz::run_scenarios(set->scenarios, {out_dir, seed}, verify != 0);
        set->report = sqz::format_report(reports);
        std::string first_failure;
        for (const auto& r : reports) {
            if (!r.error.empty()) {
                const auto code = r.error_kind ? static_cast<sqz_status>(*r.error_kind) : SQZ_ERR_INTERNAL;
                if (status == SQZ_OK || status == SQZ_ERR_VERIFICATION) {
                    status = code;
                    first_failure = r.name + ": " + r.error;
                }
            } else if (!r.passed() && status == SQZ_OK) {
                status = SQZ_ERR_VERIFICATION;
                first_failure = r.name + ": verification failed";
            }
        }
        g_last_error = first_failure;
    });
    if (caught != SQZ_OK) {
        return caught;
    }
    if (status != SQZ_OK) {
        const std::string msg = g_last_error;
        return fail(status, msg);
    }
    return SQZ_OK;
}

const char* sqz_scenarios_report(const sqz_scenario_set* set) { return set ? set->report.c_str() : ""; }

sqz_status sqz_scenarios_dump_density(sqz_scenario_set* set, const char* out_dir, double t)
{
    return guarded([&] {
        require(set && out_dir, "NULL argument");
        require(std::isfinite(t), "time must be finite");
        const std::filesystem::path dir(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
            throw sqz::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
        }
        std::string report;
        for (const auto& sc : set->scenarios) {
            const auto path = dir / (sc.name + ".density.txt");
            sqz::write_density_dump(path, sqz::scenario_density(sc, t));
            report += "wrote " + path.string() + "\n";
        }
        set->report = report;
    });
}

sqz_status sqz_density_dump_trace(const char* path, size_t* n_points, double* trace_re,
                                  double* trace_im)
{
    return guarded([&] {
        require(path != nullptr, "NULL argument");
        const auto dm = sqz::read_density_dump(path);
        const auto tr = sqz::trace(dm);
        if (n_points) *n_points = dm.size();
        if (trace_re) *trace_re = tr.real();
        if (trace_im) *trace_im = tr.imag();
    });
}

}  // extern "C"
