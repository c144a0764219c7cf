#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "sqz/sqz.h"

namespace {

enum Exit : int {
    exit_ok = 0,
    exit_verification = 1,
    exit_parse = 2,
    exit_invariant = 3,
    exit_io = 4,
    exit_numeric = 5,
};

int exit_code(sqz_status s)
{
    switch (s) {
    case SQZ_OK:
        return exit_ok;
    case SQZ_ERR_VERIFICATION:
        return exit_verification;
    case SQZ_ERR_PARSE:
    case SQZ_ERR_ARGUMENT:
        return exit_parse;
    case SQZ_ERR_INVARIANT:
    case SQZ_ERR_COVERAGE:
    case SQZ_ERR_DOMAIN:
        return exit_invariant;
    case SQZ_ERR_IO:
        return exit_io;
    default:
        return exit_numeric;
    }
}

struct SetGuard {
    sqz_scenario_set* set = nullptr;
    ~SetGuard() { sqz_scenarios_free(set); }
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Squeezed-state harmonic oscillator scenarios"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    double time = 0.0;

    app.add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
    app.add_option("--seed", seed, "Monte Carlo seed (Monte Carlo scenarios only)");
    app.add_flag("--quiet", quiet, "Suppress the report on stdout");

    auto* run = app.add_subcommand("run", "Write the requested products");
    run->add_option("config", config, "Scenario file (JSON)")->required();
    auto* verify = app.add_subcommand("verify", "Run all verification checks");
    verify->add_option("config", config, "Scenario file (JSON)")->required();
    auto* dump = app.add_subcommand("dump-density", "Write density matrices at one time");
    dump->add_option("config", config, "Scenario file (JSON)")->required();
    dump->add_option("--time", time, "Evaluation time")->required();

    for (auto* sub : {run, verify, dump}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_parse;
    }

    SetGuard guard;
    sqz_status s = sqz_scenarios_load(config.c_str(), &guard.set);
    if (s != SQZ_OK) {
        std::fprintf(stderr, "sqz: %s\n", sqz_last_error());
        return exit_code(s);
    }
    if (seed && !sqz_scenarios_uses_monte_carlo(guard.set)) {
        std::fprintf(stderr, "sqz: --seed applies only to Monte Carlo ensemble scenarios\n");
        return exit_parse;
    }

    if (dump->parsed()) {
        s = sqz_scenarios_dump_density(guard.set, out_dir.c_str(), time);
    } else {
        const std::uint64_t default_seed = 20240611;
        s = sqz_scenarios_run(guard.set, out_dir.c_str(), seed.value_or(default_seed),
                              verify->parsed() ? 1 : 0);
    }
    if (!quiet) {
        std::fputs(sqz_scenarios_report(guard.set), stdout);
    }
    if (s != SQZ_OK) {
        std::fprintf(stderr, "sqz: %s\n", sqz_last_error());
    }
    return exit_code(s);
}
