#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "sqz/errors.hpp"
#include "sqz/scenario.hpp"

using namespace sqz;
namespace fs = std::filesystem;

namespace {

std::string wrap(const std::string& scenario)
{
    return R"({"scenarios": [)" + scenario + "]}";
}

fs::path scratch_dir(const std::string& tag)
{
    auto dir = fs::temp_directory_path() / ("sqz_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> lines_of(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

}  // namespace

TEST_CASE("scenario defaults")
{
    const auto list = parse_scenarios(wrap(R"({"name": "g"})"));
    REQUIRE(list.size() == 1);
    const auto& sc = list.front();
    CHECK(sc.name == "g");
    CHECK(!sc.mixed());
    CHECK(sc.grid.size() == 1024);
    CHECK(sc.scheme == Scheme::spectral_split_step);
    CHECK(sc.dt == doctest::Approx(2.0 * M_PI / 8192.0));
    CHECK(sc.sample_times.size() == 65);
    CHECK(sc.sample_times.back() == doctest::Approx(2.0 * M_PI));
    CHECK(sc.wants(Product::timeseries));
    CHECK(!sc.wants(Product::verify));
}

TEST_CASE("scenario fields")
{
    const auto sc = parse_scenarios(wrap(R"({
        "name": "full",
        "oscillator": {"mass": 2.0, "omega": 0.5, "hbar": 0.25},
        "squeeze": {"A0": 1.25, "dA": 0.75, "phi_sq": 0.4},
        "center": {"X_amp": 0.3, "phi_c": 1.0},
        "sigma_a": 0.1,
        "grid": {"x_min": -6.0, "x_max": 6.0, "n_points": 128},
        "propagator": {"scheme": "implicit-unitary", "dt": 0.01},
        "sample_times": {"periods": 2, "per_period": 8},
        "outputs": ["timeseries", "density", "verify"],
        "density_time": 1.5,
        "ensemble": {"method": "monte-carlo", "samples": 5000, "sampler": "pseudorandom"}
    })")).front();
    CHECK(sc.base.osc().mass() == 2.0);
    CHECK(sc.mixed());
    CHECK(sc.grid == GridSpec(-6.0, 6.0, 128));
    CHECK(sc.scheme == Scheme::implicit_unitary);
    CHECK(sc.dt == 0.01);
    CHECK(sc.sample_times.size() == 17);
    CHECK(sc.sample_times[8] == doctest::Approx(2.0 * M_PI / 0.5));
    CHECK(sc.density_time == 1.5);
    CHECK(sc.ensemble.method == EnsembleMethod::monte_carlo);
    CHECK(sc.ensemble.samples == 5000);
    CHECK(sc.ensemble.sampler == Sampler::pseudorandom);
    CHECK(sc.state().purity_product() > 1.0);

    const auto iv = parse_scenarios(wrap(R"({"name": "iv", "initial_variance": 1.0, "sample_times": [0, 0.5]})")).front();
    CHECK(iv.base.squeeze().max_variance() == doctest::Approx(2.0));
    CHECK(iv.sample_times == std::vector<double>{0.0, 0.5});
}

TEST_CASE("scenario parse errors")
{
    CHECK_THROWS_AS(parse_scenarios("{"), ParseError);
    CHECK_THROWS_AS(parse_scenarios("[]"), ParseError);
    CHECK_THROWS_AS(parse_scenarios(R"({"scenarios": []})"), ParseError);
    CHECK_THROWS_AS(parse_scenarios(R"({"scenarios": [], "extra": 1})"), ParseError);
    CHECK_THROWS_AS(parse_scenarios(wrap(R"({"nam": "x"})")), ParseError);
    CHECK_THROWS_AS(parse_scenarios(wrap(R"({"name": "x", "grid": {"n": 10}})")), ParseError);
    CHECK_THROWS_AS(parse_scenarios(wrap(R"({"name": "x", "sigma_a": "big"})")), ParseError);
    CHECK_THROWS_AS(parse_scenarios(wrap(R"({"name": "x", "grid": {"n_points": 12.5}})")), ParseError);
    CHECK_THROWS_AS(parse_scenarios(wrap(R"({"name": "x", "propagator": {"scheme": "rk4"}})")), ParseError);
    CHECK_THROWS_AS(parse_scenarios(wrap(R"({"name": "x", "squeeze": {"A0": 1}, "initial_variance": 1})")),
                    ParseError);
    CHECK_THROWS_AS(parse_scenarios(wrap(R"({"name": "x", "ensemble": {"method": "exact"}})")), ParseError);
}

TEST_CASE("scenario invariant violations")
{
    auto message = [](const std::string& text) {
        try {
            parse_scenarios(text);
        } catch (const InvariantError& e) {
            return std::string(e.what());
        }
        return std::string("no InvariantError");
    };
    CHECK(message(wrap(R"({"name": "x", "squeeze": {"A0": 0.5, "dA": 0.8}})")).find("A0 > dA") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "squeeze": {"A0": 2.0, "dA": 0.5}})")).find("pure") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "sample_times": [0, 1, 1]})")).find("sample_times") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "sample_times": [-1, 1]})")).find("sample_times") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "outputs": ["plot"]})")).find("outputs") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "sigma_a": 0.5, "outputs": ["wavefunction"]})")).find("pure") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "sigma_a": -0.5})")).find("sigma_a") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "grid": {"x_min": -2, "x_max": 2}})")).find("coverage") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "grid": {"n_points": 8}})")).find("n_points") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "propagator": {"dt": 0}})")).find("dt > 0") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "oscillator": {"mass": -1}})")).find("m > 0") != std::string::npos);
    CHECK(message(wrap(R"({"name": "a/b"})")).find("name") != std::string::npos);
    CHECK(message(wrap(R"({"name": "x", "initial_variance": 0})")).find("x") != std::string::npos);
    CHECK(message(R"({"scenarios": [{"name": "x"}, {"name": "x"}]})").find("unique") != std::string::npos);
}

TEST_CASE("timeseries properties")
{
    SUBCASE("ground state keeps its variance")
    {
        const auto rows = compute_timeseries(parse_scenarios(wrap(R"({"name": "g", "sample_times": {"per_period": 16}})")).front());
        REQUIRE(rows.size() == 17);
        for (const auto& r : rows) {
            CHECK(r.var_x == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(r.purity == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(*r.fidelity_numeric >= 1.0 - 1e-6);
            CHECK(*r.phi == doctest::Approx(0.5 * r.t).epsilon(1e-12));
        }
    }
    SUBCASE("shape repeats at half period, center at full period")
    {
        const auto rows = compute_timeseries(parse_scenarios(wrap(R"({"name": "s",
            "squeeze": {"A0": 1.25, "dA": 0.75}, "center": {"X_amp": 1.0},
            "sample_times": {"periods": 2, "per_period": 16}})")).front());
        REQUIRE(rows.size() == 33);
        for (std::size_t k = 0; k + 16 < rows.size(); ++k) {
            CHECK(rows[k + 8].A == doctest::Approx(rows[k].A).epsilon(1e-12));
            CHECK(rows[k + 16].x_c == doctest::Approx(rows[k].x_c).epsilon(1e-12));
        }
        CHECK(std::abs(rows[8].x_c - rows[0].x_c) > 1.0);
        CHECK(std::abs(rows[4].A - rows[0].A) > 1.0);
    }
    SUBCASE("mixed state with P = 4 has constant purity")
    {
        const auto rows = compute_timeseries(parse_scenarios(wrap(R"({"name": "m",
            "sigma_a": 0.7071067811865476, "grid": {"n_points": 256},
            "sample_times": {"per_period": 8}})")).front());
        for (const auto& r : rows) {
            CHECK(std::abs(r.purity - 0.5) <= 1e-5);
            CHECK(!r.phi);
            CHECK(!r.fidelity_numeric);
        }
    }
}

TEST_CASE("CSV and density dump formats")
{
    const auto dir = scratch_dir("formats");
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.0) == "-2");

    const std::vector<TimeseriesRow> rows{
        {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 1.0, 1.0},
        {0.1, 2.0, 0.5, std::nullopt, 1.0, -1.0, 1.0, 0.3, -0.25, 0.55, 0.5, std::nullopt},
    };
    write_timeseries(dir / "t.csv", rows);
    const auto lines = lines_of(dir / "t.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "t,A,B,phi,x_c,p_c,var_x,var_p,cov_xp,uncertainty_product,purity,fidelity_numeric");
    CHECK(lines[1] == "0,1,0,0,0,0,0.5,0.5,0,0.5,1,1");
    CHECK(lines[2] == "0.10000000000000001,2,0.5,,1,-1,1,0.29999999999999999,-0.25,0.55000000000000004,0.5,");

    const auto sc = parse_scenarios(wrap(R"({"name": "d", "sigma_a": 0.3, "grid": {"n_points": 32}})")).front();
    const auto dm = scenario_density(sc, 0.75);
    write_density_dump(dir / "d.txt", dm);
    const auto dump = lines_of(dir / "d.txt");
    REQUIRE(dump.size() == 1 + 32 * 32);
    std::istringstream header(dump[0]);
    std::size_t n = 0;
    double x_min = 0, x_max = 0, t = 0;
    header >> n >> x_min >> x_max >> t;
    CHECK(n == 32);
    CHECK(x_min == sc.grid.x_min());
    CHECK(t == 0.75);
    const auto back = read_density_dump(dir / "d.txt");
    CHECK(back.grid == dm.grid);
    CHECK(back.values == dm.values);

    std::ofstream(dir / "short.txt") << "16 -1 1 0\n1,0\n";
    CHECK_THROWS_AS(read_density_dump(dir / "short.txt"), ParseError);
    std::ofstream(dir / "tiny.txt") << "4 -1 1 0\n";
    CHECK_THROWS_AS(read_density_dump(dir / "tiny.txt"), ParseError);
    {
        std::ofstream bad(dir / "bad.txt");
        bad << "16 -1 1 0\n";
        for (int k = 0; k < 256; ++k) {
            bad << (k == 7 ? "1,x\n" : "1,0\n");
        }
    }
    CHECK_THROWS_AS(read_density_dump(dir / "bad.txt"), ParseError);
    CHECK_THROWS_AS(read_density_dump(dir / "missing.txt"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("running scenarios")
{
    const auto dir = scratch_dir("run");
    const auto list = parse_scenarios(R"({"scenarios": [
        {"name": "vac", "initial_variance": 1.0, "grid": {"n_points": 256},
         "sample_times": {"per_period": 8}, "outputs": ["timeseries", "wavefunction", "density", "verify"]},
        {"name": "mix", "sigma_a": 0.5, "grid": {"n_points": 128},
         "sample_times": {"per_period": 4}, "outputs": ["verify"]},
        {"name": "coarse", "initial_variance": 1.0, "propagator": {"scheme": "implicit-unitary", "dt": 0.5},
         "grid": {"n_points": 256}, "sample_times": [0, 3.0]}
    ]})");
    const auto reports = run_scenarios(list, {dir, 1}, false);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].name == "vac");
    CHECK(reports[0].passed());
    CHECK(reports[0].files.size() == 4);
    CHECK(lines_of(dir / "vac.wavefunction.csv").size() == 1 + 9 * 256);
    CHECK(reports[1].passed());
    CHECK(reports[1].checks.size() == 5);
    CHECK(reports[2].checks.empty());
    CHECK(fs::exists(dir / "coarse.timeseries.csv"));

    const auto forced = run_scenario(list[2], {dir, 1}, true);
    CHECK(forced.error.empty());
    CHECK(!forced.passed());
    const auto text = format_report({forced});
    CHECK(text.find("[FAIL] fidelity_numeric_min") != std::string::npos);

    std::ofstream(dir / "blocker") << "x";
    const auto blocked = run_scenario(list[0], {dir / "blocker" / "sub", 1}, false);
    CHECK(blocked.error_kind == ErrorKind::io);
    CHECK(!blocked.passed());
    fs::remove_all(dir);
}
