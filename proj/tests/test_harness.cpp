#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dickesq/analysis.hpp"
#include "dickesq/config.hpp"
#include "dickesq/error.hpp"
#include "dickesq/output.hpp"
#include "dickesq/runner.hpp"
#include "dickesq/sweep.hpp"

using namespace dickesq;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "dickesq_test_harness";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// File contents without "# @" metadata lines (wall time differs between runs).
std::string without_metadata(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("# @", 0) != 0) out += line + "\n";
    return out;
}

std::string series_text(const RunOutput& r) {
    std::ostringstream os;
    write_series(os, r.record, r.rows);
    return os.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DICKESQ_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Reads the single data row of a steady table into column -> value.
std::map<std::string, std::string> last_row(const fs::path& csv) {
    std::istringstream in(slurp(csv));
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    auto split = [](const std::string& s) {
        std::vector<std::string> v;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) v.push_back(item);
        return v;
    };
    const auto head = split(lines.front()), vals = split(lines.back());
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < head.size() && i < vals.size(); ++i) m[head[i]] = vals[i];
    return m;
}

} // namespace

TEST_CASE("config grammar") {
    const Config c = Config::parse("# comment\n\nn_atoms = 12   # inline\nchi=0.5\nname.sub = hello world\n");
    CHECK(c.get_int("n_atoms") == 12);
    CHECK(c.get_double("chi") == 0.5);
    CHECK(c.get_string("name.sub") == "hello world");
    CHECK(c.get_double("missing", 3.0) == 3.0);
    CHECK_THROWS_AS(c.get_double("missing"), ConfigError);
    CHECK_THROWS_AS(c.get_int("chi"), ConfigError);
    CHECK_THROWS_AS(c.get_double("name.sub"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("just text\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("bad key = 1\n"), ConfigError);

    const Config u = Config::parse("a = 1\nb = 2\n");
    u.get_int("a");
    CHECK(u.unused_keys() == std::vector<std::string>{"b"});

    const Config back = Config::parse(c.serialize());
    CHECK(back.entries() == c.entries());
}

TEST_CASE("number lists") {
    CHECK(parse_number_list("linspace(0, 1, 5)") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(parse_number_list("1, 2 3") == std::vector<double>{1, 2, 3});
    CHECK_THROWS_AS(parse_number_list("1, x"), ConfigError);
}

TEST_CASE("doubles print with round-trip precision") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int k = 0; k < 1000; ++k) {
        const double x = std::ldexp(u(rng), static_cast<int>(u(rng) * 30));
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
    CHECK(format_double(NAN) == "nan");
}

TEST_CASE("minimum transient squeezing") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    const auto inc = min_transient_squeezing(t, {0.1, 0.2, 0.3, 0.4, 0.5}, 1.5);
    CHECK(inc.xi2_min == 0.3);
    CHECK(inc.t_at_min == 2.0);
    const auto dips = min_transient_squeezing(t, {1.0, 0.1, 0.8, 0.3, 0.9}, 1.5);
    CHECK(dips.xi2_min == 0.3);
    CHECK(dips.index == 3);
    const auto with_nan = min_transient_squeezing(t, {1.0, 0.1, NAN, 0.6, 0.9}, 1.5);
    CHECK(with_nan.xi2_min == 0.6);
    CHECK(min_transient_squeezing(t, {2, 3, 4, 5, 6}, 0).xi2_min == 2.0);  // reported as-is above 1
    CHECK_THROWS_AS(min_transient_squeezing(t, {1, 1, 1, 1, 1}, 5.0), InvalidParams);
    CHECK(default_t_min(2000) == doctest::Approx(0.003));
}

TEST_CASE("threshold crossing") {
    std::vector<double> t, flat, lin;
    for (int k = 0; k <= 10; ++k) {
        t.push_back(0.1 * k);
        flat.push_back(100.0);
        lin.push_back(100.0 * (1.0 - 0.1 * k));
    }
    CHECK_FALSE(detect_crossing(t, flat, 90.0).has_value());
    const auto c = detect_crossing(t, lin, 45.0);
    REQUIRE(c.has_value());
    CHECK(*c == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(*detect_crossing(t, lin, 100.0) == 0.0);
}

TEST_CASE("change point at a kink") {
    std::vector<double> t, xi2;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(0.01 * k);
        xi2.push_back(k < 60 ? 0.4 : 0.4 * std::exp(8.0 * (t.back() - 0.6)));
    }
    const auto cp = detect_change_point(t, xi2, 1, 0.0);
    REQUIRE(cp.has_value());
    CHECK(cp->index == 60);
    CHECK(cp->score > 0.0);
    const auto wide = detect_change_point(t, xi2, 3, 0.0);
    REQUIRE(wide.has_value());
    CHECK(std::abs(wide->t - 0.6) <= 0.01 + 1e-12);
}

TEST_CASE("runs reproduce from their own header") {
    const fs::path dir = scratch_dir();
    const std::vector<std::string> configs = {
        "solver = collective\nn_atoms = 8\nchi = 1\nupsilon_ratio = 0.9\nt_end = 1\nn_steps = 20\n",
        "solver = cumulant\nn_atoms = 2000\nchi = 1\ngamma_s = 20\nupsilon_ratio = 0.9\nt_end = 0.2\n",
        "solver = mcwf\nn_atoms = 20\nchi = 1\ngamma_s = 1\nupsilon_ratio = 0.9\nt_end = 0.5\nn_steps = 10\n"
        "n_traj = 64\nseed = 7\nunraveling = displaced\n",
        "solver = meanfield\nn_atoms = 100\nchi = 1\nupsilon_ratio = 0.5\nt_end = 2\n",
        "solver = oracle\nn_atoms = 3\nchi = 1\ngamma_s = 2\nupsilon_ratio = 0.9\nt_end = 0.5\nn_steps = 5\n",
    };
    for (const auto& text : configs) {
        CAPTURE(text);
        const RunOutput a = run_evolve(Config::parse(text));
        const fs::path file = dir / "record.csv";
        {
            std::ofstream out(file);
            write_series(out, a.record, a.rows);
        }
        const RunOutput b = run_evolve(Config::from_record_header(file));
        CHECK(without_metadata(series_text(b)) == without_metadata(slurp(file)));
    }
}

TEST_CASE("one-point sweep equals a single run") {
    const std::string base = "solver = cumulant\nn_atoms = 2000\nchi = 1\ngamma_s = 20\nt_end = 0.3\n";
    const SweepResult s = run_sweep(SweepSpec::from_config(Config::parse(base + "axis1 = upsilon_ratio\nvalues1 = 0.8\n")));
    const RunOutput r = run_evolve(Config::parse(base + "upsilon_ratio = 0.8\n"));
    REQUIRE(s.points.size() == 1);
    REQUIRE(s.points[0].ok);
    REQUIRE(r.min_squeezing);
    CHECK(s.points[0].min_squeezing->xi2_min == r.min_squeezing->xi2_min);
    CHECK(s.points[0].min_squeezing->t_at_min == r.min_squeezing->t_at_min);
}

TEST_CASE("sweeps do not depend on the worker count") {
    const Config cfg = Config::parse(
        "solver = cumulant\nn_atoms = 2000\ngamma_s = 20\nt_end = 0.3\n"
        "axis1 = chi\nvalues1 = 0, 1\naxis2 = upsilon_ratio\nvalues2 = linspace(0.5, 1.1, 3)\n");
    const SweepSpec spec = SweepSpec::from_config(cfg);
    const SweepResult a = run_sweep(spec, 1), b = run_sweep(spec, 3);
    CHECK(a.points.size() == 6);
    CHECK(a.table() == b.table());
    CHECK(a.points[1].axis_values == std::vector<double>{0.0, 0.8});
}

TEST_CASE("failing sweep points are recorded in their row") {
    const Config cfg = Config::parse(
        "solver = collective\nn_atoms = 4\nchi = 1\nt_end = 0.1\naxis1 = gamma_s\nvalues1 = 0, 1\nupsilon_ratio = 0.5\n");
    const SweepResult r = run_sweep(SweepSpec::from_config(cfg), 1);
    REQUIRE(r.points.size() == 2);
    CHECK(r.points[0].ok);
    CHECK_FALSE(r.points[1].ok);
    CHECK_FALSE(r.points[1].error.empty());
}

TEST_CASE("stronger exchange deepens the transient squeezing") {
    double prev = INFINITY, prev_t = INFINITY;
    for (double chi : {0.0, 0.5, 1.0, 2.0}) {
        Config c = Config::parse(
            "solver = cumulant\nn_atoms = 10000\ngamma_s = 50\nupsilon_ratio = 0.9\ninit = meanfield_ss\n"
            "t_end = 0.5\nn_steps = 500\n");
        c.set("chi", format_double(chi));
        const RunOutput r = run_evolve(c);
        REQUIRE(r.min_squeezing);
        CHECK(r.min_squeezing->xi2_min < prev);
        CHECK(r.min_squeezing->t_at_min <= prev_t);
        prev = r.min_squeezing->xi2_min;
        prev_t = r.min_squeezing->t_at_min;
    }
    CHECK(prev < 1.0);
}

TEST_CASE("squeezing is lost above the critical drive without spontaneous emission") {
    const RunOutput r = run_evolve(Config::parse(
        "solver = collective\nn_atoms = 20\nchi = 1\nupsilon_ratio = 1.5\nt_end = 20\nn_steps = 200\nt_min = 5\n"));
    REQUIRE(r.min_squeezing);
    CHECK(r.min_squeezing->xi2_min >= 1.0);
}

TEST_CASE("command line") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream(dir / "down.cfg") << "n_atoms = 10\nchi = 1\nomega = 0\n";
    }
    REQUIRE(run_cli("steady " + (dir / "down.cfg").string() + " --set solver=collective -o " +
                    (dir / "down_c.csv").string()) == 0);
    const auto c = last_row(dir / "down_c.csv");
    CHECK(std::stod(c.at("Jz")) == doctest::Approx(-5.0).epsilon(1e-9));
    REQUIRE(run_cli("steady " + (dir / "down.cfg").string() + " --set solver=meanfield -o " +
                    (dir / "down_m.csv").string()) == 0);
    const auto m = last_row(dir / "down_m.csv");
    CHECK(std::stod(m.at("z")) == -1.0);
    CHECK(m.at("stable") == "1");

    // evolve, then rerun from the written file
    {
        std::ofstream(dir / "traj.cfg") << "solver = mcwf\nn_atoms = 12\nchi = 1\ngamma_s = 1\nupsilon_ratio = 0.9\n"
                                           "t_end = 0.3\nn_steps = 6\nn_traj = 32\nseed = 3\n";
    }
    REQUIRE(run_cli("evolve " + (dir / "traj.cfg").string() + " -o " + (dir / "a.csv").string()) == 0);
    REQUIRE(run_cli("rerun " + (dir / "a.csv").string() + " -o " + (dir / "b.csv").string()) == 0);
    CHECK(without_metadata(slurp(dir / "a.csv")) == without_metadata(slurp(dir / "b.csv")));
    REQUIRE(run_cli("evolve " + (dir / "traj.cfg").string() + " --set seed=4 -o " + (dir / "c.csv").string()) == 0);
    CHECK(without_metadata(slurp(dir / "a.csv")) != without_metadata(slurp(dir / "c.csv")));

    // invalid input exits nonzero
    CHECK(run_cli("evolve " + (dir / "missing.cfg").string() + " -o " + (dir / "x.csv").string()) != 0);
    CHECK(run_cli("evolve " + (dir / "down.cfg").string() + " --set solver=collective --set gamma_s=1 --set t_end=1 -o " +
                  (dir / "x.csv").string()) != 0);
}
