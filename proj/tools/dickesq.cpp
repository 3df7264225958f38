// Command-line front end.
//
//   dickesq evolve  <config> [--set key=value ...] [-o out.csv]
//   dickesq steady  <config> [...]
//   dickesq sweep   <config> [...]
//   dickesq traj    <config> [...]   (writes out.csv, out.jumps.csv, out.summary.csv)
//   dickesq rerun   <file.csv> [-o out.csv]
//   dickesq oracle-check [--quick]

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dickesq/certify.hpp"
#include "dickesq/config.hpp"
#include "dickesq/error.hpp"
#include "dickesq/output.hpp"
#include "dickesq/runner.hpp"
#include "dickesq/sweep.hpp"

using namespace dickesq;

namespace {

Config load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
    Config cfg = path.empty() ? Config{} : Config::load(path);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    return cfg;
}

template <class F>
void with_output(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error("cannot write '" + path + "'");
    write(f);
}

std::string suffixed(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind(".csv");
    return (dot == std::string::npos ? path : path.substr(0, dot)) + suffix;
}

void warn_unused(const Config& cfg) {
    for (const auto& k : cfg.unused_keys()) std::cerr << "warning: config key '" << k << "' was not used\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_evolve(const Config& cfg, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput run = run_evolve(cfg);
    warn_unused(cfg);
    run.record.metadata.emplace_back("wall_time_s", format_double(seconds_since(t0)));
    if (run.min_squeezing) {
        run.record.metadata.emplace_back("xi2_min", format_double(run.min_squeezing->xi2_min));
        run.record.metadata.emplace_back("t_at_min", format_double(run.min_squeezing->t_at_min));
    }
    with_output(out, [&](std::ostream& os) { write_series(os, run.record, run.rows); });
    if (!run.cumulants.empty() && !out.empty() && out != "-") {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < run.cumulants.size(); ++k) {
            const auto& c = run.cumulants[k];
            rows.push_back({format_double(run.rows[k].t), format_double(c.sp.real()), format_double(c.sp.imag()),
                            format_double(c.sz), format_double(c.zp.real()), format_double(c.zp.imag()),
                            format_double(c.pm), format_double(c.zz), format_double(c.pp.real()),
                            format_double(c.pp.imag())});
        }
        with_output(suffixed(out, ".cumulants.csv"), [&](std::ostream& os) {
            write_table(os, run.record,
                        {"t", "re_sp", "im_sp", "sz", "re_zp", "im_zp", "pm", "zz", "re_pp", "im_pp"}, rows);
        });
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driven-dissipative collective spin simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::vector<std::string> sets;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--set", sets, "override a config key (key=value)");
        sub->add_option("-o,--output", out_path, "output CSV (stdout when omitted)");
    };
    auto* evolve = app.add_subcommand("evolve", "one time series with any solver");
    auto* steady = app.add_subcommand("steady", "collective or mean-field steady states");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep");
    auto* traj = app.add_subcommand("traj", "per-trajectory dump of an mcwf run");
    for (auto* s : {evolve, steady, sweep, traj}) add_common(s);

    std::string rerun_path;
    auto* rerun = app.add_subcommand("rerun", "re-run from the header of an output CSV");
    rerun->add_option("file", rerun_path)->required()->check(CLI::ExistingFile);
    rerun->add_option("-o,--output", out_path);

    bool quick = false;
    auto* oracle = app.add_subcommand("oracle-check", "small-N certification against the brute-force oracle");
    oracle->add_flag("--quick", quick, "fewer trajectories");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*evolve) {
            write_evolve(load_with_overrides(config_path, sets), out_path);
        } else if (*rerun) {
            Config cfg = Config::from_record_header(rerun_path);
            if (cfg.has("axis1")) {
                SweepResult res = run_sweep(SweepSpec::from_config(cfg));
                with_output(out_path, [&](std::ostream& os) { write_table(os, res.record, res.columns(), res.table()); });
            } else {
                write_evolve(cfg, out_path);
            }
        } else if (*steady) {
            const Config cfg = load_with_overrides(config_path, sets);
            const SteadyOutput res = run_steady(cfg);
            warn_unused(cfg);
            with_output(out_path, [&](std::ostream& os) { write_table(os, res.record, res.columns, res.rows); });
        } else if (*sweep) {
            const Config cfg = load_with_overrides(config_path, sets);
            const auto t0 = std::chrono::steady_clock::now();
            SweepResult res = run_sweep(SweepSpec::from_config(cfg));
            res.record.metadata.emplace_back("wall_time_s", format_double(seconds_since(t0)));
            with_output(out_path, [&](std::ostream& os) { write_table(os, res.record, res.columns(), res.table()); });
        } else if (*traj) {
            const Config cfg = load_with_overrides(config_path, sets);
            const TrajOutput res = run_traj(cfg);
            warn_unused(cfg);
            with_output(out_path, [&](std::ostream& os) {
                write_table(os, res.record, res.sample_columns, res.samples);
            });
            if (!out_path.empty() && out_path != "-") {
                with_output(suffixed(out_path, ".jumps.csv"), [&](std::ostream& os) {
                    write_table(os, res.record, res.jump_columns, res.jumps);
                });
                with_output(suffixed(out_path, ".summary.csv"), [&](std::ostream& os) {
                    write_table(os, res.record, res.summary_columns, res.summary);
                });
            }
        } else if (*oracle) {
            CertifyOptions opt;
            if (quick) opt.n_traj = 2000;
            return print_certification(std::cout, run_certification(opt)) ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
