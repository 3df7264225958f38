#include "dickesq/runner.hpp"

#include <cmath>
#include <numbers>

#include "dickesq/collective.hpp"
#include "dickesq/error.hpp"
#include "dickesq/meanfield.hpp"
#include "dickesq/oracle.hpp"

namespace dickesq {

const char* to_string(Solver s) {
    switch (s) {
    case Solver::Collective: return "collective";
    case Solver::MeanField: return "meanfield";
    case Solver::Cumulant: return "cumulant";
    case Solver::Mcwf: return "mcwf";
    case Solver::Oracle: return "oracle";
    }
    return "?";
}

Solver solver_from_string(const std::string& s) {
    if (s == "collective") return Solver::Collective;
    if (s == "meanfield") return Solver::MeanField;
    if (s == "cumulant") return Solver::Cumulant;
    if (s == "mcwf") return Solver::Mcwf;
    if (s == "oracle") return Solver::Oracle;
    throw ConfigError("unknown solver '" + s + "'");
}

std::vector<double> time_grid(double t_end, int n_steps) {
    if (!(t_end > 0.0) || n_steps < 1) throw ConfigError("time grid needs t_end > 0 and n_steps >= 1");
    std::vector<double> g(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) g[k] = t_end * k / n_steps;
    return g;
}

namespace {

// Copies the physical parameters into `out` in their given form.
void record_params(const Config& cfg, const SystemParams& p, Config& out) {
    out.set("n_atoms", std::to_string(p.n_atoms));
    out.set("chi", format_double(p.chi));
    out.set("gamma_c", format_double(p.gamma_c));
    out.set("gamma_s", format_double(p.gamma_s));
    if (cfg.has("upsilon_ratio")) out.set("upsilon_ratio", format_double(cfg.get_double("upsilon_ratio")));
    else out.set("omega", format_double(p.omega));
}

OdeOptions ode_from(const Config& cfg, OdeOptions base, Config& out) {
    base.rtol = cfg.get_double("rtol", base.rtol);
    base.atol = cfg.get_double("atol", base.atol);
    out.set("rtol", format_double(base.rtol));
    out.set("atol", format_double(base.atol));
    return base;
}

std::vector<SeriesRow> rows_from(const std::vector<double>& grid, const std::vector<CollectiveMoments>& m, int n) {
    std::vector<SeriesRow> rows;
    for (std::size_t k = 0; k < m.size(); ++k) rows.push_back(make_row(grid[k], m[k], n));
    return rows;
}

} // namespace

RunOutput run_evolve(const Config& cfg, std::size_t keep_trajectories) {
    RunOutput out;
    Config& rec = out.record.config;
    const Solver solver = solver_from_string(cfg.get_string("solver"));
    rec.set("solver", to_string(solver));
    const SystemParams p = SystemParams::from_config(cfg);
    out.params = p;
    record_params(cfg, p, rec);
    const double t_end = cfg.get_double("t_end");
    const int n_steps = static_cast<int>(cfg.get_int("n_steps", 200));
    rec.set("t_end", format_double(t_end));
    rec.set("n_steps", std::to_string(n_steps));
    const auto grid = time_grid(t_end, n_steps);
    const std::string init = cfg.get_string("init", "css");
    if (init != "css" && init != "meanfield_ss") throw ConfigError("init must be 'css' or 'meanfield_ss'");
    rec.set("init", init);
    const double theta = cfg.get_double("theta", std::numbers::pi / 2);
    const double phi = cfg.get_double("phi", std::numbers::pi);
    if (init == "css") {
        rec.set("theta", format_double(theta));
        rec.set("phi", format_double(phi));
    } else if (solver != Solver::Cumulant && solver != Solver::MeanField) {
        throw ConfigError("init = meanfield_ss is available for the cumulant and meanfield solvers");
    }
    MeanFieldFallback fallback = MeanFieldFallback::SpinLength;
    if (init == "meanfield_ss") {
        fallback = meanfield_fallback_from_string(cfg.get_string("meanfield_fallback", "spin_length"));
        rec.set("meanfield_fallback", to_string(fallback));
    }
    const double t_min = cfg.get_double("t_min", default_t_min(p.n_atoms, p.gamma_c));
    rec.set("t_min", format_double(t_min));

    switch (solver) {
    case Solver::Collective: {
        const OdeOptions ode = ode_from(cfg, collective_ode_defaults(), rec);
        const auto rho0 = pure_density(coherent_spin_state(SpinSector::maximal(p.n_atoms), theta, phi));
        out.rows = rows_from(grid, evolve_collective(rho0, p, grid, ode), p.n_atoms);
        break;
    }
    case Solver::MeanField: {
        const OdeOptions ode = ode_from(cfg, meanfield_ode_defaults(), rec);
        MeanFieldState s0 = MeanFieldState::from_bloch_angles(theta, phi);
        if (init == "meanfield_ss") {
            const CumulantState c = init_from_meanfield_ss(p, false, fallback);
            s0 = {2.0 * c.sp.real(), 2.0 * c.sp.imag(), c.sz};
        }
        const auto series = evolve_meanfield(s0, p, grid, ode);
        for (std::size_t k = 0; k < series.states.size(); ++k) {
            const auto& s = series.states[k];
            out.rows.push_back(make_row(grid[k], collective_moments_from_cumulants(init_from_bloch(s.sx, s.sy, s.sz), p.n_atoms), p.n_atoms));
        }
        break;
    }
    case Solver::Cumulant: {
        CumulantOptions co;
        co.ode = ode_from(cfg, co.ode, rec);
        co.check_bounds = cfg.get_bool("check_bounds", true);
        rec.set("check_bounds", co.check_bounds ? "true" : "false");
        const CumulantState s0 =
            init == "meanfield_ss" ? init_from_meanfield_ss(p, false, fallback) : init_from_css(theta, phi);
        auto series = evolve_cumulant(s0, p, grid, co);
        out.rows = rows_from(grid, series.moments, p.n_atoms);
        out.cumulants = std::move(series.states);
        break;
    }
    case Solver::Mcwf: {
        EnsembleSpec spec;
        spec.n_traj = static_cast<std::size_t>(cfg.get_int("n_traj", 1000));
        spec.master_seed = cfg.get_uint64("seed", 1);
        spec.block_size = static_cast<std::size_t>(cfg.get_int("block_size", 16));
        spec.options.unraveling = unraveling_from_string(cfg.get_string("unraveling", "standard"));
        spec.options.step_tol = cfg.get_double("step_tol", spec.options.step_tol);
        spec.t_grid = grid;
        spec.keep_trajectories = keep_trajectories;
        rec.set("n_traj", std::to_string(spec.n_traj));
        rec.set("seed", std::to_string(spec.master_seed));
        rec.set("block_size", std::to_string(spec.block_size));
        rec.set("unraveling", to_string(spec.options.unraveling));
        rec.set("step_tol", format_double(spec.options.step_tol));
        const auto psi0 = coherent_spin_state(SpinSector::maximal(p.n_atoms), theta, phi);
        out.ensemble = run_ensemble(spec, p, psi0);
        for (const auto& pt : out.ensemble.points) {
            SeriesRow r{pt.t, pt.moments, pt.xi2, pt.n_eff, true, pt.errors, pt.xi2_se, pt.n_eff_se};
            out.rows.push_back(r);
        }
        break;
    }
    case Solver::Oracle: {
        const OdeOptions ode = ode_from(cfg, oracle_ode_defaults(), rec);
        const auto series = brute_force_oracle(oracle_product_state(p.n_atoms, theta, phi), p, grid, ode);
        for (const auto& s : series) out.rows.push_back(make_row(s.t, s.moments, p.n_atoms));
        break;
    }
    }

    std::vector<double> ts, xs;
    for (const auto& r : out.rows) {
        ts.push_back(r.t);
        xs.push_back(r.xi2);
    }
    try {
        out.min_squeezing = min_transient_squeezing(ts, xs, t_min);
    } catch (const InvalidParams&) {
    }
    out.record.metadata.emplace_back("code_version", kCodeVersion);
    return out;
}

TrajectorySummary analyze_trajectory(const TrajectoryRecord& rec, const SystemParams& p, std::size_t window,
                                     double t_min) {
    std::vector<double> t, xi2, ne;
    for (const auto& s : rec.samples) {
        const auto row = make_row(s.t, moments_from_expectations(s.expect), p.n_atoms);
        t.push_back(s.t);
        xi2.push_back(row.xi2);
        ne.push_back(n_eff(0.25 * s.two_j * (s.two_j + 2)));
    }
    TrajectorySummary out{rec.index, detect_crossing(t, ne, n_critical(p)), detect_change_point(t, xi2, window, t_min),
                          std::nullopt};
    try {
        out.min_squeezing = min_transient_squeezing(t, xi2, t_min);
    } catch (const InvalidParams&) {
    }
    return out;
}

namespace {

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : "nan"; }

} // namespace

TrajOutput run_traj(const Config& cfg) {
    Config c = cfg;
    c.set("solver", "mcwf");
    const std::size_t keep = static_cast<std::size_t>(cfg.get_int("n_traj", 1000));
    const std::size_t window = static_cast<std::size_t>(cfg.get_int("change_window", 1));
    c.erase("change_window");
    RunOutput run = run_evolve(c, keep);
    cfg.absorb_usage(c);
    TrajOutput out;
    out.record = run.record;
    out.record.config.set("change_window", std::to_string(window));
    const SystemParams& p = run.params;
    const double t_min = out.record.config.get_double("t_min");
    out.sample_columns = {"traj", "t", "two_j", "Jx", "Jy", "Jz", "J2", "xi2", "n_eff", "upsilon_eff"};
    out.jump_columns = {"traj", "t_jump", "channel", "two_j_before", "two_j_after"};
    out.summary_columns = {"traj", "t_cross", "t_change", "change_score", "xi2_min", "t_at_min"};
    for (const auto& rec : run.ensemble.trajectories) {
        for (const auto& s : rec.samples) {
            const auto row = make_row(s.t, moments_from_expectations(s.expect), p.n_atoms);
            const double ne = n_eff(0.25 * s.two_j * (s.two_j + 2));
            out.samples.push_back({std::to_string(rec.index), format_double(s.t), std::to_string(s.two_j),
                                   format_double(row.moments.mean(0)), format_double(row.moments.mean(1)),
                                   format_double(row.moments.mean(2)), format_double(row.moments.j2),
                                   format_double(row.xi2), format_double(ne),
                                   format_double(ne > 1e-12 ? upsilon_eff(p.omega, ne) : NAN)});
        }
        for (const auto& j : rec.jumps)
            out.jumps.push_back({std::to_string(rec.index), format_double(j.t),
                                 j.channel == JumpChannel::Collective ? "collective" : "single",
                                 std::to_string(j.two_j_before), std::to_string(j.two_j_after)});
        const auto sum = analyze_trajectory(rec, p, window, t_min);
        out.summary.push_back({std::to_string(rec.index), opt_str(sum.t_cross),
                               sum.change ? format_double(sum.change->t) : "nan",
                               sum.change ? format_double(sum.change->score) : "nan",
                               sum.min_squeezing ? format_double(sum.min_squeezing->xi2_min) : "nan",
                               sum.min_squeezing ? format_double(sum.min_squeezing->t_at_min) : "nan"});
    }
    return out;
}

SteadyOutput run_steady(const Config& cfg) {
    SteadyOutput out;
    Config& rec = out.record.config;
    const Solver solver = solver_from_string(cfg.get_string("solver"));
    rec.set("solver", to_string(solver));
    if (solver == Solver::Collective) {
        const SystemParams p = SystemParams::from_config(cfg);
        record_params(cfg, p, rec);
        SteadyOptions so;
        so.method = steady_method_from_string(cfg.get_string("steady_method", "auto"));
        so.t_max = cfg.get_double("t_max", so.t_max);
        so.residual_tol = cfg.get_double("residual_tol", so.residual_tol);
        rec.set("steady_method", to_string(so.method));
        rec.set("t_max", format_double(so.t_max));
        rec.set("residual_tol", format_double(so.residual_tol));
        const SteadyResult res = steady_state_collective(p, so);
        const auto row = make_row(NAN, moments_of_density(res.state), p.n_atoms);
        const auto& m = row.moments;
        out.columns = {"method", "residual", "Jx", "Jy", "Jz", "Jxx", "Jyy", "Jzz", "Jxy", "Jxz", "Jyz",
                       "J2", "xi2", "xi2_db", "n_eff"};
        out.rows.push_back({to_string(res.method), format_double(res.residual), format_double(m.mean(0)),
                            format_double(m.mean(1)), format_double(m.mean(2)), format_double(m.second(0, 0)),
                            format_double(m.second(1, 1)), format_double(m.second(2, 2)),
                            format_double(m.second(0, 1)), format_double(m.second(0, 2)),
                            format_double(m.second(1, 2)), format_double(m.j2), format_double(row.xi2),
                            format_double(row.xi2 > 0 ? squeezing_db(row.xi2) : NAN), format_double(row.n_eff)});
    } else if (solver == Solver::MeanField) {
        std::vector<double> ratios;
        SystemParams base;
        if (cfg.has("upsilon_values")) {
            ratios = parse_number_list(cfg.get_string("upsilon_values"));
            Config c = cfg;
            c.erase("upsilon_values");
            c.erase("omega");
            c.set("upsilon_ratio", "0");
            base = SystemParams::from_config(c);
            rec.set("upsilon_values", cfg.get_string("upsilon_values"));
            record_params(c, base, rec);
            cfg.absorb_usage(c);
            rec.erase("upsilon_ratio");
        } else {
            base = SystemParams::from_config(cfg);
            record_params(cfg, base, rec);
            ratios.push_back(upsilon_ratio(base));
        }
        out.columns = {"upsilon_ratio", "branch", "r", "phi", "z", "sx", "sy", "sz",
                       "stable", "marginal", "leading_re", "residual", "exact"};
        for (double x : ratios) {
            SystemParams p = base;
            if (cfg.has("upsilon_values"))
                p = SystemParams::from_upsilon_ratio(base.n_atoms, base.chi, base.gamma_s, x, base.gamma_c);
            for (const auto& fp : mf_steady_state(p)) {
                const double lead = fp.eigenvalues.empty() ? NAN : fp.eigenvalues.front().real();
                out.rows.push_back({format_double(x), to_string(fp.branch), format_double(fp.state.r()),
                                    format_double(fp.state.phi()), format_double(fp.state.sz),
                                    format_double(fp.state.sx), format_double(fp.state.sy),
                                    format_double(fp.state.sz), fp.stable ? "1" : "0", fp.marginal ? "1" : "0",
                                    format_double(lead), format_double(fp.residual), fp.exact ? "1" : "0"});
            }
        }
    } else {
        throw ConfigError("steady supports solver = collective or meanfield");
    }
    out.record.metadata.emplace_back("code_version", kCodeVersion);
    return out;
}

} // namespace dickesq
