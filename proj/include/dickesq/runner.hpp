// Config-driven runs shared by the CLI, the sweep driver and the tests.
//
// Keys for an evolve run:
//   solver        collective | meanfield | cumulant | mcwf | oracle
//   n_atoms, chi, gamma_c, gamma_s, omega | upsilon_ratio
//   t_end         final time (required), n_steps output intervals (200)
//   init          css (default) | meanfield_ss
//   meanfield_fallback  spin_length (default) | equatorial, for meanfield_ss
//   theta, phi    Bloch angles of the initial coherent state (pi/2, pi)
//   rtol, atol    integrator tolerances (solver defaults)
//   t_min         lower cut for the minimum-squeezing summary (6/N)
//   mcwf only:    n_traj (1000), seed (1), unraveling (standard),
//                 block_size (16), step_tol (1e-8)

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dickesq/analysis.hpp"
#include "dickesq/config.hpp"
#include "dickesq/cumulant.hpp"
#include "dickesq/mcwf.hpp"
#include "dickesq/output.hpp"
#include "dickesq/params.hpp"

namespace dickesq {

enum class Solver { Collective, MeanField, Cumulant, Mcwf, Oracle };

const char* to_string(Solver s);
Solver solver_from_string(const std::string& s);

std::vector<double> time_grid(double t_end, int n_steps);

struct RunOutput {
    RunRecord record;
    SystemParams params;
    std::vector<SeriesRow> rows;
    std::vector<CumulantState> cumulants;  // cumulant solver only
    EnsembleResult ensemble;               // mcwf only (points mirror rows)
    std::optional<MinSqueezing> min_squeezing;
};

// Runs one time series. `keep_trajectories` requests per-trajectory records
// from the mcwf solver.
RunOutput run_evolve(const Config& cfg, std::size_t keep_trajectories = 0);

struct TrajectorySummary {
    std::size_t index;
    std::optional<double> t_cross;  // Upsilon_eff = Upsilon_c
    std::optional<ChangePoint> change;
    std::optional<MinSqueezing> min_squeezing;
};

TrajectorySummary analyze_trajectory(const TrajectoryRecord& rec, const SystemParams& p,
                                     std::size_t window, double t_min);

// Per-trajectory rows, jump log and summary table for the traj subcommand.
struct TrajOutput {
    RunRecord record;
    std::vector<std::string> sample_columns, jump_columns, summary_columns;
    std::vector<std::vector<std::string>> samples, jumps, summary;
};

TrajOutput run_traj(const Config& cfg);

struct SteadyOutput {
    RunRecord record;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// solver = collective (keys: steady_method, t_max) or meanfield (optional
// upsilon_values list, one table row per fixed point and drive value).
SteadyOutput run_steady(const Config& cfg);

} // namespace dickesq
