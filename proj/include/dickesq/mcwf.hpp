// Permutation-symmetric quantum trajectories. Each trajectory lives in one
// total-spin sector; single-particle emission moves it between sectors.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "dickesq/dicke.hpp"
#include "dickesq/params.hpp"
#include "dickesq/rng.hpp"
#include "dickesq/tridiagonal.hpp"

namespace dickesq {

// Standard: collective jump operator sqrt(gamma_c) J-.
// Displaced: sqrt(gamma_c) (J- - <J->), re-centred at every step start. Both
// unravel the same master equation; the displaced one has far fewer collective
// jumps at large N.
enum class Unraveling { Standard, Displaced };

const char* to_string(Unraveling u);
Unraveling unraveling_from_string(const std::string& s);

// H - (i/2)[gamma_c (J+J- - 2 b* J- + |b|^2) + gamma_s (N/2 + Jz)] in sector s.
// b = 0 gives the standard effective Hamiltonian.
Tridiagonal effective_hamiltonian(const SpinSector& s, const SystemParams& p, cplx b = 0.0);

Eigen::VectorXcd effective_hamiltonian_apply(const DickeVector& psi, const SystemParams& p);

// Weight factor of the local lowering channel between sectors J -> J' of
// N spins-1/2 (degeneracy ratio times reduced matrix element).
double sector_factor(int n_atoms, int two_j, int two_j_after);

// Squared Clebsch-Gordan coefficient for sigma- mapping |J, m> into sector J'.
double cg_squared(int two_j, int two_m, int two_j_after);

struct SectorBranch {
    int two_j_after;
    double weight;         // contribution to <sum_i s+_i s-_i>, normalized input
    Eigen::VectorXcd amp;  // unnormalized post-jump amplitudes in sector J'
};

// The up to three sector branches of the single-particle channel.
std::vector<SectorBranch> single_particle_branches(const DickeVector& psi);

enum class JumpChannel { Collective, Single };

struct JumpRecord {
    double t;
    JumpChannel channel;
    int two_j_before;
    int two_j_after;
};

struct McwfOptions {
    Unraveling unraveling{Unraveling::Standard};
    double step_tol{1e-8};    // local error per propagation step
    double event_tol{1e-10};  // relative time tolerance of jump localization
    bool log_jumps{false};
};

struct TrajectoryState {
    DickeVector psi;  // unnormalized between jumps
    double t{0.0};
    double threshold{0.0};
    double h{0.0};       // step size carried between calls
    cplx b{0.0};         // displacement in force for the current step
    Ladder ladder;       // of psi.sector
    std::vector<JumpRecord> jump_log;

    explicit TrajectoryState(const DickeVector& psi0);
    void set_sector(const SpinSector& s);
};

// Applies a jump chosen with probability proportional to the channel rates in
// the current state; `u` is uniform on (0, 1). Throws ZeroJumpRate.
void select_and_apply_jump(TrajectoryState& traj, const SystemParams& p, const McwfOptions& opt, double u);

// Propagates under the effective Hamiltonian until the squared norm reaches the
// threshold (returns true) or until t_stop (returns false).
bool evolve_until_jump(TrajectoryState& traj, const SystemParams& p, const McwfOptions& opt, double t_stop);

struct TrajectorySample {
    double t;
    int two_j;
    LadderExpectations expect;
};

// Runs one trajectory from t = 0 through the grid; `observe` sees the
// normalized state at each grid time.
TrajectoryState run_trajectory(const DickeVector& psi0, const SystemParams& p,
                               const std::vector<double>& t_grid, TrajectoryRng& rng,
                               const McwfOptions& opt,
                               const std::function<void(const TrajectorySample&)>& observe);

struct EnsembleSpec {
    std::size_t n_traj{1};
    std::uint64_t master_seed{1};
    std::vector<double> t_grid;
    unsigned workers{0};          // 0: DICKESQ_WORKERS or hardware concurrency
    std::size_t block_size{16};   // reduction unit; fixed so results do not depend on workers
    std::size_t keep_trajectories{0};  // per-trajectory records for the first k indices
    McwfOptions options;
};

// Standard errors of the ten moment entries, same layout as CollectiveMoments.
struct MomentErrors {
    Eigen::Vector3d mean{Eigen::Vector3d::Zero()};
    Eigen::Matrix3d second{Eigen::Matrix3d::Zero()};
    double j2{0.0};
};

struct EnsemblePoint {
    double t;
    CollectiveMoments moments;
    MomentErrors errors;
    double xi2;  // NaN when the Bloch vector vanishes
    double xi2_se;
    double n_eff;
    double n_eff_se;
};

struct TrajectoryRecord {
    std::size_t index;
    std::vector<TrajectorySample> samples;
    std::vector<JumpRecord> jumps;
};

struct EnsembleResult {
    std::vector<EnsemblePoint> points;
    std::vector<TrajectoryRecord> trajectories;
};

unsigned resolve_workers(unsigned requested);

// Throws TrajectoryFailure (with index and master seed) if any trajectory fails.
EnsembleResult run_ensemble(const EnsembleSpec& spec, const SystemParams& p, const DickeVector& psi0);

} // namespace dickesq
