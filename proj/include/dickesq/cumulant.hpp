// Second-order cumulant closure for permutation-symmetric ensembles.
//
// Pair moments always refer to two distinct particles a != b.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "dickesq/dicke.hpp"
#include "dickesq/ode.hpp"
#include "dickesq/params.hpp"

namespace dickesq {

struct CumulantState {
    cplx sp{0.0};   // <s+>
    double sz{-1};  // <sz>
    cplx zp{0.0};   // <sz_a s+_b>
    double pm{0};   // <s+_a s-_b>
    double zz{1};   // <sz_a sz_b>
    cplx pp{0.0};   // <s+_a s+_b>
};

// Same moments with pm and zz kept complex, for Hermiticity diagnostics.
struct CumulantStateC {
    cplx sp{0.0}, sz{-1.0}, zp{0.0}, pm{0.0}, zz{1.0}, pp{0.0};
};

enum class PauliOp { Plus, Minus, Z };

// <ABC> over three distinct particles from pair and single moments.
cplx factor_third_order(cplx ab, cplx bc, cplx ac, cplx a, cplx b, cplx c);

CumulantStateC cumulant_rhs(const CumulantStateC& s, const SystemParams& p);
CumulantState cumulant_rhs(const CumulantState& s, const SystemParams& p);

CumulantState init_from_css(double theta, double phi);

// Product state whose single-spin Bloch vector is (sx, sy, sz).
CumulantState init_from_bloch(double sx, double sy, double sz);

// Where no stable superradiant root exists below the critical drive, the
// large-N fixed point r = x/2, sin(phi) = Gamma/Upsilon_c is used with either
// z = -sqrt(1 - x^2) (spin length kept at 1) or z = 0.
enum class MeanFieldFallback { SpinLength, Equatorial };

const char* to_string(MeanFieldFallback f);
MeanFieldFallback meanfield_fallback_from_string(const std::string& s);

// Product state built from the gamma_s = 0 mean-field steady state. Uses the
// stable superradiant root where one exists, the fallback above, and the
// unpolarized state at or above the critical drive. With `strict`, throws
// NoStableFixedPoint instead of falling back.
CumulantState init_from_meanfield_ss(const SystemParams& p, bool strict = false,
                                     MeanFieldFallback fallback = MeanFieldFallback::SpinLength);

LadderExpectations ladder_from_cumulants(const CumulantState& s, int n_atoms);
CollectiveMoments collective_moments_from_cumulants(const CumulantState& s, int n_atoms);

// Non-empty description when a bound from the state-space invariants fails.
std::string cumulant_bound_violation(const CumulantState& s, double slack = 1e-9);

struct CumulantOptions {
    OdeOptions ode{1e-10, 1e-13};
    bool check_bounds{true};
    bool shadow_complex{false};  // integrate pm, zz as complex and record drift
};

struct CumulantSeries {
    std::vector<CumulantState> states;
    std::vector<CollectiveMoments> moments;
    double max_imag_pm{0.0};  // shadow mode only
    double max_imag_zz{0.0};
};

// Integrates from t = 0. Throws InvariantBreach at the first output time
// where a bound fails (when check_bounds is set).
CumulantSeries evolve_cumulant(const CumulantState& s0, const SystemParams& p,
                               const std::vector<double>& t_grid, const CumulantOptions& opt = {});

} // namespace dickesq
