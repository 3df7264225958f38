// Mean-field (product-state) dynamics and fixed points.
//
// State is Cartesian: sx = <sigma_x>, sy = <sigma_y>, sz = <sigma_z>, so
// <sigma+> = (sx + i sy)/2 = r e^{i phi}.

#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "dickesq/ode.hpp"
#include "dickesq/params.hpp"

namespace dickesq {

struct MeanFieldState {
    double sx{0.0};
    double sy{0.0};
    double sz{-1.0};

    double r() const;
    double phi() const;
    double norm2() const { return sx * sx + sy * sy + sz * sz; }

    static MeanFieldState from_polar(double r, double phi, double z);
    static MeanFieldState from_bloch_angles(double theta, double phi);
};

MeanFieldState mf_rhs(const MeanFieldState& s, const SystemParams& p);

using Matrix3 = std::array<std::array<double, 3>, 3>;
Matrix3 mf_jacobian(const MeanFieldState& s, const SystemParams& p);

enum class Branch {
    Trivial,      // down-polarized point at zero drive
    Lower,        // z = -1/2 - sqrt(1 - 8 r^2)/2
    Upper,        // z = -1/2 + sqrt(1 - 8 r^2)/2
    Normal,       // finite-N root near r = 0, z = 0; or a z = 0 placeholder when no root is found
};

const char* to_string(Branch b);

struct FixedPoint {
    MeanFieldState state;
    Branch branch{Branch::Trivial};
    bool exact{true};     // false for the placeholder, which is not a root of mf_rhs
    bool stable{false};
    bool marginal{false};
    std::vector<std::complex<double>> eigenvalues;
    double residual{0.0};  // max-norm of mf_rhs at the point
};

// Classifies using the analytic Jacobian. Stable iff every real part is below
// -1e-10; real parts within 1e-10 of zero are flagged marginal.
FixedPoint mf_stability(FixedPoint fp, const SystemParams& p);

// Steady-state root function on branch `b` (Lower or Upper); zero at a fixed point.
double mf_root_function(double r, Branch b, const SystemParams& p);

// Superradiant roots on both z-branches, or the trivial point when Omega = 0.
// When no superradiant root exists a single Normal placeholder is returned.
std::vector<FixedPoint> mf_steady_state(const SystemParams& p);

// The stable superradiant fixed point, if any.
const FixedPoint* stable_superradiant(const std::vector<FixedPoint>& fps);

struct MeanFieldSeries {
    std::vector<MeanFieldState> states;
    std::size_t norm_violations{0};  // output times with |s|^2 > 1 + 1e-9
    double max_norm2{0.0};
};

OdeOptions meanfield_ode_defaults();

MeanFieldSeries evolve_meanfield(const MeanFieldState& s0, const SystemParams& p,
                                 const std::vector<double>& t_grid,
                                 const OdeOptions& opt = meanfield_ode_defaults());

} // namespace dickesq
