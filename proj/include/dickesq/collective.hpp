// Exact dynamics of the collective (gamma_s = 0) model in the maximal sector.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "dickesq/dicke.hpp"
#include "dickesq/ode.hpp"
#include "dickesq/params.hpp"

namespace dickesq {

struct CollectiveDensity {
    SpinSector sector;
    Eigen::MatrixXcd rho;
};

CollectiveDensity pure_density(const DickeVector& psi);

// -i[H, rho] + gamma_c D[J-] rho, O(N^2) per call.
// Throws NonCollectiveParams when gamma_s != 0.
Eigen::MatrixXcd collective_rhs(const Eigen::MatrixXcd& rho, const SystemParams& p);

// Frobenius norm of collective_rhs.
double collective_residual(const CollectiveDensity& rho, const SystemParams& p);

LadderExpectations density_expectations(const CollectiveDensity& rho);
CollectiveMoments moments_of_density(const CollectiveDensity& rho);

struct DensityDiagnostics {
    double hermiticity;  // max |rho - rho^dagger|
    double trace_error;  // |tr rho - 1|
    double min_eigenvalue;
};

DensityDiagnostics diagnose_density(const CollectiveDensity& rho);

OdeOptions collective_ode_defaults();

// Integrates from t = 0 and returns the moments at each grid time. When
// `final_state` is given it receives the density at the last grid time.
std::vector<CollectiveMoments> evolve_collective(const CollectiveDensity& rho0,
                                                 const SystemParams& p,
                                                 const std::vector<double>& t_grid,
                                                 const OdeOptions& opt = collective_ode_defaults(),
                                                 CollectiveDensity* final_state = nullptr);

enum class SteadyMethod { Auto, Dense, Direct, Integrate };

const char* to_string(SteadyMethod m);
SteadyMethod steady_method_from_string(const std::string& s);

struct SteadyOptions {
    SteadyMethod method{SteadyMethod::Auto};
    double residual_tol{1e-10};
    double t_max{1e4};           // Integrate only
    double check_interval{1.0};  // Integrate only
    int dense_max_n{40};
    int direct_max_n{600};  // above this Auto falls back to Integrate (memory ~ N^3/3 complex)
    std::optional<CollectiveDensity> initial;  // Integrate only; -x CSS when empty
};

struct SteadyResult {
    CollectiveDensity state;
    double residual{0.0};
    SteadyMethod method{SteadyMethod::Auto};
    double t_reached{0.0};
};

// Throws NonConvergence (carrying the residual) if the tolerance is missed.
SteadyResult steady_state_collective(const SystemParams& p, const SteadyOptions& opt = {});

} // namespace dickesq
