// Brute-force master equation on the full 2^N space, N <= 8. No symmetry is
// assumed; used to certify the other solvers.

#pragma once

#include <Eigen/Dense>

#include <vector>

#include "dickesq/cumulant.hpp"
#include "dickesq/dicke.hpp"
#include "dickesq/ode.hpp"
#include "dickesq/params.hpp"

namespace dickesq {

constexpr int kOracleMaxAtoms = 8;

struct OracleDensity {
    int n_atoms{1};
    Eigen::MatrixXcd rho;  // bit k of the basis index set = spin k up
};

// Every spin in cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
OracleDensity oracle_product_state(int n_atoms, double theta, double phi);

Eigen::MatrixXcd oracle_rhs(const OracleDensity& rho, const SystemParams& p);

LadderExpectations oracle_expectations(const OracleDensity& rho);

// Single and pair moments of spins 0 and 1.
CumulantStateC oracle_cumulants(const OracleDensity& rho);

struct OracleSample {
    double t;
    CollectiveMoments moments;
    CumulantStateC cumulants;
};

OdeOptions oracle_ode_defaults();

std::vector<OracleSample> brute_force_oracle(const OracleDensity& rho0, const SystemParams& p,
                                             const std::vector<double>& t_grid,
                                             const OdeOptions& opt = oracle_ode_defaults(),
                                             OracleDensity* final_state = nullptr);

} // namespace dickesq
