// Cross-solver certification against the brute-force oracle at small N.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dickesq {

struct CertifyOptions {
    std::vector<int> n_values{2, 4, 6};
    std::vector<double> upsilon_ratios{0.5, 0.9};
    std::vector<double> gamma_s_values{0.0, 2.0};
    double chi{1.0};
    std::size_t n_traj{20000};
    std::uint64_t seed{20240611};
    std::vector<double> mcwf_checkpoints{1.0};
    double cumulant_t_end{1.0};
    int cumulant_steps{20};
    double collective_tol{1e-8};
    double cumulant_tol{5e-2};
    double sigma_factor{3.0};
};

struct CertifyCheck {
    std::string solver;
    int n_atoms;
    double upsilon_ratio;
    double gamma_s;
    bool pass;
    double metric;     // worst deviation (absolute, or in standard errors for mcwf)
    double tolerance;
    std::string detail;
};

std::vector<CertifyCheck> run_certification(const CertifyOptions& opt);

// Prints one line per check; returns true when all pass.
bool print_certification(std::ostream& os, const std::vector<CertifyCheck>& checks);

} // namespace dickesq
