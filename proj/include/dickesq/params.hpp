// Physical parameters, critical drive values and the cavity mapping.

#pragma once

#include <utility>

namespace dickesq {

class Config;

// Rates are in units where gamma_c (collective emission) is the natural scale;
// the canonical choice is gamma_c = 1, so times are in units of 1/gamma_c.
struct SystemParams {
    int n_atoms{1};
    double chi{0.0};      // exchange interaction
    double gamma_c{1.0};  // collective emission
    double gamma_s{0.0};  // single-particle spontaneous emission
    double omega{0.0};    // Rabi drive

    // Throws InvalidParams when an invariant is violated.
    void validate() const;

    // Omega = (N/2) * ratio * sqrt(gamma_c^2 + 4 chi^2).
    static SystemParams from_upsilon_ratio(int n_atoms, double chi, double gamma_s,
                                           double upsilon_ratio, double gamma_c = 1.0);

    // Reads n_atoms, chi, gamma_c, gamma_s and exactly one of omega / upsilon_ratio.
    static SystemParams from_config(const Config& cfg);
};

struct CavityParams {
    double g{0.0};        // half the single-photon Rabi frequency
    double kappa{1.0};    // cavity linewidth
    double delta_c{0.0};  // cavity detuning
};

double upsilon(const SystemParams& p);
double critical_upsilon(const SystemParams& p);
double critical_upsilon_prime(const SystemParams& p);
double upsilon_ratio(const SystemParams& p);

// Effective atom number at which 2*Omega/N_eff equals the critical drive.
double n_critical(const SystemParams& p);

struct CavityRates {
    double chi;
    double gamma_c;
};

// Adiabatic elimination of the cavity mode in the bad-cavity limit.
CavityRates cavity_map(const CavityParams& c);

} // namespace dickesq
