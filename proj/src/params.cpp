#include "dickesq/params.hpp"

#include <cmath>
#include <string>

#include "dickesq/config.hpp"
#include "dickesq/error.hpp"

namespace dickesq {

void SystemParams::validate() const {
    if (n_atoms < 1) throw InvalidParams("n_atoms must be >= 1");
    if (!(gamma_c > 0.0)) throw InvalidParams("gamma_c must be > 0");
    if (!(chi >= 0.0)) throw InvalidParams("chi must be >= 0");
    if (!(gamma_s >= 0.0)) throw InvalidParams("gamma_s must be >= 0");
    if (!(omega >= 0.0)) throw InvalidParams("omega must be >= 0");
    if (!std::isfinite(chi) || !std::isfinite(gamma_c) || !std::isfinite(gamma_s) ||
        !std::isfinite(omega))
        throw InvalidParams("rates must be finite");
}

SystemParams SystemParams::from_upsilon_ratio(int n_atoms, double chi, double gamma_s,
                                              double ratio, double gamma_c) {
    SystemParams p;
    p.n_atoms = n_atoms;
    p.chi = chi;
    p.gamma_s = gamma_s;
    p.gamma_c = gamma_c;
    p.omega = 0.5 * n_atoms * ratio * std::sqrt(gamma_c * gamma_c + 4.0 * chi * chi);
    p.validate();
    return p;
}

SystemParams SystemParams::from_config(const Config& cfg) {
    if (cfg.has("omega") && cfg.has("upsilon_ratio"))
        throw ConfigError("config sets both 'omega' and 'upsilon_ratio'");
    const int n = static_cast<int>(cfg.get_int("n_atoms"));
    const double chi = cfg.get_double("chi", 0.0);
    const double gamma_c = cfg.get_double("gamma_c", 1.0);
    const double gamma_s = cfg.get_double("gamma_s", 0.0);
    if (cfg.has("upsilon_ratio"))
        return from_upsilon_ratio(n, chi, gamma_s, cfg.get_double("upsilon_ratio"), gamma_c);
    SystemParams p;
    p.n_atoms = n;
    p.chi = chi;
    p.gamma_c = gamma_c;
    p.gamma_s = gamma_s;
    p.omega = cfg.get_double("omega", 0.0);
    p.validate();
    return p;
}

double upsilon(const SystemParams& p) { return 2.0 * p.omega / p.n_atoms; }

double critical_upsilon(const SystemParams& p) {
    return std::sqrt(p.gamma_c * p.gamma_c + 4.0 * p.chi * p.chi);
}

double critical_upsilon_prime(const SystemParams& p) {
    return critical_upsilon(p) / std::sqrt(2.0);
}

double upsilon_ratio(const SystemParams& p) { return upsilon(p) / critical_upsilon(p); }

double n_critical(const SystemParams& p) { return 2.0 * p.omega / critical_upsilon(p); }

CavityRates cavity_map(const CavityParams& c) {
    if (!(c.kappa > 0.0)) throw InvalidParams("kappa must be > 0");
    const double denom = 4.0 * c.delta_c * c.delta_c + c.kappa * c.kappa;
    const double g2 = 4.0 * c.g * c.g;
    return {g2 * c.delta_c / denom, g2 * c.kappa / denom};
}

} // namespace dickesq
