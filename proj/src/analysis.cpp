#include "dickesq/analysis.hpp"

#include <cmath>

#include "dickesq/error.hpp"

namespace dickesq {

MinSqueezing min_transient_squeezing(const std::vector<double>& t, const std::vector<double>& xi2,
                                     double t_min) {
    if (t.size() != xi2.size()) throw InvalidParams("min_transient_squeezing: length mismatch");
    bool found = false;
    MinSqueezing best{0.0, 0.0, 0};
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_min || std::isnan(xi2[k])) continue;
        if (!found || xi2[k] < best.xi2_min) best = {xi2[k], t[k], k};
        found = true;
    }
    if (!found) throw InvalidParams("min_transient_squeezing: series too short for t_min");
    return best;
}

std::optional<double> detect_crossing(const std::vector<double>& t, const std::vector<double>& n_eff,
                                      double n_c) {
    if (t.size() != n_eff.size()) throw InvalidParams("detect_crossing: length mismatch");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(n_eff[k] <= n_c)) continue;
        if (k == 0) return t[0];
        const double f = (n_eff[k - 1] - n_c) / (n_eff[k - 1] - n_eff[k]);
        return t[k - 1] + f * (t[k] - t[k - 1]);
    }
    return std::nullopt;
}

std::optional<ChangePoint> detect_change_point(const std::vector<double>& t, const std::vector<double>& xi2,
                                               std::size_t window, double t_min) {
    if (t.size() != xi2.size()) throw InvalidParams("detect_change_point: length mismatch");
    if (window < 1) throw InvalidParams("detect_change_point: window must be >= 1");
    std::optional<ChangePoint> best;
    for (std::size_t k = window; k + window < t.size(); ++k) {
        if (t[k] < t_min) continue;
        const double a = xi2[k - window], b = xi2[k], c = xi2[k + window];
        if (!(a > 0.0 && b > 0.0 && c > 0.0)) continue;
        const double d2 = std::log(c) - 2.0 * std::log(b) + std::log(a);
        if (!best || d2 > best->score) best = ChangePoint{t[k], k, d2};
    }
    return best;
}

double default_t_min(int n_atoms, double gamma_c) { return 6.0 / (n_atoms * gamma_c); }

} // namespace dickesq
