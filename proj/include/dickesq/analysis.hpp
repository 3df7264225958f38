// Post-processing of xi^2(t) and N_eff(t) series.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace dickesq {

struct MinSqueezing {
    double xi2_min;
    double t_at_min;
    std::size_t index;
};

// Minimum of xi2 over samples with t >= t_min; NaN samples are skipped.
// Throws InvalidParams when no usable sample remains.
MinSqueezing min_transient_squeezing(const std::vector<double>& t, const std::vector<double>& xi2,
                                     double t_min);

// Earliest time with n_eff <= n_c, linearly interpolated between samples.
std::optional<double> detect_crossing(const std::vector<double>& t, const std::vector<double>& n_eff,
                                      double n_c);

struct ChangePoint {
    double t;
    std::size_t index;
    double score;  // second difference of log xi2 at the change point
};

// Sample maximizing log xi2[k+w] - 2 log xi2[k] + log xi2[k-w] over t[k] >= t_min.
std::optional<ChangePoint> detect_change_point(const std::vector<double>& t, const std::vector<double>& xi2,
                                               std::size_t window = 1, double t_min = 0.0);

// Default lower cut for minimum-squeezing searches, 6/N in units of 1/gamma_c.
double default_t_min(int n_atoms, double gamma_c = 1.0);

} // namespace dickesq
