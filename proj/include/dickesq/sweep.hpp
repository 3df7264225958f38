// Grid sweeps over one or two parameters.
//
// Keys: axis1, values1 and optionally axis2, values2 (values as a list or
// linspace(a, b, n)); every other key is forwarded to each point's evolve run.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dickesq/analysis.hpp"
#include "dickesq/config.hpp"
#include "dickesq/output.hpp"

namespace dickesq {

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct SweepSpec {
    Config base;
    std::vector<SweepAxis> axes;

    static SweepSpec from_config(const Config& cfg);
    Config point_config(const std::vector<double>& values) const;
};

struct SweepPoint {
    std::vector<double> axis_values;
    double upsilon_ratio{0.0};
    bool ok{false};
    std::string error;
    std::optional<MinSqueezing> min_squeezing;
    double xi2_min_se{0.0};
    std::optional<SeriesRow> final_row;
};

struct SweepResult {
    RunRecord record;
    std::vector<SweepPoint> points;  // grid order, axis1 outermost

    std::vector<std::string> columns() const;
    std::vector<std::vector<std::string>> table() const;
};

// Points run concurrently on `workers` threads (0: DICKESQ_WORKERS or all
// cores). A failing point is recorded in its row and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, unsigned workers = 0);

} // namespace dickesq
