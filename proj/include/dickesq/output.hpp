// CSV emission. Every file starts with a "# key = value" header that is a
// complete, re-runnable configuration; "# @ key = value" lines carry run
// metadata (timing, version) and are not part of it.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dickesq/config.hpp"
#include "dickesq/dicke.hpp"
#include "dickesq/mcwf.hpp"

namespace dickesq {

extern const char* const kCodeVersion;

std::string format_double(double v);

struct RunRecord {
    Config config;  // resolved: every key that influences the output
    std::vector<std::pair<std::string, std::string>> metadata;
};

void write_record_header(std::ostream& os, const RunRecord& rec);

struct SeriesRow {
    double t;
    CollectiveMoments moments;
    double xi2;    // NaN when undefined
    double n_eff;
    bool has_errors{false};
    MomentErrors errors;
    double xi2_se{0.0};
    double n_eff_se{0.0};
};

SeriesRow make_row(double t, const CollectiveMoments& m, int n_atoms);

std::vector<std::string> series_columns(bool with_errors);
void write_series(std::ostream& os, const RunRecord& rec, const std::vector<SeriesRow>& rows);

// Generic table with a record header.
void write_table(std::ostream& os, const RunRecord& rec, const std::vector<std::string>& columns,
                 const std::vector<std::vector<std::string>>& rows);

} // namespace dickesq
