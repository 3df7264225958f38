#include "dickesq/output.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace dickesq {

const char* const kCodeVersion = "0.1.0";

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_record_header(std::ostream& os, const RunRecord& rec) {
    for (const auto& [k, v] : rec.config.entries()) os << "# " << k << " = " << v << "\n";
    for (const auto& [k, v] : rec.metadata) os << "# @ " << k << " = " << v << "\n";
}

SeriesRow make_row(double t, const CollectiveMoments& m, int n_atoms) {
    double xi2 = std::numeric_limits<double>::quiet_NaN();
    if (m.mean.norm() > bloch_epsilon(n_atoms)) xi2 = squeezing_parameter(m, n_atoms);
    SeriesRow row;
    row.t = t;
    row.moments = m;
    row.xi2 = xi2;
    row.n_eff = n_eff(std::max(0.0, m.j2));
    return row;
}

std::vector<std::string> series_columns(bool with_errors) {
    std::vector<std::string> c{"t", "Jx", "Jy", "Jz", "Jxx", "Jyy", "Jzz", "Jxy", "Jxz", "Jyz",
                               "J2", "xi2", "xi2_db", "n_eff"};
    if (with_errors)
        for (const char* s : {"se_Jx", "se_Jy", "se_Jz", "se_Jxx", "se_Jyy", "se_Jzz", "se_Jxy", "se_Jxz",
                              "se_Jyz", "se_J2", "se_xi2", "se_n_eff"})
            c.push_back(s);
    return c;
}

void write_series(std::ostream& os, const RunRecord& rec, const std::vector<SeriesRow>& rows) {
    const bool with_errors = !rows.empty() && rows.front().has_errors;
    write_record_header(os, rec);
    const auto cols = series_columns(with_errors);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : rows) {
        const auto& m = r.moments;
        const double db = r.xi2 > 0.0 ? squeezing_db(r.xi2) : std::numeric_limits<double>::quiet_NaN();
        const double vals[] = {r.t, m.mean(0), m.mean(1), m.mean(2), m.second(0, 0), m.second(1, 1),
                               m.second(2, 2), m.second(0, 1), m.second(0, 2), m.second(1, 2), m.j2,
                               r.xi2, db, r.n_eff};
        bool first = true;
        for (double v : vals) {
            os << (first ? "" : ",") << format_double(v);
            first = false;
        }
        if (with_errors) {
            const auto& e = r.errors;
            const double se[] = {e.mean(0), e.mean(1), e.mean(2), e.second(0, 0), e.second(1, 1),
                                 e.second(2, 2), e.second(0, 1), e.second(0, 2), e.second(1, 2), e.j2,
                                 r.xi2_se, r.n_eff_se};
            for (double v : se) os << "," << format_double(v);
        }
        os << "\n";
    }
}

void write_table(std::ostream& os, const RunRecord& rec, const std::vector<std::string>& columns,
                 const std::vector<std::vector<std::string>>& rows) {
    write_record_header(os, rec);
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

} // namespace dickesq
