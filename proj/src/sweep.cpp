#include "dickesq/sweep.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "dickesq/error.hpp"
#include "dickesq/mcwf.hpp"
#include "dickesq/runner.hpp"

namespace dickesq {

SweepSpec SweepSpec::from_config(const Config& cfg) {
    SweepSpec s;
    s.base = cfg;
    for (const char* idx : {"1", "2"}) {
        const std::string ak = std::string("axis") + idx, vk = std::string("values") + idx;
        if (!cfg.has(ak)) {
            if (cfg.has(vk)) throw ConfigError("'" + vk + "' given without '" + ak + "'");
            continue;
        }
        SweepAxis a{cfg.get_string(ak), parse_number_list(cfg.get_string(vk))};
        if (a.values.empty()) throw ConfigError("sweep axis '" + a.name + "' has no values");
        for (double v : a.values)
            if (!std::isfinite(v)) throw ConfigError("sweep axis '" + a.name + "' has a non-finite value");
        s.axes.push_back(std::move(a));
        s.base.erase(ak);
        s.base.erase(vk);
    }
    if (s.axes.empty()) throw ConfigError("sweep needs at least 'axis1' and 'values1'");
    return s;
}

Config SweepSpec::point_config(const std::vector<double>& values) const {
    Config c = base;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string& name = axes[i].name;
        if (name == "upsilon_ratio") c.erase("omega");
        if (name == "omega") c.erase("upsilon_ratio");
        c.set(name, name == "n_atoms" || name == "n_traj" ? std::to_string(std::llround(values[i]))
                                                          : format_double(values[i]));
    }
    return c;
}

std::vector<std::string> SweepResult::columns() const {
    std::vector<std::string> c;
    for (const auto& [k, v] : record.config.entries())
        if (k == "axis1" || k == "axis2") c.push_back(v);
    for (const char* s : {"upsilon_ratio_eff", "status", "xi2_min", "xi2_min_db", "t_at_min", "xi2_min_se",
                          "xi2_final", "jz_final_norm", "n_eff_final", "message"})
        c.push_back(s);
    return c;
}

std::vector<std::vector<std::string>> SweepResult::table() const {
    std::vector<std::vector<std::string>> rows;
    const double nan = std::nan("");
    const int n = static_cast<int>(record.config.get_int("n_atoms", 1));
    for (const auto& p : points) {
        std::vector<std::string> r;
        for (double v : p.axis_values) r.push_back(format_double(v));
        r.push_back(format_double(p.upsilon_ratio));
        r.push_back(p.ok ? "ok" : "error");
        const auto& m = p.min_squeezing;
        r.push_back(format_double(m ? m->xi2_min : nan));
        r.push_back(format_double(m && m->xi2_min > 0 ? squeezing_db(m->xi2_min) : nan));
        r.push_back(format_double(m ? m->t_at_min : nan));
        r.push_back(format_double(p.xi2_min_se));
        const auto& f = p.final_row;
        r.push_back(format_double(f ? f->xi2 : nan));
        r.push_back(format_double(f ? f->moments.mean(2) / (0.5 * n) : nan));
        r.push_back(format_double(f ? f->n_eff : nan));
        std::string msg = p.error;
        for (char& ch : msg)
            if (ch == ',' || ch == '\n') ch = ';';
        r.push_back(msg);
        rows.push_back(std::move(r));
    }
    return rows;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned workers) {
    std::vector<std::vector<double>> grid{{}};
    for (const auto& axis : spec.axes) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : grid)
            for (double v : axis.values) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        grid.swap(next);
    }
    SweepResult res;
    res.record.config = spec.base;
    for (std::size_t i = 0; i < spec.axes.size(); ++i) {
        std::string vals;
        for (double v : spec.axes[i].values) vals += (vals.empty() ? "" : " ") + format_double(v);
        res.record.config.set("axis" + std::to_string(i + 1), spec.axes[i].name);
        res.record.config.set("values" + std::to_string(i + 1), vals);
    }
    res.record.metadata.emplace_back("code_version", kCodeVersion);
    res.points.resize(grid.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            SweepPoint& pt = res.points[i];
            pt.axis_values = grid[i];
            try {
                const Config c = spec.point_config(grid[i]);
                pt.upsilon_ratio = upsilon_ratio(SystemParams::from_config(c));
                RunOutput run = run_evolve(c);
                pt.min_squeezing = run.min_squeezing;
                if (pt.min_squeezing && !run.ensemble.points.empty())
                    pt.xi2_min_se = run.ensemble.points[pt.min_squeezing->index].xi2_se;
                if (!run.rows.empty()) pt.final_row = run.rows.back();
                pt.ok = true;
            } catch (const std::exception& ex) {
                pt.ok = false;
                pt.error = ex.what();
            }
        }
    };
    const unsigned w = std::min<std::size_t>(resolve_workers(workers), grid.size());
    if (w <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < w; ++k) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return res;
}

} // namespace dickesq
