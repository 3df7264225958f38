#include "dickesq/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "dickesq/collective.hpp"
#include "dickesq/cumulant.hpp"
#include "dickesq/mcwf.hpp"
#include "dickesq/oracle.hpp"
#include "dickesq/runner.hpp"

namespace dickesq {
namespace {

constexpr const char* kEntryNames[10] = {"Jx", "Jy", "Jz", "Jxx", "Jyy", "Jzz", "Jxy", "Jxz", "Jyz", "J2"};

std::array<double, 10> entries(const CollectiveMoments& m) {
    return {m.mean(0), m.mean(1), m.mean(2), m.second(0, 0), m.second(1, 1), m.second(2, 2),
            m.second(0, 1), m.second(0, 2), m.second(1, 2), m.j2};
}

std::array<double, 10> entries(const MomentErrors& e) {
    return {e.mean(0), e.mean(1), e.mean(2), e.second(0, 0), e.second(1, 1), e.second(2, 2),
            e.second(0, 1), e.second(0, 2), e.second(1, 2), e.j2};
}

// Slack for entries whose trajectory values are deterministic (zero spread),
// set by the per-step propagation tolerance.
constexpr double kDeterministicSlack = 1e-6;

} // namespace

std::vector<CertifyCheck> run_certification(const CertifyOptions& opt) {
    std::vector<CertifyCheck> out;
    const double theta = std::numbers::pi / 2, phi = std::numbers::pi;
    for (int n : opt.n_values)
        for (double ratio : opt.upsilon_ratios)
            for (double gs : opt.gamma_s_values) {
                const SystemParams p = SystemParams::from_upsilon_ratio(n, opt.chi, gs, ratio);
                const OracleDensity rho0 = oracle_product_state(n, theta, phi);
                OdeOptions tight;
                tight.rtol = 1e-12;
                tight.atol = 1e-14;

                // One oracle run on the union of all comparison times.
                const auto coll_grid = time_grid(1.0, 20);
                const auto cum_grid = time_grid(opt.cumulant_t_end, opt.cumulant_steps);
                std::vector<double> all(coll_grid);
                all.insert(all.end(), cum_grid.begin(), cum_grid.end());
                all.insert(all.end(), opt.mcwf_checkpoints.begin(), opt.mcwf_checkpoints.end());
                std::sort(all.begin(), all.end());
                all.erase(std::unique(all.begin(), all.end()), all.end());
                const auto oracle = brute_force_oracle(rho0, p, all, tight);
                auto ref_at = [&](double t) -> const OracleSample& {
                    const auto it = std::lower_bound(all.begin(), all.end(), t);
                    return oracle[std::size_t(it - all.begin())];
                };

                if (gs == 0.0) {
                    const auto& grid = coll_grid;
                    const auto rho_c = pure_density(coherent_spin_state(SpinSector::maximal(n), theta, phi));
                    const auto got = evolve_collective(rho_c, p, grid, tight);
                    double worst = 0.0;
                    std::string where;
                    for (std::size_t k = 0; k < grid.size(); ++k) {
                        const auto a = entries(got[k]), b = entries(ref_at(grid[k]).moments);
                        for (int q = 0; q < 10; ++q)
                            if (std::abs(a[q] - b[q]) > worst) {
                                worst = std::abs(a[q] - b[q]);
                                where = std::string(kEntryNames[q]) + " at t=" + std::to_string(grid[k]).substr(0, 5);
                            }
                    }
                    out.push_back({"collective", n, ratio, gs, worst <= opt.collective_tol, worst,
                                   opt.collective_tol, where});
                }

                {
                    EnsembleSpec spec;
                    spec.n_traj = opt.n_traj;
                    spec.master_seed = opt.seed;
                    spec.t_grid = opt.mcwf_checkpoints;
                    const auto ens = run_ensemble(spec, p, coherent_spin_state(SpinSector::maximal(n), theta, phi));
                    double worst = 0.0;
                    bool pass = true;
                    std::string where;
                    for (std::size_t k = 0; k < opt.mcwf_checkpoints.size(); ++k) {
                        const double t = opt.mcwf_checkpoints[k];
                        const auto a = entries(ens.points[k].moments), b = entries(ref_at(t).moments);
                        const auto se = entries(ens.points[k].errors);
                        for (int q = 0; q < 10; ++q) {
                            const double d = std::abs(a[q] - b[q]);
                            const double allowed =
                                opt.sigma_factor * se[q] + kDeterministicSlack * std::max(1.0, std::abs(b[q]));
                            pass = pass && d <= allowed;
                            const double z = se[q] > 0 ? d / se[q] : (d > allowed ? INFINITY : 0.0);
                            if (z > worst) {
                                worst = z;
                                where = std::string(kEntryNames[q]) + " at t=" + std::to_string(t).substr(0, 5);
                            }
                        }
                    }
                    out.push_back({"mcwf", n, ratio, gs, pass, worst, opt.sigma_factor, where});
                }

                {
                    const auto& grid = cum_grid;
                    CumulantOptions co;
                    co.check_bounds = false;
                    co.ode = tight;
                    const auto got = evolve_cumulant(init_from_css(theta, phi), p, grid, co);
                    double worst = 0.0;
                    std::string where;
                    for (std::size_t k = 0; k < grid.size(); ++k) {
                        const auto& c = got.states[k];
                        const auto& r = ref_at(grid[k]).cumulants;
                        const double d[6] = {std::abs(c.sp - r.sp), std::abs(c.sz - r.sz.real()),
                                             std::abs(c.zp - r.zp), std::abs(c.pm - r.pm.real()),
                                             std::abs(c.zz - r.zz.real()), std::abs(c.pp - r.pp)};
                        const char* names[6] = {"sp", "sz", "zp", "pm", "zz", "pp"};
                        for (int q = 0; q < 6; ++q)
                            if (d[q] > worst) {
                                worst = d[q];
                                where = std::string(names[q]) + " at t=" + std::to_string(grid[k]).substr(0, 5);
                            }
                    }
                    out.push_back({"cumulant", n, ratio, gs, worst <= opt.cumulant_tol, worst, opt.cumulant_tol, where});
                }
            }
    return out;
}

bool print_certification(std::ostream& os, const std::vector<CertifyCheck>& checks) {
    bool all = true;
    char buf[256];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "%-4s %-10s N=%d  U/Uc=%.2f  gs=%.1f  worst=%.3e  tol=%.1e  (%s)\n",
                      c.pass ? "PASS" : "FAIL", c.solver.c_str(), c.n_atoms, c.upsilon_ratio, c.gamma_s, c.metric,
                      c.tolerance, c.detail.c_str());
        os << buf;
        all = all && c.pass;
    }
    return all;
}

} // namespace dickesq
