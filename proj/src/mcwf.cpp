#include "dickesq/mcwf.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "dickesq/error.hpp"

namespace dickesq {

const char* to_string(Unraveling u) { return u == Unraveling::Standard ? "standard" : "displaced"; }

Unraveling unraveling_from_string(const std::string& s) {
    if (s == "standard") return Unraveling::Standard;
    if (s == "displaced") return Unraveling::Displaced;
    throw ConfigError("unknown unraveling '" + s + "'");
}

namespace {

void build_heff(const Ladder& lad, int n_atoms, const SystemParams& p, cplx b, Tridiagonal& h) {
    const Eigen::Index d = static_cast<Eigen::Index>(lad.m.size());
    h.diag.resize(d);
    h.lower.resize(std::max<Eigen::Index>(0, d - 1));
    h.upper.resize(std::max<Eigen::Index>(0, d - 1));
    const double b2 = std::norm(b);
    const cplx ig_b = cplx(0.0, p.gamma_c) * std::conj(b);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double decay = p.gamma_c * (lad.jpjm[i] + b2) + p.gamma_s * (0.5 * n_atoms + lad.m[i]);
        h.diag(i) = cplx(p.chi * lad.jpjm[i], -0.5 * decay);
        if (i + 1 < d) {
            h.upper(i) = 0.5 * p.omega * lad.lower[i];
            h.lower(i) = 0.5 * p.omega * lad.lower[i] + ig_b * lad.lower[i];
        }
    }
}

// <J-> of the normalized state.
cplx expect_jminus(const Ladder& lad, const Eigen::VectorXcd& v) {
    cplx s = 0.0;
    for (Eigen::Index i = 0; i + 1 < v.size(); ++i) s += lad.lower[i] * std::conj(v(i + 1)) * v(i);
    return s / v.squaredNorm();
}

// (J- - b) v
Eigen::VectorXcd apply_lowering(const Ladder& lad, const Eigen::VectorXcd& v, cplx b) {
    Eigen::VectorXcd out = -b * v;
    for (Eigen::Index i = 0; i + 1 < v.size(); ++i) out(i + 1) += lad.lower[i] * v(i);
    return out;
}

} // namespace

TrajectoryState::TrajectoryState(const DickeVector& psi0) : psi(psi0) {
    set_sector(psi0.sector);
}

void TrajectoryState::set_sector(const SpinSector& s) {
    psi.sector = s;
    ladder = ladder_elements(s);
}

Tridiagonal effective_hamiltonian(const SpinSector& s, const SystemParams& p, cplx b) {
    Tridiagonal h;
    build_heff(ladder_elements(s), s.n_atoms, p, b, h);
    return h;
}

Eigen::VectorXcd effective_hamiltonian_apply(const DickeVector& psi, const SystemParams& p) {
    return dickesq::apply(effective_hamiltonian(psi.sector, p), psi.amp);
}

double sector_factor(int n_atoms, int two_j, int two_j_after) {
    if (two_j_after < 0 || two_j_after > n_atoms) return 0.0;
    const double half_n = 0.5 * n_atoms, j = 0.5 * two_j;
    if (two_j_after == two_j - 2) return half_n + j + 1.0;
    if (two_j_after == two_j) return half_n + 1.0;
    if (two_j_after == two_j + 2) return half_n - j;
    return 0.0;
}

double cg_squared(int two_j, int two_m, int two_j_after) {
    const double j = 0.5 * two_j, m = 0.5 * two_m;
    if (two_j_after == two_j + 2) return (j - m + 1.0) * (j - m + 2.0) / ((2.0 * j + 1.0) * (2.0 * j + 2.0));
    if (two_j == 0) return 0.0;
    if (two_j_after == two_j) return (j + m) * (j - m + 1.0) / (2.0 * j * (j + 1.0));
    if (two_j_after == two_j - 2) return (j + m) * (j + m - 1.0) / (2.0 * j * (2.0 * j + 1.0));
    return 0.0;
}

std::vector<SectorBranch> single_particle_branches(const DickeVector& psi) {
    const SpinSector& s = psi.sector;
    const Eigen::VectorXcd c = psi.amp / psi.amp.norm();
    std::vector<SectorBranch> out;
    for (int two_jp : {s.two_j - 2, s.two_j, s.two_j + 2}) {
        if (two_jp < 0 || two_jp > s.n_atoms) continue;
        const double k = sector_factor(s.n_atoms, s.two_j, two_jp);
        SectorBranch br{two_jp, 0.0, Eigen::VectorXcd::Zero(two_jp + 1)};
        // |J, m> at index i maps to |J', m - 1> at index J' - m + 1
        const int shift = (two_jp - s.two_j) / 2 + 1;
        for (int i = 0; i < s.dim(); ++i) {
            const int target = i + shift;
            if (target < 0 || target > two_jp) continue;
            const double cg2 = cg_squared(s.two_j, s.two_j - 2 * i, two_jp);
            if (cg2 > 0.0) br.amp(target) = std::sqrt(cg2) * c(i);
        }
        br.weight = k * br.amp.squaredNorm();
        out.push_back(std::move(br));
    }
    return out;
}

void select_and_apply_jump(TrajectoryState& traj, const SystemParams& p, const McwfOptions& opt, double u) {
    const cplx b = opt.unraveling == Unraveling::Displaced ? traj.b : cplx(0.0);
    const double norm2 = traj.psi.amp.squaredNorm();
    Eigen::VectorXcd collapsed = apply_lowering(traj.ladder, traj.psi.amp, b);
    const double w_coll = p.gamma_c * collapsed.squaredNorm() / norm2;
    std::vector<SectorBranch> branches;
    double w_single = 0.0;
    if (p.gamma_s > 0.0) {
        branches = single_particle_branches(traj.psi);
        for (const auto& br : branches) w_single += p.gamma_s * br.weight;
    }
    const double total = w_coll + w_single;
    if (!(total > 0.0)) throw ZeroJumpRate("jump requested in a state with zero jump rate");
    const int before = traj.psi.sector.two_j;
    double pick = u * total;
    if (pick < w_coll || branches.empty()) {
        traj.psi.amp = collapsed / collapsed.norm();
        if (opt.log_jumps) traj.jump_log.push_back({traj.t, JumpChannel::Collective, before, before});
        return;
    }
    pick -= w_coll;
    const SectorBranch* chosen = nullptr;
    for (const auto& br : branches) {
        if (br.weight <= 0.0) continue;
        chosen = &br;
        if (pick < p.gamma_s * br.weight) break;
        pick -= p.gamma_s * br.weight;
    }
    if (chosen->two_j_after != before) traj.set_sector({traj.psi.sector.n_atoms, chosen->two_j_after});
    traj.psi.amp = chosen->amp / chosen->amp.norm();
    if (opt.log_jumps) traj.jump_log.push_back({traj.t, JumpChannel::Single, before, chosen->two_j_after});
}

bool evolve_until_jump(TrajectoryState& traj, const SystemParams& p, const McwfOptions& opt, double t_stop) {
    // P33 propagates; P44 only estimates its local error, which is O(tau^7).
    const auto& r3 = PadeRoots::order3();
    const auto& r4 = PadeRoots::order4();
    Tridiagonal heff, a;
    Eigen::VectorXcd x3, x4, x2, hv;
    while (traj.t < t_stop) {
        Eigen::VectorXcd& psi = traj.psi.amp;
        const double n2 = psi.squaredNorm();
        traj.b = opt.unraveling == Unraveling::Displaced ? expect_jminus(traj.ladder, psi) : cplx(0.0);
        build_heff(traj.ladder, traj.psi.sector.n_atoms, p, traj.b, heff);
        apply_into(heff, psi, hv);
        const cplx c = psi.dot(hv) / n2;  // <H_eff>, conjugate-linear in the first argument
        a.lower = cplx(0.0, -1.0) * heff.lower;
        a.upper = cplx(0.0, -1.0) * heff.upper;
        a.diag = cplx(0.0, -1.0) * (heff.diag.array() - c).matrix();
        if (traj.h <= 0.0) {
            const double scale = a.diag.cwiseAbs().maxCoeff() + 2.0 * a.lower.cwiseAbs().maxCoeff() +
                                 2.0 * a.upper.cwiseAbs().maxCoeff();
            traj.h = scale > 0.0 ? 0.5 / scale : t_stop - traj.t;
        }
        bool clamped = false;
        double tau = traj.h;
        if (traj.t + tau >= t_stop) {
            tau = t_stop - traj.t;
            clamped = true;
        }
        if (tau <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, traj.t))
            throw StepUnderflow("trajectory step size underflow", traj.t);
        x3 = psi;
        pade_apply(a, tau, r3, x3);
        x4 = psi;
        pade_apply(a, tau, r4, x4);
        const double err = (x3 - x4).norm() / std::sqrt(n2);
        const double fac = err > 0.0 ? 0.9 * std::pow(opt.step_tol / err, 1.0 / 7.0) : 4.0;
        if (!(err <= opt.step_tol)) {
            traj.h = tau * std::clamp(std::isfinite(fac) ? fac : 0.2, 0.2, 0.9);
            continue;
        }
        const double decay = std::exp(c.imag() * tau);
        x3 *= decay;
        if (x3.squaredNorm() <= traj.threshold) {
            // Locate the threshold crossing of ln |psi(s)|^2 on (0, tau].
            const double target = std::log(traj.threshold);
            auto f = [&](double s) {
                x2 = psi;
                pade_apply(a, s, r3, x2);
                return std::log(x2.squaredNorm()) + 2.0 * c.imag() * s - target;
            };
            double lo = 0.0, hi = tau, flo = std::log(n2) - target, fhi = std::log(x3.squaredNorm()) - target;
            const double tol = opt.event_tol * std::max(traj.t + tau, tau);
            // Illinois regula falsi: keeps the bracket, shrinks it from both sides.
            int side = 0;
            for (int it = 0; it < 200 && hi - lo > tol; ++it) {
                double s = hi - fhi * (hi - lo) / (fhi - flo);
                if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
                const double fs = f(s);
                if (fs > 0.0) {
                    lo = s;
                    flo = fs;
                    if (side == -1) fhi *= 0.5;
                    side = -1;
                } else {
                    hi = s;
                    fhi = fs;
                    if (fs == 0.0) break;
                    if (side == 1) flo *= 0.5;
                    side = 1;
                }
            }
            x2 = psi;
            pade_apply(a, hi, r3, x2);
            psi = x2 * std::exp(c.imag() * hi);
            traj.t += hi;
            if (traj.t > t_stop) traj.t = t_stop;
            return true;
        }
        psi = x3;
        traj.t = clamped ? t_stop : traj.t + tau;
        const double next = tau * std::clamp(fac, 0.2, 4.0);
        traj.h = clamped ? std::max(traj.h, next) : next;
    }
    return false;
}

TrajectoryState run_trajectory(const DickeVector& psi0, const SystemParams& p,
                               const std::vector<double>& t_grid, TrajectoryRng& rng,
                               const McwfOptions& opt,
                               const std::function<void(const TrajectorySample&)>& observe) {
    p.validate();
    if (psi0.sector.n_atoms != p.n_atoms) throw InvalidParams("run_trajectory: initial state has the wrong N");
    TrajectoryState traj(psi0);
    traj.psi.amp /= traj.psi.amp.norm();
    traj.threshold = rng.uniform();
    for (double t_out : t_grid) {
        if (t_out < traj.t) throw InvalidParams("run_trajectory: time grid must be ascending and >= 0");
        while (traj.t < t_out) {
            if (evolve_until_jump(traj, p, opt, t_out)) {
                select_and_apply_jump(traj, p, opt, rng.uniform());
                traj.threshold = rng.uniform();
            }
        }
        observe({t_out, traj.psi.sector.two_j, ladder_expectations(traj.ladder, traj.psi.amp)});
    }
    return traj;
}

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("DICKESQ_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr int kEntries = 10;

using EntryArray = std::array<double, kEntries>;

EntryArray flatten(const CollectiveMoments& m) {
    return {m.mean(0), m.mean(1), m.mean(2), m.second(0, 0), m.second(1, 1), m.second(2, 2),
            m.second(0, 1), m.second(0, 2), m.second(1, 2), m.j2};
}

CollectiveMoments unflatten(const EntryArray& e) {
    CollectiveMoments m;
    m.mean << e[0], e[1], e[2];
    m.second << e[3], e[6], e[7], e[6], e[4], e[8], e[7], e[8], e[5];
    m.j2 = e[9];
    return m;
}

struct BlockPartial {
    std::size_t count{0};
    std::vector<EntryArray> sum, sumsq;  // per grid time
    std::vector<TrajectoryRecord> records;
    bool failed{false};
    std::size_t failed_index{0};
    std::string failure;
};

double xi2_or_nan(const CollectiveMoments& m, int n) {
    try {
        return squeezing_parameter(m, n);
    } catch (const BlochVectorVanishes&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

EnsembleResult run_ensemble(const EnsembleSpec& spec, const SystemParams& p, const DickeVector& psi0) {
    p.validate();
    if (spec.n_traj < 1) throw InvalidParams("run_ensemble: n_traj must be >= 1");
    if (spec.block_size < 1) throw InvalidParams("run_ensemble: block_size must be >= 1");
    const std::size_t nt = spec.t_grid.size();
    const std::size_t n_blocks = (spec.n_traj + spec.block_size - 1) / spec.block_size;
    std::vector<BlockPartial> blocks(n_blocks);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (;;) {
            const std::size_t bi = next.fetch_add(1);
            if (bi >= n_blocks) return;
            BlockPartial& part = blocks[bi];
            part.sum.assign(nt, EntryArray{});
            part.sumsq.assign(nt, EntryArray{});
            const std::size_t first = bi * spec.block_size;
            const std::size_t last = std::min(spec.n_traj, first + spec.block_size);
            for (std::size_t idx = first; idx < last && !part.failed; ++idx) {
                const bool keep = idx < spec.keep_trajectories;
                TrajectoryRecord rec{idx, {}, {}};
                McwfOptions opt = spec.options;
                opt.log_jumps = opt.log_jumps || keep;
                try {
                    TrajectoryRng rng(spec.master_seed, idx);
                    std::size_t k = 0;
                    TrajectoryState end = run_trajectory(psi0, p, spec.t_grid, rng, opt, [&](const TrajectorySample& s) {
                        const EntryArray e = flatten(moments_from_expectations(s.expect));
                        for (int q = 0; q < kEntries; ++q) {
                            part.sum[k][q] += e[q];
                            part.sumsq[k][q] += e[q] * e[q];
                        }
                        if (keep) rec.samples.push_back(s);
                        ++k;
                    });
                    if (keep) {
                        rec.jumps = std::move(end.jump_log);
                        part.records.push_back(std::move(rec));
                    }
                    ++part.count;
                } catch (const std::exception& ex) {
                    part.failed = true;
                    part.failed_index = idx;
                    part.failure = ex.what();
                }
            }
        }
    };

    const unsigned workers = std::min<std::size_t>(resolve_workers(spec.workers), n_blocks);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    for (const auto& b : blocks)
        if (b.failed)
            throw TrajectoryFailure("trajectory " + std::to_string(b.failed_index) + " failed: " + b.failure,
                                    b.failed_index, spec.master_seed);

    EnsembleResult res;
    std::vector<EntryArray> total(nt, EntryArray{}), total_sq(nt, EntryArray{});
    for (const auto& b : blocks)
        for (std::size_t k = 0; k < nt; ++k)
            for (int q = 0; q < kEntries; ++q) {
                total[k][q] += b.sum[k][q];
                total_sq[k][q] += b.sumsq[k][q];
            }
    const double n = static_cast<double>(spec.n_traj);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < nt; ++k) {
        EntryArray mean{}, se{};
        for (int q = 0; q < kEntries; ++q) {
            mean[q] = total[k][q] / n;
            const double var = n > 1 ? std::max(0.0, (total_sq[k][q] - n * mean[q] * mean[q]) / (n - 1.0)) : nan;
            se[q] = std::sqrt(var / n);
        }
        EnsemblePoint pt;
        pt.t = spec.t_grid[k];
        pt.moments = unflatten(mean);
        const CollectiveMoments se_m = unflatten(se);
        pt.errors.mean = se_m.mean;
        pt.errors.second = se_m.second;
        pt.errors.j2 = se_m.j2;
        pt.xi2 = xi2_or_nan(pt.moments, p.n_atoms);
        pt.n_eff = n_eff(std::max(0.0, pt.moments.j2));

        // Delete-one-block jackknife for the nonlinear estimators.
        pt.xi2_se = nan;
        pt.n_eff_se = nan;
        if (n_blocks >= 2) {
            std::vector<double> xs(n_blocks), ns(n_blocks);
            double xbar = 0.0, nbar = 0.0;
            for (std::size_t b = 0; b < n_blocks; ++b) {
                EntryArray loo{};
                const double cnt = n - static_cast<double>(blocks[b].count);
                for (int q = 0; q < kEntries; ++q) loo[q] = (total[k][q] - blocks[b].sum[k][q]) / cnt;
                const CollectiveMoments m = unflatten(loo);
                xs[b] = xi2_or_nan(m, p.n_atoms);
                ns[b] = n_eff(std::max(0.0, m.j2));
                xbar += xs[b];
                nbar += ns[b];
            }
            xbar /= n_blocks;
            nbar /= n_blocks;
            double sx = 0.0, sn = 0.0;
            for (std::size_t b = 0; b < n_blocks; ++b) {
                sx += (xs[b] - xbar) * (xs[b] - xbar);
                sn += (ns[b] - nbar) * (ns[b] - nbar);
            }
            const double f = (n_blocks - 1.0) / n_blocks;
            pt.xi2_se = std::sqrt(f * sx);
            pt.n_eff_se = std::sqrt(f * sn);
        }
        res.points.push_back(pt);
    }
    for (auto& b : blocks)
        for (auto& r : b.records) res.trajectories.push_back(std::move(r));
    return res;
}

} // namespace dickesq
