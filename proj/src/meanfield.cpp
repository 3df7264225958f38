#include "dickesq/meanfield.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>

#include "dickesq/error.hpp"

namespace dickesq {

double MeanFieldState::r() const { return 0.5 * std::hypot(sx, sy); }
double MeanFieldState::phi() const { return std::atan2(sy, sx); }

MeanFieldState MeanFieldState::from_polar(double r, double phi, double z) {
    return {2.0 * r * std::cos(phi), 2.0 * r * std::sin(phi), z};
}

MeanFieldState MeanFieldState::from_bloch_angles(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

MeanFieldState mf_rhs(const MeanFieldState& s, const SystemParams& p) {
    const double nm1 = p.n_atoms - 1.0;
    const double g = p.gamma_c + p.gamma_s;
    const double kr = -0.5 * g + 0.5 * nm1 * p.gamma_c * s.sz;
    const double ki = p.chi - nm1 * p.chi * s.sz;
    return {s.sx * kr - s.sy * ki,
            s.sx * ki + s.sy * kr - p.omega * s.sz,
            -0.5 * p.gamma_c * nm1 * (s.sx * s.sx + s.sy * s.sy) - g * (1.0 + s.sz) + p.omega * s.sy};
}

Matrix3 mf_jacobian(const MeanFieldState& s, const SystemParams& p) {
    const double nm1 = p.n_atoms - 1.0;
    const double g = p.gamma_c + p.gamma_s;
    const double kr = -0.5 * g + 0.5 * nm1 * p.gamma_c * s.sz;
    const double ki = p.chi - nm1 * p.chi * s.sz;
    Matrix3 j{};
    j[0] = {kr, -ki, 0.5 * nm1 * p.gamma_c * s.sx + nm1 * p.chi * s.sy};
    j[1] = {ki, kr, -nm1 * p.chi * s.sx + 0.5 * nm1 * p.gamma_c * s.sy - p.omega};
    j[2] = {-p.gamma_c * nm1 * s.sx, -p.gamma_c * nm1 * s.sy + p.omega, -g};
    return j;
}

const char* to_string(Branch b) {
    switch (b) {
    case Branch::Trivial: return "trivial";
    case Branch::Lower: return "lower";
    case Branch::Upper: return "upper";
    case Branch::Normal: return "normal";
    }
    return "?";
}

FixedPoint mf_stability(FixedPoint fp, const SystemParams& p) {
    const auto d = mf_rhs(fp.state, p);
    fp.residual = std::max({std::abs(d.sx), std::abs(d.sy), std::abs(d.sz)});
    fp.eigenvalues.clear();
    if (!fp.exact) {
        fp.stable = false;
        fp.marginal = false;
        return fp;
    }
    const Matrix3 j = mf_jacobian(fp.state, p);
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = j[r][c];
    const Eigen::Vector3cd ev = Eigen::EigenSolver<Eigen::Matrix3d>(m, false).eigenvalues();
    double lead = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        fp.eigenvalues.push_back(ev(i));
        lead = std::max(lead, ev(i).real());
    }
    std::sort(fp.eigenvalues.begin(), fp.eigenvalues.end(),
              [](auto a, auto b) { return a.real() > b.real(); });
    fp.stable = lead < -1e-10;
    fp.marginal = std::abs(lead) <= 1e-10;
    return fp;
}

namespace {

double branch_z(double r, Branch b) {
    const double lower = -0.5 - 0.5 * std::sqrt(std::max(0.0, 1.0 - 8.0 * r * r));
    // product of the two roots is 2 r^2; avoids cancellation near r = 0
    return b == Branch::Lower ? lower : 2.0 * r * r / lower;
}

// sin and cos of phi implied by the zdot = 0 and phidot = 0 conditions.
std::pair<double, double> branch_phase(double r, double z, const SystemParams& p) {
    const double g = p.gamma_c + p.gamma_s;
    const double sn = (2.0 * p.gamma_c * (p.n_atoms - 1.0) * r * r + g * (1.0 + z)) / (2.0 * p.omega * r);
    const double cs = 2.0 * r * p.chi * (1.0 - (p.n_atoms - 1.0) * z) / (p.omega * z);
    return {sn, cs};
}

// Bisection-safeguarded secant on a bracket with f(lo), f(hi) of opposite sign.
double refine_root(const std::function<double(double)>& f, double lo, double hi, double flo, double fhi) {
    double a = lo, b = hi, fa = flo, fb = fhi;
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        double x = b - fb * (b - a) / (fb - fa);
        const double mid = 0.5 * (a + b);
        if (!(x > a && x < b) || it % 3 == 2) x = mid;
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0) == (fa < 0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

} // namespace

double mf_root_function(double r, Branch b, const SystemParams& p) {
    const double z = branch_z(r, b);
    const double g = p.gamma_c + p.gamma_s;
    const double s = 2.0 * p.gamma_c * (p.n_atoms - 1.0) * r * r + g * (1.0 + z);
    const double c = 4.0 * p.chi * r * r * (1.0 / z - (p.n_atoms - 1.0));
    return 4.0 * r * r * p.omega * p.omega - s * s - c * c;
}

std::vector<FixedPoint> mf_steady_state(const SystemParams& p) {
    p.validate();
    std::vector<FixedPoint> out;
    if (p.omega == 0.0) {
        FixedPoint fp;
        fp.state = {0.0, 0.0, -1.0};
        fp.branch = Branch::Trivial;
        out.push_back(mf_stability(fp, p));
        return out;
    }
    const double r_lo = 1e-12, r_hi = 1.0 / std::sqrt(8.0);
    // Dense uniform grid plus log-spaced points near zero, where roots
    // crowd at large N.
    std::vector<double> grid;
    const int n_uniform = 4000, n_log = 400;
    for (int i = 0; i < n_log; ++i)
        grid.push_back(r_lo * std::pow(r_hi / 1e3 / r_lo, double(i) / n_log));
    for (int i = 0; i <= n_uniform; ++i) grid.push_back(r_hi / 1e3 + (r_hi - r_hi / 1e3) * i / n_uniform);
    grid.back() = r_hi;

    for (Branch b : {Branch::Lower, Branch::Upper}) {
        auto f = [&](double r) { return mf_root_function(r, b, p); };
        double prev_r = grid.front(), prev_f = f(prev_r);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double r = grid[i], fr = f(r);
            double root = -1.0;
            if (fr == 0.0) root = r;
            else if ((fr < 0) != (prev_f < 0) && prev_f != 0.0) root = refine_root(f, prev_r, r, prev_f, fr);
            if (root > 0.0) {
                const double z = branch_z(root, b);
                auto [sn, cs] = branch_phase(root, z, p);
                FixedPoint fp;
                fp.state = MeanFieldState::from_polar(root, std::atan2(sn, cs), z);
                // The upper branch also carries the finite-N normal-phase root,
                // r ~ 1/(N Upsilon/Upsilon_c), which vanishes at large N.
                fp.branch = (b == Branch::Upper && root * root < 1.0 / p.n_atoms) ? Branch::Normal : b;
                out.push_back(mf_stability(fp, p));
            }
            prev_r = r;
            prev_f = fr;
        }
    }
    // At r = 1/sqrt(8) both branches give the same point.
    if (out.size() >= 2) {
        std::vector<FixedPoint> dedup;
        for (const auto& fp : out) {
            bool dup = false;
            for (const auto& d : dedup)
                dup = dup || (std::abs(fp.state.sx - d.state.sx) + std::abs(fp.state.sy - d.state.sy) +
                                  std::abs(fp.state.sz - d.state.sz) < 1e-9);
            if (!dup) dedup.push_back(fp);
        }
        out.swap(dedup);
    }
    if (out.empty()) {
        FixedPoint fp;
        fp.state = {0.0, 0.0, 0.0};
        fp.branch = Branch::Normal;
        fp.exact = false;
        out.push_back(mf_stability(fp, p));
    }
    return out;
}

const FixedPoint* stable_superradiant(const std::vector<FixedPoint>& fps) {
    for (const auto& fp : fps)
        if (fp.exact && fp.stable && (fp.branch == Branch::Lower || fp.branch == Branch::Upper)) return &fp;
    return nullptr;
}

OdeOptions meanfield_ode_defaults() {
    OdeOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-13;
    return o;
}

MeanFieldSeries evolve_meanfield(const MeanFieldState& s0, const SystemParams& p,
                                 const std::vector<double>& t_grid, const OdeOptions& opt) {
    p.validate();
    Eigen::Vector3d y(s0.sx, s0.sy, s0.sz);
    MeanFieldSeries out;
    integrate_dopri5(
        [&](double, const Eigen::Vector3d& v, Eigen::Vector3d& dv) {
            const auto d = mf_rhs({v(0), v(1), v(2)}, p);
            dv << d.sx, d.sy, d.sz;
        },
        y, 0.0, t_grid,
        [&](double t, const Eigen::Vector3d& v) {
            MeanFieldState s{v(0), v(1), v(2)};
            out.max_norm2 = std::max(out.max_norm2, s.norm2());
            if (s.norm2() > 1.0 + 1e-9) {
                if (out.norm_violations == 0)
                    std::clog << "meanfield: |s|^2 = " << s.norm2() << " exceeds 1 at t = " << t << "\n";
                ++out.norm_violations;
            }
            out.states.push_back(s);
        },
        opt);
    return out;
}

} // namespace dickesq
