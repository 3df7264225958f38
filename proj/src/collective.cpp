#include "dickesq/collective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dickesq/error.hpp"

namespace dickesq {
namespace {

struct Coefficients {
    std::vector<double> a, h, g;
};

Coefficients coefficients(const SystemParams& p) {
    const Ladder lad = ladder_elements(SpinSector::maximal(p.n_atoms));
    Coefficients c;
    c.a = lad.lower;
    c.h.resize(c.a.size());
    c.g.resize(c.a.size());
    for (std::size_t i = 0; i < c.a.size(); ++i) {
        c.h[i] = p.chi * lad.jpjm[i];
        c.g[i] = 0.5 * p.gamma_c * lad.jpjm[i];
    }
    return c;
}

void require_collective(const SystemParams& p) {
    p.validate();
    if (p.gamma_s != 0.0)
        throw NonCollectiveParams("collective solver requires gamma_s = 0");
}

cplx element(const Coefficients& k, double omega, double gamma_c, const Eigen::MatrixXcd& rho, Eigen::Index r,
             Eigen::Index c) {
    const Eigen::Index n = rho.rows();
    const double* a = k.a.data();
    cplx v = cplx(-(k.g[r] + k.g[c]), -(k.h[r] - k.h[c])) * rho(r, c);
    cplx drive = 0.0;
    if (r + 1 < n) drive += a[r] * rho(r + 1, c);
    if (r > 0) drive += a[r - 1] * rho(r - 1, c);
    if (c + 1 < n) drive -= rho(r, c + 1) * a[c];
    if (c > 0) {
        drive -= rho(r, c - 1) * a[c - 1];
        if (r > 0) v += gamma_c * a[r - 1] * a[c - 1] * rho(r - 1, c - 1);
    }
    return v + cplx(0.0, -0.5 * omega) * drive;
}

// Lower triangle computed explicitly, upper triangle mirrored. Edge rows go
// through element(); the interior loop is branch-free.
void rhs_into(const Coefficients& k, double omega, double gamma_c, const Eigen::MatrixXcd& rho,
              Eigen::MatrixXcd& out) {
    const Eigen::Index n = rho.rows();
    const cplx mi_half_omega(0.0, -0.5 * omega);
    const double* a = k.a.data();
    const double* g = k.g.data();
    const double* h = k.h.data();
    for (Eigen::Index c = 0; c < n; ++c) {
        const cplx* col = rho.data() + c * n;
        // Neighbouring columns; when absent the coefficient is zero and any
        // readable column will do.
        const cplx* left = c > 0 ? col - n : col;
        const cplx* right = c + 1 < n ? col + n : col;
        const double ac = c + 1 < n ? a[c] : 0.0, acm = c > 0 ? a[c - 1] : 0.0;
        const double gc = g[c], hc = h[c], jump = gamma_c * acm;
        cplx* dst = out.data() + c * n;
        if (c == 0) dst[0] = element(k, omega, gamma_c, rho, 0, 0);
        for (Eigen::Index r = std::max<Eigen::Index>(c, 1); r + 1 < n; ++r) {
            const cplx drive = a[r] * col[r + 1] + a[r - 1] * col[r - 1] - ac * right[r] - acm * left[r];
            dst[r] = cplx(-(g[r] + gc), -(h[r] - hc)) * col[r] + mi_half_omega * drive +
                     jump * a[r - 1] * left[r - 1];
        }
        dst[n - 1] = element(k, omega, gamma_c, rho, n - 1, c);
        for (Eigen::Index r = c + 1; r < n; ++r) out(c, r) = std::conj(dst[r]);
        dst[c] = dst[c].real();
    }
}

CollectiveDensity minus_x_css(int n) {
    return pure_density(coherent_spin_state(SpinSector::maximal(n), std::numbers::pi / 2, std::numbers::pi));
}

SteadyResult steady_dense(const SystemParams& p, const Coefficients& k) {
    const Eigen::Index n = p.n_atoms + 1, n2 = n * n;
    Eigen::MatrixXcd liou(n2, n2);
    Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(n, n), col(n, n);
    // rhs_into mirrors the lower triangle, so matrix units go through
    // element() instead.
    for (Eigen::Index j = 0; j < n2; ++j) {
        basis.setZero();
        basis(j % n, j / n) = 1.0;
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index r = 0; r < n; ++r) col(r, c) = element(k, p.omega, p.gamma_c, basis, r, c);
        liou.col(j) = Eigen::Map<Eigen::VectorXcd>(col.data(), n2);
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n2);
    liou.row(0).setZero();
    for (Eigen::Index i = 0; i < n; ++i) liou(0, i * n + i) = 1.0;
    rhs(0) = 1.0;
    Eigen::VectorXcd x = liou.fullPivLu().solve(rhs);
    SteadyResult res;
    res.state.sector = SpinSector::maximal(p.n_atoms);
    res.state.rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), n, n);
    res.state.rho = 0.5 * (res.state.rho + res.state.rho.adjoint()).eval();
    res.method = SteadyMethod::Dense;
    return res;
}

// Eliminates subdiagonals d = N..1 of the stationarity condition, expressing
// each as a linear map of the one below, which leaves a real system for the
// populations.
SteadyResult steady_direct(const SystemParams& p, const Coefficients& k) {
    const int N = p.n_atoms;
    const Eigen::Index n = N + 1;
    const auto& a = k.a;
    const cplx mi_half_omega(0.0, -0.5 * p.omega);
    std::vector<Eigen::MatrixXcd> maps(N);  // maps[d-1]: s^(d) = maps[d-1] * s^(d-1)

    for (int d = N; d >= 1; --d) {
        const Eigen::Index nd = n - d, nlow = nd + 1;
        Eigen::MatrixXcd kmat = Eigen::MatrixXcd::Zero(nd, nd);
        for (Eigen::Index i = 0; i < nd; ++i) {
            kmat(i, i) = cplx(-(k.g[i + d] + k.g[i]), -(k.h[i + d] - k.h[i]));
            if (i > 0) kmat(i, i - 1) = p.gamma_c * a[i + d - 1] * a[i - 1];
        }
        if (d < N) {
            const Eigen::MatrixXcd& up = maps[d];  // (nd - 1) x nd
            for (Eigen::Index i = 0; i < nd; ++i) {
                if (i < nd - 1) kmat.row(i) += (mi_half_omega * a[i + d]) * up.row(i);
                if (i > 0) kmat.row(i) -= (mi_half_omega * a[i - 1]) * up.row(i - 1);
            }
        }
        Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(nd, nlow);
        for (Eigen::Index i = 0; i < nd; ++i) {
            lower(i, i) = -mi_half_omega * a[i + d - 1];
            lower(i, i + 1) = mi_half_omega * a[i];
        }
        // The sign of `lower` above absorbs the minus in M = -K^{-1} Lo.
        maps[d - 1] = kmat.partialPivLu().solve(lower);
    }

    Eigen::MatrixXd pop = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd im0 = maps[0].imag();  // N x (N+1)
    for (Eigen::Index i = 0; i < n; ++i) {
        pop(i, i) -= p.gamma_c * a[i] * a[i];
        if (i > 0) pop(i, i - 1) += p.gamma_c * a[i - 1] * a[i - 1];
        if (i < n - 1) pop.row(i) += (p.omega * a[i]) * im0.row(i);
        if (i > 0) pop.row(i) -= (p.omega * a[i - 1]) * im0.row(i - 1);
    }
    pop.row(0).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = 1.0;
    const Eigen::VectorXd pops = pop.fullPivLu().solve(rhs);

    SteadyResult res;
    res.state.sector = SpinSector::maximal(N);
    res.state.rho = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd s = pops.cast<cplx>();
    res.state.rho.diagonal() = s;
    for (int d = 1; d <= N; ++d) {
        s = maps[d - 1] * s;
        for (Eigen::Index i = 0; i < n - d; ++i) {
            res.state.rho(i + d, i) = s(i);
            res.state.rho(i, i + d) = std::conj(s(i));
        }
    }
    res.method = SteadyMethod::Direct;
    return res;
}

SteadyResult steady_integrate(const SystemParams& p, const SteadyOptions& opt) {
    CollectiveDensity rho = opt.initial ? *opt.initial : minus_x_css(p.n_atoms);
    OdeOptions ode = collective_ode_defaults();
    ode.rtol = 1e-11;
    ode.atol = 1e-15;
    double t = 0.0, residual = collective_residual(rho, p);
    while (residual >= opt.residual_tol) {
        if (t >= opt.t_max)
            throw NonConvergence("collective steady state: residual " + std::to_string(residual) +
                                     " above tolerance at t_max = " + std::to_string(opt.t_max),
                                 residual);
        CollectiveDensity next;
        evolve_collective(rho, p, {opt.check_interval}, ode, &next);
        rho = std::move(next);
        t += opt.check_interval;
        residual = collective_residual(rho, p);
    }
    SteadyResult res{rho, residual, SteadyMethod::Integrate, t};
    return res;
}

} // namespace

CollectiveDensity pure_density(const DickeVector& psi) {
    const Eigen::VectorXcd v = psi.amp / psi.amp.norm();
    return {psi.sector, v * v.adjoint()};
}

Eigen::MatrixXcd collective_rhs(const Eigen::MatrixXcd& rho, const SystemParams& p) {
    require_collective(p);
    if (rho.rows() != p.n_atoms + 1 || rho.cols() != p.n_atoms + 1)
        throw InvalidParams("collective_rhs: density has the wrong dimension");
    Eigen::MatrixXcd out(rho.rows(), rho.cols());
    rhs_into(coefficients(p), p.omega, p.gamma_c, rho, out);
    return out;
}

double collective_residual(const CollectiveDensity& rho, const SystemParams& p) {
    return collective_rhs(rho.rho, p).norm();
}

LadderExpectations density_expectations(const CollectiveDensity& rho) {
    const Ladder lad = ladder_elements(rho.sector);
    const Eigen::MatrixXcd& r = rho.rho;
    const Eigen::Index n = r.rows();
    LadderExpectations e;
    double tr = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double pi = r(i, i).real();
        tr += pi;
        e.jz += lad.m[i] * pi;
        e.jz2 += lad.m[i] * lad.m[i] * pi;
        e.jpjm += lad.jpjm[i] * pi;
        if (i + 1 < n) {
            const cplx x = lad.lower[i] * r(i + 1, i);
            e.jp += x;
            e.jzjp += lad.m[i] * x;
        }
        if (i + 2 < n) e.jp2 += lad.lower[i] * lad.lower[i + 1] * r(i + 2, i);
    }
    e *= 1.0 / tr;
    return e;
}

CollectiveMoments moments_of_density(const CollectiveDensity& rho) {
    return moments_from_expectations(density_expectations(rho));
}

DensityDiagnostics diagnose_density(const CollectiveDensity& rho) {
    DensityDiagnostics d;
    d.hermiticity = (rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff();
    d.trace_error = std::abs(rho.rho.trace() - cplx(1.0));
    const Eigen::MatrixXcd herm = 0.5 * (rho.rho + rho.rho.adjoint());
    d.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .minCoeff();
    return d;
}

OdeOptions collective_ode_defaults() {
    OdeOptions o;
    o.rtol = 1e-9;
    o.atol = 1e-12;
    return o;
}

std::vector<CollectiveMoments> evolve_collective(const CollectiveDensity& rho0,
                                                 const SystemParams& p,
                                                 const std::vector<double>& t_grid,
                                                 const OdeOptions& opt,
                                                 CollectiveDensity* final_state) {
    require_collective(p);
    if (rho0.rho.rows() != p.n_atoms + 1) throw InvalidParams("evolve_collective: dimension mismatch");
    const Coefficients k = coefficients(p);
    Eigen::MatrixXcd y = rho0.rho;
    std::vector<CollectiveMoments> out;
    out.reserve(t_grid.size());
    const SpinSector sector = SpinSector::maximal(p.n_atoms);
    integrate_dopri5(
        [&](double, const Eigen::MatrixXcd& r, Eigen::MatrixXcd& dr) {
            rhs_into(k, p.omega, p.gamma_c, r, dr);
        },
        y, 0.0, t_grid,
        [&](double, const Eigen::MatrixXcd& r) { out.push_back(moments_of_density({sector, r})); },
        opt,
        [](double, Eigen::MatrixXcd& r) {
            const double tr = r.trace().real();
            if (std::abs(tr - 1.0) <= 1e-12) return false;
            r /= tr;
            return true;
        });
    if (final_state) *final_state = {sector, y};
    return out;
}

const char* to_string(SteadyMethod m) {
    switch (m) {
    case SteadyMethod::Auto: return "auto";
    case SteadyMethod::Dense: return "dense";
    case SteadyMethod::Direct: return "direct";
    case SteadyMethod::Integrate: return "integrate";
    }
    return "?";
}

SteadyMethod steady_method_from_string(const std::string& s) {
    if (s == "auto") return SteadyMethod::Auto;
    if (s == "dense") return SteadyMethod::Dense;
    if (s == "direct") return SteadyMethod::Direct;
    if (s == "integrate") return SteadyMethod::Integrate;
    throw ConfigError("unknown steady-state method '" + s + "'");
}

SteadyResult steady_state_collective(const SystemParams& p, const SteadyOptions& opt) {
    require_collective(p);
    SteadyMethod m = opt.method;
    if (m == SteadyMethod::Auto)
        m = p.n_atoms <= opt.direct_max_n ? SteadyMethod::Direct : SteadyMethod::Integrate;
    SteadyResult res;
    switch (m) {
    case SteadyMethod::Dense:
        if (p.n_atoms > opt.dense_max_n)
            throw InvalidParams("dense steady state limited to N <= " + std::to_string(opt.dense_max_n));
        res = steady_dense(p, coefficients(p));
        break;
    case SteadyMethod::Direct: res = steady_direct(p, coefficients(p)); break;
    default: return steady_integrate(p, opt);
    }
    res.residual = collective_residual(res.state, p);
    if (!(res.residual < opt.residual_tol))
        throw NonConvergence("collective steady state: residual " + std::to_string(res.residual) +
                                 " above tolerance",
                             res.residual);
    return res;
}

} // namespace dickesq
