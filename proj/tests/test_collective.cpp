#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dickesq/collective.hpp"
#include "dickesq/error.hpp"

using namespace dickesq;

namespace {

CollectiveDensity minus_x(int n) {
    return pure_density(coherent_spin_state(SpinSector::maximal(n), std::numbers::pi / 2, std::numbers::pi));
}

std::vector<double> linspace_grid(double t_end, int n) {
    std::vector<double> g;
    for (int k = 1; k <= n; ++k) g.push_back(t_end * k / n);
    return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace

TEST_CASE("dark state and trace preservation") {
    SystemParams p;
    p.n_atoms = 7;
    p.chi = 1.3;
    const CollectiveDensity ground = pure_density(dicke_basis_state(SpinSector::maximal(7), 7));
    CHECK(collective_rhs(ground.rho, p).norm() == 0.0);

    p.omega = 2.0;
    const Eigen::MatrixXcd d = collective_rhs(minus_x(7).rho, p);
    CHECK(std::abs(d.trace()) < 1e-13);
    CHECK((d - d.adjoint()).norm() < 1e-13);

    p.gamma_s = 0.5;
    CHECK_THROWS_AS(collective_rhs(ground.rho, p), NonCollectiveParams);
}

TEST_CASE("single spin follows the optical Bloch equations") {
    // N = 1: H = chi |up><up| + (Omega/2) sigma_x, decay Gamma. The reference
    // integrates the Bloch vector (u, v, w) directly.
    SystemParams p;
    p.n_atoms = 1;
    p.chi = 0.7;
    p.omega = 2.3;
    const std::vector<double> grid = linspace_grid(4.0, 40);
    const auto got = evolve_collective(pure_density(dicke_basis_state(SpinSector::maximal(1), 1)), p, grid,
                                       OdeOptions{1e-11, 1e-13});

    Eigen::Vector3d s(0.0, 0.0, -1.0);  // <sigma_x>, <sigma_y>, <sigma_z>
    std::size_t k = 0;
    double worst = 0.0;
    integrate_dopri5(
        [&](double, const Eigen::Vector3d& v, Eigen::Vector3d& dv) {
            const double g = p.gamma_c, d = p.chi, om = p.omega;
            dv(0) = -0.5 * g * v(0) - d * v(1);
            dv(1) = d * v(0) - 0.5 * g * v(1) - om * v(2);
            dv(2) = om * v(1) - g * (v(2) + 1.0);
        },
        s, 0.0, grid,
        [&](double, const Eigen::Vector3d& v) {
            worst = std::max(worst, (0.5 * v - got[k++].mean).cwiseAbs().maxCoeff());
        },
        OdeOptions{1e-12, 1e-14});
    CHECK(worst < 1e-9);
}

TEST_CASE("total spin is conserved and the density stays physical") {
    const int n = 30;
    const SystemParams p = SystemParams::from_upsilon_ratio(n, 1.0, 0.0, 0.9);
    CollectiveDensity final_state;
    const auto m = evolve_collective(minus_x(n), p, linspace_grid(1.0, 20), collective_ode_defaults(), &final_state);
    const double jj = 0.5 * n * (0.5 * n + 1);
    for (const auto& x : m) {
        CHECK(std::abs(x.j2 / jj - 1.0) < 1e-8);
        CHECK(std::abs(n_eff(x.j2) / n - 1.0) < 1e-8);
    }
    const DensityDiagnostics d = diagnose_density(final_state);
    CHECK(d.hermiticity < 1e-10);
    CHECK(d.trace_error < 1e-10);
    CHECK(d.min_eigenvalue > -1e-8);
}

TEST_CASE("steady state with zero drive is the ground state") {
    SystemParams p;
    p.n_atoms = 12;
    p.chi = 1.0;
    for (SteadyMethod m : {SteadyMethod::Dense, SteadyMethod::Direct}) {
        SteadyOptions opt;
        opt.method = m;
        const SteadyResult r = steady_state_collective(p, opt);
        CHECK(std::abs(r.state.rho(12, 12) - 1.0) < 1e-12);
        CHECK(moments_of_density(r.state).mean(2) == doctest::Approx(-6.0));
    }
}

TEST_CASE("dense and direct steady states agree") {
    for (int n : {1, 2, 5, 16}) {
        for (double ratio : {0.4, 0.9, 1.4}) {
            const SystemParams p = SystemParams::from_upsilon_ratio(n, 0.8, 0.0, ratio);
            SteadyOptions dense, direct;
            dense.method = SteadyMethod::Dense;
            direct.method = SteadyMethod::Direct;
            const SteadyResult a = steady_state_collective(p, dense), b = steady_state_collective(p, direct);
            CHECK(a.residual < 1e-10);
            CHECK(b.residual < 1e-10);
            CHECK((a.state.rho - b.state.rho).norm() < 1e-9);
        }
    }
}

TEST_CASE("direct and long-time steady states agree at N = 60") {
    const SystemParams p = SystemParams::from_upsilon_ratio(60, 1.0, 0.0, 0.5);
    SteadyOptions direct, integ;
    direct.method = SteadyMethod::Direct;
    integ.method = SteadyMethod::Integrate;
    integ.t_max = 200.0;
    const SteadyResult a = steady_state_collective(p, direct), b = steady_state_collective(p, integ);
    CHECK(b.residual < 1e-10);
    const CollectiveMoments ma = moments_of_density(a.state), mb = moments_of_density(b.state);
    for (int i = 0; i < 3; ++i) {
        CHECK(rel(mb.mean(i), ma.mean(i)) < 1e-6);
        for (int j = 0; j < 3; ++j) CHECK(rel(mb.second(i, j), ma.second(i, j)) < 1e-6);
    }
}

TEST_CASE("integration that cannot converge reports the residual") {
    const SystemParams p = SystemParams::from_upsilon_ratio(20, 1.0, 0.0, 0.9);
    SteadyOptions opt;
    opt.method = SteadyMethod::Integrate;
    opt.t_max = 0.01;
    opt.check_interval = 0.005;
    try {
        steady_state_collective(p, opt);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.residual > 1e-10);
    }
}

TEST_CASE("steady inversion shows the superradiant to normal crossover") {
    const int n = 100;
    double prev = -2.0;
    double below = 0.0, above = 0.0;
    for (double ratio = 0.2; ratio < 1.61; ratio += 0.1) {
        const SystemParams p = SystemParams::from_upsilon_ratio(n, 1.0, 0.0, ratio);
        const double jz = moments_of_density(steady_state_collective(p).state).mean(2) / (0.5 * n);
        CHECK(jz >= prev - 1e-9);
        prev = jz;
        if (std::abs(ratio - 0.5) < 1e-9) below = jz;
        if (std::abs(ratio - 1.5) < 1e-9) above = jz;
    }
    CHECK(below < -0.8);
    CHECK(std::abs(above) < 0.05);
}
