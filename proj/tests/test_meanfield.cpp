#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "dickesq/meanfield.hpp"

using namespace dickesq;

namespace {

// (r, phi, z) equations in polar form, mapped to Cartesian with sx = 2 r cos phi,
// sy = 2 r sin phi.
MeanFieldState polar_rhs(const MeanFieldState& s, const SystemParams& p) {
    const double r = s.r(), phi = s.phi(), z = s.sz, n1 = p.n_atoms - 1.0, g = p.gamma_c + p.gamma_s;
    const double rdot = -0.5 * g * r + 0.5 * p.gamma_c * n1 * z * r - 0.5 * p.omega * z * std::sin(phi);
    const double phidot = -p.chi * n1 * z - p.omega / (2 * r) * z * std::cos(phi) + p.chi;
    const double zdot = -2 * p.gamma_c * n1 * r * r - g * (1 + z) + 2 * p.omega * r * std::sin(phi);
    MeanFieldState d;
    d.sx = 2 * (rdot * std::cos(phi) - r * std::sin(phi) * phidot);
    d.sy = 2 * (rdot * std::sin(phi) + r * std::cos(phi) * phidot);
    d.sz = zdot;
    return d;
}

double max_abs(const MeanFieldState& s) { return std::max({std::abs(s.sx), std::abs(s.sy), std::abs(s.sz)}); }

} // namespace

TEST_CASE("down state is fixed without drive") {
    SystemParams p;
    p.n_atoms = 50;
    p.chi = 1.0;
    p.gamma_s = 0.3;
    const MeanFieldState d = mf_rhs(MeanFieldState{0.0, 0.0, -1.0}, p);
    CHECK(max_abs(d) == 0.0);
    const auto fps = mf_steady_state(p);
    REQUIRE(fps.size() == 1);
    CHECK(fps[0].branch == Branch::Trivial);
    CHECK(fps[0].stable);
    CHECK(fps[0].state.sz == -1.0);

    const MeanFieldSeries s = evolve_meanfield(MeanFieldState{0.0, 0.0, -1.0}, p, {1.0, 5.0});
    CHECK(max_abs(mf_rhs(s.states.back(), p)) == 0.0);
    CHECK(s.states.back().sz == -1.0);
}

TEST_CASE("Cartesian equations match the polar form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        SystemParams p;
        p.n_atoms = 1 + static_cast<int>(u(rng) * 1000);
        p.chi = 3 * u(rng) - 1;
        p.gamma_s = 5 * u(rng);
        p.omega = 100 * u(rng);
        const double r = 0.01 + 0.49 * u(rng), phi = 2 * std::numbers::pi * u(rng);
        const double z = (2 * u(rng) - 1) * std::sqrt(1 - 4 * r * r);
        const MeanFieldState s = MeanFieldState::from_polar(r, phi, z);
        const MeanFieldState a = mf_rhs(s, p), b = polar_rhs(s, p);
        const double scale = std::max(1.0, max_abs(b));
        CHECK(std::abs(a.sx - b.sx) < 1e-9 * scale);
        CHECK(std::abs(a.sy - b.sy) < 1e-9 * scale);
        CHECK(std::abs(a.sz - b.sz) < 1e-9 * scale);
    }
}

TEST_CASE("analytic Jacobian matches central differences") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        SystemParams p;
        p.n_atoms = 200;
        p.chi = 1.0 + u(rng);
        p.gamma_s = 1.0 + u(rng);
        p.omega = 50.0 * (1.0 + u(rng));
        const MeanFieldState s{0.5 * u(rng), 0.5 * u(rng), 0.5 * u(rng)};
        const Matrix3 jac = mf_jacobian(s, p);
        const double h = 1e-6;
        for (int c = 0; c < 3; ++c) {
            MeanFieldState sp = s, sm = s;
            double* vp[3] = {&sp.sx, &sp.sy, &sp.sz};
            double* vm[3] = {&sm.sx, &sm.sy, &sm.sz};
            *vp[c] += h;
            *vm[c] -= h;
            const MeanFieldState fp = mf_rhs(sp, p), fm = mf_rhs(sm, p);
            const double fd[3] = {(fp.sx - fm.sx) / (2 * h), (fp.sy - fm.sy) / (2 * h), (fp.sz - fm.sz) / (2 * h)};
            for (int r = 0; r < 3; ++r)
                CHECK(std::abs(jac[r][c] - fd[r]) <= 1e-5 * std::max(1.0, std::abs(fd[r])));
        }
    }
}

TEST_CASE("superradiant roots at half the critical drive") {
    const SystemParams p = SystemParams::from_upsilon_ratio(10000, 1.0, 0.0, 0.5);
    const auto fps = mf_steady_state(p);
    const FixedPoint* lower = nullptr;
    const FixedPoint* upper = nullptr;
    for (const auto& fp : fps) {
        CHECK(fp.exact);
        CHECK(fp.residual < 1e-10);
        const double r = fp.state.r(), z = fp.state.sz;
        CHECK(std::abs(z * z + z + 2 * r * r) < 1e-10);
        if (fp.branch == Branch::Lower) lower = &fp;
        if (fp.branch == Branch::Upper) upper = &fp;
    }
    REQUIRE(lower);
    REQUIRE(upper);
    CHECK(std::abs(lower->state.r() - 0.25) <= 10.0 / p.n_atoms);
    CHECK(lower->state.sz == doctest::Approx(-0.85355).epsilon(2e-3 / 0.85355));
    CHECK(lower->stable);
    CHECK_FALSE(upper->stable);
    CHECK(upper->state.sz == doctest::Approx(-0.14645).epsilon(0.02));
    CHECK(stable_superradiant(fps) == lower);
}

TEST_CASE("root approaches the large-N limit as 1/N") {
    double prev = INFINITY;
    for (int n : {100, 1000, 10000}) {
        const SystemParams p = SystemParams::from_upsilon_ratio(n, 1.0, 0.0, 0.5);
        const auto fps = mf_steady_state(p);
        const FixedPoint* fp = stable_superradiant(fps);
        REQUIRE(fp);
        const double dev = std::abs(fp->state.r() - 0.25);
        CHECK(dev * n < 10.0);
        CHECK(dev < prev);
        prev = dev;
    }
}

TEST_CASE("superradiant branch ends at the primed critical drive") {
    const double target = 1.0 / std::sqrt(2.0);
    double last_with_root = 0.0;
    for (double ratio = 0.60; ratio < 0.80; ratio += 0.001) {
        const SystemParams p = SystemParams::from_upsilon_ratio(10000, 1.0, 0.0, ratio);
        if (stable_superradiant(mf_steady_state(p))) last_with_root = ratio;
    }
    CHECK(std::abs(last_with_root - target) / target < 0.01);

    const SystemParams beyond = SystemParams::from_upsilon_ratio(10000, 1.0, 0.0, 0.9);
    const auto fps = mf_steady_state(beyond);
    REQUIRE(fps.size() == 1);
    CHECK(fps[0].branch == Branch::Normal);
    CHECK(std::abs(fps[0].state.sz) < 1e-6);
    CHECK(fps[0].state.r() == doctest::Approx(1.0 / (10000 * 0.9)).epsilon(0.05));
    CHECK(fps[0].stable);
}

TEST_CASE("branches merge at r = 1/sqrt 8") {
    // Closest approach to the bifurcation from below: roots on both branches
    // with z near -1/2.
    const SystemParams p = SystemParams::from_upsilon_ratio(100000, 1.0, 0.0, 0.7070);
    // Ignore the finite-N root near r = 0.
    std::vector<FixedPoint> fps;
    for (const auto& fp : mf_steady_state(p))
        if (fp.state.r() > 0.1) fps.push_back(fp);
    REQUIRE(fps.size() == 2);
    for (const auto& fp : fps) {
        CHECK(fp.state.r() == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(0.01));
        CHECK(fp.state.sz == doctest::Approx(-0.5).epsilon(0.1));
    }
}

TEST_CASE("dynamics relax onto the stable fixed point") {
    // The slowest mode relaxes at a rate of order gamma_c, not N gamma_c.
    const SystemParams p = SystemParams::from_upsilon_ratio(100, 1.0, 0.0, 0.5);
    const auto fps = mf_steady_state(p);
    const FixedPoint* fp = stable_superradiant(fps);
    REQUIRE(fp);
    CHECK(fp->branch == Branch::Lower);
    const MeanFieldSeries s =
        evolve_meanfield(MeanFieldState::from_bloch_angles(std::numbers::pi / 2, std::numbers::pi), p, {20.0});
    const MeanFieldState& e = s.states.back();
    CHECK(std::abs(e.sx - fp->state.sx) < 1e-6);
    CHECK(std::abs(e.sy - fp->state.sy) < 1e-6);
    CHECK(std::abs(e.sz - fp->state.sz) < 1e-6);
}

TEST_CASE("Bloch length bound along trajectories") {
    for (double gs : {0.0, 1.0, 10.0}) {
        const SystemParams p = SystemParams::from_upsilon_ratio(500, 1.0, gs, 0.9);
        std::vector<double> grid;
        for (int k = 1; k <= 200; ++k) grid.push_back(0.01 * k);
        const MeanFieldSeries s =
            evolve_meanfield(MeanFieldState::from_bloch_angles(std::numbers::pi / 2, std::numbers::pi), p, grid);
        CHECK(s.norm_violations == 0);
        CHECK(s.max_norm2 <= 1.0 + 1e-9);
    }
}
