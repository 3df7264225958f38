#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

#include "dickesq/dicke.hpp"
#include "dickesq/error.hpp"

using namespace dickesq;

namespace {

// Dense spin matrices built straight from the angular-momentum formulas.
struct DenseSpin {
    Eigen::MatrixXcd jx, jy, jz;
};

DenseSpin dense_spin(const SpinSector& s) {
    const int d = s.dim();
    const double j = s.j();
    Eigen::MatrixXcd jm = Eigen::MatrixXcd::Zero(d, d);
    DenseSpin out;
    out.jz = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double m = j - i;
        out.jz(i, i) = m;
        if (i + 1 < d) jm(i + 1, i) = std::sqrt(j * (j + 1) - m * (m - 1));
    }
    const Eigen::MatrixXcd jp = jm.adjoint();
    out.jx = 0.5 * (jp + jm);
    out.jy = cplx(0.0, -0.5) * (jp - jm);
    return out;
}

double quad(const Eigen::VectorXcd& v, const Eigen::MatrixXcd& a) { return v.dot(a * v).real(); }

Eigen::VectorXcd random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
    return v / v.norm();
}

Eigen::Matrix3d rotation(double a, double b, double c) {
    return (Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(b, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(c, Eigen::Vector3d::UnitZ()))
        .toRotationMatrix();
}

} // namespace

TEST_CASE("ladder elements") {
    const Ladder half = ladder_elements({1, 1});
    CHECK(half.lower[0] == doctest::Approx(1.0));
    CHECK(half.lower[1] == 0.0);

    const Ladder one = ladder_elements({2, 2});
    CHECK(one.m[1] == 0.0);
    CHECK(one.lower[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    for (int two_j : {1, 4, 7, 20}) {
        const SpinSector s{two_j + 2, two_j};
        const Ladder lad = ladder_elements(s);
        const double j = s.j();
        for (int i = 0; i < s.dim(); ++i) {
            const double m = s.m(i);
            CHECK(lad.m[i] == m);
            CHECK(lad.jpjm[i] == doctest::Approx(j * (j + 1) - m * (m - 1)).epsilon(1e-14));
        }
    }
}

TEST_CASE("sector validation") {
    CHECK_THROWS_AS(SpinSector({4, 3}).validate(), InvalidParams);
    CHECK_THROWS_AS(SpinSector({4, 6}).validate(), InvalidParams);
    CHECK_THROWS_AS(SpinSector({4, -2}).validate(), InvalidParams);
    CHECK_NOTHROW(SpinSector({4, 0}).validate());
    CHECK_NOTHROW(SpinSector({5, 1}).validate());
}

TEST_CASE("coherent spin states") {
    const CollectiveMoments up = moments_of_state(coherent_spin_state(SpinSector::maximal(6), 0.0, 0.0));
    CHECK(up.mean(2) == doctest::Approx(3.0));

    const int n = 10;
    const CollectiveMoments mx = moments_of_state(coherent_spin_state(SpinSector::maximal(n), std::numbers::pi / 2,
                                                                      std::numbers::pi));
    CHECK(mx.mean(0) == doctest::Approx(-n / 2.0).epsilon(1e-14));
    CHECK(std::abs(mx.mean(1)) < 1e-13);
    CHECK(std::abs(mx.mean(2)) < 1e-13);
    CHECK(mx.j2 == doctest::Approx(n / 2.0 * (n / 2.0 + 1)).epsilon(1e-14));

    // N = 2, theta = pi/2, phi = 0: (1/2, 1/sqrt 2, 1/2) up to a global phase
    const DickeVector two = coherent_spin_state(SpinSector::maximal(2), std::numbers::pi / 2, 0.0);
    const cplx phase = two.amp(0) / std::abs(two.amp(0));
    CHECK(std::abs(two.amp(0) / phase - 0.5) < 1e-15);
    CHECK(std::abs(two.amp(1) / phase - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(two.amp(2) / phase - 0.5) < 1e-15);

    // Mean points along the requested direction for arbitrary angles
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> th(0.0, std::numbers::pi), ph(-std::numbers::pi, std::numbers::pi);
    for (int k = 0; k < 20; ++k) {
        const double t = th(rng), p = ph(rng);
        const int nn = 1 + k % 9;
        const DickeVector psi = coherent_spin_state(SpinSector::maximal(nn), t, p);
        CHECK(psi.amp.norm() == doctest::Approx(1.0).epsilon(1e-14));
        const CollectiveMoments m = moments_of_state(psi);
        const Eigen::Vector3d dir(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
        CHECK((m.mean - 0.5 * nn * dir).norm() < 1e-12 * nn);
        CHECK(squeezing_parameter(m, nn) == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(coherent_spin_state({4, 2}, 0.3, 0.2), InvalidParams);
}

TEST_CASE("large-N coherent state stays normalized") {
    const DickeVector psi = coherent_spin_state(SpinSector::maximal(20000), 1.1, 0.4);
    CHECK(psi.amp.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const CollectiveMoments m = moments_of_state(psi);
    CHECK(m.mean.norm() == doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("moments of simple states") {
    const int n = 8;
    const SpinSector s = SpinSector::maximal(n);
    const CollectiveMoments down = moments_of_state(dicke_basis_state(s, n));
    CHECK(down.mean(2) == doctest::Approx(-4.0));
    const Eigen::Matrix3d c = down.covariance();
    CHECK(c(0, 0) == doctest::Approx(2.0));
    CHECK(c(1, 1) == doctest::Approx(2.0));
    CHECK(std::abs(c(2, 2)) < 1e-14);

    DickeVector ghz{SpinSector::maximal(2), Eigen::VectorXcd::Zero(3)};
    ghz.amp(0) = ghz.amp(2) = 1.0 / std::sqrt(2.0);
    const CollectiveMoments g = moments_of_state(ghz);
    CHECK(std::abs(g.mean(2)) < 1e-15);
    CHECK(g.second(2, 2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("moments match dense quadratic forms") {
    std::mt19937_64 rng(11);
    for (int two_j : {1, 3, 5, 7, 9}) {
        const SpinSector s{9, two_j};
        const DenseSpin d = dense_spin(s);
        const Eigen::MatrixXcd* ops[3] = {&d.jx, &d.jy, &d.jz};
        for (int rep = 0; rep < 5; ++rep) {
            const DickeVector psi{s, 2.0 * random_state(s.dim(), rng)};  // unnormalized on purpose
            const Eigen::VectorXcd v = psi.amp / psi.amp.norm();
            const CollectiveMoments m = moments_of_state(psi);
            for (int a = 0; a < 3; ++a) {
                CHECK(m.mean(a) == doctest::Approx(quad(v, *ops[a])).epsilon(1e-12));
                for (int b = 0; b < 3; ++b) {
                    const Eigen::MatrixXcd anti = 0.5 * (*ops[a] * *ops[b] + *ops[b] * *ops[a]);
                    CHECK(std::abs(m.second(a, b) - quad(v, anti)) < 1e-12 * (1 + s.j() * s.j()));
                }
            }
            const double jj = s.j() * (s.j() + 1);
            CHECK(m.j2 == doctest::Approx(jj).epsilon(1e-12));
            CHECK(m.second.trace() == doctest::Approx(m.j2).epsilon(1e-12));
            CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m.covariance()).eigenvalues().minCoeff() > -1e-10);
        }
    }
}

TEST_CASE("squeezing parameter") {
    CollectiveMoments zero;
    zero.second = Eigen::Matrix3d::Identity();
    CHECK_THROWS_AS(squeezing_parameter(zero, 10), BlochVectorVanishes);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 2 + rep % 7;
        const DickeVector psi{SpinSector::maximal(n), random_state(n + 1, rng)};
        const CollectiveMoments m = moments_of_state(psi);
        if (m.mean.norm() < 1e-3) continue;
        const double xi2 = squeezing_parameter(m, n);

        // Brute force over 3600 transverse directions
        const Eigen::Vector3d u = m.mean.normalized();
        Eigen::Vector3d e1 = u.unitOrthogonal(), e2 = u.cross(e1);
        const Eigen::Matrix3d cov = m.covariance();
        double best = INFINITY;
        for (int k = 0; k < 3600; ++k) {
            const double a = std::numbers::pi * k / 3600.0;
            const Eigen::Vector3d dir = std::cos(a) * e1 + std::sin(a) * e2;
            best = std::min(best, n * dir.dot(cov * dir) / m.mean.squaredNorm());
        }
        CHECK(xi2 <= best * (1 + 1e-12));
        CHECK(xi2 == doctest::Approx(best).epsilon(1e-4));  // angular grid resolution

        // Frame covariance
        const Eigen::Matrix3d r = rotation(ang(rng), ang(rng), ang(rng));
        CollectiveMoments rot = m;
        rot.mean = r * m.mean;
        rot.second = r * m.second * r.transpose();
        CHECK(squeezing_parameter(rot, n) == doctest::Approx(xi2).epsilon(1e-10));
    }
    CHECK(squeezing_db(0.1) == doctest::Approx(10.0));
}

TEST_CASE("squeezing parameter against a fine transverse minimization") {
    // The 360-angle grid only bounds the error; golden-section refinement
    // around the best grid angle pins the minimum to 1e-6.
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 3 + rep % 5;
        const DickeVector psi{SpinSector::maximal(n), random_state(n + 1, rng)};
        const CollectiveMoments m = moments_of_state(psi);
        if (m.mean.norm() < 1e-3) continue;
        const Eigen::Vector3d u = m.mean.normalized();
        const Eigen::Vector3d e1 = u.unitOrthogonal(), e2 = u.cross(e1);
        const Eigen::Matrix3d cov = m.covariance();
        auto f = [&](double a) {
            const Eigen::Vector3d dir = std::cos(a) * e1 + std::sin(a) * e2;
            return n * dir.dot(cov * dir) / m.mean.squaredNorm();
        };
        int best_k = 0;
        for (int k = 1; k < 360; ++k)
            if (f(std::numbers::pi * k / 360.0) < f(std::numbers::pi * best_k / 360.0)) best_k = k;
        double lo = std::numbers::pi * (best_k - 1) / 360.0, hi = std::numbers::pi * (best_k + 1) / 360.0;
        const double gr = (std::sqrt(5.0) - 1) / 2;
        for (int it = 0; it < 100; ++it) {
            const double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
            if (f(a) < f(b)) hi = b;
            else lo = a;
        }
        CHECK(squeezing_parameter(m, n) == doctest::Approx(f(0.5 * (lo + hi))).epsilon(1e-6));
    }
}

TEST_CASE("effective atom number") {
    for (int n : {1, 2, 17, 2000}) CHECK(n_eff(0.5 * n * (0.5 * n + 1)) == doctest::Approx(n).epsilon(1e-13));
    CHECK(n_eff(0.0) == 0.0);
    CHECK(n_eff(0.75) == doctest::Approx(1.0));
    double prev = -1.0;
    for (double j2 = 0.0; j2 < 100.0; j2 += 0.37) {
        CHECK(n_eff(j2) > prev);
        prev = n_eff(j2);
    }
    CHECK(upsilon_eff(1000.0, 1000.0) == doctest::Approx(2.0));
    CHECK(upsilon_eff(1000.0, 500.0) == doctest::Approx(2 * upsilon_eff(1000.0, 1000.0)));
}
