#include "dickesq/dicke.hpp"

#include <cmath>
#include <string>

#include "dickesq/error.hpp"

namespace dickesq {

void SpinSector::validate() const {
    if (n_atoms < 1) throw InvalidParams("sector: n_atoms must be >= 1");
    if (two_j < 0 || two_j > n_atoms || (n_atoms - two_j) % 2 != 0)
        throw InvalidParams("sector: 2J = " + std::to_string(two_j) +
                            " is not valid for N = " + std::to_string(n_atoms));
}

Ladder ladder_elements(const SpinSector& s) {
    s.validate();
    const int d = s.dim();
    const double j = s.j();
    Ladder lad;
    lad.lower.resize(d);
    lad.m.resize(d);
    lad.jpjm.resize(d);
    for (int i = 0; i < d; ++i) {
        const double m = s.m(i);
        // J(J+1) - m(m-1) = (J + m)(J - m + 1), exact in floating point for half-integers
        const double e = i == d - 1 ? 0.0 : (j + m) * (j - m + 1.0);
        lad.m[i] = m;
        lad.jpjm[i] = e;
        lad.lower[i] = std::sqrt(e);
    }
    return lad;
}

DickeVector dicke_basis_state(const SpinSector& s, int index) {
    s.validate();
    if (index < 0 || index >= s.dim()) throw InvalidParams("dicke_basis_state: index out of range");
    DickeVector v{s, Eigen::VectorXcd::Zero(s.dim())};
    v.amp(index) = 1.0;
    return v;
}

DickeVector coherent_spin_state(const SpinSector& s, double theta, double phi) {
    s.validate();
    if (s.two_j != s.n_atoms)
        throw InvalidParams("coherent_spin_state requires the maximal sector J = N/2");
    const int n = s.two_j;
    const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta);
    DickeVector v{s, Eigen::VectorXcd::Zero(n + 1)};
    // Work in logs so large N does not overflow the binomial.
    const double lc = std::log(std::abs(c)), ls = std::log(std::abs(sn));
    for (int k = 0; k <= n; ++k) {
        // k = J - m flips
        double mag = 0.0;
        if ((n - k > 0 && c == 0.0) || (k > 0 && sn == 0.0)) {
            mag = 0.0;
        } else {
            const double lb = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
            const double lmag = 0.5 * lb + (n - k > 0 ? (n - k) * lc : 0.0) + (k > 0 ? k * ls : 0.0);
            mag = std::exp(lmag);
        }
        double sign = 1.0;
        if (c < 0.0 && (n - k) % 2 == 1) sign = -sign;
        if (sn < 0.0 && k % 2 == 1) sign = -sign;
        v.amp(k) = sign * mag * std::polar(1.0, k * phi);
    }
    v.amp /= v.amp.norm();
    return v;
}

LadderExpectations& LadderExpectations::operator+=(const LadderExpectations& o) {
    jp += o.jp;
    jz += o.jz;
    jpjm += o.jpjm;
    jp2 += o.jp2;
    jz2 += o.jz2;
    jzjp += o.jzjp;
    return *this;
}

LadderExpectations& LadderExpectations::operator*=(double s) {
    jp *= s;
    jz *= s;
    jpjm *= s;
    jp2 *= s;
    jz2 *= s;
    jzjp *= s;
    return *this;
}

LadderExpectations ladder_expectations(const Ladder& lad, const Eigen::VectorXcd& amp) {
    const Eigen::Index d = amp.size();
    LadderExpectations e;
    double norm2 = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double p = std::norm(amp(i));
        norm2 += p;
        e.jz += lad.m[i] * p;
        e.jz2 += lad.m[i] * lad.m[i] * p;
        e.jpjm += lad.jpjm[i] * p;
        if (i + 1 < d) {
            const cplx x = lad.lower[i] * std::conj(amp(i)) * amp(i + 1);
            e.jp += x;
            e.jzjp += lad.m[i] * x;
        }
        if (i + 2 < d) e.jp2 += lad.lower[i] * lad.lower[i + 1] * std::conj(amp(i)) * amp(i + 2);
    }
    if (!(norm2 > 0.0)) throw InvalidParams("ladder_expectations: zero-norm state");
    e *= 1.0 / norm2;
    return e;
}

CollectiveMoments moments_from_expectations(const LadderExpectations& e) {
    CollectiveMoments m;
    m.mean = {e.jp.real(), e.jp.imag(), e.jz};
    // J-J+ = J+J- - 2Jz
    const double anti = 2.0 * e.jpjm - 2.0 * e.jz;
    const double xx = 0.25 * (2.0 * e.jp2.real() + anti);
    const double yy = 0.25 * (-2.0 * e.jp2.real() + anti);
    const double xy = 0.5 * e.jp2.imag();
    const double xz = e.jzjp.real() - 0.5 * e.jp.real();
    const double yz = e.jzjp.imag() - 0.5 * e.jp.imag();
    m.second << xx, xy, xz, xy, yy, yz, xz, yz, e.jz2;
    m.j2 = e.jpjm - e.jz + e.jz2;
    return m;
}

CollectiveMoments moments_of_state(const DickeVector& psi) {
    return moments_from_expectations(ladder_expectations(ladder_elements(psi.sector), psi.amp));
}

double bloch_epsilon(int n_atoms) { return 1e-9 * n_atoms; }

double squeezing_parameter(const CollectiveMoments& m, int n_atoms) {
    const double len = m.mean.norm();
    if (!(len > bloch_epsilon(n_atoms)))
        throw BlochVectorVanishes("squeezing parameter undefined: |<J>| = " + std::to_string(len));
    const Eigen::Vector3d n = m.mean / len;
    Eigen::Vector3d ref = Eigen::Vector3d::Zero();
    Eigen::Index k = 0;
    n.cwiseAbs().minCoeff(&k);
    ref(k) = 1.0;
    const Eigen::Vector3d n1 = n.cross(ref).normalized();
    const Eigen::Vector3d n2 = n.cross(n1);
    const Eigen::Matrix3d c = m.covariance();
    const double a = n1.dot(c * n1), b = n1.dot(c * n2), d = n2.dot(c * n2);
    const double lmin = 0.5 * (a + d) - std::hypot(0.5 * (a - d), b);
    return n_atoms * lmin / (len * len);
}

double n_eff(double j2) {
    if (j2 < 0.0) throw InvalidParams("n_eff: negative <J^2>");
    return 2.0 * std::sqrt(0.25 + j2) - 1.0;
}

double upsilon_eff(double omega, double n_eff_value) {
    if (!(n_eff_value > 1e-12)) throw InvalidParams("upsilon_eff: N_eff vanishes");
    return 2.0 * omega / n_eff_value;
}

double squeezing_db(double xi2) { return -10.0 * std::log10(xi2); }

} // namespace dickesq
