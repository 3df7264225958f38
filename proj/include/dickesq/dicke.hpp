// Collective-spin algebra inside a single total-spin sector.
//
// Basis ordering is descending in m everywhere: index i holds m = J - i.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace dickesq {

using cplx = std::complex<double>;

struct SpinSector {
    int n_atoms{1};
    int two_j{1};

    double j() const { return 0.5 * two_j; }
    int dim() const { return two_j + 1; }
    double m(int i) const { return j() - i; }

    // Throws InvalidParams unless 0 <= 2J <= N with matching parity.
    void validate() const;

    static SpinSector maximal(int n_atoms) { return {n_atoms, n_atoms}; }
};

// Tridiagonal data: lower[i] is the J- coefficient from m_i to m_i - 1
// (zero at the last index), m[i] the Jz eigenvalue and jpjm[i] = lower[i]^2
// the diagonal of J+J-.
struct Ladder {
    std::vector<double> lower;
    std::vector<double> m;
    std::vector<double> jpjm;
};

Ladder ladder_elements(const SpinSector& s);

struct DickeVector {
    SpinSector sector;
    Eigen::VectorXcd amp;
};

DickeVector dicke_basis_state(const SpinSector& s, int index);

// Rotated |J, J>: <J> = J (sin t cos p, sin t sin p, cos t).
DickeVector coherent_spin_state(const SpinSector& s, double theta, double phi);

// The six independent operator expectations that determine all first and
// second collective moments. Averages of these are again valid inputs, which
// is how ensembles are reduced.
struct LadderExpectations {
    cplx jp{0.0};      // <J+>
    double jz{0.0};    // <Jz>
    double jpjm{0.0};  // <J+ J->
    cplx jp2{0.0};     // <J+^2>
    double jz2{0.0};   // <Jz^2>
    cplx jzjp{0.0};    // <Jz J+>

    LadderExpectations& operator+=(const LadderExpectations& o);
    LadderExpectations& operator*=(double s);
};

// Normalizes by the squared norm of `amp`.
LadderExpectations ladder_expectations(const Ladder& lad, const Eigen::VectorXcd& amp);

struct CollectiveMoments {
    Eigen::Vector3d mean{Eigen::Vector3d::Zero()};
    Eigen::Matrix3d second{Eigen::Matrix3d::Zero()};  // <{Ja, Jb}>/2
    double j2{0.0};

    Eigen::Matrix3d covariance() const { return second - mean * mean.transpose(); }
};

CollectiveMoments moments_from_expectations(const LadderExpectations& e);
CollectiveMoments moments_of_state(const DickeVector& psi);

// Smallest |<J>| for which the squeezing parameter is reported.
double bloch_epsilon(int n_atoms);

// Wineland parameter N * min transverse variance / |<J>|^2.
// Throws BlochVectorVanishes when |<J>| <= bloch_epsilon(N).
double squeezing_parameter(const CollectiveMoments& m, int n_atoms);

double n_eff(double j2);
double upsilon_eff(double omega, double n_eff_value);

// Decibel form used in output: -10 log10(xi^2).
double squeezing_db(double xi2);

} // namespace dickesq
