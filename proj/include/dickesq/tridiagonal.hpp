// Complex tridiagonal matrices and a rational (Pade) approximation of exp(tau A).

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace dickesq {

// lower(i) = A(i+1, i), upper(i) = A(i, i+1).
struct Tridiagonal {
    Eigen::VectorXcd lower;
    Eigen::VectorXcd diag;
    Eigen::VectorXcd upper;

    Eigen::Index size() const { return diag.size(); }
};

Eigen::VectorXcd apply(const Tridiagonal& a, const Eigen::VectorXcd& x);
void apply_into(const Tridiagonal& a, const Eigen::VectorXcd& x, Eigen::VectorXcd& out);

// Solves A x = b in place (LAPACK zgtsv, partial pivoting). Throws Error on a
// singular system.
void solve_in_place(const Tridiagonal& a, Eigen::VectorXcd& b);

// Diagonal Pade approximants r(z) = prod_k (1 + z/q_k) / (1 - z/q_k), where q_k
// are the roots of the denominator polynomial.
struct PadeRoots {
    static const std::array<std::complex<double>, 3>& order3();
    static const std::array<std::complex<double>, 4>& order4();
};

// Overwrites x with r(tau A) x for the given root set.
template <std::size_t K>
void pade_apply(const Tridiagonal& a, double tau, const std::array<std::complex<double>, K>& roots,
                Eigen::VectorXcd& x);

extern template void pade_apply<3>(const Tridiagonal&, double, const std::array<std::complex<double>, 3>&,
                                   Eigen::VectorXcd&);
extern template void pade_apply<4>(const Tridiagonal&, double, const std::array<std::complex<double>, 4>&,
                                   Eigen::VectorXcd&);

} // namespace dickesq
