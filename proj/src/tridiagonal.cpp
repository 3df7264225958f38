#include "dickesq/tridiagonal.hpp"

#include <string>
#include <vector>

#include "dickesq/error.hpp"

extern "C" void zgtsv_(const int* n, const int* nrhs, std::complex<double>* dl, std::complex<double>* d,
                       std::complex<double>* du, std::complex<double>* b, const int* ldb, int* info);

namespace dickesq {

void apply_into(const Tridiagonal& a, const Eigen::VectorXcd& x, Eigen::VectorXcd& out) {
    const Eigen::Index n = a.size();
    out.resize(n);
    if (n == 0) return;
    out = a.diag.cwiseProduct(x);
    if (n == 1) return;
    out.tail(n - 1) += a.lower.cwiseProduct(x.head(n - 1));
    out.head(n - 1) += a.upper.cwiseProduct(x.tail(n - 1));
}

Eigen::VectorXcd apply(const Tridiagonal& a, const Eigen::VectorXcd& x) {
    Eigen::VectorXcd out;
    apply_into(a, x, out);
    return out;
}

void solve_in_place(const Tridiagonal& a, Eigen::VectorXcd& b) {
    const int n = static_cast<int>(a.size());
    if (n == 0) return;
    thread_local std::vector<std::complex<double>> dl, d, du;
    dl.assign(a.lower.data(), a.lower.data() + std::max(0, n - 1));
    d.assign(a.diag.data(), a.diag.data() + n);
    du.assign(a.upper.data(), a.upper.data() + std::max(0, n - 1));
    const int nrhs = 1, ldb = n;
    int info = 0;
    zgtsv_(&n, &nrhs, dl.data(), d.data(), du.data(), b.data(), &ldb, &info);
    if (info != 0) throw Error("tridiagonal solve failed (zgtsv info = " + std::to_string(info) + ")");
}

const std::array<std::complex<double>, 3>& PadeRoots::order3() {
    // 1 - z/2 + z^2/10 - z^3/120 = 0
    static const std::array<std::complex<double>, 3> r{{{4.644370709252171, 0.0},
                                                         {3.6778146453739096, 3.508761919567443},
                                                         {3.6778146453739096, -3.508761919567443}}};
    return r;
}

const std::array<std::complex<double>, 4>& PadeRoots::order4() {
    // 1 - z/2 + 3z^2/28 - z^3/84 + z^4/1680 = 0
    static const std::array<std::complex<double>, 4> r{{{5.792421205640744, 1.7344682578690075},
                                                         {5.792421205640744, -1.7344682578690075},
                                                         {4.207578794359256, 5.314836083713505},
                                                         {4.207578794359256, -5.314836083713505}}};
    return r;
}

template <std::size_t K>
void pade_apply(const Tridiagonal& a, double tau, const std::array<std::complex<double>, K>& roots,
                Eigen::VectorXcd& x) {
    thread_local Tridiagonal m;
    thread_local Eigen::VectorXcd y;
    for (const auto& q : roots) {
        const std::complex<double> s = tau / q;
        // y = (I + s A) x
        m.lower = s * a.lower;
        m.upper = s * a.upper;
        m.diag = (s * a.diag).array() + 1.0;
        apply_into(m, x, y);
        // x = (I - s A)^{-1} y
        m.lower = -m.lower;
        m.upper = -m.upper;
        m.diag = (-s * a.diag).array() + 1.0;
        x = y;
        solve_in_place(m, x);
    }
}

template void pade_apply<3>(const Tridiagonal&, double, const std::array<std::complex<double>, 3>&,
                            Eigen::VectorXcd&);
template void pade_apply<4>(const Tridiagonal&, double, const std::array<std::complex<double>, 4>&,
                            Eigen::VectorXcd&);

} // namespace dickesq
