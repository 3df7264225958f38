#include "dickesq/oracle.hpp"

#include <Eigen/Sparse>

#include <bit>
#include <cmath>
#include <memory>

#include "dickesq/error.hpp"

namespace dickesq {
namespace {

using Sparse = Eigen::SparseMatrix<cplx>;

struct Operators {
    int n;
    Eigen::Index dim;
    Sparse jm, jp, jz, jpjm, h;

    Operators(int n_atoms, const SystemParams* p) : n(n_atoms), dim(Eigen::Index(1) << n_atoms) {
        std::vector<Eigen::Triplet<cplx>> tm, tz;
        for (Eigen::Index s = 0; s < dim; ++s) {
            const int up = std::popcount(static_cast<unsigned>(s));
            tz.emplace_back(s, s, up - 0.5 * n);
            for (int k = 0; k < n; ++k)
                if (s >> k & 1) tm.emplace_back(s ^ (Eigen::Index(1) << k), s, 1.0);
        }
        jm.resize(dim, dim);
        jm.setFromTriplets(tm.begin(), tm.end());
        jz.resize(dim, dim);
        jz.setFromTriplets(tz.begin(), tz.end());
        jp = jm.adjoint();
        jpjm = jp * jm;
        if (p) h = p->chi * jpjm + 0.5 * p->omega * (jp + jm);
    }
};

Sparse single_op(int n, int k, char which) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    std::vector<Eigen::Triplet<cplx>> t;
    for (Eigen::Index s = 0; s < dim; ++s) {
        const bool up = s >> k & 1;
        if (which == 'z') t.emplace_back(s, s, up ? 1.0 : -1.0);
        if (which == '+' && !up) t.emplace_back(s | (Eigen::Index(1) << k), s, 1.0);
        if (which == '-' && up) t.emplace_back(s ^ (Eigen::Index(1) << k), s, 1.0);
    }
    Sparse m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

cplx expect(const Sparse& op, const Eigen::MatrixXcd& rho) {
    cplx s = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (Sparse::InnerIterator it(op, k); it; ++it) s += it.value() * rho(it.col(), it.row());
    return s;
}

void check_size(int n) {
    if (n < 1 || n > kOracleMaxAtoms)
        throw InvalidParams("brute-force oracle supports 1 <= N <= " + std::to_string(kOracleMaxAtoms));
}

void rhs_into(const Operators& ops, const SystemParams& p, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
    // -i(K rho - rho K^dag) + Gamma Jm rho Jp with K = h - (i/2) Gamma JpJm. Only valid for
    // Hermitian rho; every product is sparse times dense.
    const Eigen::MatrixXcd a = ops.jm * rho;
    const Eigen::MatrixXcd jm_a_dag = ops.jm * a.adjoint();
    out.noalias() = cplx(-0.5 * p.gamma_c, -p.chi) * (ops.jp * a);
    out.noalias() += cplx(0.0, -0.5 * p.omega) * (ops.jp * rho + a);
    out += out.adjoint().eval();
    out.noalias() += p.gamma_c * jm_a_dag.adjoint();
    if (p.gamma_s == 0.0) return;
    const Eigen::Index dim = ops.dim;
    for (Eigen::Index c = 0; c < dim; ++c) {
        const int upc = std::popcount(static_cast<unsigned>(c));
        for (Eigen::Index r = 0; r < dim; ++r) {
            const int upr = std::popcount(static_cast<unsigned>(r));
            cplx v = -0.5 * (upr + upc) * rho(r, c);
            for (int k = 0; k < ops.n; ++k) {
                const Eigen::Index bit = Eigen::Index(1) << k;
                if (!(r & bit) && !(c & bit)) v += rho(r | bit, c | bit);
            }
            out(r, c) += p.gamma_s * v;
        }
    }
}

} // namespace

OracleDensity oracle_product_state(int n_atoms, double theta, double phi) {
    check_size(n_atoms);
    const cplx up = std::cos(0.5 * theta), down = std::polar(std::sin(0.5 * theta), phi);
    const Eigen::Index dim = Eigen::Index(1) << n_atoms;
    Eigen::VectorXcd v(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        cplx a = 1.0;
        for (int k = 0; k < n_atoms; ++k) a *= (s >> k & 1) ? up : down;
        v(s) = a;
    }
    return {n_atoms, v * v.adjoint()};
}

Eigen::MatrixXcd oracle_rhs(const OracleDensity& rho, const SystemParams& p) {
    check_size(rho.n_atoms);
    p.validate();
    Operators ops(rho.n_atoms, &p);
    Eigen::MatrixXcd out;
    rhs_into(ops, p, rho.rho, out);
    return out;
}

LadderExpectations oracle_expectations(const OracleDensity& rho) {
    check_size(rho.n_atoms);
    const Operators ops(rho.n_atoms, nullptr);
    const Sparse jp2 = ops.jp * ops.jp, jz2 = ops.jz * ops.jz, jzjp = ops.jz * ops.jp;
    const double tr = rho.rho.trace().real();
    LadderExpectations e;
    e.jp = expect(ops.jp, rho.rho);
    e.jz = expect(ops.jz, rho.rho).real();
    e.jpjm = expect(ops.jpjm, rho.rho).real();
    e.jp2 = expect(jp2, rho.rho);
    e.jz2 = expect(jz2, rho.rho).real();
    e.jzjp = expect(jzjp, rho.rho);
    e *= 1.0 / tr;
    return e;
}

CumulantStateC oracle_cumulants(const OracleDensity& rho) {
    check_size(rho.n_atoms);
    if (rho.n_atoms < 2) throw InvalidParams("oracle_cumulants needs N >= 2");
    const int n = rho.n_atoms;
    const Sparse p0 = single_op(n, 0, '+'), z0 = single_op(n, 0, 'z');
    const Sparse p1 = single_op(n, 1, '+'), m1 = single_op(n, 1, '-'), z1 = single_op(n, 1, 'z');
    const double tr = rho.rho.trace().real();
    CumulantStateC c;
    c.sp = expect(p0, rho.rho) / tr;
    c.sz = expect(z0, rho.rho) / tr;
    c.zp = expect(Sparse(z0 * p1), rho.rho) / tr;
    c.pm = expect(Sparse(p0 * m1), rho.rho) / tr;
    c.zz = expect(Sparse(z0 * z1), rho.rho) / tr;
    c.pp = expect(Sparse(p0 * p1), rho.rho) / tr;
    return c;
}

OdeOptions oracle_ode_defaults() {
    OdeOptions o;
    o.rtol = 1e-11;
    o.atol = 1e-13;
    return o;
}

std::vector<OracleSample> brute_force_oracle(const OracleDensity& rho0, const SystemParams& p,
                                             const std::vector<double>& t_grid, const OdeOptions& opt,
                                             OracleDensity* final_state) {
    check_size(rho0.n_atoms);
    p.validate();
    if (p.n_atoms != rho0.n_atoms) throw InvalidParams("brute_force_oracle: N mismatch");
    const Operators ops(p.n_atoms, &p);
    Eigen::MatrixXcd y = rho0.rho;
    std::vector<OracleSample> out;
    integrate_dopri5(
        [&](double, const Eigen::MatrixXcd& r, Eigen::MatrixXcd& dr) { rhs_into(ops, p, r, dr); }, y, 0.0,
        t_grid,
        [&](double t, const Eigen::MatrixXcd& r) {
            const OracleDensity d{p.n_atoms, r};
            OracleSample s{t, moments_from_expectations(oracle_expectations(d)), {}};
            if (p.n_atoms >= 2) s.cumulants = oracle_cumulants(d);
            out.push_back(s);
        },
        opt);
    if (final_state) *final_state = {p.n_atoms, y};
    return out;
}

} // namespace dickesq
