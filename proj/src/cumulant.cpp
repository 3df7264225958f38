#include "dickesq/cumulant.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "dickesq/error.hpp"
#include "dickesq/meanfield.hpp"

namespace dickesq {

cplx factor_third_order(cplx ab, cplx bc, cplx ac, cplx a, cplx b, cplx c) {
    return ab * c + bc * a + ac * b - 2.0 * a * b * c;
}

namespace {

struct Moments {
    const CumulantStateC& s;

    cplx single(PauliOp o) const {
        switch (o) {
        case PauliOp::Plus: return s.sp;
        case PauliOp::Minus: return std::conj(s.sp);
        default: return s.sz;
        }
    }

    cplx pair(PauliOp x, PauliOp y) const {
        using P = PauliOp;
        if (x == P::Z && y == P::Z) return s.zz;
        if ((x == P::Z && y == P::Plus) || (x == P::Plus && y == P::Z)) return s.zp;
        if ((x == P::Z && y == P::Minus) || (x == P::Minus && y == P::Z)) return std::conj(s.zp);
        if (x == P::Plus && y == P::Plus) return s.pp;
        if (x == P::Minus && y == P::Minus) return std::conj(s.pp);
        return s.pm;  // +- or -+
    }

    cplx triple(PauliOp a, PauliOp b, PauliOp c) const {
        return factor_third_order(pair(a, b), pair(b, c), pair(a, c), single(a), single(b), single(c));
    }
};

CumulantStateC to_complex(const CumulantState& s) { return {s.sp, s.sz, s.zp, s.pm, s.zz, s.pp}; }

CumulantState to_real(const CumulantStateC& s) {
    return {s.sp, s.sz.real(), s.zp, s.pm.real(), s.zz.real(), s.pp};
}

} // namespace

CumulantStateC cumulant_rhs(const CumulantStateC& s, const SystemParams& p) {
    using P = PauliOp;
    const Moments m{s};
    const double G = p.gamma_c, chi = p.chi, om = p.omega;
    const double g = G + p.gamma_s;
    const double n1 = p.n_atoms - 1.0, n2 = p.n_atoms - 2.0;
    const cplx i(0.0, 1.0);
    const cplx gm = G - 2.0 * i * chi, gp = G + 2.0 * i * chi;
    auto t = [&](P a, P b, P c) { return m.triple(a, b, c); };

    CumulantStateC d;
    d.sp = -0.5 * g * s.sp + 0.5 * n1 * gm * s.zp - 0.5 * i * om * s.sz + i * chi * s.sp;
    d.zp = -1.5 * g * s.zp - g * s.sp - 0.5 * gp * s.sp - G * s.zp +
           0.5 * n2 * gm * t(P::Z, P::Z, P::Plus) - n2 * gp * t(P::Plus, P::Plus, P::Minus) -
           n2 * gm * t(P::Minus, P::Plus, P::Plus) -
           0.5 * i * om * (2.0 * (s.pp - s.pm) + s.zz) + i * chi * s.zp;
    d.sz = -2.0 * i * chi * n1 * (s.pm - std::conj(s.pm)) - G * n1 * (s.pm + std::conj(s.pm)) -
           g * (s.sz + 1.0) + 2.0 * om * s.sp.imag();
    d.pm = 0.5 * n2 * gm * t(P::Z, P::Minus, P::Plus) + 0.5 * n2 * gp * t(P::Plus, P::Z, P::Minus) +
           0.5 * G * (s.zz + s.sz) - g * s.pm - om * s.zp.imag();
    const cplx pzm = t(P::Plus, P::Z, P::Minus), mzp = t(P::Minus, P::Z, P::Plus);
    const cplx zpm = t(P::Z, P::Plus, P::Minus), zmp = t(P::Z, P::Minus, P::Plus);
    d.zz = -2.0 * i * chi * n2 * (pzm - mzp) - 2.0 * i * chi * n2 * (zpm - zmp) -
           n2 * G * (pzm + mzp) - n2 * G * (zpm + zmp) - 2.0 * g * s.sz - 2.0 * g * s.zz +
           4.0 * G * s.pm.real() + 4.0 * om * s.zp.imag();
    d.pp = n2 * gm * t(P::Z, P::Plus, P::Plus) - g * s.pp - i * om * s.zp + 2.0 * i * chi * s.pp;
    return d;
}

CumulantState cumulant_rhs(const CumulantState& s, const SystemParams& p) {
    return to_real(cumulant_rhs(to_complex(s), p));
}

CumulantState init_from_bloch(double sx, double sy, double sz) {
    CumulantState s;
    s.sp = cplx(0.5 * sx, 0.5 * sy);
    s.sz = sz;
    s.zp = sz * s.sp;
    s.pm = std::norm(s.sp);
    s.zz = sz * sz;
    s.pp = s.sp * s.sp;
    return s;
}

CumulantState init_from_css(double theta, double phi) {
    return init_from_bloch(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                           std::cos(theta));
}

const char* to_string(MeanFieldFallback f) {
    return f == MeanFieldFallback::SpinLength ? "spin_length" : "equatorial";
}

MeanFieldFallback meanfield_fallback_from_string(const std::string& s) {
    if (s == "spin_length") return MeanFieldFallback::SpinLength;
    if (s == "equatorial") return MeanFieldFallback::Equatorial;
    throw ConfigError("meanfield_fallback must be 'spin_length' or 'equatorial'");
}

CumulantState init_from_meanfield_ss(const SystemParams& p, bool strict, MeanFieldFallback fallback) {
    SystemParams q = p;
    q.gamma_s = 0.0;
    const auto fps = mf_steady_state(q);
    if (q.omega == 0.0) return init_from_bloch(0.0, 0.0, -1.0);
    if (const FixedPoint* fp = stable_superradiant(fps))
        return init_from_bloch(fp->state.sx, fp->state.sy, fp->state.sz);
    if (strict)
        throw NoStableFixedPoint("no stable superradiant mean-field fixed point at gamma_s = 0");
    const double x = upsilon_ratio(q);
    if (x < 1.0) {
        const double uc = critical_upsilon(q);
        const double r = 0.5 * x;
        const double sphi = q.gamma_c / uc, cphi = -2.0 * q.chi / uc;
        const double z = fallback == MeanFieldFallback::SpinLength ? -std::sqrt(1.0 - x * x) : 0.0;
        return init_from_bloch(2.0 * r * cphi, 2.0 * r * sphi, z);
    }
    return init_from_bloch(0.0, 0.0, 0.0);
}

LadderExpectations ladder_from_cumulants(const CumulantState& s, int n_atoms) {
    const double n = n_atoms, nn = n * (n - 1.0);
    LadderExpectations e;
    e.jp = n * s.sp;
    e.jz = 0.5 * n * s.sz;
    e.jpjm = nn * s.pm + 0.5 * n * (1.0 + s.sz);
    e.jp2 = nn * s.pp;
    e.jz2 = 0.25 * nn * s.zz + 0.25 * n;
    e.jzjp = 0.5 * nn * s.zp + 0.5 * n * s.sp;
    return e;
}

CollectiveMoments collective_moments_from_cumulants(const CumulantState& s, int n_atoms) {
    return moments_from_expectations(ladder_from_cumulants(s, n_atoms));
}

std::string cumulant_bound_violation(const CumulantState& s, double slack) {
    std::ostringstream os;
    if (std::abs(s.sp) > 0.5 + slack) os << "|sp| = " << std::abs(s.sp) << " > 1/2; ";
    if (std::abs(s.sz) > 1.0 + slack) os << "|sz| = " << std::abs(s.sz) << " > 1; ";
    if (std::abs(s.zz) > 1.0 + slack) os << "|zz| = " << std::abs(s.zz) << " > 1; ";
    if (std::abs(s.pm) > 0.25 + slack) os << "|pm| = " << std::abs(s.pm) << " > 1/4; ";
    if (std::abs(s.pp) > 0.25 + slack) os << "|pp| = " << std::abs(s.pp) << " > 1/4; ";
    if (!std::isfinite(std::abs(s.sp) + s.sz + std::abs(s.zp) + s.pm + s.zz + std::abs(s.pp)))
        os << "non-finite moment; ";
    return os.str();
}

CumulantSeries evolve_cumulant(const CumulantState& s0, const SystemParams& p,
                               const std::vector<double>& t_grid, const CumulantOptions& opt) {
    p.validate();
    CumulantSeries out;
    auto record = [&](double t, const CumulantState& s) {
        if (opt.check_bounds) {
            const std::string v = cumulant_bound_violation(s);
            if (!v.empty()) {
                std::ostringstream os;
                os << "cumulant closure left its bounds at t = " << t << ": " << v;
                throw InvariantBreach(os.str(), t);
            }
        }
        out.states.push_back(s);
        out.moments.push_back(collective_moments_from_cumulants(s, p.n_atoms));
    };

    if (opt.shadow_complex) {
        Eigen::Matrix<cplx, 6, 1> y;
        const CumulantStateC c0 = to_complex(s0);
        y << c0.sp, c0.sz, c0.zp, c0.pm, c0.zz, c0.pp;
        auto unpack = [](const Eigen::Matrix<cplx, 6, 1>& v) {
            return CumulantStateC{v(0), v(1), v(2), v(3), v(4), v(5)};
        };
        integrate_dopri5(
            [&](double, const Eigen::Matrix<cplx, 6, 1>& v, Eigen::Matrix<cplx, 6, 1>& dv) {
                const CumulantStateC d = cumulant_rhs(unpack(v), p);
                dv << d.sp, d.sz, d.zp, d.pm, d.zz, d.pp;
            },
            y, 0.0, t_grid,
            [&](double t, const Eigen::Matrix<cplx, 6, 1>& v) {
                const CumulantStateC c = unpack(v);
                out.max_imag_pm = std::max(out.max_imag_pm, std::abs(c.pm.imag()));
                out.max_imag_zz = std::max(out.max_imag_zz, std::abs(c.zz.imag()));
                record(t, to_real(c));
            },
            opt.ode);
        return out;
    }

    using Vec9 = Eigen::Matrix<double, 9, 1>;
    auto pack = [](const CumulantState& s) {
        Vec9 v;
        v << s.sp.real(), s.sp.imag(), s.sz, s.zp.real(), s.zp.imag(), s.pm, s.zz, s.pp.real(), s.pp.imag();
        return v;
    };
    auto unpack = [](const Vec9& v) {
        return CumulantState{{v(0), v(1)}, v(2), {v(3), v(4)}, v(5), v(6), {v(7), v(8)}};
    };
    Vec9 y = pack(s0);
    integrate_dopri5(
        [&](double, const Vec9& v, Vec9& dv) { dv = pack(cumulant_rhs(unpack(v), p)); }, y, 0.0,
        t_grid, [&](double t, const Vec9& v) { record(t, unpack(v)); }, opt.ode);
    return out;
}

} // namespace dickesq
