#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mgl/errors.hpp"
#include "mgl/field.hpp"
#include "mgl/geometry.hpp"
#include "mgl/jets.hpp"

namespace mgl {

/// Shear-chart jets of (phi, psi) at one parameter point, together with
/// the shear (a, b). All the closed-form identity operations below act on
/// this bundle.
struct ChartPoint {
    double a = 0.0, b = 1.0;
    Jet2 phi, psi;

    double E() const { return 1.0 + a * a + phi.du * phi.du + psi.du * psi.du; }
    double G2() const { return b * b + phi.dv * phi.dv + psi.dv * psi.dv; }
    double F() const { return phi.du * phi.dv + psi.du * psi.dv + a * b; }
    double jphi() const { return phi.du * psi.dv - phi.dv * psi.du; }

    double first_scale() const {
        return 1.0 + std::max({std::fabs(phi.du), std::fabs(phi.dv),
                               std::fabs(psi.du), std::fabs(psi.dv)});
    }
    double jet_scale() const {
        return 1.0 + std::max({std::fabs(phi.du), std::fabs(phi.dv), std::fabs(phi.duu),
                               std::fabs(phi.duv), std::fabs(phi.dvv), std::fabs(psi.du),
                               std::fabs(psi.dv), std::fabs(psi.duu), std::fabs(psi.duv),
                               std::fabs(psi.dvv)});
    }
};

struct ChartPoint3 : ChartPoint {
    Jet3 phi3, psi3;
};

namespace detail {

inline Jet2 pullback_jet2(const Jet2& f, double a, double b) {
    Jet2 out;
    out.value = f.value;
    out.du = f.du + a * f.dv;
    out.dv = b * f.dv;
    out.duu = f.duu + 2.0 * a * f.duv + a * a * f.dvv;
    out.duv = b * (f.duv + a * f.dvv);
    out.dvv = b * b * f.dvv;
    return out;
}

inline Jet3 pullback_jet3(const Jet3& f, double a, double b) {
    Jet3 out;
    const Jet2 low = pullback_jet2(f.jet2(), a, b);
    out.value = low.value;
    out.du = low.du;
    out.dv = low.dv;
    out.duu = low.duu;
    out.duv = low.duv;
    out.dvv = low.dvv;
    out.duuu = f.duuu + 3.0 * a * f.duuv + 3.0 * a * a * f.duvv + a * a * a * f.dvvv;
    out.duuv = b * (f.duuv + 2.0 * a * f.duvv + a * a * f.dvvv);
    out.duvv = b * b * (f.duvv + a * f.dvvv);
    out.dvvv = b * b * b * f.dvvv;
    return out;
}

}  // namespace detail

/// The Osserman shear chart of a two-component graph f:
///   x = u, y = a u + b v,  phi(u,v) = f1(u, au+bv),  psi(u,v) = f2(u, au+bv).
/// Jets of (phi, psi) follow from the jets of f by the chain rule.
class ShearChart {
public:
    ShearChart(FieldSource f, double a, double b) : f_(std::move(f)), a_(a), b_(b) {
        if (!(b > 0.0)) throw InvalidShear("ShearChart: b must be positive");
        if (f_.ncomp() != 2) throw DimensionMismatch("ShearChart: f must have 2 components");
    }

    double a() const { return a_; }
    double b() const { return b_; }
    const FieldSource& source() const { return f_; }

    std::pair<double, double> graph_point(double u, double v) const {
        return {u, a_ * u + b_ * v};
    }

    ChartPoint at(double u, double v) const {
        auto [x, y] = graph_point(u, v);
        ChartPoint cp;
        cp.a = a_;
        cp.b = b_;
        cp.phi = detail::pullback_jet2(f_.jet(x, y, 0), a_, b_);
        cp.psi = detail::pullback_jet2(f_.jet(x, y, 1), a_, b_);
        return cp;
    }

    ChartPoint3 at3(double u, double v) const {
        auto [x, y] = graph_point(u, v);
        ChartPoint3 cp;
        cp.a = a_;
        cp.b = b_;
        cp.phi3 = detail::pullback_jet3(f_.jet3(x, y, 0), a_, b_);
        cp.psi3 = detail::pullback_jet3(f_.jet3(x, y, 1), a_, b_);
        cp.phi = cp.phi3.jet2();
        cp.psi = cp.psi3.jet2();
        return cp;
    }

    /// Jets of the underlying f at the graph point of (u, v).
    std::array<Jet2, 2> f_jets(double u, double v) const {
        auto [x, y] = graph_point(u, v);
        return {f_.jet(x, y, 0), f_.jet(x, y, 1)};
    }

private:
    FieldSource f_;
    double a_, b_;
};

inline ShearChart shear_pullback(FieldSource f, double a, double b) {
    return ShearChart(std::move(f), a, b);
}

/// Residuals of the isothermality relations:
///   r1 = phi_u phi_v + psi_u psi_v + a b
///   r2 = (1 + a^2 + phi_u^2 + psi_u^2) - (b^2 + phi_v^2 + psi_v^2)
/// Both vanish exactly on an isothermal chart.
struct IsoResidual {
    double r1 = 0.0, r2 = 0.0, E = 0.0;
};

inline IsoResidual iso_residual(const ChartPoint& cp) {
    return IsoResidual{cp.F(), cp.E() - cp.G2(), cp.E()};
}

/// Laplacians of phi and psi; zero for a minimal chart.
inline std::pair<double, double> harm_residual(const ChartPoint& cp) {
    return {cp.phi.duu + cp.phi.dvv, cp.psi.duu + cp.psi.dvv};
}

struct JacobianPair {
    double j_phi = 0.0, j_f = 0.0;
};

/// J_Phi = phi_u psi_v - phi_v psi_u and J_f of the underlying graph map;
/// checks the chain-rule relation J_Phi = b J_f.
inline JacobianPair jacobians(const ShearChart& chart, double u, double v) {
    const ChartPoint cp = chart.at(u, v);
    const auto fj = chart.f_jets(u, v);
    JacobianPair jp;
    jp.j_phi = cp.jphi();
    jp.j_f = fj[0].du * fj[1].dv - fj[0].dv * fj[1].du;
    const double gap = std::fabs(jp.j_phi - chart.b() * jp.j_f);
    if (gap > 1e-10 * (1.0 + std::fabs(jp.j_phi) + chart.b() * std::fabs(jp.j_f)))
        throw Error("jacobians: J_Phi = b J_f violated (gap " + std::to_string(gap) + ")");
    return jp;
}

/// | J_Phi^2 - E^2 + (1 + a^2 + b^2) E - b^2 |.
inline double identity_35_gap(double E, double j_phi, double a, double b) {
    return std::fabs(j_phi * j_phi - E * E + (1.0 + a * a + b * b) * E - b * b);
}

/// Conformal Gauss curvature K = -(Laplacian of log E) / (2E).
inline double gauss_conformal(const Jet2& logE_jet, double E) {
    return -(logE_jet.duu + logE_jet.dvv) / (2.0 * E);
}

/// Full second-order jet of log E from third-order chart jets,
/// E = 1 + a^2 + phi_u^2 + psi_u^2.
inline Jet2 log_conformal_jet(const ChartPoint3& cp) {
    const Jet3& p = cp.phi3;
    const Jet3& q = cp.psi3;
    const double E = cp.E();
    const double Eu = 2.0 * (p.du * p.duu + q.du * q.duu);
    const double Ev = 2.0 * (p.du * p.duv + q.du * q.duv);
    const double Euu = 2.0 * (p.duu * p.duu + p.du * p.duuu + q.duu * q.duu + q.du * q.duuu);
    const double Euv = 2.0 * (p.duv * p.duu + p.du * p.duuv + q.duv * q.duu + q.du * q.duuv);
    const double Evv = 2.0 * (p.duv * p.duv + p.du * p.duvv + q.duv * q.duv + q.du * q.duvv);

    Jet2 L;
    L.value = std::log(E);
    L.du = Eu / E;
    L.dv = Ev / E;
    L.duu = Euu / E - (Eu / E) * (Eu / E);
    L.duv = Euv / E - (Eu / E) * (Ev / E);
    L.dvv = Evv / E - (Ev / E) * (Ev / E);
    return L;
}

/// Residuals of the differentiated isothermality relations:
///   g1 = phi_uu phi_v + phi_u phi_uv + psi_uu psi_v + psi_u psi_uv
///   g2 = phi_uu phi_u - phi_v phi_uv + psi_uu psi_u - psi_v psi_uv
inline std::pair<double, double> eqs_38_gap(const ChartPoint& cp) {
    const Jet2& p = cp.phi;
    const Jet2& q = cp.psi;
    const double g1 = p.duu * p.dv + p.du * p.duv + q.duu * q.dv + q.du * q.duv;
    const double g2 = p.duu * p.du - p.dv * p.duv + q.duu * q.du - q.dv * q.duv;
    return {g1, g2};
}

struct OmegaMask {
    double omega = 0.0;
    bool in_m1 = false;
    double two_side_gap = 0.0;  // relative disagreement of the two expressions
};

/// omega = (phi_u^2 + phi_v^2)(phi_uu^2 + phi_uv^2); on a minimal chart
/// the psi-side expression is identical. The mask flags points of M1,
/// where omega exceeds a relative cutoff.
inline OmegaMask omega_and_mask(const ChartPoint& cp, double eps_omega = 1e-8,
                                double rel_tol = 1e-9) {
    const Jet2& p = cp.phi;
    const Jet2& q = cp.psi;
    const double lhs = (p.du * p.du + p.dv * p.dv) * (p.duu * p.duu + p.duv * p.duv);
    const double rhs = (q.du * q.du + q.dv * q.dv) * (q.duu * q.duu + q.duv * q.duv);
    OmegaMask om;
    om.omega = lhs;
    om.two_side_gap = std::fabs(lhs - rhs) / (1.0 + lhs + rhs);
    if (om.two_side_gap > rel_tol)
        throw Identity39Violation("omega_and_mask: the two omega expressions disagree "
                                  "(relative gap " + std::to_string(om.two_side_gap) +
                                  "); input chart is not minimal-isothermal");
    const double s = cp.first_scale();
    om.in_m1 = om.omega > eps_omega * s * s * s * s;
    return om;
}

/// phi_uv and phi_uu recovered from the psi jets:
///   phi_uv = (-(phi_u psi_u + phi_v psi_v) psi_uv - J_Phi psi_uu) / (phi_u^2 + phi_v^2)
///   phi_uu = ( J_Phi psi_uv - (phi_u psi_u + phi_v psi_v) psi_uu) / (phi_u^2 + phi_v^2)
/// Valid on M1 for the phi-gradient; cross-checked against the direct jets
/// when the chart is isothermal and harmonic within tolerance.
inline std::pair<double, double> solved_2nd_derivs(const ChartPoint& cp,
                                                   double denom_eps = 1e-8) {
    const Jet2& p = cp.phi;
    const Jet2& q = cp.psi;
    const double denom = p.du * p.du + p.dv * p.dv;
    const double s1 = cp.first_scale();
    if (denom <= denom_eps * s1 * s1)
        throw DenominatorVanishes("solved_2nd_derivs: phi-gradient vanishes");

    const double mix = p.du * q.du + p.dv * q.dv;
    const double j = cp.jphi();
    const double phi_uv = (-mix * q.duv - j * q.duu) / denom;
    const double phi_uu = (j * q.duv - mix * q.duu) / denom;

    const double jsc = cp.jet_scale();
    const IsoResidual ir = iso_residual(cp);
    const auto [hphi, hpsi] = harm_residual(cp);
    const bool valid = std::fabs(ir.r1) <= 1e-8 * ir.E && std::fabs(ir.r2) <= 1e-8 * ir.E &&
                       std::fabs(hphi) <= 1e-8 * jsc && std::fabs(hpsi) <= 1e-8 * jsc;
    if (valid) {
        const double gap = std::max(std::fabs(phi_uv - p.duv), std::fabs(phi_uu - p.duu));
        if (gap > 1e-9 * jsc * jsc)
            throw Error("solved_2nd_derivs: closed form disagrees with direct jets (gap " +
                        std::to_string(gap) + ")");
    }
    return {phi_uv, phi_uu};
}

/// Closed-form curvatures on M1:
///   K   = (1/E^3) (psi_uu^2 + psi_uv^2)/(phi_u^2 + phi_v^2) (2b^2 - (1+a^2+b^2) E)
///   K_N = (2b/E^3) (psi_uu^2 + psi_uv^2)/(phi_u^2 + phi_v^2) J_Phi
inline std::pair<double, double> curvatures_m1(const ChartPoint& cp,
                                               double denom_eps = 1e-8) {
    const Jet2& p = cp.phi;
    const Jet2& q = cp.psi;
    const double denom = p.du * p.du + p.dv * p.dv;
    const double s1 = cp.first_scale();
    if (denom <= denom_eps * s1 * s1)
        throw DenominatorVanishes("curvatures_m1: phi-gradient vanishes");

    const double E = cp.E();
    const double common = (q.duu * q.duu + q.duv * q.duv) / denom / (E * E * E);
    const double K = common * (2.0 * cp.b * cp.b - (1.0 + cp.a * cp.a + cp.b * cp.b) * E);
    const double KN = 2.0 * cp.b * common * cp.jphi();
    return {K, KN};
}

struct WRatio {
    double W = 0.0;
    bool valid = false;
};

/// W(t) = (t^2 - (1+a^2+b^2) t + b^2) / ((1+a^2+b^2) t - 2 b^2)^2, the
/// function with K_N^2 / K^2 = 4 b^2 W(E). Marked invalid near the
/// denominator's zero. The numerator is evaluated as
/// (t - S/2)^2 - (S^2/4 - b^2), which avoids the cancellation the
/// expanded quadratic suffers near its vertex (E close to 1 for charts
/// close to the identity shear).
inline WRatio w_ratio(double E, double a, double b) {
    const double s = 1.0 + a * a + b * b;
    const double den = s * E - 2.0 * b * b;
    WRatio w;
    if (std::fabs(den) < 1e-8) return w;
    const double half = 0.5 * s;
    const double num = (E - half) * (E - half) - (half * half - b * b);
    w.W = num / (den * den);
    w.valid = true;
    return w;
}

struct Wirtinger {
    std::complex<double> dz;     // Phi_z
    std::complex<double> dzbar;  // Phi_zbar
    double J = 0.0;              // |Phi_z|^2 - |Phi_zbar|^2
};

/// Wirtinger derivatives of Phi = phi + i psi and the induced Jacobian
/// decomposition J_Phi = |Phi_z|^2 - |Phi_zbar|^2.
inline Wirtinger wirtinger(const ChartPoint& cp) {
    const Jet2& p = cp.phi;
    const Jet2& q = cp.psi;
    Wirtinger w;
    w.dz = {0.5 * (p.du + q.dv), 0.5 * (q.du - p.dv)};
    w.dzbar = {0.5 * (p.du - q.dv), 0.5 * (q.du + p.dv)};
    w.J = std::norm(w.dz) - std::norm(w.dzbar);
    const double direct = cp.jphi();
    if (std::fabs(w.J - direct) > 1e-12 * (1.0 + std::norm(w.dz) + std::norm(w.dzbar)))
        throw Error("wirtinger: Jacobian decomposition mismatch");
    return w;
}

struct MinJacobianEntry {
    double radius = 0.0;
    double min_abs_j = 0.0;
};

/// Minimum of |J| over expanding disks for a harmonic map (phi, psi),
/// sampled on grid_n x grid_n lattices. Entries aggregate over nested
/// disks, so the series is non-increasing by construction.
inline std::vector<MinJacobianEntry> min_jacobian_scan(const FieldSource& map,
                                                       std::span<const double> radii,
                                                       int grid_n, double harm_tol = 1e-8) {
    if (map.ncomp() != 2) throw DimensionMismatch("min_jacobian_scan: map must have 2 components");
    if (!map.is_analytic()) throw Error("min_jacobian_scan: map must be analytic");
    if (radii.empty()) throw Error("min_jacobian_scan: need at least one radius");
    if (grid_n < 3) throw Error("min_jacobian_scan: grid_n must be at least 3");
    for (std::size_t k = 0; k + 1 < radii.size(); ++k)
        if (!(radii[k] < radii[k + 1])) throw Error("min_jacobian_scan: radii must increase");

    // Harmonicity pre-check on a coarse sample of the largest disk.
    {
        const double R = radii.back();
        const int m = 17;
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                const double u = -R + 2.0 * R * i / (m - 1);
                const double v = -R + 2.0 * R * j / (m - 1);
                if (u * u + v * v > R * R) continue;
                const Jet2 p = map.jet(u, v, 0), q = map.jet(u, v, 1);
                const double sc = 1.0 + std::max({std::fabs(p.duu), std::fabs(p.dvv),
                                                  std::fabs(q.duu), std::fabs(q.dvv)});
                if (std::fabs(p.duu + p.dvv) > harm_tol * sc ||
                    std::fabs(q.duu + q.dvv) > harm_tol * sc)
                    throw NotHarmonic("min_jacobian_scan: map components are not harmonic");
            }
    }

    std::vector<MinJacobianEntry> out;
    double running = std::numeric_limits<double>::infinity();
    for (double R : radii) {
        double local = std::numeric_limits<double>::infinity();
        for (int j = 0; j < grid_n; ++j)
            for (int i = 0; i < grid_n; ++i) {
                const double u = -R + 2.0 * R * i / (grid_n - 1);
                const double v = -R + 2.0 * R * j / (grid_n - 1);
                if (u * u + v * v > R * R) continue;
                const Jet2 p = map.jet(u, v, 0), q = map.jet(u, v, 1);
                local = std::min(local, std::fabs(p.du * q.dv - p.dv * q.du));
            }
        running = std::min(running, local);
        out.push_back({R, running});
    }
    return out;
}

struct ShearCandidate {
    double a = 0.0, b = 1.0;
    double rms = 0.0;  // root-mean-square normalized isothermality defect
};

struct FitShearResult {
    std::vector<ShearCandidate> candidates;  // sorted by rms, best first
    const ShearCandidate& best() const {
        if (candidates.empty()) throw Error("fit_shear: no candidates");
        return candidates.front();
    }
};

namespace detail {

/// Mean squared normalized isothermality defect of shear (a, b) over
/// pre-sampled jets of f.
inline double shear_objective(std::span<const std::array<Jet2, 2>> fjets, double a, double b) {
    double acc = 0.0;
    for (const auto& fj : fjets) {
        ChartPoint cp;
        cp.a = a;
        cp.b = b;
        cp.phi = pullback_jet2(fj[0], a, b);
        cp.psi = pullback_jet2(fj[1], a, b);
        const IsoResidual ir = iso_residual(cp);
        const double s = ir.E + cp.G2();
        acc += (ir.r1 * ir.r1 + ir.r2 * ir.r2) / (s * s);
    }
    return acc / static_cast<double>(fjets.size());
}

}  // namespace detail

/// Fits shear parameters by coarse grid search over (a, b) followed by a
/// shrinking pattern search around each coarse local minimum. All local
/// minima below the acceptance threshold are reported (the chart need not
/// be unique). Deterministic.
inline FitShearResult fit_shear(const FieldSource& f, Rect region = Rect{}, int n = 21,
                                double accept_rms = 1e-7) {
    if (f.ncomp() != 2) throw DimensionMismatch("fit_shear: f must have 2 components");

    std::vector<std::array<Jet2, 2>> fjets;
    if (f.is_analytic()) {
        if (n < 2) throw Error("fit_shear: need n >= 2 sample points per axis");
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double x = region.x0 + region.width() * i / (n - 1);
                const double y = region.y0 + region.height() * j / (n - 1);
                fjets.push_back({f.jet(x, y, 0), f.jet(x, y, 1)});
            }
    } else {
        const GridField& g = *f.grid_field();
        for (int j = 2; j <= g.ny() - 3; ++j)
            for (int i = 2; i <= g.nx() - 3; ++i)
                fjets.push_back({fd_jet(g, i, j, 0), fd_jet(g, i, j, 1)});
    }
    const auto jets_span = std::span<const std::array<Jet2, 2>>(fjets);

    const double a_lo = -2.5, a_hi = 2.5, b_lo = 0.0625, b_hi = 3.0, step = 0.0625;
    const int na = static_cast<int>(std::lround((a_hi - a_lo) / step)) + 1;
    const int nb = static_cast<int>(std::lround((b_hi - b_lo) / step)) + 1;
    std::vector<double> obj(static_cast<std::size_t>(na) * nb);
    for (int ia = 0; ia < na; ++ia)
        for (int ib = 0; ib < nb; ++ib)
            obj[ia * nb + ib] =
                detail::shear_objective(jets_span, a_lo + ia * step, b_lo + ib * step);

    // Coarse local minima (4-neighborhood).
    std::vector<std::pair<double, double>> seeds;
    for (int ia = 0; ia < na; ++ia)
        for (int ib = 0; ib < nb; ++ib) {
            const double v = obj[ia * nb + ib];
            auto ge = [&](int ja, int jb) {
                if (ja < 0 || ja >= na || jb < 0 || jb >= nb) return true;
                return obj[ja * nb + jb] >= v;
            };
            if (ge(ia - 1, ib) && ge(ia + 1, ib) && ge(ia, ib - 1) && ge(ia, ib + 1))
                seeds.emplace_back(a_lo + ia * step, b_lo + ib * step);
        }

    FitShearResult res;
    for (auto [a, b] : seeds) {
        double h = step;
        double best = detail::shear_objective(jets_span, a, b);
        for (int round = 0; round < 120 && h > 1e-13; ++round) {
            bool moved = false;
            for (int da = -1; da <= 1; ++da)
                for (int db = -1; db <= 1; ++db) {
                    if (!da && !db) continue;
                    const double ta = a + da * h, tb = b + db * h;
                    if (!(tb > 0.0)) continue;
                    const double v = detail::shear_objective(jets_span, ta, tb);
                    if (v < best) {
                        best = v;
                        a = ta;
                        b = tb;
                        moved = true;
                    }
                }
            if (!moved) h *= 0.5;
        }
        const double rms = std::sqrt(best);
        if (rms <= accept_rms) {
            bool dup = false;
            for (auto& c : res.candidates)
                if (std::fabs(c.a - a) < 1e-5 && std::fabs(c.b - b) < 1e-5) dup = true;
            if (!dup) res.candidates.push_back({a, b, rms});
        }
    }
    std::sort(res.candidates.begin(), res.candidates.end(),
              [](const ShearCandidate& l, const ShearCandidate& r) { return l.rms < r.rms; });
    if (res.candidates.empty())
        throw Error("fit_shear: no isothermal shear found below tolerance " +
                    std::to_string(accept_rms));
    return res;
}

}  // namespace mgl
