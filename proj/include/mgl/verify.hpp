#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mgl/geometry.hpp"
#include "mgl/isothermal.hpp"

namespace mgl {

struct SuiteTols {
    double iso_tol = 1e-8;       // frame construction gate
    double harm_tol = 1e-8;      // second-form gate
    double eps_omega = 1e-8;     // M1 mask cutoff
    // Curvature-ratio statistics are restricted to E >= ratio_e_floor.
    // Finite-difference jets cannot resolve |K_N|/|K| near flat points
    // (the quantities vanish there faster than the stencil error), so
    // grid callers raise this floor; analytic jets keep it at 0.
    double ratio_e_floor = 0.0;
};

/// Maxima of the normalized identity gaps of a chart over a sample grid,
/// plus cross-route curvature agreement on the sampled part of M1. Every
/// gap is scaled by the natural magnitude of its identity, so a value of
/// 1e-12 means twelve digits of agreement regardless of the surface.
struct IdentitySuiteResult {
    double iso_r1 = 0.0;            // (phi_u phi_v + psi_u psi_v + ab) / E
    double iso_r2 = 0.0;            // (E - G) / E
    double harm = 0.0;              // Laplacians / jet scale
    double id35 = 0.0;              // Jacobian identity / E^2
    double eq38 = 0.0;              // differentiated relations / jet scale^3
    double omega39 = 0.0;           // omega two-side relative gap
    double normal_field = 0.0;      // normal-field identity, relative
    double frame_ortho = 0.0;       // max |<v_i, v_j> - delta_ij|
    double jacobian_rel = 0.0;      // |J_Phi - b J_f|, relative
    double solved2 = 0.0;           // recovered second derivatives vs direct
    double wirtinger_gap = 0.0;     // |J(Wirtinger) - J_Phi|, relative

    double k_frame_vs_m1 = 0.0;         // relative, on M1
    double k_frame_vs_conformal = 0.0;  // relative, on M1 (analytic charts)
    double kn_frame_vs_m1 = 0.0;        // relative, on M1
    double ratio_identity = 0.0;        // |K_N^2/K^2 - 4 b^2 W(E)| / (1 + W)
    double ratio_dev_from_1 = 0.0;      // max | |K_N|/|K| - 1 | on M1
    // min over samples of E - (1 + a^2 + b^2)/2
    double min_e_bound_slack = std::numeric_limits<double>::infinity();
    int m1_points = 0;
    int total_points = 0;
};

namespace detail {

inline double rel_gap(double x, double y) {
    const double m = std::max(std::fabs(x), std::fabs(y));
    if (m == 0.0) return 0.0;
    return std::fabs(x - y) / m;
}

}  // namespace detail

/// Evaluates every closed-form identity of the shear-chart machinery at
/// the sample points of an n x n grid. For analytic sources the grid
/// covers `domain_uv` in chart coordinates; for grid-backed sources the
/// strict-interior nodes are used and `domain_uv`/`n` are ignored.
inline IdentitySuiteResult run_identity_suite(const ShearChart& chart, Rect domain_uv = Rect{},
                                              int n = 41, SuiteTols tols = SuiteTols{}) {
    const bool analytic = chart.source().is_analytic();
    std::vector<std::pair<double, double>> pts;
    if (analytic) {
        if (n < 2) throw Error("run_identity_suite: need n >= 2 sample points per axis");
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                pts.emplace_back(domain_uv.x0 + domain_uv.width() * i / (n - 1),
                                 domain_uv.y0 + domain_uv.height() * j / (n - 1));
    } else {
        const GridField& g = *chart.source().grid_field();
        for (int j = 2; j <= g.ny() - 3; ++j)
            for (int i = 2; i <= g.nx() - 3; ++i)
                pts.emplace_back(g.x(i), (g.y(j) - chart.a() * g.x(i)) / chart.b());
    }

    IdentitySuiteResult res;
    res.total_points = static_cast<int>(pts.size());
    const double a = chart.a(), b = chart.b();

    for (auto [u, v] : pts) {
        ChartPoint3 cp3;
        ChartPoint cp;
        if (analytic) {
            cp3 = chart.at3(u, v);
            cp = cp3;
        } else {
            cp = chart.at(u, v);
        }

        const IsoResidual ir = iso_residual(cp);
        res.iso_r1 = std::max(res.iso_r1, std::fabs(ir.r1) / ir.E);
        res.iso_r2 = std::max(res.iso_r2, std::fabs(ir.r2) / ir.E);

        const double jsc = cp.jet_scale();
        const auto [hphi, hpsi] = harm_residual(cp);
        res.harm = std::max(res.harm, std::max(std::fabs(hphi), std::fabs(hpsi)) / jsc);

        const JacobianPair jp = jacobians(chart, u, v);
        res.jacobian_rel = std::max(
            res.jacobian_rel, std::fabs(jp.j_phi - b * jp.j_f) /
                                  (1.0 + std::fabs(jp.j_phi) + b * std::fabs(jp.j_f)));

        res.id35 = std::max(res.id35, identity_35_gap(ir.E, jp.j_phi, a, b) / (ir.E * ir.E));

        const auto [g1, g2] = eqs_38_gap(cp);
        res.eq38 = std::max(res.eq38,
                            std::max(std::fabs(g1), std::fabs(g2)) / (jsc * jsc * jsc));

        const OmegaMask om = omega_and_mask(cp, tols.eps_omega, 1.0);
        res.omega39 = std::max(res.omega39, om.two_side_gap);

        const Wirtinger w = wirtinger(cp);
        res.wirtinger_gap = std::max(res.wirtinger_gap,
                                     std::fabs(w.J - jp.j_phi) / (1.0 + std::fabs(jp.j_phi)));

        res.min_e_bound_slack =
            std::min(res.min_e_bound_slack, ir.E - 0.5 * (1.0 + a * a + b * b));

        const FrameR4 fr = frame_r4(a, b, cp.phi, cp.psi, tols.iso_tol);
        res.normal_field = std::max(res.normal_field, fr.normal_identity_gap);
        {
            const Vec4* vs[4] = {&fr.e1, &fr.e2, &fr.xi3, &fr.xi4};
            for (int s = 0; s < 4; ++s)
                for (int t = s; t < 4; ++t) {
                    const double d = dot(*vs[s], *vs[t]) - (s == t ? 1.0 : 0.0);
                    res.frame_ortho = std::max(res.frame_ortho, std::fabs(d));
                }
        }

        const SecondForm sf = second_form(a, b, cp.phi, cp.psi, fr, tols.harm_tol);
        const Invariants inv = curvatures(sf);

        const double grad = cp.phi.du * cp.phi.du + cp.phi.dv * cp.phi.dv;
        const double s1 = cp.first_scale();
        if (!om.in_m1 || grad <= 1e-10 * s1 * s1) continue;
        ++res.m1_points;

        const auto [pred_uv, pred_uu] = solved_2nd_derivs(cp, 1e-10);
        res.solved2 = std::max(res.solved2,
                               std::max(std::fabs(pred_uv - cp.phi.duv),
                                        std::fabs(pred_uu - cp.phi.duu)) / (jsc * jsc));

        const auto [Km1, KNm1] = curvatures_m1(cp, 1e-10);
        res.k_frame_vs_m1 = std::max(res.k_frame_vs_m1, detail::rel_gap(inv.K, Km1));
        res.kn_frame_vs_m1 = std::max(res.kn_frame_vs_m1, detail::rel_gap(inv.KN, KNm1));

        if (analytic) {
            const Jet2 logE = log_conformal_jet(cp3);
            const double Kconf = gauss_conformal(logE, ir.E);
            res.k_frame_vs_conformal =
                std::max(res.k_frame_vs_conformal, detail::rel_gap(inv.K, Kconf));
        }

        // Ratio checks use the M1-route curvatures: the W identity is stated
        // in exactly those closed forms, and the common factor cancels in
        // the quotient without amplifying rounding error.
        if (ir.E < tols.ratio_e_floor) continue;
        if (Km1 != 0.0) {
            const WRatio w2 = w_ratio(ir.E, a, b);
            if (w2.valid) {
                const double lhs = (KNm1 / Km1) * (KNm1 / Km1);
                res.ratio_identity =
                    std::max(res.ratio_identity,
                             std::fabs(lhs - 4.0 * b * b * w2.W) / (1.0 + std::fabs(w2.W)));
            }
            res.ratio_dev_from_1 =
                std::max(res.ratio_dev_from_1,
                         std::fabs(std::fabs(KNm1) / std::fabs(Km1) - 1.0));
        }
    }
    return res;
}

}  // namespace mgl
