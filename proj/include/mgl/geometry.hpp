#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mgl/errors.hpp"
#include "mgl/field.hpp"
#include "mgl/jets.hpp"

namespace mgl {

using Vec4 = std::array<double, 4>;

inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
inline double norm(const Vec4& a) { return std::sqrt(dot(a, a)); }
inline Vec4 scaled(const Vec4& a, double s) {
    return {a[0] * s, a[1] * s, a[2] * s, a[3] * s};
}
inline Vec4 axpy(double s, const Vec4& a, const Vec4& b) {
    return {s * a[0] + b[0], s * a[1] + b[1], s * a[2] + b[2], s * a[3] + b[3]};
}

struct FirstForm {
    double E = 0.0, F = 0.0, G = 0.0;
    double det() const { return E * G - F * F; }
};

/// Orthonormal frame {e1, e2, xi3, xi4} along a shear chart in R^4;
/// e1, e2 span the tangent plane, xi3, xi4 the normal plane.
struct FrameR4 {
    Vec4 e1{}, e2{}, xi3{}, xi4{};
    Vec4 xi{}, eta{};               // unnormalized normal fields
    double E = 0.0;                 // conformal factor
    double xi_norm = 0.0;           // |xi|
    double xi_eta = 0.0;            // <xi, eta>
    double normal_identity_gap = 0.0;  // | |xi|^2|eta|^2 - <xi,eta>^2 - b^2 E^2 | / (b^2 E^2)
};

struct SecondForm {
    double h11_3 = 0.0, h12_3 = 0.0, h22_3 = 0.0;
    double h11_4 = 0.0, h12_4 = 0.0, h22_4 = 0.0;
};

struct Invariants {
    double K = 0.0;   // Gauss curvature
    double KN = 0.0;  // normal curvature
    double h2 = 0.0;  // squared norm of the second fundamental form
    std::array<double, 2> H{0.0, 0.0};  // normal components of the mean curvature vector
};

inline FirstForm first_form(const Vec4& Xu, const Vec4& Xv) {
    FirstForm ff{dot(Xu, Xu), dot(Xu, Xv), dot(Xv, Xv)};
    if (ff.det() <= 1e-14 * (1.0 + ff.E) * (1.0 + ff.G))
        throw DegenerateImmersion("first_form: EG - F^2 is not positive");
    return ff;
}

/// Tangent vectors of the shear parametrization
/// X(u,v) = (u, au+bv, phi, psi):  Xu = (1, a, phi_u, psi_u), Xv = (0, b, phi_v, psi_v).
inline std::pair<Vec4, Vec4> graph_tangents(double a, double b, const Jet2& phi,
                                            const Jet2& psi) {
    if (!(b > 0.0)) throw InvalidShear("graph_tangents: b must be positive");
    return {Vec4{1.0, a, phi.du, psi.du}, Vec4{0.0, b, phi.dv, psi.dv}};
}

/// Orthonormal frame from the normal fields
///   xi  = (-b phi_u + a phi_v, -phi_v, b, 0)
///   eta = (-b psi_u + a psi_v, -psi_v, 0, b)
/// with e1 = Xu/sqrt(E), e2 = Xv/sqrt(E), xi3 = xi/|xi| and
/// xi4 = (|xi|^2 eta - <xi,eta> xi) / (b |xi| E). Requires an isothermal
/// chart; also checks |xi|^2|eta|^2 - <xi,eta>^2 = b^2 E^2.
inline FrameR4 frame_r4(double a, double b, const Jet2& phi, const Jet2& psi,
                        double iso_tol = 1e-8) {
    auto [Xu, Xv] = graph_tangents(a, b, phi, psi);
    const FirstForm ff = first_form(Xu, Xv);
    const double iso_rel = std::max(std::fabs(ff.F), std::fabs(ff.E - ff.G)) / ff.E;
    if (iso_rel > iso_tol)
        throw NotIsothermal("frame_r4: chart is not isothermal (relative defect " +
                            std::to_string(iso_rel) + ")");

    FrameR4 fr;
    fr.E = ff.E;
    fr.xi = Vec4{-b * phi.du + a * phi.dv, -phi.dv, b, 0.0};
    fr.eta = Vec4{-b * psi.du + a * psi.dv, -psi.dv, 0.0, b};
    const double xi2 = dot(fr.xi, fr.xi);
    const double eta2 = dot(fr.eta, fr.eta);
    fr.xi_eta = dot(fr.xi, fr.eta);
    fr.xi_norm = std::sqrt(xi2);

    const double bE2 = b * b * fr.E * fr.E;
    fr.normal_identity_gap = std::fabs(xi2 * eta2 - fr.xi_eta * fr.xi_eta - bE2) / bE2;
    if (fr.normal_identity_gap > std::max(1e-10, 64.0 * iso_rel))
        throw Error("frame_r4: normal-field identity violated (gap " +
                    std::to_string(fr.normal_identity_gap) + ")");

    const double invsE = 1.0 / std::sqrt(fr.E);
    fr.e1 = scaled(Xu, invsE);
    fr.e2 = scaled(Xv, invsE);
    fr.xi3 = scaled(fr.xi, 1.0 / fr.xi_norm);
    fr.xi4 = scaled(axpy(-fr.xi_eta / xi2, fr.xi, fr.eta),
                    xi2 / (b * fr.xi_norm * fr.E));
    return fr;
}

/// Second fundamental form in the frame above:
///   h11^3 = -b phi_uu / (E |xi|)          h11^4 = (<xi,eta> phi_uu - |xi|^2 psi_uu) / (E^2 |xi|)
///   h12^3 = -b phi_uv / (E |xi|)          h12^4 = (<xi,eta> phi_uv - |xi|^2 psi_uv) / (E^2 |xi|)
/// and h22 = -h11 from harmonicity of (phi, psi).
inline SecondForm second_form(double a, double b, const Jet2& phi, const Jet2& psi,
                              const FrameR4& fr, double harm_tol = 1e-8) {
    (void)a;
    const double jscale =
        1.0 + std::max({std::fabs(phi.du), std::fabs(phi.dv), std::fabs(phi.duu),
                        std::fabs(phi.duv), std::fabs(phi.dvv), std::fabs(psi.du),
                        std::fabs(psi.dv), std::fabs(psi.duu), std::fabs(psi.duv),
                        std::fabs(psi.dvv)});
    if (std::fabs(phi.duu + phi.dvv) > harm_tol * jscale ||
        std::fabs(psi.duu + psi.dvv) > harm_tol * jscale)
        throw NotHarmonic("second_form: chart components are not harmonic");

    const double E = fr.E, xin = fr.xi_norm, xi2 = xin * xin, xe = fr.xi_eta;
    SecondForm sf;
    sf.h11_3 = -b * phi.duu / (E * xin);
    sf.h12_3 = -b * phi.duv / (E * xin);
    sf.h11_4 = (xe * phi.duu - xi2 * psi.duu) / (E * E * xin);
    sf.h12_4 = (xe * phi.duv - xi2 * psi.duv) / (E * E * xin);
    sf.h22_3 = -sf.h11_3;
    sf.h22_4 = -sf.h11_4;
    return sf;
}

/// Curvature invariants from the second fundamental form. The general
/// formulas are used throughout; on trace-free input they coincide with
/// the minimal-surface specializations K = -sum(h11^2 + h12^2),
/// K_N = 2 (h11^3 h12^4 - h12^3 h11^4) and 2K = -|h|^2.
inline Invariants curvatures(const SecondForm& sf) {
    Invariants inv;
    inv.K = (sf.h11_3 * sf.h22_3 - sf.h12_3 * sf.h12_3) +
            (sf.h11_4 * sf.h22_4 - sf.h12_4 * sf.h12_4);
    inv.KN = (sf.h11_3 * sf.h12_4 - sf.h12_3 * sf.h11_4) +
             (sf.h12_3 * sf.h22_4 - sf.h22_3 * sf.h12_4);
    inv.h2 = sf.h11_3 * sf.h11_3 + 2.0 * sf.h12_3 * sf.h12_3 + sf.h22_3 * sf.h22_3 +
             sf.h11_4 * sf.h11_4 + 2.0 * sf.h12_4 * sf.h12_4 + sf.h22_4 * sf.h22_4;
    inv.H = {0.5 * (sf.h11_3 + sf.h22_3), 0.5 * (sf.h11_4 + sf.h22_4)};
    return inv;
}

/// Componentwise residual of the non-parametric minimal surface equation
///   (1 + |f_y|^2) f_xx - 2 <f_x, f_y> f_xy + (1 + |f_x|^2) f_yy.
inline std::vector<double> mse_residual(std::span<const Jet2> f) {
    if (f.empty()) throw DimensionMismatch("mse_residual: need at least one component");
    double gx2 = 0.0, gy2 = 0.0, gxy = 0.0;
    for (const Jet2& c : f) {
        gx2 += c.du * c.du;
        gy2 += c.dv * c.dv;
        gxy += c.du * c.dv;
    }
    std::vector<double> r(f.size());
    for (std::size_t k = 0; k < f.size(); ++k)
        r[k] = (1.0 + gy2) * f[k].duu - 2.0 * gxy * f[k].duv + (1.0 + gx2) * f[k].dvv;
    return r;
}

/// sum_{i<j} (fx_i fy_j - fx_j fy_i)^2; for n = 2 this is J_f^2.
inline double minor_sum(std::span<const double> fx, std::span<const double> fy) {
    if (fx.size() != fy.size() || fx.size() < 2)
        throw DimensionMismatch("minor_sum: vectors must have equal length >= 2");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < fx.size(); ++i)
        for (std::size_t j = i + 1; j < fx.size(); ++j) {
            const double m = fx[i] * fy[j] - fx[j] * fy[i];
            s += m * m;
        }
    return s;
}

/// Chart-independent invariants of a graph (x, y, f_1, ..., f_n) computed
/// in the given coordinates: tangential projection of the second
/// derivative vectors, |h|^2 with indices raised by the inverse metric,
/// K via the Gauss equation, mean curvature vector. Valid in any
/// parametrization, so it serves as a cross-check for the frame route.
struct GraphInvariants {
    FirstForm ff;
    double h2 = 0.0;
    double K = 0.0;
    double mean_norm = 0.0;  // |H|
};

inline GraphInvariants graph_invariants(std::span<const Jet2> f) {
    const std::size_t n = f.size();
    const std::size_t dim = n + 2;
    std::vector<double> Xu(dim, 0.0), Xv(dim, 0.0);
    Xu[0] = 1.0;
    Xv[1] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        Xu[2 + k] = f[k].du;
        Xv[2 + k] = f[k].dv;
    }
    auto vdot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    GraphInvariants gi;
    gi.ff = FirstForm{vdot(Xu, Xu), vdot(Xu, Xv), vdot(Xv, Xv)};
    const double det = gi.ff.det();
    if (det <= 0.0) throw DegenerateImmersion("graph_invariants: degenerate metric");

    // Normal parts of X_uu, X_uv, X_vv (second derivatives have no
    // components along the first two axes).
    std::array<std::vector<double>, 3> N;
    for (int s = 0; s < 3; ++s) {
        std::vector<double> X2(dim, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            X2[2 + k] = (s == 0) ? f[k].duu : (s == 1) ? f[k].duv : f[k].dvv;
        const double cu = vdot(X2, Xu), cv = vdot(X2, Xv);
        // Solve the 2x2 system g * (alpha, beta) = (cu, cv) for the
        // tangential coefficients.
        const double alpha = (gi.ff.G * cu - gi.ff.F * cv) / det;
        const double beta = (gi.ff.E * cv - gi.ff.F * cu) / det;
        for (std::size_t i = 0; i < dim; ++i) X2[i] -= alpha * Xu[i] + beta * Xv[i];
        N[s] = std::move(X2);
    }

    // Inverse metric.
    const double iE = gi.ff.G / det, iF = -gi.ff.F / det, iG = gi.ff.E / det;
    const std::array<std::array<double, 2>, 2> ginv = {{{iE, iF}, {iF, iG}}};
    auto Nab = [&](int a, int b) -> const std::vector<double>& {
        return N[(a == 0 && b == 0) ? 0 : (a == 1 && b == 1) ? 2 : 1];
    };

    double h2 = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    h2 += ginv[a][c] * ginv[b][d] * vdot(Nab(a, b), Nab(c, d));
    gi.h2 = h2;

    gi.K = (vdot(N[0], N[2]) - vdot(N[1], N[1])) / det;

    std::vector<double> H(dim, 0.0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (std::size_t i = 0; i < dim; ++i) H[i] += 0.5 * ginv[a][b] * Nab(a, b)[i];
    gi.mean_norm = std::sqrt(vdot(H, H));
    return gi;
}

enum class SurfaceClass { Plane, ComplexAnalytic, OtherMinimal, NotMinimal };
enum class CRBranch { None, Holomorphic, Antiholomorphic };

struct ClassifyResult {
    SurfaceClass cls = SurfaceClass::NotMinimal;
    CRBranch branch = CRBranch::None;
    double max_residual = 0.0;  // max MSE residual norm over the samples
    double max_h2 = 0.0;
    double cr_defect = 0.0;     // best-branch CR defect
    double scale = 1.0;
    int samples = 0;
};

inline const char* to_string(SurfaceClass c) {
    switch (c) {
        case SurfaceClass::Plane: return "Plane";
        case SurfaceClass::ComplexAnalytic: return "ComplexAnalytic";
        case SurfaceClass::OtherMinimal: return "OtherMinimal";
        case SurfaceClass::NotMinimal: return "NotMinimal";
    }
    return "?";
}

inline const char* to_string(CRBranch b) {
    switch (b) {
        case CRBranch::None: return "n/a";
        case CRBranch::Holomorphic: return "holomorphic";
        case CRBranch::Antiholomorphic: return "antiholomorphic";
    }
    return "?";
}

inline double default_classify_tol(const FieldSource& src) {
    return src.is_analytic() ? 1e-6 : 1e-3;
}

/// Classifies a two-component graph over a sample region:
/// NotMinimal if the minimal surface equation fails, else Plane if the
/// second fundamental form vanishes, else ComplexAnalytic if one branch
/// of the Cauchy-Riemann equations holds, else OtherMinimal.
inline ClassifyResult classify(const FieldSource& src, Rect region = Rect{}, int n = 41,
                               double tol = -1.0) {
    if (src.ncomp() != 2) throw DimensionMismatch("classify: surface must have 2 components");
    if (tol <= 0.0) tol = default_classify_tol(src);

    std::vector<std::array<Jet2, 2>> samples;
    if (src.is_analytic()) {
        if (n < 2) throw Error("classify: need n >= 2 sample points per axis");
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double x = region.x0 + region.width() * i / (n - 1);
                const double y = region.y0 + region.height() * j / (n - 1);
                samples.push_back({src.jet(x, y, 0), src.jet(x, y, 1)});
            }
    } else {
        const GridField& g = *src.grid_field();
        for (int j = 2; j <= g.ny() - 3; ++j)
            for (int i = 2; i <= g.nx() - 3; ++i)
                samples.push_back({fd_jet(g, i, j, 0), fd_jet(g, i, j, 1)});
    }

    ClassifyResult res;
    res.samples = static_cast<int>(samples.size());
    double crH = 0.0, crA = 0.0;
    for (const auto& s : samples) {
        res.scale = std::max(res.scale,
                             1.0 + std::max({std::fabs(s[0].du), std::fabs(s[0].dv),
                                             std::fabs(s[1].du), std::fabs(s[1].dv)}));
        const auto r = mse_residual(std::span<const Jet2>(s.data(), 2));
        res.max_residual = std::max(res.max_residual,
                                    std::max(std::fabs(r[0]), std::fabs(r[1])));
        res.max_h2 = std::max(res.max_h2, graph_invariants(std::span<const Jet2>(s.data(), 2)).h2);
        crH = std::max(crH, std::fabs(s[0].du - s[1].dv) + std::fabs(s[0].dv + s[1].du));
        crA = std::max(crA, std::fabs(s[0].du + s[1].dv) + std::fabs(s[0].dv - s[1].du));
    }
    res.cr_defect = std::min(crH, crA);

    if (res.max_residual > tol * res.scale) {
        res.cls = SurfaceClass::NotMinimal;
    } else if (res.max_h2 <= tol) {
        res.cls = SurfaceClass::Plane;
    } else if (res.cr_defect <= tol * res.scale) {
        res.cls = SurfaceClass::ComplexAnalytic;
        res.branch = (crH <= crA) ? CRBranch::Holomorphic : CRBranch::Antiholomorphic;
    } else {
        res.cls = SurfaceClass::OtherMinimal;
    }
    return res;
}

}  // namespace mgl
