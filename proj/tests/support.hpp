#pragma once

// Shared helpers for the test suites: transcendental reference fields with
// hand-written jets, random polynomial sources, and a Weierstrass-style
// generator of random isothermal minimal chart jets that is independent of
// the chart machinery under test.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mgl/field.hpp"
#include "mgl/isothermal.hpp"

namespace mgl::testsupport {

/// f(x, y) = sin(x) cos(y) exp(0.3 x): smooth, non-polynomial, with exact
/// jets for finite-difference convergence studies.
inline Jet3 wavy_jet(double x, double y) {
    const double s = std::sin(x), c = std::cos(x);
    const double e = std::exp(0.3 * x);
    const double g = std::cos(y), gp = -std::sin(y), gpp = -std::cos(y), gppp = std::sin(y);
    const double w = s * e;
    const double wx = (c + 0.3 * s) * e;
    const double wxx = (0.6 * c + (0.09 - 1.0) * s) * e;
    const double wxxx = ((0.27 - 3.0 * 0.3) * s + (3.0 * 0.09 - 1.0) * c) * e;
    Jet3 j;
    j.value = w * g;
    j.du = wx * g;
    j.dv = w * gp;
    j.duu = wxx * g;
    j.duv = wx * gp;
    j.dvv = w * gpp;
    j.duuu = wxxx * g;
    j.duuv = wxx * gp;
    j.duvv = wx * gpp;
    j.dvvv = w * gppp;
    return j;
}

inline FieldSource wavy_source() {
    return FieldSource::analytic({[](double x, double y) { return wavy_jet(x, y); }});
}

/// Random holomorphic polynomial of the given degree with coefficients in
/// [-1, 1]^2, leading coefficient bounded away from zero.
inline std::vector<std::complex<double>> random_poly(std::mt19937& rng, int degree) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<std::complex<double>> coeff(degree + 1);
    for (auto& c : coeff) c = {unif(rng), unif(rng)};
    while (std::abs(coeff.back()) < 0.2) coeff.back() = {unif(rng), unif(rng)};
    return coeff;
}

/// Jets of a random minimal isothermal chart with shear (a, b), built from
/// the null-curve representation: choose holomorphic g = exp(p(w)) and set
///   alpha3 = (g - c/g)/2,  alpha4 = (g + c/g)/(2i),  c = 1 + (a - ib)^2,
/// so that 1 + (a - ib)^2 + alpha3^2 + alpha4^2 = 0. Then
/// phi_u - i phi_v = alpha3 and psi_u - i psi_v = alpha4 give the first
/// and, by differentiating, second derivatives of a genuinely isothermal
/// harmonic pair. Entirely independent of the ShearChart code path.
struct RandomChart {
    double a, b;
    std::vector<std::complex<double>> p;  // exponent polynomial

    ChartPoint at(double u, double v) const {
        using C = std::complex<double>;
        const C w(u, v);
        // p and p' by Horner.
        C p0 = 0, p1 = 0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) {
            p1 = p1 * w + p0;
            p0 = p0 * w + *it;
        }
        const C g = std::exp(p0);
        const C gp = p1 * g;
        const C c = 1.0 + (C(a, -b) * C(a, -b));
        const C ig = 1.0 / g;
        const C igp = -p1 * ig;  // (1/g)'
        const C I(0.0, 1.0);

        const C a3 = 0.5 * (g - c * ig);
        const C a4 = (g + c * ig) / (2.0 * I);
        const C a3p = 0.5 * (gp - c * igp);
        const C a4p = (gp + c * igp) / (2.0 * I);

        ChartPoint cp;
        cp.a = a;
        cp.b = b;
        cp.phi.du = a3.real();
        cp.phi.dv = -a3.imag();
        cp.psi.du = a4.real();
        cp.psi.dv = -a4.imag();
        // alpha' = phi_uu - i phi_uv; harmonicity gives phi_vv = -phi_uu.
        cp.phi.duu = a3p.real();
        cp.phi.duv = -a3p.imag();
        cp.phi.dvv = -a3p.real();
        cp.psi.duu = a4p.real();
        cp.psi.duv = -a4p.imag();
        cp.psi.dvv = -a4p.real();
        return cp;
    }
};

inline RandomChart random_isothermal_chart(std::mt19937& rng) {
    std::uniform_real_distribution<double> ua(-1.5, 1.5);
    std::uniform_real_distribution<double> ub(0.3, 2.0);
    std::uniform_real_distribution<double> uc(-0.5, 0.5);
    RandomChart rc;
    rc.a = ua(rng);
    rc.b = ub(rng);
    rc.p.resize(3);
    for (auto& c : rc.p) c = {uc(rng), uc(rng)};
    return rc;
}

}  // namespace mgl::testsupport
