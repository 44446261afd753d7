#pragma once

#include <cmath>
#include <span>

#include "mgl/errors.hpp"

namespace mgl {

/// Second-order jet of a scalar field at a point: value, two first
/// partials and the three independent second partials (duv is the single
/// symmetric mixed partial).
struct Jet2 {
    double value = 0.0;
    double du = 0.0;
    double dv = 0.0;
    double duu = 0.0;
    double duv = 0.0;
    double dvv = 0.0;

    bool finite() const {
        return std::isfinite(value) && std::isfinite(du) && std::isfinite(dv) &&
               std::isfinite(duu) && std::isfinite(duv) && std::isfinite(dvv);
    }
};

/// Third-order jet; the extension analytic sources provide so that
/// derived fields (e.g. the conformal factor) get honest second-order jets.
struct Jet3 {
    double value = 0.0;
    double du = 0.0;
    double dv = 0.0;
    double duu = 0.0;
    double duv = 0.0;
    double dvv = 0.0;
    double duuu = 0.0;
    double duuv = 0.0;
    double duvv = 0.0;
    double dvvv = 0.0;

    Jet2 jet2() const { return Jet2{value, du, dv, duu, duv, dvv}; }

    bool finite() const {
        return jet2().finite() && std::isfinite(duuu) && std::isfinite(duuv) &&
               std::isfinite(duvv) && std::isfinite(dvvv);
    }
};

/// |LHS - RHS| of Lagrange's identity
///   (sum v_i^2)(sum w_i^2) - (sum v_i w_i)^2 = sum_{i<j} (v_i w_j - v_j w_i)^2.
/// Mathematically zero; the returned gap measures floating-point error only.
inline double lagrange_gap(std::span<const double> v, std::span<const double> w) {
    if (v.size() != w.size() || v.empty())
        throw DimensionMismatch("lagrange_gap: vectors must have equal nonzero length");
    double vv = 0.0, ww = 0.0, vw = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        vv += v[i] * v[i];
        ww += w[i] * w[i];
        vw += v[i] * w[i];
    }
    double minors = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double m = v[i] * w[j] - v[j] * w[i];
            minors += m * m;
        }
    return std::fabs(vv * ww - vw * vw - minors);
}

}  // namespace mgl
