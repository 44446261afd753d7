#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mgl/errors.hpp"
#include "mgl/field.hpp"

namespace mgl {

/// A compiled-in example surface: analytic source plus, where the graph
/// is minimal, the shear (a, b) of its isothermal chart.
struct Builtin {
    std::string name;
    FieldSource source;
    std::optional<std::array<double, 2>> shear;
    bool minimal = false;
    std::string description;
};

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "z2", "z3", "monkey", "plane", "shear_plane_s1", "shear_plane_s2", "z2p3zbar"};
    return names;
}

inline Builtin make_builtin(const std::string& name) {
    using C = std::complex<double>;
    if (name == "z2")
        return {name, make_harmonic_pair({C(0), C(0), C(1)}), {{0.0, 1.0}}, true,
                "graph of z^2: f = (x^2 - y^2, 2xy)"};
    if (name == "z3")
        return {name, make_harmonic_pair({C(0), C(0), C(0), C(1)}), {{0.0, 1.0}}, true,
                "graph of z^3: f = (x^3 - 3xy^2, 3x^2 y - y^3)"};
    if (name == "monkey")
        return {name, make_harmonic_pair({}, {C(0), C(0), C(0), C(1)}), {{0.0, 1.0}}, true,
                "anti-holomorphic z^3 variant: f = (x^3 - 3xy^2, -(3x^2 y - y^3))"};
    if (name == "plane")
        return {name, make_harmonic_pair({C(0), C(-0.5)}, {C(0), C(2.5, 1.0)}),
                {{1.0 / 11.0, std::sqrt(65.0) / 11.0}}, true,
                "affine graph f = (2x + y, x - 3y)"};
    if (name == "shear_plane_s1")
        return {name, make_harmonic_pair({C(0), C(0.5)}, {C(0), C(0.5)}),
                {{0.0, std::sqrt(2.0)}}, true,
                "affine graph f = (x, 0); isothermal under a = 0, b = sqrt(2)"};
    if (name == "shear_plane_s2")
        return {name, make_harmonic_pair({C(0), C(-0.5, 1.0)}, {C(0), C(0.5, 1.0)}),
                {{1.0, std::sqrt(1.5)}}, true,
                "affine graph f = (0, 2x - y); isothermal under a = 1, b = sqrt(1.5)"};
    if (name == "z2p3zbar")
        return {name, make_harmonic_pair({C(0), C(0), C(1)}, {C(0), C(3)}), std::nullopt,
                false, "harmonic but non-minimal: f = (x^2 - y^2 + 3x, 2xy - 3y)"};
    throw UnknownSurface("unknown builtin surface '" + name + "'");
}

/// Scalar boundary data for the Monge-Ampere solver.
inline Poly2 make_ma_boundary(const std::string& name, double eps = 1e-5) {
    if (name == "quadratic-identity")
        return Poly2({{2, 0, 0.5}, {0, 2, 0.5}});
    if (name == "quadratic-skew")
        return Poly2({{2, 0, 1.0}, {1, 1, 1.0}, {0, 2, 0.5}});
    if (name == "quadratic-concave")
        return Poly2({{2, 0, -0.5}, {0, 2, -0.5}});
    if (name == "quartic-perturbed")
        return Poly2({{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, eps}, {0, 4, eps}});
    if (name == "edge-bump") {
        // Paraboloid plus eps (1 - x^2)^5 (1 + y/2): the perturbation is
        // nonzero along the horizontal edges but has fifth-order contact
        // with the paraboloid at all four corners. High-order corner
        // compatibility keeps the solution regular enough there for clean
        // grid-refinement rates of the pipeline residuals.
        Poly2 p({{2, 0, 0.5}, {0, 2, 0.5}});
        const double q[6] = {1.0, -5.0, 10.0, -10.0, 5.0, -1.0};
        for (int k = 0; k < 6; ++k) {
            p.add(2 * k, 0, eps * q[k]);
            p.add(2 * k, 1, 0.5 * eps * q[k]);
        }
        return p;
    }
    throw UnknownSurface("unknown Monge-Ampere boundary '" + name + "'");
}

inline const std::vector<std::string>& ma_boundary_names() {
    static const std::vector<std::string> names = {"quadratic-identity", "quadratic-skew",
                                                   "quadratic-concave", "quartic-perturbed",
                                                   "edge-bump"};
    return names;
}

}  // namespace mgl
