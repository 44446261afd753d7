#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mgl/errors.hpp"
#include "mgl/grid.hpp"
#include "mgl/jets.hpp"

namespace mgl {

struct Rect {
    double x0 = -1.0, x1 = 1.0;
    double y0 = -1.0, y1 = 1.0;

    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

using AnalyticJetFn = std::function<Jet3(double, double)>;

/// A vector-valued field over a planar domain. Either a list of analytic
/// per-component jet evaluators, or a sampled grid differentiated with
/// central stencils. Analytic evaluators are pure, so repeated queries at
/// the same point are bitwise identical.
class FieldSource {
public:
    static FieldSource analytic(std::vector<AnalyticJetFn> comps,
                                std::optional<Rect> domain = std::nullopt) {
        if (comps.empty()) throw Error("FieldSource: need at least one component");
        FieldSource s;
        s.fns_ = std::move(comps);
        s.domain_ = domain;
        return s;
    }

    static FieldSource grid(GridField g) {
        FieldSource s;
        s.grid_ = std::make_shared<GridField>(std::move(g));
        return s;
    }

    bool is_analytic() const { return !grid_; }
    int ncomp() const { return grid_ ? grid_->ncomp() : static_cast<int>(fns_.size()); }
    const std::optional<Rect>& domain() const { return domain_; }
    const GridField* grid_field() const { return grid_.get(); }

    /// Second-order jet at a point. Grid sources accept only node
    /// coordinates in the strict interior.
    Jet2 jet(double x, double y, int c) const {
        if (is_analytic()) return jet3(x, y, c).jet2();
        auto [i, j] = node_of(x, y);
        return fd_jet(*grid_, i, j, c);
    }

    /// Third-order jet; analytic sources only.
    Jet3 jet3(double x, double y, int c) const {
        if (!is_analytic())
            throw Error("FieldSource: third-order jets are unavailable for grid sources");
        if (c < 0 || c >= ncomp()) throw DimensionMismatch("FieldSource: component out of range");
        if (domain_ && !domain_->contains(x, y))
            throw DomainError("FieldSource: point outside declared domain");
        Jet3 out = fns_[c](x, y);
        if (!out.finite()) throw Error("FieldSource: evaluator produced a non-finite jet");
        return out;
    }

    Jet2 jet_node(int i, int j, int c) const {
        if (is_analytic()) throw Error("FieldSource: jet_node requires a grid source");
        return fd_jet(*grid_, i, j, c);
    }

private:
    std::pair<int, int> node_of(double x, double y) const {
        const GridField& g = *grid_;
        const double fi = (x - g.x0()) / g.hx();
        const double fj = (y - g.y0()) / g.hy();
        const int i = static_cast<int>(std::llround(fi));
        const int j = static_cast<int>(std::llround(fj));
        const double tol = 1e-6;
        if (std::fabs(fi - i) > tol || std::fabs(fj - j) > tol)
            throw DomainError("FieldSource: grid sources evaluate only at node coordinates");
        if (!g.strict_interior(i, j))
            throw IndexOutOfInterior("FieldSource: node outside strict interior");
        return {i, j};
    }

    std::vector<AnalyticJetFn> fns_;
    std::optional<Rect> domain_;
    std::shared_ptr<GridField> grid_;
};

namespace detail {

/// Value and first three derivatives of a complex polynomial by Horner.
struct PolyDerivs {
    std::complex<double> p0, p1, p2, p3;
};

inline PolyDerivs eval_complex_poly(const std::vector<std::complex<double>>& coeff,
                                    std::complex<double> z) {
    PolyDerivs r{0.0, 0.0, 0.0, 0.0};
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) {
        r.p3 = r.p3 * z + 3.0 * r.p2;
        r.p2 = r.p2 * z + 2.0 * r.p1;
        r.p1 = r.p1 * z + r.p0;
        r.p0 = r.p0 * z + *it;
    }
    return r;
}

}  // namespace detail

/// Field (Re F, Im F) of F(x, y) = P(z) + Q(conj z) with z = x + iy and
/// polynomial P, Q. Both components are harmonic; P alone gives the graph
/// of a holomorphic function, Q alone an anti-holomorphic one.
inline FieldSource make_harmonic_pair(std::vector<std::complex<double>> p,
                                      std::vector<std::complex<double>> q = {},
                                      std::optional<Rect> domain = std::nullopt) {
    auto shared_p = std::make_shared<std::vector<std::complex<double>>>(std::move(p));
    auto shared_q = std::make_shared<std::vector<std::complex<double>>>(std::move(q));

    struct ComplexJet3 {
        std::complex<double> value, du, dv, duu, duv, dvv, duuu, duuv, duvv, dvvv;
    };
    auto full = [shared_p, shared_q](double x, double y) {
        const std::complex<double> z(x, y);
        const std::complex<double> I(0.0, 1.0);
        auto P = detail::eval_complex_poly(*shared_p, z);
        auto Q = detail::eval_complex_poly(*shared_q, std::conj(z));
        // d/dx acts as P' + Q', d/dy as i(P' - Q') on P(z) + Q(conj z).
        ComplexJet3 F;
        F.value = P.p0 + Q.p0;
        F.du = P.p1 + Q.p1;
        F.dv = I * (P.p1 - Q.p1);
        F.duu = P.p2 + Q.p2;
        F.duv = I * (P.p2 - Q.p2);
        F.dvv = -(P.p2 + Q.p2);
        F.duuu = P.p3 + Q.p3;
        F.duuv = I * (P.p3 - Q.p3);
        F.duvv = -(P.p3 + Q.p3);
        F.dvvv = -I * (P.p3 - Q.p3);
        return F;
    };

    AnalyticJetFn re = [full](double x, double y) {
        auto F = full(x, y);
        return Jet3{F.value.real(), F.du.real(), F.dv.real(), F.duu.real(), F.duv.real(),
                    F.dvv.real(), F.duuu.real(), F.duuv.real(), F.duvv.real(), F.dvvv.real()};
    };
    AnalyticJetFn im = [full](double x, double y) {
        auto F = full(x, y);
        return Jet3{F.value.imag(), F.du.imag(), F.dv.imag(), F.duu.imag(), F.duv.imag(),
                    F.dvv.imag(), F.duuu.imag(), F.duuv.imag(), F.duvv.imag(), F.dvvv.imag()};
    };
    return FieldSource::analytic({std::move(re), std::move(im)}, domain);
}

/// Bivariate polynomial sum c * x^i y^j with exact jets of any order.
class Poly2 {
public:
    Poly2() = default;
    explicit Poly2(std::vector<std::tuple<int, int, double>> terms)
        : terms_(std::move(terms)) {}

    Poly2& add(int i, int j, double c) {
        terms_.emplace_back(i, j, c);
        return *this;
    }

    double d(double x, double y, int ax, int ay) const {
        double s = 0.0;
        for (const auto& [i, j, c] : terms_) {
            if (i < ax || j < ay) continue;
            double t = c;
            for (int k = 0; k < ax; ++k) t *= (i - k);
            for (int k = 0; k < ay; ++k) t *= (j - k);
            s += t * ipow(x, i - ax) * ipow(y, j - ay);
        }
        return s;
    }

    Jet3 jet3(double x, double y) const {
        Jet3 out;
        out.value = d(x, y, 0, 0);
        out.du = d(x, y, 1, 0);
        out.dv = d(x, y, 0, 1);
        out.duu = d(x, y, 2, 0);
        out.duv = d(x, y, 1, 1);
        out.dvv = d(x, y, 0, 2);
        out.duuu = d(x, y, 3, 0);
        out.duuv = d(x, y, 2, 1);
        out.duvv = d(x, y, 1, 2);
        out.dvvv = d(x, y, 0, 3);
        return out;
    }

private:
    static double ipow(double x, int n) {
        double r = 1.0;
        for (int k = 0; k < n; ++k) r *= x;
        return r;
    }

    std::vector<std::tuple<int, int, double>> terms_;
};

inline FieldSource make_poly_source(std::vector<Poly2> comps,
                                    std::optional<Rect> domain = std::nullopt) {
    std::vector<AnalyticJetFn> fns;
    fns.reserve(comps.size());
    for (auto& p : comps)
        fns.emplace_back([p](double x, double y) { return p.jet3(x, y); });
    return FieldSource::analytic(std::move(fns), domain);
}

/// Sample an analytic source onto a grid over `rect`.
inline GridField sample_to_grid(const FieldSource& src, const Rect& rect, int nx, int ny) {
    if (!src.is_analytic()) throw Error("sample_to_grid: source must be analytic");
    GridField g(nx, ny, src.ncomp(), rect.x0, rect.y0,
                rect.width() / (nx - 1), rect.height() / (ny - 1));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            for (int c = 0; c < src.ncomp(); ++c)
                g.at(i, j, c) = src.jet3(g.x(i), g.y(j), c).value;
    return g;
}

}  // namespace mgl
