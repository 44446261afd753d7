#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgl/errors.hpp"
#include "mgl/jets.hpp"

namespace mgl {

/// Uniform rectangular grid of samples, row-major with y outer, x inner,
/// component innermost. The substrate for finite differences and the
/// boundary-value solvers.
class GridField {
public:
    GridField(int nx, int ny, int ncomp, double x0, double y0, double hx, double hy)
        : nx_(nx), ny_(ny), ncomp_(ncomp), x0_(x0), y0_(y0), hx_(hx), hy_(hy),
          data_(static_cast<std::size_t>(nx) * ny * ncomp, 0.0) {
        if (nx < 5 || ny < 5)
            throw Error("GridField: nx and ny must be at least 5, got " +
                        std::to_string(nx) + "x" + std::to_string(ny));
        if (ncomp < 1) throw Error("GridField: ncomp must be positive");
        if (!(hx > 0.0) || !(hy > 0.0)) throw Error("GridField: spacings must be positive");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int ncomp() const { return ncomp_; }
    double x0() const { return x0_; }
    double y0() const { return y0_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }

    double x(int i) const { return x0_ + i * hx_; }
    double y(int j) const { return y0_ + j * hy_; }

    double at(int i, int j, int c = 0) const { return data_[index(i, j, c)]; }
    double& at(int i, int j, int c = 0) { return data_[index(i, j, c)]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// Strict interior: two full cells away from every edge.
    bool strict_interior(int i, int j) const {
        return i >= 2 && i <= nx_ - 3 && j >= 2 && j <= ny_ - 3;
    }

    bool boundary(int i, int j) const {
        return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
    }

private:
    std::size_t index(int i, int j, int c) const {
        return (static_cast<std::size_t>(j) * nx_ + i) * ncomp_ + c;
    }

    int nx_, ny_, ncomp_;
    double x0_, y0_, hx_, hy_;
    std::vector<double> data_;
};

/// Second-order central-difference jet at a strict-interior node.
/// du  = (f[i+1] - f[i-1]) / (2 hx)
/// duu = (f[i+1] - 2 f[i] + f[i-1]) / hx^2
/// duv = (f[i+1,j+1] - f[i+1,j-1] - f[i-1,j+1] + f[i-1,j-1]) / (4 hx hy)
/// and analogously in v.
inline Jet2 fd_jet(const GridField& g, int i, int j, int c = 0) {
    if (!g.strict_interior(i, j))
        throw IndexOutOfInterior("fd_jet: node (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") is not in the strict interior of a " +
                                 std::to_string(g.nx()) + "x" + std::to_string(g.ny()) + " grid");
    if (c < 0 || c >= g.ncomp())
        throw DimensionMismatch("fd_jet: component out of range");

    const double hx = g.hx(), hy = g.hy();
    const double f00 = g.at(i, j, c);
    const double fE = g.at(i + 1, j, c), fW = g.at(i - 1, j, c);
    const double fN = g.at(i, j + 1, c), fS = g.at(i, j - 1, c);
    const double fNE = g.at(i + 1, j + 1, c), fNW = g.at(i - 1, j + 1, c);
    const double fSE = g.at(i + 1, j - 1, c), fSW = g.at(i - 1, j - 1, c);

    Jet2 out;
    out.value = f00;
    out.du = (fE - fW) / (2.0 * hx);
    out.dv = (fN - fS) / (2.0 * hy);
    out.duu = (fE - 2.0 * f00 + fW) / (hx * hx);
    out.dvv = (fN - 2.0 * f00 + fS) / (hy * hy);
    out.duv = (fNE - fSE - fNW + fSW) / (4.0 * hx * hy);
    if (!out.finite()) throw Error("fd_jet: non-finite stencil result");
    return out;
}

}  // namespace mgl
