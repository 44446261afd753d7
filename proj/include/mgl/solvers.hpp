#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgl/errors.hpp"
#include "mgl/field.hpp"
#include "mgl/geometry.hpp"
#include "mgl/grid.hpp"
#include "mgl/isothermal.hpp"
#include "mgl/jets.hpp"

namespace mgl {

struct SolverOptions {
    double tol_newton = 1e-11;
    int max_iter = 50;
    double damping = 1.0;       // initial step fraction per Newton iteration
    double inner_rtol = 1e-2;   // linear solve: relative residual target
    int max_inner_sweeps = 30000;
};

/// Dirichlet problem on a rectangle with n nodes per axis. The boundary
/// evaluator returns all components of f at a boundary point.
struct BvpProblem {
    Rect domain;
    int n = 33;
    std::function<std::vector<double>(double, double)> boundary;
    SolverOptions opts;

    void validate(int ncomp) const {
        if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0))
            throw Error("BvpProblem: empty domain rectangle");
        if (n < 9) throw Error("BvpProblem: n must be at least 9, got " + std::to_string(n));
        if (!(opts.tol_newton > 0.0)) throw Error("BvpProblem: tol_newton must be positive");
        if (!(opts.damping > 0.0) || opts.damping > 1.0)
            throw Error("BvpProblem: damping must lie in (0, 1]");
        if (!boundary) throw Error("BvpProblem: boundary evaluator missing");
        (void)ncomp;
    }
};

enum class SolveStatus { Converged, NoConvergence, SingularLinearization, ConvexityLost };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::NoConvergence: return "no_convergence";
        case SolveStatus::SingularLinearization: return "singular_linearization";
        case SolveStatus::ConvexityLost: return "convexity_lost";
    }
    return "?";
}

struct SolveReport {
    SolveStatus status = SolveStatus::NoConvergence;
    bool converged = false;
    int iterations = 0;
    double final_residual_norm = std::numeric_limits<double>::infinity();
    GridField solution;
};

namespace detail {

inline GridField boundary_grid(const BvpProblem& p, int ncomp) {
    GridField g(p.n, p.n, ncomp, p.domain.x0, p.domain.y0,
                p.domain.width() / (p.n - 1), p.domain.height() / (p.n - 1));
    for (int j = 0; j < p.n; ++j)
        for (int i = 0; i < p.n; ++i) {
            if (!g.boundary(i, j)) continue;
            const std::vector<double> vals = p.boundary(g.x(i), g.y(j));
            if (static_cast<int>(vals.size()) != ncomp)
                throw Error("BvpProblem: boundary evaluator returned wrong component count");
            for (int c = 0; c < ncomp; ++c) g.at(i, j, c) = vals[c];
        }
    return g;
}

/// In-place red-black SOR solve of the 5-point Laplace equation for one
/// component, keeping boundary values fixed. Deterministic.
inline void harmonic_fill(GridField& g, int c) {
    const int n = g.nx();
    const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
    const double diag = 2.0 / hx2 + 2.0 / hy2;
    const double rho = std::max(std::cos(M_PI / (g.nx() - 1)), std::cos(M_PI / (g.ny() - 1)));
    const double omega = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));

    double bscale = 1.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < n; ++i)
            if (g.boundary(i, j)) bscale = std::max(bscale, std::fabs(g.at(i, j, c)));
    const double atol = 32.0 * std::numeric_limits<double>::epsilon() * bscale * diag;

    double last = std::numeric_limits<double>::infinity();
    int stall = 0;
    for (int sweep = 0; sweep < 200000; ++sweep) {
        for (int color = 0; color < 2; ++color)
            for (int j = 1; j < g.ny() - 1; ++j)
                for (int i = 1; i < n - 1; ++i) {
                    if (((i + j) & 1) != color) continue;
                    const double lap =
                        (g.at(i + 1, j, c) + g.at(i - 1, j, c)) / hx2 +
                        (g.at(i, j + 1, c) + g.at(i, j - 1, c)) / hy2 - diag * g.at(i, j, c);
                    g.at(i, j, c) += omega * lap / diag;
                }
        if (sweep % 8 != 7) continue;
        double res = 0.0;
        for (int j = 1; j < g.ny() - 1; ++j)
            for (int i = 1; i < n - 1; ++i) {
                const double lap =
                    (g.at(i + 1, j, c) + g.at(i - 1, j, c)) / hx2 +
                    (g.at(i, j + 1, c) + g.at(i, j - 1, c)) / hy2 - diag * g.at(i, j, c);
                res = std::max(res, std::fabs(lap));
            }
        if (res <= atol) return;
        if (res >= last * 0.999) {
            if (++stall >= 4) return;  // hit the roundoff floor
        } else {
            stall = 0;
        }
        last = res;
    }
}

/// Frozen per-node data of the MSE linearization.
struct MseCoeffs {
    std::vector<double> gx, gy;        // (node, comp) first derivatives
    std::vector<double> A, B, C;       // per node
    std::vector<double> sxx, sxy, syy; // (node, comp) second derivatives
};

inline MseCoeffs mse_coeffs(const GridField& f) {
    const int n = f.nx(), nc = f.ncomp();
    MseCoeffs mc;
    mc.gx.assign(static_cast<std::size_t>(n) * n * nc, 0.0);
    mc.gy.assign(mc.gx.size(), 0.0);
    mc.sxx.assign(mc.gx.size(), 0.0);
    mc.sxy.assign(mc.gx.size(), 0.0);
    mc.syy.assign(mc.gx.size(), 0.0);
    mc.A.assign(static_cast<std::size_t>(n) * n, 0.0);
    mc.B.assign(mc.A.size(), 0.0);
    mc.C.assign(mc.A.size(), 0.0);
    const double hx = f.hx(), hy = f.hy();
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t node = static_cast<std::size_t>(j) * n + i;
            double gy2 = 0.0, gx2 = 0.0, gxy = 0.0;
            for (int c = 0; c < nc; ++c) {
                const std::size_t k = node * nc + c;
                mc.gx[k] = (f.at(i + 1, j, c) - f.at(i - 1, j, c)) / (2.0 * hx);
                mc.gy[k] = (f.at(i, j + 1, c) - f.at(i, j - 1, c)) / (2.0 * hy);
                mc.sxx[k] = (f.at(i + 1, j, c) - 2.0 * f.at(i, j, c) + f.at(i - 1, j, c)) / (hx * hx);
                mc.syy[k] = (f.at(i, j + 1, c) - 2.0 * f.at(i, j, c) + f.at(i, j - 1, c)) / (hy * hy);
                mc.sxy[k] = (f.at(i + 1, j + 1, c) - f.at(i + 1, j - 1, c) -
                             f.at(i - 1, j + 1, c) + f.at(i - 1, j - 1, c)) / (4.0 * hx * hy);
                gx2 += mc.gx[k] * mc.gx[k];
                gy2 += mc.gy[k] * mc.gy[k];
                gxy += mc.gx[k] * mc.gy[k];
            }
            mc.A[node] = 1.0 + gy2;
            mc.B[node] = gxy;
            mc.C[node] = 1.0 + gx2;
        }
    return mc;
}

inline double mse_residual_norm(const GridField& f, const MseCoeffs& mc,
                                std::vector<double>* out = nullptr) {
    const int n = f.nx(), nc = f.ncomp();
    if (out) out->assign(static_cast<std::size_t>(n) * n * nc, 0.0);
    double nrm = 0.0;
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t node = static_cast<std::size_t>(j) * n + i;
            for (int c = 0; c < nc; ++c) {
                const std::size_t k = node * nc + c;
                const double r = mc.A[node] * mc.sxx[k] - 2.0 * mc.B[node] * mc.sxy[k] +
                                 mc.C[node] * mc.syy[k];
                if (out) (*out)[k] = r;
                nrm = std::max(nrm, std::fabs(r));
            }
        }
    return nrm;
}

}  // namespace detail

/// Damped inexact-Newton solver for the Dirichlet problem of the
/// non-parametric minimal surface system. The linearization is assembled
/// analytically from the equation's coefficients; the linear step uses
/// deterministic 4-color Gauss-Seidel sweeps to a relative tolerance.
inline SolveReport solve_mse(const BvpProblem& p) {
    p.validate(2);
    const int n = p.n, nc = 2;
    GridField f = detail::boundary_grid(p, nc);
    for (int c = 0; c < nc; ++c) detail::harmonic_fill(f, c);

    const double hx = f.hx(), hy = f.hy();
    const double hx2 = hx * hx, hy2 = hy * hy;

    SolveReport rep{SolveStatus::NoConvergence, false, 0,
                    std::numeric_limits<double>::infinity(), f};

    std::vector<double> resid, delta(static_cast<std::size_t>(n) * n * nc, 0.0);

    for (int iter = 0; iter <= p.opts.max_iter; ++iter) {
        detail::MseCoeffs mc = detail::mse_coeffs(f);
        const double rnorm = detail::mse_residual_norm(f, mc, &resid);
        rep.solution = f;
        rep.final_residual_norm = rnorm;
        rep.iterations = iter;
        if (rnorm <= p.opts.tol_newton) {
            rep.status = SolveStatus::Converged;
            rep.converged = true;
            return rep;
        }
        if (iter == p.opts.max_iter) break;

        // Diagonal-dominance safeguard on the linearized operator.
        double worst = 0.0;
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) {
                const std::size_t node = static_cast<std::size_t>(j) * n + i;
                const double diag = 2.0 * mc.A[node] / hx2 + 2.0 * mc.C[node] / hy2;
                double off = 2.0 * mc.A[node] / hx2 + 2.0 * mc.C[node] / hy2 +
                             2.0 * std::fabs(mc.B[node]) / (hx * hy);
                for (int c = 0; c < nc; ++c) {
                    const std::size_t k = node * nc + c;
                    double coef = 0.0;
                    for (int d = 0; d < nc; ++d) {
                        const std::size_t kd = node * nc + d;
                        coef += std::fabs(mc.sxx[k]) * 2.0 * std::fabs(mc.gy[kd]) / hy +
                                2.0 * std::fabs(mc.sxy[k]) *
                                    (std::fabs(mc.gx[kd]) / hy + std::fabs(mc.gy[kd]) / hx) +
                                std::fabs(mc.syy[k]) * 2.0 * std::fabs(mc.gx[kd]) / hx;
                    }
                    worst = std::max(worst, (off + coef) / diag);
                }
            }
        if (worst > 50.0) {
            rep.status = SolveStatus::SingularLinearization;
            return rep;
        }

        // Linear step J delta = -R by 4-color Gauss-Seidel.
        std::fill(delta.begin(), delta.end(), 0.0);
        auto dval = [&](int i, int j, int c) -> double& {
            return delta[(static_cast<std::size_t>(j) * n + i) * nc + c];
        };
        auto apply_row = [&](int i, int j, int c) {
            const std::size_t node = static_cast<std::size_t>(j) * n + i;
            const std::size_t k = node * nc + c;
            const double dxx = (dval(i + 1, j, c) - 2.0 * dval(i, j, c) + dval(i - 1, j, c)) / hx2;
            const double dyy = (dval(i, j + 1, c) - 2.0 * dval(i, j, c) + dval(i, j - 1, c)) / hy2;
            const double dxy = (dval(i + 1, j + 1, c) - dval(i + 1, j - 1, c) -
                                dval(i - 1, j + 1, c) + dval(i - 1, j - 1, c)) / (4.0 * hx * hy);
            double row = mc.A[node] * dxx - 2.0 * mc.B[node] * dxy + mc.C[node] * dyy;
            double dA = 0.0, dB = 0.0, dC = 0.0;
            for (int d = 0; d < nc; ++d) {
                const std::size_t kd = node * nc + d;
                const double ddx = (dval(i + 1, j, d) - dval(i - 1, j, d)) / (2.0 * hx);
                const double ddy = (dval(i, j + 1, d) - dval(i, j - 1, d)) / (2.0 * hy);
                dA += 2.0 * mc.gy[kd] * ddy;
                dB += mc.gx[kd] * ddy + mc.gy[kd] * ddx;
                dC += 2.0 * mc.gx[kd] * ddx;
            }
            row += mc.sxx[k] * dA - 2.0 * mc.sxy[k] * dB + mc.syy[k] * dC;
            return row;
        };

        const double target = p.opts.inner_rtol * rnorm;
        for (int sweep = 0; sweep < p.opts.max_inner_sweeps; ++sweep) {
            for (int color = 0; color < 4; ++color) {
                const int ci = color & 1, cj = color >> 1;
                for (int j = 1; j < n - 1; ++j) {
                    if ((j & 1) != cj) continue;
                    for (int i = 1; i < n - 1; ++i) {
                        if ((i & 1) != ci) continue;
                        const std::size_t node = static_cast<std::size_t>(j) * n + i;
                        const double diag = -2.0 * mc.A[node] / hx2 - 2.0 * mc.C[node] / hy2;
                        for (int c = 0; c < nc; ++c) {
                            const double row = apply_row(i, j, c);
                            const double rhs = -resid[node * nc + c];
                            dval(i, j, c) += (rhs - row) / diag;
                        }
                    }
                }
            }
            if (sweep % 4 != 3) continue;
            double lres = 0.0;
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i)
                    for (int c = 0; c < nc; ++c) {
                        const std::size_t k = (static_cast<std::size_t>(j) * n + i) * nc + c;
                        lres = std::max(lres, std::fabs(-resid[k] - apply_row(i, j, c)));
                    }
            if (lres <= target) break;
        }

        // Residual-monotone damping with halving.
        double lambda = p.opts.damping;
        bool accepted = false;
        while (lambda >= std::ldexp(1.0, -20)) {
            GridField trial = f;
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i)
                    for (int c = 0; c < nc; ++c)
                        trial.at(i, j, c) += lambda * dval(i, j, c);
            detail::MseCoeffs tc = detail::mse_coeffs(trial);
            const double tnorm = detail::mse_residual_norm(trial, tc);
            if (tnorm < rnorm) {
                f = trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            rep.status = SolveStatus::NoConvergence;
            return rep;
        }
    }
    rep.status = SolveStatus::NoConvergence;
    return rep;
}

namespace detail {

struct MaCoeffs {
    std::vector<double> sxx, sxy, syy;  // per interior node
};

inline MaCoeffs ma_coeffs(const GridField& f) {
    const int n = f.nx();
    MaCoeffs mc;
    mc.sxx.assign(static_cast<std::size_t>(n) * n, 0.0);
    mc.sxy.assign(mc.sxx.size(), 0.0);
    mc.syy.assign(mc.sxx.size(), 0.0);
    const double hx = f.hx(), hy = f.hy();
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            mc.sxx[k] = (f.at(i + 1, j) - 2.0 * f.at(i, j) + f.at(i - 1, j)) / (hx * hx);
            mc.syy[k] = (f.at(i, j + 1) - 2.0 * f.at(i, j) + f.at(i, j - 1)) / (hy * hy);
            mc.sxy[k] = (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) - f.at(i - 1, j + 1) +
                         f.at(i - 1, j - 1)) / (4.0 * hx * hy);
        }
    return mc;
}

inline double ma_residual_norm(const GridField& f, const MaCoeffs& mc,
                               std::vector<double>* out = nullptr) {
    const int n = f.nx();
    if (out) out->assign(static_cast<std::size_t>(n) * n, 0.0);
    double nrm = 0.0;
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            const double r = mc.sxx[k] * mc.syy[k] - mc.sxy[k] * mc.sxy[k] - 1.0;
            if (out) (*out)[k] = r;
            nrm = std::max(nrm, std::fabs(r));
        }
    return nrm;
}

inline bool ma_convex(const GridField& f, const MaCoeffs& mc) {
    const int n = f.nx();
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            if (!(mc.sxx[k] > 0.0)) return false;
            if (!(mc.sxx[k] * mc.syy[k] - mc.sxy[k] * mc.sxy[k] > 0.0)) return false;
        }
    return true;
}

}  // namespace detail

/// Damped Newton solver for the Dirichlet Monge-Ampere equation
/// f_xx f_yy - f_xy^2 = 1. The initial guess is (x^2 + y^2)/2 matched to
/// the boundary data by a harmonic correction; discrete convexity
/// (f_xx > 0 and positive Hessian determinant) is monitored throughout.
inline SolveReport solve_monge_ampere(const BvpProblem& p) {
    p.validate(1);
    const int n = p.n;
    GridField f = detail::boundary_grid(p, 1);
    {
        // Harmonic correction of boundary - (x^2+y^2)/2, added back to the
        // paraboloid.
        GridField w(n, n, 1, f.x0(), f.y0(), f.hx(), f.hy());
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (w.boundary(i, j))
                    w.at(i, j) = f.at(i, j) - 0.5 * (f.x(i) * f.x(i) + f.y(j) * f.y(j));
        detail::harmonic_fill(w, 0);
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i)
                f.at(i, j) = 0.5 * (f.x(i) * f.x(i) + f.y(j) * f.y(j)) + w.at(i, j);
    }

    const double hx = f.hx(), hy = f.hy();
    const double hx2 = hx * hx, hy2 = hy * hy;

    SolveReport rep{SolveStatus::NoConvergence, false, 0,
                    std::numeric_limits<double>::infinity(), f};
    std::vector<double> resid, delta(static_cast<std::size_t>(n) * n, 0.0);

    auto finish = [&](const GridField& g, SolveStatus status) {
        detail::MaCoeffs mc = detail::ma_coeffs(g);
        if (!detail::ma_convex(g, mc)) status = SolveStatus::ConvexityLost;
        rep.status = status;
        rep.converged = (status == SolveStatus::Converged);
        return rep;
    };

    for (int iter = 0; iter <= p.opts.max_iter; ++iter) {
        detail::MaCoeffs mc = detail::ma_coeffs(f);
        const double rnorm = detail::ma_residual_norm(f, mc, &resid);
        rep.solution = f;
        rep.final_residual_norm = rnorm;
        rep.iterations = iter;
        if (rnorm <= p.opts.tol_newton) return finish(f, SolveStatus::Converged);
        if (iter == p.opts.max_iter) break;

        // Ellipticity / dominance guard: the linearization diagonal is
        // -2 syy/hx^2 - 2 sxx/hy^2, which degenerates with the Hessian.
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * n + i;
                const double diag = std::fabs(2.0 * mc.syy[k] / hx2 + 2.0 * mc.sxx[k] / hy2);
                const double scale = (std::fabs(mc.sxx[k]) + std::fabs(mc.syy[k]) +
                                      std::fabs(mc.sxy[k]) + 1.0) / std::min(hx2, hy2);
                if (diag < 1e-12 * scale) return finish(f, SolveStatus::SingularLinearization);
            }

        std::fill(delta.begin(), delta.end(), 0.0);
        auto dval = [&](int i, int j) -> double& {
            return delta[static_cast<std::size_t>(j) * n + i];
        };
        auto apply_row = [&](int i, int j) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            const double dxx = (dval(i + 1, j) - 2.0 * dval(i, j) + dval(i - 1, j)) / hx2;
            const double dyy = (dval(i, j + 1) - 2.0 * dval(i, j) + dval(i, j - 1)) / hy2;
            const double dxy = (dval(i + 1, j + 1) - dval(i + 1, j - 1) - dval(i - 1, j + 1) +
                                dval(i - 1, j - 1)) / (4.0 * hx * hy);
            return mc.syy[k] * dxx + mc.sxx[k] * dyy - 2.0 * mc.sxy[k] * dxy;
        };

        const double target = p.opts.inner_rtol * rnorm;
        for (int sweep = 0; sweep < p.opts.max_inner_sweeps; ++sweep) {
            for (int color = 0; color < 4; ++color) {
                const int ci = color & 1, cj = color >> 1;
                for (int j = 1; j < n - 1; ++j) {
                    if ((j & 1) != cj) continue;
                    for (int i = 1; i < n - 1; ++i) {
                        if ((i & 1) != ci) continue;
                        const std::size_t k = static_cast<std::size_t>(j) * n + i;
                        const double diag = -2.0 * mc.syy[k] / hx2 - 2.0 * mc.sxx[k] / hy2;
                        const double row = apply_row(i, j);
                        dval(i, j) += (-resid[k] - row) / diag;
                    }
                }
            }
            if (sweep % 4 != 3) continue;
            double lres = 0.0;
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i) {
                    const std::size_t k = static_cast<std::size_t>(j) * n + i;
                    lres = std::max(lres, std::fabs(-resid[k] - apply_row(i, j)));
                }
            if (lres <= target) break;
        }

        double lambda = p.opts.damping;
        bool accepted = false;
        while (lambda >= std::ldexp(1.0, -20)) {
            GridField trial = f;
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i) trial.at(i, j) += lambda * dval(i, j);
            detail::MaCoeffs tc = detail::ma_coeffs(trial);
            const double tnorm = detail::ma_residual_norm(trial, tc);
            if (tnorm < rnorm) {
                f = trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return finish(f, SolveStatus::NoConvergence);
    }
    return finish(f, SolveStatus::NoConvergence);
}

/// Theta = (f_xx f_yy - f_xy^2 - 1) / (f_xx + f_yy); identically zero on
/// solutions of the Monge-Ampere equation.
inline double theta_field(const Jet2& f) {
    const double den = f.duu + f.dvv;
    if (std::fabs(den) <= 1e-10)
        throw DenominatorVanishes("theta_field: f_xx + f_yy vanishes");
    return (f.duu * f.dvv - f.duv * f.duv - 1.0) / den;
}

struct JorgensReport {
    double max_j_gap = 0.0;          // max |J_g - 1|
    double max_mse_residual = 0.0;   // max ||MSE residual of g||_inf
    int points = 0;
    bool within_tol = false;
};

/// Builds g = (f_x, f_y) from a scalar grid by central differences and
/// measures, over the doubly-shrunk interior, how far g is from an
/// area-preserving solution of the minimal surface system.
inline JorgensReport jorgens_pipeline(const GridField& f, double tol = 1e-6) {
    if (f.ncomp() != 1) throw DimensionMismatch("jorgens_pipeline: f must be scalar");
    if (f.nx() < 9 || f.ny() < 9)
        throw Error("jorgens_pipeline: grid must leave a 4-cell interior margin (n >= 9)");

    GridField g(f.nx() - 2, f.ny() - 2, 2, f.x0() + f.hx(), f.y0() + f.hy(), f.hx(), f.hy());
    for (int j = 1; j < f.ny() - 1; ++j)
        for (int i = 1; i < f.nx() - 1; ++i) {
            g.at(i - 1, j - 1, 0) = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * f.hx());
            g.at(i - 1, j - 1, 1) = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * f.hy());
        }

    JorgensReport rep;
    for (int j = 4; j <= f.ny() - 5; ++j)
        for (int i = 4; i <= f.nx() - 5; ++i) {
            const std::array<Jet2, 2> gj = {fd_jet(g, i - 1, j - 1, 0),
                                            fd_jet(g, i - 1, j - 1, 1)};
            const double jg = gj[0].du * gj[1].dv - gj[0].dv * gj[1].du;
            rep.max_j_gap = std::max(rep.max_j_gap, std::fabs(jg - 1.0));
            const auto r = mse_residual(std::span<const Jet2>(gj.data(), 2));
            rep.max_mse_residual = std::max(rep.max_mse_residual,
                                            std::max(std::fabs(r[0]), std::fabs(r[1])));
            ++rep.points;
        }
    rep.within_tol = rep.max_j_gap <= tol && rep.max_mse_residual <= tol;
    return rep;
}

struct BernsteinEntry {
    double radius = 0.0;
    double sup_abs_j = 0.0;
    double sup_e = 0.0;
    std::optional<double> inf_ratio;  // inf |K_N| / |K| over M1 with K < 0
    int ratio_points = 0;
};

/// Expanding-disk diagnostics for an entire minimal graph: sup |J_f|,
/// sup E of the shear chart, and inf |K_N|/|K| over the sampled part of
/// M1 with K < 0. Aggregates over nested disks so sup-series are
/// non-decreasing and the inf-series non-increasing.
inline std::vector<BernsteinEntry> bernstein_scan(const FieldSource& f,
                                                  std::optional<std::array<double, 2>> shear,
                                                  std::span<const double> radii, int grid_n,
                                                  double tol = 1e-6) {
    if (f.ncomp() != 2) throw DimensionMismatch("bernstein_scan: f must have 2 components");
    if (!f.is_analytic()) throw Error("bernstein_scan: f must be analytic");
    if (radii.empty()) throw Error("bernstein_scan: need at least one radius");
    if (grid_n < 3) throw Error("bernstein_scan: grid_n must be at least 3");
    for (std::size_t k = 0; k + 1 < radii.size(); ++k)
        if (!(radii[k] < radii[k + 1])) throw Error("bernstein_scan: radii must increase");

    double a, b;
    if (shear) {
        a = (*shear)[0];
        b = (*shear)[1];
        if (!(b > 0.0)) throw InvalidShear("bernstein_scan: b must be positive");
    } else {
        const double R = radii.back();
        const auto fit = fit_shear(f, Rect{-R, R, -R, R}, 21);
        a = fit.best().a;
        b = fit.best().b;
    }

    // Minimality pre-check on the largest disk.
    {
        const double R = radii.back();
        const int m = std::min(grid_n, 41);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                const double x = -R + 2.0 * R * i / (m - 1);
                const double y = -R + 2.0 * R * j / (m - 1);
                if (x * x + y * y > R * R) continue;
                const std::array<Jet2, 2> fj = {f.jet(x, y, 0), f.jet(x, y, 1)};
                const double sc = 1.0 + std::max({std::fabs(fj[0].du), std::fabs(fj[0].dv),
                                                  std::fabs(fj[1].du), std::fabs(fj[1].dv)});
                const auto r = mse_residual(std::span<const Jet2>(fj.data(), 2));
                if (std::max(std::fabs(r[0]), std::fabs(r[1])) > tol * sc)
                    throw NotMinimal("bernstein_scan: graph fails the minimal surface "
                                     "equation on the scan region");
            }
    }

    std::vector<BernsteinEntry> out;
    double run_j = 0.0, run_e = 0.0;
    double run_ratio = std::numeric_limits<double>::infinity();
    int run_pts = 0;
    for (double R : radii) {
        for (int j = 0; j < grid_n; ++j)
            for (int i = 0; i < grid_n; ++i) {
                const double x = -R + 2.0 * R * i / (grid_n - 1);
                const double y = -R + 2.0 * R * j / (grid_n - 1);
                if (x * x + y * y > R * R) continue;
                const std::array<Jet2, 2> fj = {f.jet(x, y, 0), f.jet(x, y, 1)};
                run_j = std::max(run_j, std::fabs(fj[0].du * fj[1].dv - fj[0].dv * fj[1].du));

                ChartPoint cp;
                cp.a = a;
                cp.b = b;
                cp.phi = detail::pullback_jet2(fj[0], a, b);
                cp.psi = detail::pullback_jet2(fj[1], a, b);
                run_e = std::max(run_e, cp.E());

                const double s1 = cp.first_scale();
                const double grad = cp.phi.du * cp.phi.du + cp.phi.dv * cp.phi.dv;
                // Minimality was pre-checked above; no per-point throw.
                OmegaMask om = omega_and_mask(cp, 1e-8, 1.0);
                if (!om.in_m1 || grad <= 1e-8 * s1 * s1) continue;
                const auto [K, KN] = curvatures_m1(cp);
                if (K < 0.0) {
                    run_ratio = std::min(run_ratio, std::fabs(KN) / std::fabs(K));
                    ++run_pts;
                }
            }
        BernsteinEntry e;
        e.radius = R;
        e.sup_abs_j = run_j;
        e.sup_e = run_e;
        e.ratio_points = run_pts;
        if (run_pts > 0) e.inf_ratio = run_ratio;
        out.push_back(e);
    }
    return out;
}

}  // namespace mgl
