// Acceptance suite: one self-contained check per criterion, each printed
// as a single pass/fail line. Exit code is the number of failed criteria.
//
// Usage: acceptance [--cli PATH] [N ...]
//   --cli PATH  path to the mgl executable (needed by criterion 9)
//   N           criterion numbers to run (default: all)

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "mgl/mgl.hpp"

#include "support.hpp"

using namespace mgl;

namespace {

struct Criterion {
    int number;
    std::string label;
    std::function<bool(std::string&)> run;
};

std::string g_cli = "./mgl";

double now_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

ShearChart builtin_chart(const std::string& name) {
    const Builtin b = make_builtin(name);
    return ShearChart(b.source, (*b.shear)[0], (*b.shear)[1]);
}

double max_error_vs(const GridField& g, const FieldSource& src) {
    double err = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            for (int c = 0; c < g.ncomp(); ++c)
                err = std::max(err,
                               std::fabs(g.at(i, j, c) - src.jet3(g.x(i), g.y(j), c).value));
    return err;
}

BvpProblem mse_problem(const FieldSource& src, Rect dom, int n, double tol) {
    BvpProblem p;
    p.domain = dom;
    p.n = n;
    p.opts.tol_newton = tol;
    p.boundary = [src](double x, double y) {
        return std::vector<double>{src.jet3(x, y, 0).value, src.jet3(x, y, 1).value};
    };
    return p;
}

BvpProblem ma_problem(const Poly2& bd, int n, double tol) {
    BvpProblem p;
    p.domain = Rect{-1, 1, -1, 1};
    p.n = n;
    p.opts.tol_newton = tol;
    p.boundary = [bd](double x, double y) { return std::vector<double>{bd.jet3(x, y).value}; };
    return p;
}

// --- criterion 1 -----------------------------------------------------------

bool criterion1(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const char* name : {"z2", "z3", "shear_plane_s1", "shear_plane_s2"}) {
        const auto res = run_identity_suite(builtin_chart(name), Rect{-1, 1, -1, 1}, 41);
        worst = std::max({worst, res.iso_r1, res.iso_r2, res.harm, res.id35, res.eq38,
                          res.omega39, res.normal_field, res.jacobian_rel});
    }
    const double secs = now_seconds(t0);
    detail = "max normalized gap " + fmt(worst) + ", " + fmt(secs) + " s";
    return worst <= 1e-9 && secs < 5.0;
}

// --- criterion 2 -----------------------------------------------------------

bool criterion2(std::string& detail) {
    double worst = 0.0;
    for (const char* name : {"z2", "z3"}) {
        const auto res = run_identity_suite(builtin_chart(name), Rect{-1, 1, -1, 1}, 41);
        worst = std::max({worst, res.k_frame_vs_m1, res.k_frame_vs_conformal,
                          res.kn_frame_vs_m1});
    }

    // Spot values for z^2: K(0,0) = -8 and K(0.5,0) = -1 via the frame and
    // conformal routes (the origin is not in M1; (0.5,0) also gets the
    // closed-form route).
    const ShearChart z2 = builtin_chart("z2");
    double spot = 0.0;
    {
        const ChartPoint3 cp = z2.at3(0.0, 0.0);
        const FrameR4 fr = frame_r4(0.0, 1.0, cp.phi, cp.psi);
        const Invariants inv = curvatures(second_form(0.0, 1.0, cp.phi, cp.psi, fr));
        spot = std::max(spot, std::fabs(inv.K + 8.0) / 8.0);
        spot = std::max(spot,
                        std::fabs(gauss_conformal(log_conformal_jet(cp), cp.E()) + 8.0) / 8.0);
    }
    {
        const ChartPoint3 cp = z2.at3(0.5, 0.0);
        const FrameR4 fr = frame_r4(0.0, 1.0, cp.phi, cp.psi);
        const Invariants inv = curvatures(second_form(0.0, 1.0, cp.phi, cp.psi, fr));
        spot = std::max(spot, std::fabs(inv.K + 1.0));
        spot = std::max(spot,
                        std::fabs(gauss_conformal(log_conformal_jet(cp), cp.E()) + 1.0));
        const auto [Km1, KNm1] = curvatures_m1(cp);
        spot = std::max(spot, std::fabs(Km1 + 1.0));
        spot = std::max(spot, std::fabs(KNm1 - 1.0));
    }
    detail = "route agreement " + fmt(worst) + ", spot values " + fmt(spot);
    return worst <= 1e-8 && spot <= 1e-8;
}

// --- criterion 3 -----------------------------------------------------------

bool criterion3(std::string& detail) {
    // |K_N|/|K| = 1 with analytic jets on z^2, z^3 and 20 random
    // holomorphic cubics.
    double analytic_dev = 0.0;
    for (const char* name : {"z2", "z3"}) {
        const auto res = run_identity_suite(builtin_chart(name), Rect{-1, 1, -1, 1}, 41);
        analytic_dev = std::max(analytic_dev, res.ratio_dev_from_1);
    }
    std::mt19937 rng(20240809);
    std::vector<FieldSource> cubics;
    for (int k = 0; k < 20; ++k)
        cubics.push_back(make_harmonic_pair(testsupport::random_poly(rng, 3)));
    for (const auto& src : cubics) {
        const auto res =
            run_identity_suite(ShearChart(src, 0.0, 1.0), Rect{-1, 1, -1, 1}, 21);
        analytic_dev = std::max(analytic_dev, res.ratio_dev_from_1);
    }
    const bool ok_analytic = analytic_dev <= 1e-8;

    // Grid jets at h = 1/64. The ratio statistic is restricted to the
    // well-conditioned region E >= 2: where the curvatures themselves
    // vanish, second-order stencils cannot resolve their quotient.
    double grid_dev = 0.0;
    for (const char* name : {"z2", "z3"}) {
        GridField g = sample_to_grid(make_builtin(name).source, Rect{-1, 1, -1, 1}, 129, 129);
        SuiteTols tols;
        tols.iso_tol = 1e-2;
        tols.harm_tol = 1e-2;
        tols.ratio_e_floor = 2.0;
        const auto res =
            run_identity_suite(ShearChart(FieldSource::grid(std::move(g)), 0.0, 1.0),
                               Rect{}, 0, tols);
        grid_dev = std::max(grid_dev, res.ratio_dev_from_1);
    }
    const bool ok_grid = grid_dev <= 1e-3;

    // Classifier calls.
    bool ok_cls = true;
    for (const char* name : {"z2", "z3", "monkey"})
        ok_cls = ok_cls &&
                 classify(make_builtin(name).source, Rect{-1, 1, -1, 1}, 41).cls ==
                     SurfaceClass::ComplexAnalytic;
    for (const auto& src : cubics)
        ok_cls = ok_cls && classify(src, Rect{-1, 1, -1, 1}, 21).cls ==
                               SurfaceClass::ComplexAnalytic;
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        Poly2 f1({{1, 0, coef(rng)}, {0, 1, coef(rng)}, {0, 0, coef(rng)}});
        Poly2 f2({{1, 0, coef(rng)}, {0, 1, coef(rng)}, {0, 0, coef(rng)}});
        ok_cls = ok_cls && classify(make_poly_source({f1, f2}), Rect{-1, 1, -1, 1}, 21).cls ==
                               SurfaceClass::Plane;
    }
    ok_cls = ok_cls &&
             classify(make_poly_source({Poly2({{2, 0, 1.0}}), Poly2({{0, 2, 1.0}})}),
                      Rect{-1, 1, -1, 1}, 41)
                     .cls == SurfaceClass::NotMinimal;

    detail = "analytic dev " + fmt(analytic_dev) + ", grid dev " + fmt(grid_dev) +
             ", classifier " + (ok_cls ? "ok" : "WRONG");
    return ok_analytic && ok_grid && ok_cls;
}

// --- criterion 4 -----------------------------------------------------------

bool criterion4(std::string& detail) {
    double worst = 0.0;
    for (const char* name :
         {"z2", "z3", "monkey", "plane", "shear_plane_s1", "shear_plane_s2"}) {
        const auto res = run_identity_suite(builtin_chart(name), Rect{-1, 1, -1, 1}, 41);
        worst = std::max(worst, res.ratio_identity);
    }
    const bool ok_ratio = worst <= 1e-8;

    // W monotonicity on 1000 sampled t values per shear. For (a,b) = (0,1)
    // the function is identically 1/4 (the complex-analytic case); for all
    // other shears it must be strictly increasing.
    bool ok_mono = true;
    for (const char* name :
         {"z2", "plane", "shear_plane_s1", "shear_plane_s2"}) {
        const auto sh = *make_builtin(name).shear;
        const double a = sh[0], b = sh[1];
        const double S = 1.0 + a * a + b * b;
        const double t0 = std::max(1.0, 2.0 * b * b / S) + 1e-3;
        double prev = -1e300;
        for (int k = 0; k < 1000; ++k) {
            const WRatio w = w_ratio(t0 + 0.01 * k, a, b);
            if (!w.valid) {
                ok_mono = false;
                break;
            }
            if (S * S > 4.0 * b * b + 1e-12) {
                if (!(w.W > prev)) ok_mono = false;
            } else {
                if (std::fabs(w.W - 0.25) > 1e-12) ok_mono = false;
            }
            prev = w.W;
        }
    }
    detail = "ratio identity gap " + fmt(worst) + ", W monotone " + (ok_mono ? "ok" : "NO");
    return ok_ratio && ok_mono;
}

// --- criterion 5 -----------------------------------------------------------

bool criterion5(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();

    // Affine boundary data: exact solution in at most 2 Newton steps. The
    // 17-node grid keeps the floating-point floor of the residual
    // evaluation (eps * |f| * 4/h^2) below the 1e-12 target.
    auto affine = make_poly_source(
        {Poly2({{1, 0, 2.0}, {0, 1, 1.0}}), Poly2({{1, 0, 1.0}, {0, 1, -1.0}})});
    const SolveReport ar = solve_mse(mse_problem(affine, Rect{-0.5, 0.5, -0.5, 0.5}, 17, 1e-12));
    const bool ok_affine =
        ar.converged && ar.iterations <= 2 && ar.final_residual_norm <= 1e-12;

    // z^2 study. Central differences are exact on quadratics, so the
    // discrete solution reproduces z^2 to machine precision on every grid;
    // the error bound holds with eleven orders to spare and the order
    // clause is met by exactness (errors at the rounding floor cannot
    // exhibit a finite rate).
    const auto z2 = make_builtin("z2");
    std::array<double, 3> e2{};
    int k = 0;
    for (int n : {17, 33, 65})
        e2[k++] = max_error_vs(
            solve_mse(mse_problem(z2.source, Rect{-0.5, 0.5, -0.5, 0.5}, n, 1e-11)).solution,
            z2.source);
    const bool z2_exact = e2[1] <= 1e-10 && e2[2] <= 1e-10;
    const bool ok_z2 = e2[2] <= 5e-3 &&
                       (z2_exact || (std::log2(e2[0] / e2[1]) >= 1.8 &&
                                     std::log2(e2[1] / e2[2]) >= 1.8));

    // z^3 study: cubic data has genuine O(h^2) truncation, giving a
    // non-degenerate measurement of the solver's convergence order.
    const auto z3 = make_builtin("z3");
    std::array<double, 3> e3{};
    k = 0;
    for (int n : {17, 33, 65})
        e3[k++] = max_error_vs(
            solve_mse(mse_problem(z3.source, Rect{-0.5, 0.5, -0.5, 0.5}, n, 1e-11)).solution,
            z3.source);
    const double o1 = std::log2(e3[0] / e3[1]), o2 = std::log2(e3[1] / e3[2]);
    const bool ok_z3 = o1 >= 1.8 && o2 >= 1.8 && e3[2] <= 5e-3;

    const double secs = now_seconds(t0);
    detail = "affine iters " + std::to_string(ar.iterations) + " res " +
             fmt(ar.final_residual_norm) + "; z2 err " + fmt(e2[2]) +
             (z2_exact ? " (exact)" : "") + "; z3 orders " + fmt(o1) + "/" + fmt(o2) + "; " +
             fmt(secs) + " s";
    return ok_affine && ok_z2 && ok_z3 && secs < 60.0;
}

// --- criterion 6 -----------------------------------------------------------

bool criterion6(std::string& detail) {
    // Quadratic boundary data: recovery and pipeline residuals, with the
    // O(h^2) envelope anchored at the n = 65 tolerance.
    const Poly2 quad = make_ma_boundary("quadratic-identity");
    auto exact = make_poly_source({quad});
    bool ok_quad = true;
    std::array<double, 3> jgap{}, mres{};
    const int grids[3] = {17, 33, 65};
    const double h65 = 2.0 / 64.0;
    for (int k = 0; k < 3; ++k) {
        const SolveReport rep = solve_monge_ampere(ma_problem(quad, grids[k], 1e-12));
        if (!rep.converged) ok_quad = false;
        const JorgensReport jr = jorgens_pipeline(rep.solution, 1e-6);
        jgap[k] = jr.max_j_gap;
        mres[k] = jr.max_mse_residual;
        const double h = 2.0 / (grids[k] - 1);
        const double envelope = 1e-10 + 1e-6 * (h / h65) * (h / h65);
        if (jgap[k] > envelope || mres[k] > envelope) ok_quad = false;
        if (k == 2 && max_error_vs(rep.solution, exact) > 1e-10) ok_quad = false;
    }
    const bool ok_n65 = jgap[2] <= 1e-6 && mres[2] <= 1e-6;

    // Smooth perturbed datum: residuals must decrease under refinement.
    // Corner regularity of the square domain limits the observable
    // max-norm rate, so the rate itself is reported rather than pinned.
    std::array<double, 3> pj{}, pm{};
    bool ok_pert = true;
    const Poly2 bump = make_ma_boundary("edge-bump", 1e-3);
    int k2 = 0;
    for (int n : {33, 65, 129}) {
        // 1e-11 stays above the residual evaluation floor at n = 129 and
        // far below the measured pipeline signal (~1e-5).
        const SolveReport rep = solve_monge_ampere(ma_problem(bump, n, 1e-11));
        if (!rep.converged) ok_pert = false;
        const JorgensReport jr = jorgens_pipeline(rep.solution, 1e-3);
        pj[k2] = jr.max_j_gap;
        pm[k2] = jr.max_mse_residual;
        ++k2;
    }
    ok_pert = ok_pert && pj[0] > pj[1] && pj[1] > pj[2] && pm[0] > pm[1] && pm[1] > pm[2];

    detail = "quad recovery+envelope " + std::string(ok_quad ? "ok" : "FAIL") + ", n65 J " +
             fmt(jgap[2]) + " M " + fmt(mres[2]) + "; perturbed J order " +
             fmt(0.5 * std::log2(pj[0] / pj[2])) + " M order " +
             fmt(0.5 * std::log2(pm[0] / pm[2]));
    return ok_quad && ok_n65 && ok_pert;
}

// --- criterion 7 -----------------------------------------------------------

bool criterion7(std::string& detail) {
    const std::vector<double> radii{1.0, 1.5, 2.0};
    const auto series = min_jacobian_scan(make_builtin("z2p3zbar").source, radii, 257);
    const bool ok_vals = std::fabs(series[0].min_abs_j - 5.0) <= 1e-2 &&
                         series[1].min_abs_j <= 1e-2 && series[2].min_abs_j <= 1e-2;

    auto affine = make_poly_source(
        {Poly2({{1, 0, 1.0}, {0, 1, 2.0}}), Poly2({{1, 0, -1.0}, {0, 1, 1.0}})});
    const auto aseries = min_jacobian_scan(affine, radii, 101);
    const bool ok_affine = aseries[0].min_abs_j == aseries[1].min_abs_j &&
                           aseries[1].min_abs_j == aseries[2].min_abs_j;

    bool ok_mono = true;
    std::mt19937 rng(424242);
    for (int trial = 0; trial < 20; ++trial) {
        auto src = make_harmonic_pair(testsupport::random_poly(rng, 4),
                                      testsupport::random_poly(rng, 3));
        const auto s = min_jacobian_scan(src, radii, 101);
        for (std::size_t i = 1; i < s.size(); ++i)
            if (s[i].min_abs_j > s[i - 1].min_abs_j) ok_mono = false;
    }
    detail = "series (" + fmt(series[0].min_abs_j) + ", " + fmt(series[1].min_abs_j) + ", " +
             fmt(series[2].min_abs_j) + "), affine constant " + (ok_affine ? "ok" : "NO") +
             ", monotone " + (ok_mono ? "ok" : "NO");
    return ok_vals && ok_affine && ok_mono;
}

// --- criterion 8 -----------------------------------------------------------

bool criterion8(std::string& detail) {
    const auto z2 = make_builtin("z2");
    const std::vector<double> radii{1.0, 2.0, 4.0};
    const auto series = bernstein_scan(z2.source, z2.shear, radii, 257);
    const double expected[3] = {4.0, 16.0, 64.0};
    bool ok_sup = true, ok_ratio = true;
    for (int k = 0; k < 3; ++k) {
        ok_sup = ok_sup && std::fabs(series[k].sup_abs_j - expected[k]) <= 1e-6;
        ok_ratio = ok_ratio && series[k].inf_ratio &&
                   std::fabs(*series[k].inf_ratio - 1.0) <= 1e-6;
    }

    double min_slack = 1e300;
    for (const char* name :
         {"z2", "z3", "monkey", "plane", "shear_plane_s1", "shear_plane_s2"}) {
        const auto res = run_identity_suite(builtin_chart(name), Rect{-1, 1, -1, 1}, 41);
        min_slack = std::min(min_slack, res.min_e_bound_slack);
    }
    detail = "sup|J| (" + fmt(series[0].sup_abs_j) + ", " + fmt(series[1].sup_abs_j) + ", " +
             fmt(series[2].sup_abs_j) + "), inf ratio dev " +
             fmt(std::fabs(*series[2].inf_ratio - 1.0)) + ", E-bound slack " + fmt(min_slack);
    return ok_sup && ok_ratio && min_slack >= -1e-12;
}

// --- criterion 9 -----------------------------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string strip_elapsed(std::string text) {
    static const std::regex elapsed("\"elapsed_seconds\": [^\\n]*");
    return std::regex_replace(text, elapsed, "\"elapsed_seconds\": X");
}

bool criterion9(std::string& detail) {
    struct Cmd {
        std::string args;
        std::vector<std::string> aux;  // extra output files to compare
    };
    const std::string tmp = "acceptance_tmp";
    const std::vector<Cmd> cmds = {
        {"verify --surface z2 --n 41", {}},
        {"verify --surface z3 --n 41", {}},
        {"verify --surface shear_plane_s1 --n 41", {}},
        {"verify --surface shear_plane_s2 --n 41", {}},
        {"classify --surface z3", {}},
        {"classify --surface monkey", {}},
        {"classify --surface z2p3zbar", {}},
        {"fit-shear --surface shear_plane_s1 --n 15", {}},
        {"scan --surface z2 --radii 1 2 4 --grid-n 129", {}},
        {"scan --surface z2p3zbar --mode minjac --radii 1 1.5 2 --grid-n 129 --csv " + tmp +
             "_mj.csv",
         {tmp + "_mj.csv"}},
        {"solve-mse --surface z2 --domain -0.5 0.5 -0.5 0.5 --n 17 --tol-newton 1e-11 "
         "--solution-out " +
             tmp + "_mse.grid",
         {tmp + "_mse.grid"}},
        {"verify --input " + tmp + "_mse.grid --shear 0 1", {}},
        {"solve-ma --boundary quadratic-skew --n 17 --tol-newton 1e-12 --solution-out " + tmp +
             "_ma.grid",
         {tmp + "_ma.grid"}},
        {"invariants --surface z3 --n 11 --csv " + tmp + "_inv.csv", {tmp + "_inv.csv"}},
    };

    int mismatches = 0;
    for (const auto& c : cmds) {
        std::array<std::string, 2> reports;
        std::array<std::vector<std::string>, 2> auxdata;
        for (int pass = 0; pass < 2; ++pass) {
            const std::string out = tmp + "_report" + std::to_string(pass) + ".json";
            const std::string cmd =
                "\"" + g_cli + "\" " + c.args + " --output " + out + " 2> " + tmp + "_err.txt";
            if (std::system(cmd.c_str()) != 0) {
                detail = "command failed: " + c.args;
                return false;
            }
            reports[pass] = strip_elapsed(slurp(out));
            for (const auto& aux : c.aux) auxdata[pass].push_back(slurp(aux));
        }
        if (reports[0] != reports[1] || reports[0].empty()) ++mismatches;
        if (auxdata[0] != auxdata[1]) ++mismatches;
    }

    // Chain the Monge-Ampere solution through jorgens twice.
    {
        std::array<std::string, 2> reports;
        for (int pass = 0; pass < 2; ++pass) {
            const std::string out = tmp + "_jor" + std::to_string(pass) + ".json";
            const std::string cmd = "\"" + g_cli + "\" jorgens --input " + tmp +
                                    "_ma.grid --output " + out + " 2> " + tmp + "_err.txt";
            if (std::system(cmd.c_str()) != 0) {
                detail = "jorgens run failed";
                return false;
            }
            reports[pass] = strip_elapsed(slurp(out));
        }
        if (reports[0] != reports[1] || reports[0].empty()) ++mismatches;
    }

    detail = mismatches == 0 ? "all reports byte-identical modulo timing"
                             : std::to_string(mismatches) + " command(s) mismatched";
    return mismatches == 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            g_cli = argv[++i];
        } else if (!arg.empty() && std::isdigit(static_cast<unsigned char>(arg[0]))) {
            selected.push_back(std::atoi(arg.c_str()));
        } else {
            std::fprintf(stderr, "usage: acceptance [--cli PATH] [N ...]\n");
            return 64;
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "identity suite on z2, z3, S1, S2 (41x41, analytic jets)", criterion1},
        {2, "triple curvature agreement and spot values", criterion2},
        {3, "complex-curve ratio and classifier", criterion3},
        {4, "ratio identity and W monotonicity", criterion4},
        {5, "minimal surface solver convergence", criterion5},
        {6, "Monge-Ampere recovery and gradient-graph pipeline", criterion6},
        {7, "minimum-Jacobian scan", criterion7},
        {8, "expanding-disk scan and conformal-factor bound", criterion8},
        {9, "report determinism", criterion9},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.number) == selected.end())
            continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", c.number,
                    c.label.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
