// mgl: numerical toolkit for two-dimensional graphs in R^4.
//
// Subcommands wire the library operations to grid/analytic inputs and
// JSON/CSV reports. Exit codes: 0 success, 1 validation error, 2 solver
// failed to converge (or lost convexity), 3 I/O error. Diagnostics go to
// stderr; reports are the only stdout output.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgl/mgl.hpp"

namespace {

using mgl::Report;

struct CommonOpts {
    std::string surface;
    std::string input;
    std::vector<double> domain{-1.0, 1.0, -1.0, 1.0};
    int n = 41;
    std::vector<double> shear;
    bool fit = false;
    double tol = -1.0;
    std::string output;
    std::string csv;
};

struct SolveOpts {
    double tol_newton = 1e-11;
    int max_iter = 50;
    double damping = 1.0;
    std::string solution_out;
};

mgl::Rect rect_of(const std::vector<double>& d) {
    return mgl::Rect{d[0], d[1], d[2], d[3]};
}

/// Loads the field named by --surface or --input. Builtins are analytic;
/// files are parsed as "mgl-grid v1".
mgl::FieldSource load_surface(const CommonOpts& o, int want_ncomp) {
    if (o.surface.empty() == o.input.empty())
        throw mgl::Error("exactly one of --surface and --input is required");
    mgl::FieldSource src = o.surface.empty()
                               ? mgl::FieldSource::grid(mgl::read_grid_file(o.input))
                               : mgl::make_builtin(o.surface).source;
    if (want_ncomp > 0 && src.ncomp() != want_ncomp)
        throw mgl::Error("input must have " + std::to_string(want_ncomp) +
                         " component(s), got " + std::to_string(src.ncomp()));
    return src;
}

/// Shear parameters: explicit flag wins, then the builtin's recorded
/// value, then fitting when requested, else the identity shear.
std::array<double, 2> resolve_shear(const CommonOpts& o, const mgl::FieldSource& src,
                                    Report& inputs) {
    if (!o.shear.empty()) {
        inputs["shear_source"] = "explicit";
        return {o.shear[0], o.shear[1]};
    }
    if (o.fit) {
        const auto fit = mgl::fit_shear(src, rect_of(o.domain), std::min(o.n, 21));
        inputs["shear_source"] = "fitted";
        inputs["fit_rms"] = fit.best().rms;
        return {fit.best().a, fit.best().b};
    }
    if (!o.surface.empty()) {
        const auto b = mgl::make_builtin(o.surface);
        if (b.shear) {
            inputs["shear_source"] = "builtin";
            return *b.shear;
        }
    }
    inputs["shear_source"] = "default-identity";
    return {0.0, 1.0};
}

void echo_common(Report& inputs, const CommonOpts& o) {
    if (!o.surface.empty()) inputs["surface"] = o.surface;
    if (!o.input.empty()) inputs["input"] = o.input;
    inputs["domain"] = o.domain;
    inputs["n"] = o.n;
    const char* threads = std::getenv("MGL_THREADS");
    if (threads) {
        char* end = nullptr;
        const long v = std::strtol(threads, &end, 10);
        if (!end || *end != '\0' || v < 1)
            throw mgl::Error("MGL_THREADS must be a positive integer");
        inputs["mgl_threads"] = static_cast<int>(v);
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw mgl::IoError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw mgl::IoError("write failed for '" + path + "'");
}

void finish_report(Report& rep, const std::string& output,
                   std::chrono::steady_clock::time_point t0) {
    rep["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(output, mgl::report_string(rep));
}

std::string csv_cell(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Report suite_report(const mgl::IdentitySuiteResult& r) {
    Report j;
    j["total_points"] = r.total_points;
    j["m1_points"] = r.m1_points;
    j["max_iso_r1"] = r.iso_r1;
    j["max_iso_r2"] = r.iso_r2;
    j["max_harmonic"] = r.harm;
    j["max_identity_35"] = r.id35;
    j["max_eqs_38"] = r.eq38;
    j["max_omega_39"] = r.omega39;
    j["max_normal_field"] = r.normal_field;
    j["max_frame_orthogonality"] = r.frame_ortho;
    j["max_jacobian_relation"] = r.jacobian_rel;
    j["max_solved_2nd_derivs"] = r.solved2;
    j["max_wirtinger_gap"] = r.wirtinger_gap;
    j["max_k_frame_vs_m1"] = r.k_frame_vs_m1;
    j["max_k_frame_vs_conformal"] = r.k_frame_vs_conformal;
    j["max_kn_frame_vs_m1"] = r.kn_frame_vs_m1;
    j["max_ratio_identity"] = r.ratio_identity;
    j["max_ratio_dev_from_1"] = r.ratio_dev_from_1;
    j["min_e_bound_slack"] = r.min_e_bound_slack;
    return j;
}

int cmd_verify(const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep["schema"] = "mgl-report/1";
    rep["command"] = "verify";
    Report inputs;
    echo_common(inputs, o);
    const mgl::FieldSource src = load_surface(o, 2);
    const auto [a, b] = resolve_shear(o, src, inputs);
    inputs["shear"] = {a, b};
    rep["inputs"] = inputs;

    mgl::SuiteTols tols;
    if (!src.is_analytic()) {
        tols.iso_tol = 1e-2;
        tols.harm_tol = 1e-2;
        tols.ratio_e_floor = 2.0;
    }
    const mgl::ShearChart chart(src, a, b);
    const auto res = mgl::run_identity_suite(chart, rect_of(o.domain), o.n, tols);
    rep["results"] = suite_report(res);

    const double tol = o.tol > 0 ? o.tol : (src.is_analytic() ? 1e-9 : 1e-3);
    Report verdicts;
    verdicts["tolerance"] = tol;
    verdicts["identities_pass"] =
        res.iso_r1 <= tol && res.iso_r2 <= tol && res.harm <= tol && res.id35 <= tol &&
        res.eq38 <= tol && res.omega39 <= tol && res.normal_field <= std::max(tol, 1e-10) &&
        res.jacobian_rel <= tol;
    verdicts["curvature_routes_pass"] =
        res.k_frame_vs_m1 <= std::max(tol, 1e-8) &&
        (!src.is_analytic() || res.k_frame_vs_conformal <= std::max(tol, 1e-8));
    verdicts["ratio_identity_pass"] = res.ratio_identity <= std::max(tol, 1e-8);
    verdicts["e_bound_pass"] = res.min_e_bound_slack >= -1e-12;
    rep["verdicts"] = verdicts;

    finish_report(rep, o.output, t0);
    return 0;
}

int cmd_invariants(const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep["schema"] = "mgl-report/1";
    rep["command"] = "invariants";
    Report inputs;
    echo_common(inputs, o);
    const mgl::FieldSource src = load_surface(o, 2);
    const auto [a, b] = resolve_shear(o, src, inputs);
    inputs["shear"] = {a, b};
    rep["inputs"] = inputs;

    const mgl::ShearChart chart(src, a, b);
    const double iso_tol = src.is_analytic() ? 1e-8 : 1e-2;
    const mgl::Rect dom = rect_of(o.domain);

    std::vector<std::pair<double, double>> pts;
    if (src.is_analytic()) {
        for (int j = 0; j < o.n; ++j)
            for (int i = 0; i < o.n; ++i)
                pts.emplace_back(dom.x0 + dom.width() * i / (o.n - 1),
                                 dom.y0 + dom.height() * j / (o.n - 1));
    } else {
        const mgl::GridField& g = *src.grid_field();
        for (int j = 2; j <= g.ny() - 3; ++j)
            for (int i = 2; i <= g.nx() - 3; ++i)
                pts.emplace_back(g.x(i), (g.y(j) - a * g.x(i)) / b);
    }

    Report table = Report::array();
    std::ostringstream csv;
    csv << "u,v,E,K,KN,h2,H3,H4,in_m1\n";
    for (auto [u, v] : pts) {
        const mgl::ChartPoint cp = chart.at(u, v);
        const mgl::FrameR4 fr = mgl::frame_r4(a, b, cp.phi, cp.psi, iso_tol);
        const mgl::SecondForm sf =
            mgl::second_form(a, b, cp.phi, cp.psi, fr, iso_tol);
        const mgl::Invariants inv = mgl::curvatures(sf);
        const mgl::OmegaMask om = mgl::omega_and_mask(cp, 1e-8, 1.0);
        Report row;
        row["u"] = u;
        row["v"] = v;
        row["E"] = fr.E;
        row["K"] = inv.K;
        row["KN"] = inv.KN;
        row["h2"] = inv.h2;
        row["H"] = {inv.H[0], inv.H[1]};
        row["in_m1"] = om.in_m1;
        table.push_back(row);
        csv << csv_cell(u) << ',' << csv_cell(v) << ',' << csv_cell(fr.E) << ','
            << csv_cell(inv.K) << ',' << csv_cell(inv.KN) << ',' << csv_cell(inv.h2) << ','
            << csv_cell(inv.H[0]) << ',' << csv_cell(inv.H[1]) << ',' << (om.in_m1 ? 1 : 0)
            << '\n';
    }
    rep["results"]["points"] = table;
    if (!o.csv.empty()) write_text(o.csv, csv.str());
    finish_report(rep, o.output, t0);
    return 0;
}

int cmd_classify(const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep["schema"] = "mgl-report/1";
    rep["command"] = "classify";
    Report inputs;
    echo_common(inputs, o);
    const mgl::FieldSource src = load_surface(o, 2);
    rep["inputs"] = inputs;

    const auto res = mgl::classify(src, rect_of(o.domain), o.n, o.tol);
    Report out;
    out["class"] = mgl::to_string(res.cls);
    out["branch"] = mgl::to_string(res.branch);
    out["max_residual"] = res.max_residual;
    out["max_h2"] = res.max_h2;
    out["cr_defect"] = res.cr_defect;
    out["scale"] = res.scale;
    out["samples"] = res.samples;
    out["tolerance"] = o.tol > 0 ? o.tol : mgl::default_classify_tol(src);
    rep["results"] = out;
    finish_report(rep, o.output, t0);
    return 0;
}

int cmd_fit_shear(const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep["schema"] = "mgl-report/1";
    rep["command"] = "fit-shear";
    Report inputs;
    echo_common(inputs, o);
    const mgl::FieldSource src = load_surface(o, 2);
    rep["inputs"] = inputs;

    const auto fit = mgl::fit_shear(src, rect_of(o.domain), std::min(o.n, 41));
    Report cands = Report::array();
    for (const auto& c : fit.candidates) {
        Report jc;
        jc["a"] = c.a;
        jc["b"] = c.b;
        jc["rms"] = c.rms;
        cands.push_back(jc);
    }
    rep["results"]["candidates"] = cands;
    rep["results"]["best"] = {{"a", fit.best().a}, {"b", fit.best().b}, {"rms", fit.best().rms}};
    finish_report(rep, o.output, t0);
    return 0;
}

int solve_common(const CommonOpts& o, const SolveOpts& s, bool monge_ampere,
                 const std::string& boundary_name, double eps) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep["schema"] = "mgl-report/1";
    rep["command"] = monge_ampere ? "solve-ma" : "solve-mse";
    Report inputs;
    echo_common(inputs, o);
    inputs["tol_newton"] = s.tol_newton;
    inputs["max_iter"] = s.max_iter;
    inputs["damping"] = s.damping;

    mgl::BvpProblem p;
    p.domain = rect_of(o.domain);
    p.n = o.n;
    p.opts.tol_newton = s.tol_newton;
    p.opts.max_iter = s.max_iter;
    p.opts.damping = s.damping;

    const mgl::SolveReport sol = [&] {
        if (monge_ampere) {
            inputs["boundary"] = boundary_name;
            if (boundary_name == "quartic-perturbed" || boundary_name == "edge-bump")
                inputs["eps"] = eps;
            const mgl::Poly2 bd = mgl::make_ma_boundary(boundary_name, eps);
            p.boundary = [bd](double x, double y) {
                return std::vector<double>{bd.jet3(x, y).value};
            };
            rep["inputs"] = inputs;
            return mgl::solve_monge_ampere(p);
        }
        const mgl::FieldSource src = load_surface(o, 2);
        p.boundary = [src](double x, double y) {
            return std::vector<double>{src.jet3(x, y, 0).value, src.jet3(x, y, 1).value};
        };
        rep["inputs"] = inputs;
        return mgl::solve_mse(p);
    }();

    Report out;
    out["converged"] = sol.converged;
    out["status"] = mgl::to_string(sol.status);
    out["iterations"] = sol.iterations;
    out["final_residual_norm"] = sol.final_residual_norm;
    if (!s.solution_out.empty()) {
        mgl::write_grid_file(sol.solution, s.solution_out);
        out["grid_file"] = s.solution_out;
    } else {
        out["grid_file"] = nullptr;
    }
    rep["results"] = out;
    finish_report(rep, o.output, t0);
    return sol.converged ? 0 : 2;
}

int cmd_jorgens(const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep["schema"] = "mgl-report/1";
    rep["command"] = "jorgens";
    Report inputs;
    echo_common(inputs, o);
    if (o.input.empty()) throw mgl::Error("jorgens requires --input (scalar mgl-grid file)");
    const mgl::GridField f = mgl::read_grid_file(o.input);
    rep["inputs"] = inputs;

    const double tol = o.tol > 0 ? o.tol : 1e-6;
    const mgl::JorgensReport jr = mgl::jorgens_pipeline(f, tol);

    // Theta diagnostic of the scalar field itself (zero on solutions of
    // the Monge-Ampere equation).
    double max_theta = 0.0;
    int theta_pts = 0;
    for (int j = 2; j <= f.ny() - 3; ++j)
        for (int i = 2; i <= f.nx() - 3; ++i) {
            try {
                max_theta = std::max(max_theta, std::fabs(mgl::theta_field(mgl::fd_jet(f, i, j))));
                ++theta_pts;
            } catch (const mgl::DenominatorVanishes&) {
            }
        }

    Report out;
    out["max_j_gap"] = jr.max_j_gap;
    out["max_mse_residual"] = jr.max_mse_residual;
    out["points"] = jr.points;
    out["within_tol"] = jr.within_tol;
    out["tolerance"] = tol;
    out["max_abs_theta"] = max_theta;
    out["theta_points"] = theta_pts;
    rep["results"] = out;
    finish_report(rep, o.output, t0);
    return 0;
}

int cmd_scan(const CommonOpts& o, const std::vector<double>& radii, int grid_n,
             const std::string& mode) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep["schema"] = "mgl-report/1";
    rep["command"] = "scan";
    Report inputs;
    echo_common(inputs, o);
    inputs["radii"] = radii;
    inputs["grid_n"] = grid_n;
    inputs["mode"] = mode;
    const mgl::FieldSource src = load_surface(o, 2);

    std::ostringstream csv;
    Report results;
    if (mode == "bernstein" || mode == "both") {
        std::optional<std::array<double, 2>> shear;
        if (!o.shear.empty()) {
            shear = {{o.shear[0], o.shear[1]}};
            inputs["shear_source"] = "explicit";
        } else if (!o.surface.empty() && mgl::make_builtin(o.surface).shear && !o.fit) {
            shear = *mgl::make_builtin(o.surface).shear;
            inputs["shear_source"] = "builtin";
        } else {
            inputs["shear_source"] = "fitted";
        }
        const double tol = o.tol > 0 ? o.tol : 1e-6;
        const auto series = mgl::bernstein_scan(src, shear, radii, grid_n, tol);
        Report tbl = Report::array();
        for (const auto& e : series) {
            Report row;
            row["R"] = e.radius;
            row["sup_abs_J"] = e.sup_abs_j;
            row["sup_E"] = e.sup_e;
            if (e.inf_ratio)
                row["inf_ratio"] = *e.inf_ratio;
            else
                row["inf_ratio"] = nullptr;
            row["ratio_points"] = e.ratio_points;
            tbl.push_back(row);
        }
        results["bernstein"] = tbl;
        if (mode == "bernstein") {
            csv << "R,sup_abs_J,sup_E,inf_ratio\n";
            for (const auto& e : series)
                csv << csv_cell(e.radius) << ',' << csv_cell(e.sup_abs_j) << ','
                    << csv_cell(e.sup_e) << ','
                    << (e.inf_ratio ? csv_cell(*e.inf_ratio) : std::string()) << '\n';
        }
    }
    if (mode == "minjac" || mode == "both") {
        const auto series = mgl::min_jacobian_scan(src, radii, grid_n);
        Report tbl = Report::array();
        csv << "R,min_abs_J\n";
        for (const auto& e : series) {
            Report row;
            row["R"] = e.radius;
            row["min_abs_J"] = e.min_abs_j;
            tbl.push_back(row);
            csv << csv_cell(e.radius) << ',' << csv_cell(e.min_abs_j) << '\n';
        }
        results["min_jacobian"] = tbl;
    }
    rep["inputs"] = inputs;
    rep["results"] = results;
    if (!o.csv.empty()) write_text(o.csv, csv.str());
    finish_report(rep, o.output, t0);
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_shear = true) {
    cmd->add_option("--surface", o.surface, "builtin surface name");
    cmd->add_option("--input", o.input, "mgl-grid v1 input file");
    cmd->add_option("--domain", o.domain, "sample rectangle x0 x1 y0 y1")->expected(4);
    cmd->add_option("--n", o.n, "samples (or grid nodes) per axis");
    if (with_shear) {
        cmd->add_option("--shear", o.shear, "shear parameters a b")->expected(2);
        cmd->add_flag("--fit-shear", o.fit, "fit the shear parameters");
    }
    cmd->add_option("--tol", o.tol, "tolerance override");
    cmd->add_option("--output", o.output, "report file (default stdout)");
    cmd->add_option("--csv", o.csv, "table output file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for two-dimensional graphs in R^4"};
    app.require_subcommand(1);

    CommonOpts overify, oinv, ocls, ofit, omse, oma, ojor, oscan;
    omse.n = 33;
    oma.n = 33;
    SolveOpts smse, sma;
    std::string ma_boundary = "quadratic-identity";
    double ma_eps = 1e-5;
    std::vector<double> radii{1.0, 2.0, 4.0};
    int grid_n = 129;
    std::string scan_mode = "bernstein";

    auto* cverify = app.add_subcommand("verify", "identity suite for a chart");
    add_common(cverify, overify);

    auto* cinv = app.add_subcommand("invariants", "per-point curvature table");
    add_common(cinv, oinv);

    auto* ccls = app.add_subcommand("classify", "plane / complex-analytic classifier");
    add_common(ccls, ocls, false);

    auto* cfit = app.add_subcommand("fit-shear", "fit isothermal shear parameters");
    add_common(cfit, ofit, false);

    auto* cmse = app.add_subcommand("solve-mse", "minimal surface system Dirichlet solver");
    add_common(cmse, omse);
    cmse->add_option("--tol-newton", smse.tol_newton, "Newton residual tolerance");
    cmse->add_option("--max-iter", smse.max_iter, "Newton iteration cap");
    cmse->add_option("--damping", smse.damping, "initial damping factor");
    cmse->add_option("--solution-out", smse.solution_out, "write solution grid here");

    auto* cma = app.add_subcommand("solve-ma", "Monge-Ampere Dirichlet solver");
    add_common(cma, oma, false);
    cma->add_option("--boundary", ma_boundary, "boundary data name");
    cma->add_option("--eps", ma_eps, "perturbation size for perturbed data");
    cma->add_option("--tol-newton", sma.tol_newton, "Newton residual tolerance");
    cma->add_option("--max-iter", sma.max_iter, "Newton iteration cap");
    cma->add_option("--damping", sma.damping, "initial damping factor");
    cma->add_option("--solution-out", sma.solution_out, "write solution grid here");

    auto* cjor = app.add_subcommand("jorgens", "gradient-graph pipeline for a scalar grid");
    add_common(cjor, ojor, false);

    auto* cscan = app.add_subcommand("scan", "expanding-disk diagnostics");
    add_common(cscan, oscan);
    cscan->add_option("--radii", radii, "scan radii (increasing)");
    cscan->add_option("--grid-n", grid_n, "lattice points per axis and disk");
    cscan->add_option("--mode", scan_mode, "bernstein | minjac | both")
        ->check(CLI::IsMember({"bernstein", "minjac", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (cverify->parsed()) return cmd_verify(overify);
        if (cinv->parsed()) return cmd_invariants(oinv);
        if (ccls->parsed()) return cmd_classify(ocls);
        if (cfit->parsed()) return cmd_fit_shear(ofit);
        if (cmse->parsed()) return solve_common(omse, smse, false, "", 0.0);
        if (cma->parsed()) return solve_common(oma, sma, true, ma_boundary, ma_eps);
        if (cjor->parsed()) return cmd_jorgens(ojor);
        if (cscan->parsed()) return cmd_scan(oscan, radii, grid_n, scan_mode);
    } catch (const mgl::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const mgl::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const mgl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
