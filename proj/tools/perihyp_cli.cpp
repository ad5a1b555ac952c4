#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "perihyp/diagnostics.hpp"
#include "perihyp/error.hpp"
#include "perihyp/identities.hpp"
#include "perihyp/nonresonance.hpp"
#include "perihyp/report_io.hpp"
#include "perihyp/solver.hpp"
#include "perihyp/wave2fos.hpp"

namespace fs = std::filesystem;
using namespace perihyp;

namespace {

enum Exit { ok = 0, input_error = 1, resonant = 2, no_convergence = 3, identity_failure = 4 };

struct Config {
    std::string problem;
    int nt = 64;
    int nx = 100;
    double tol = 1e-10;
    int max_iter = 200;
    std::string out = "perihyp_out";
    std::uint64_t seed = 0;
    std::string mode = "auto";
    std::string accelerant = "picard";
    double relaxation = 1.0;
    std::string field;  // optional CSV input
    std::string phi = "triangle";
    int kmax = 5;
    int points = 64;
    int fields = 5;
    std::vector<double> probes{0.25, 0.5, 0.75};
};

Json header(const Config& c, const std::string& command) {
    Json j;
    j["command"] = command;
    j["seed"] = c.seed;
    j["nt"] = c.nt;
    j["nx"] = c.nx;
    return j;
}

Problem require_problem(const Config& c) {
    if (c.problem.empty()) throw ConfigError("--problem is required");
    auto p = load_problem(c.problem);
    const auto rep = std::visit([](const auto& q) { return validate_problem(q); }, p);
    if (!rep.passed) {
        std::string msg = "problem failed validation";
        for (const auto& m : rep.messages) msg += "; " + m;
        throw ConfigError(msg);
    }
    return p;
}

SolveOptions solve_options(const Config& c) {
    SolveOptions o;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    o.relaxation = c.relaxation;
    o.mode = parse_shift_mode(c.mode);
    if (c.accelerant == "quasi_newton") o.accelerant = Accelerant::quasi_newton;
    else if (c.accelerant != "picard") throw ConfigError("unknown accelerant '" + c.accelerant + "'");
    o.validate();
    return o;
}

PeriodicField read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    return read_csv(in);
}

PeriodicField initial_field(const Config& c, int components) {
    if (c.field.empty()) return PeriodicField::zeros(components, TimeGrid(c.nt), SpaceGrid(c.nx));
    auto f = read_field(c.field);
    if (f.components() != components) throw ConfigError("field has the wrong number of components");
    return f;
}

int exit_for(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return ok;
        case SolveStatus::resonant_iterate:
        case SolveStatus::resonant_gain: return resonant;
        default: return no_convergence;
    }
}

std::string verdict(const std::array<NonresonanceReport, 2>& r) {
    return r[0].satisfied || r[1].satisfied ? "satisfied" : "violated";
}

int cmd_solve(const Config& c) {
    const auto problem = require_problem(c);
    const auto opts = solve_options(c);
    const fs::path out(c.out);
    Json j = header(c, "solve");
    j["problem"] = to_json(problem);
    SolveStatus status;
    if (const auto* p = std::get_if<FirstOrderProblem>(&problem)) {
        const auto rep = picard_solve(*p, initial_field(c, 2), opts);
        status = rep.status;
        j["accelerant"] = c.accelerant;
        j["report"] = to_json(rep);
        write_field_csv(out / "solution.csv", rep.solution);
        Json nr;
        nr["verdict"] = rep.nonresonance ? verdict(*rep.nonresonance) : "unchecked";
        nr["conditions"] = rep.nonresonance ? to_json(*rep.nonresonance) : Json();
        write_json(out / "nonresonance.json", nr);
    } else {
        const auto& q = std::get<SecondOrderProblem>(problem);
        const auto rep = solve_second_order(q, initial_field(c, 1), opts);
        status = rep.fos.status;
        j["accelerant"] = "quasi_newton";
        j["report"] = to_json(rep.fos);
        j["round_trip"] = rep.round_trip;
        write_field_csv(out / "solution.csv", rep.u);
        write_field_csv(out / "fos_solution.csv", rep.fos.solution);
        write_json(out / "nonresonance.json", to_json(check_second_order(rep.u, q)));
    }
    write_json(out / "report.json", j);
    std::cout << to_string(status) << '\n';
    return exit_for(status);
}

int cmd_check_nonres(const Config& c) {
    const auto problem = require_problem(c);
    Json j = header(c, "check-nonres");
    j["problem"] = to_json(problem);
    std::string v;
    if (const auto* p = std::get_if<FirstOrderProblem>(&problem)) {
        const auto r = check_first_order(initial_field(c, 2), *p);
        v = verdict(r);
        j["verdict"] = v;
        j["conditions"] = to_json(r);
    } else {
        const auto r = check_second_order(initial_field(c, 1), std::get<SecondOrderProblem>(problem));
        v = verdict(r.sum);
        j["verdict"] = v;
        j["second_order"] = to_json(r);
    }
    write_json(fs::path(c.out) / "nonresonance.json", j);
    std::cout << v << '\n';
    return v == "satisfied" ? ok : resonant;
}

int cmd_eigen(const Config& c) {
    const auto problem = require_problem(c);
    const auto* p = std::get_if<FirstOrderProblem>(&problem);
    if (!p) throw ConfigError("eigen needs a first-order problem");
    // Linearization about the zero stationary state.
    const StationaryProfile zero = [](double) { return std::array<double, 2>{0.0, 0.0}; };
    const auto formula = stationary_eigenvalues(*p, zero, -c.kmax, c.kmax);
    const auto colloc = collocation_eigenvalues(*p, zero, c.points);
    std::vector<std::complex<double>> matched;
    double worst = 0.0;
    for (const auto& lam : formula) {
        std::complex<double> best = std::numeric_limits<double>::quiet_NaN();
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& mu : colloc) {
            if (std::abs(mu - lam) < dist) {
                dist = std::abs(mu - lam);
                best = mu;
            }
        }
        matched.push_back(best);
        worst = std::max(worst, dist);
    }
    Json j = header(c, "eigen");
    j["problem"] = to_json(problem);
    j["k_min"] = -c.kmax;
    j["k_max"] = c.kmax;
    j["collocation_points"] = c.points;
    j["formula"] = to_json(formula);
    j["collocation"] = to_json(matched);
    j["max_mismatch"] = worst;
    write_json(fs::path(c.out) / "eigen.json", j);
    const auto l0 = formula[static_cast<std::size_t>(c.kmax)];
    std::cout << "lambda_0 = (" << l0.real() << ", " << l0.imag() << "), max mismatch " << worst << '\n';
    return ok;
}

int cmd_counterexample(const Config& c) {
    const auto kind = parse_phi_kind(c.phi);
    const auto ce = counterexample_field(kind, TimeGrid(c.nt), SpaceGrid(c.nx));
    Json j = header(c, "counterexample");
    j["phi"] = to_string(kind);
    j["problem"] = to_json(Problem(ce.problem));
    j["weak_residual"] = weak_residual(ce.u, ce.problem);
    j["classical_residual"] = classical_residual(ce.u, ce.problem);
    j["nonresonance"] = to_json(check_first_order(ce.u, ce.problem));
    const fs::path out(c.out);
    if (c.nt >= 64) {
        const auto est = regularity_estimate(ce.u, c.probes);
        j["regularity"] = to_json(est);
        std::ostringstream csv;
        write_fourier_csv(csv, est);
        write_text(out / "fourier.csv", csv.str());
    }
    write_field_csv(out / "counterexample.csv", ce.u);
    write_json(out / "counterexample.json", j);
    return ok;
}

int cmd_diagnose(const Config& c) {
    const auto problem = require_problem(c);
    Json j = header(c, "diagnose");
    j["problem"] = to_json(problem);
    PeriodicField u;
    if (c.field.empty()) {
        const auto opts = solve_options(c);
        if (const auto* p = std::get_if<FirstOrderProblem>(&problem)) {
            const auto rep = picard_solve(*p, initial_field(c, 2), opts);
            j["solve"] = to_json(rep);
            u = rep.solution;
        } else {
            const auto rep = solve_second_order(std::get<SecondOrderProblem>(problem), initial_field(c, 1), opts);
            j["solve"] = to_json(rep.fos);
            u = rep.u;
        }
    } else {
        u = read_field(c.field);
    }
    if (const auto* p = std::get_if<FirstOrderProblem>(&problem)) {
        if (u.components() != 2) throw ConfigError("first-order problems need a two-component field");
        j["weak_residual"] = weak_residual(u, *p);
        j["classical_residual"] = classical_residual(u, *p);
    } else {
        const auto& q = std::get<SecondOrderProblem>(problem);
        if (u.components() != 1) throw ConfigError("second-order problems need a scalar field");
        const FosSystem sys(q, u.time_grid(), u.space_grid());
        j["weak_residual"] = fixed_point_residual(sys, to_fos(u, q)).sup_norm();
        j["classical_residual"] = classical_residual(u, q);
    }
    const fs::path out(c.out);
    if (u.time_grid().size() >= 64) {
        const auto est = regularity_estimate(u, c.probes);
        j["regularity"] = to_json(est);
        std::ostringstream csv;
        write_fourier_csv(csv, est);
        write_text(out / "fourier.csv", csv.str());
    } else {
        j["regularity"] = "skipped: needs nt >= 64";
    }
    write_json(out / "diagnostics.json", j);
    return ok;
}

int cmd_identities(const Config& c) {
    FirstOrderProblem p = identity_battery_problem();
    if (!c.problem.empty()) {
        const auto problem = require_problem(c);
        const auto* q = std::get_if<FirstOrderProblem>(&problem);
        if (!q) throw ConfigError("identities needs a first-order problem");
        p = *q;
    }
    const auto mode = parse_shift_mode(c.mode);
    const auto coarse = worst_identity_defects(p, TimeGrid(c.nt), SpaceGrid(c.nx), c.seed, c.fields, mode);
    const auto fine = worst_identity_defects(p, TimeGrid(2 * c.nt), SpaceGrid(2 * c.nx), c.seed, c.fields, mode);
    Json j = header(c, "identities");
    j["problem"] = to_json(Problem(p));
    j["fields"] = c.fields;
    Json rows = Json::array();
    bool all = true;
    const auto names = IdentityDefects::names();
    const auto a = coarse.values(), b = fine.values();
    for (std::size_t n = 0; n < names.size(); ++n) {
        Json r;
        r["identity"] = names[n];
        r["coarse"] = a[n];
        r["fine"] = b[n];
        bool pass;
        if (names[n] == "factorization") {
            // Algebraic: must hold on every grid.
            r["tolerance"] = 1e-8;
            pass = a[n] <= 1e-8 && b[n] <= 1e-8;
        } else {
            // Discretization errors: at least eight-fold decrease when both grids double.
            r["ratio"] = a[n] / b[n];
            r["required_ratio"] = 8.0;
            pass = b[n] <= 1e-12 || a[n] / b[n] >= 8.0;
        }
        r["passed"] = pass;
        all = all && pass;
        rows.push_back(r);
        std::cout << names[n] << ": " << a[n] << " -> " << b[n] << (pass ? "  ok" : "  FAIL") << '\n';
    }
    j["identities"] = rows;
    j["passed"] = all;
    write_json(fs::path(c.out) / "identities.json", j);
    return all ? ok : identity_failure;
}

void add_common(CLI::App* sub, Config& c, bool needs_problem) {
    auto* opt = sub->add_option("--problem", c.problem, "problem JSON file");
    if (needs_problem) opt->required();
    sub->add_option("--nt", c.nt, "time nodes")->check(CLI::Range(8, 4096));
    sub->add_option("--nx", c.nx, "space intervals")->check(CLI::Range(8, 4096));
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--seed", c.seed, "seed for random fields");
}

void add_solver(CLI::App* sub, Config& c) {
    sub->add_option("--tol", c.tol, "residual tolerance (sup-norm)");
    sub->add_option("--max-iter", c.max_iter, "iteration limit");
    sub->add_option("--mode", c.mode, "boundary-trace inversion")
        ->check(CLI::IsMember({"auto", "neumann", "inverted", "dense"}));
    sub->add_option("--accelerant", c.accelerant, "picard | quasi_newton")
        ->check(CLI::IsMember({"picard", "quasi_newton"}));
    sub->add_option("--relaxation", c.relaxation, "initial relaxation in (0,1]");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-periodic solutions of first-order hyperbolic systems and damped wave equations"};
    app.require_subcommand(1);
    Config c;

    auto* solve = app.add_subcommand("solve", "solve a problem; writes solution.csv, report.json, nonresonance.json");
    add_common(solve, c, true);
    add_solver(solve, c);
    solve->add_option("--init", c.field, "initial guess (field CSV)");

    auto* nonres = app.add_subcommand("check-nonres", "evaluate the nonresonance conditions at a field (default 0)");
    add_common(nonres, c, true);
    nonres->add_option("--field", c.field, "field CSV");

    auto* eigen = app.add_subcommand("eigen", "stationary eigenvalues: closed form against collocation");
    add_common(eigen, c, true);
    eigen->add_option("--kmax", c.kmax, "report |k| <= kmax")->check(CLI::Range(0, 100));
    eigen->add_option("--points", c.points, "collocation points")->check(CLI::Range(8, 512));

    auto* counter = app.add_subcommand("counterexample", "weak-but-not-classical solutions of the resonant example");
    add_common(counter, c, false);
    counter->add_option("--phi", c.phi, "triangle | quadratic_spline | smooth_harmonic")
        ->check(CLI::IsMember({"triangle", "quadratic_spline", "smooth_harmonic"}));
    counter->add_option("--probes", c.probes, "x positions of the Fourier profiles");

    auto* diagnose = app.add_subcommand("diagnose", "residuals and regularity of a field (solves first if none given)");
    add_common(diagnose, c, true);
    add_solver(diagnose, c);
    diagnose->add_option("--field", c.field, "field CSV");
    diagnose->add_option("--probes", c.probes, "x positions of the Fourier profiles");

    auto* ident = app.add_subcommand("identities", "operator identity battery at two resolutions");
    add_common(ident, c, false);
    ident->add_option("--mode", c.mode, "boundary-trace inversion")
        ->check(CLI::IsMember({"auto", "neumann", "inverted", "dense"}));
    ident->add_option("--fields", c.fields, "random field pairs")->check(CLI::Range(1, 1000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : input_error;
    }

    try {
        if (*solve) return cmd_solve(c);
        if (*nonres) return cmd_check_nonres(c);
        if (*eigen) return cmd_eigen(c);
        if (*counter) return cmd_counterexample(c);
        if (*diagnose) return cmd_diagnose(c);
        if (*ident) return cmd_identities(c);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return input_error;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    }
    return input_error;
}
