// eigenbound: first-eigenvalue lower bounds for weighted 1-D p-Laplacian
// model problems.  Subcommands: bound, sweep, verify, flow.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "eigenbound/compfun.hpp"
#include "eigenbound/errors.hpp"
#include "eigenbound/flow.hpp"
#include "eigenbound/model.hpp"
#include "eigenbound/oracle.hpp"
#include "eigenbound/shoot.hpp"
#include "eigenbound/verify.hpp"

namespace {

using namespace eigenbound;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kCertificatePoints = 129;

// 17 significant digits: lossless double round trips
std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Request {
    std::string theorem; // neumann | dirichlet | classical
    int dim = 2;         // m (quaternionic) or n (classical)
    double p = 2;
    double kappa = 0;
    double lambda = 0;
    double length = 1;   // diameter or inradius
    double rel_tol = 1e-9;
    std::string method = "shoot"; // shoot | oracle | both
    std::string custom_profile;   // "a1:k1,a2:k2" overrides the constructors
    int oracle_n = 8192;
    int oracle_max_iters = 50000;
};

model::GeometryProfile parse_custom_profile(const std::string& text) {
    model::GeometryProfile profile;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw DomainError("--profile expects a1:k1,a2:k2,... got '" + text + "'");
        try {
            profile.terms.push_back(
                {std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw DomainError("--profile term '" + item + "' is not numeric");
        }
    }
    if (profile.terms.empty()) throw DomainError("--profile is empty");
    return profile;
}

model::ModelProblem build_problem(const Request& req) {
    model::GeometryProfile profile;
    if (!req.custom_profile.empty())
        profile = parse_custom_profile(req.custom_profile);
    else if (req.theorem == "classical")
        profile = model::riemannian_profile(req.dim, req.kappa);
    else
        profile = model::quaternionic_profile(req.dim, req.kappa);

    model::ModelProblem problem;
    problem.p = req.p;
    if (req.theorem == "dirichlet") {
        profile.boundary = compfun::BoundaryConvexity{req.lambda};
        problem.kind = model::BoundaryKind::DirichletNeumann;
        problem.half_length = req.length;
    } else {
        problem.kind = model::BoundaryKind::NeumannPair;
        problem.half_length = req.length / 2.0;
    }
    problem.profile = std::move(profile);
    return problem;
}

std::optional<double> flat_closed_form(const model::ModelProblem& problem) {
    for (const auto& term : problem.profile.terms)
        if (term.curvature != 0.0) return std::nullopt;
    if (problem.kind == model::BoundaryKind::DirichletNeumann &&
        problem.profile.lambda() != 0.0)
        return std::nullopt;
    const double p = problem.p;
    return (p - 1.0) * std::pow(compfun::pi_p(p) / (2.0 * problem.half_length), p);
}

void emit_request_json(std::ostream& os, const Request& req,
                       const model::ModelProblem& problem) {
    os << "{";
    os << "\"theorem\":\"" << req.theorem << "\"";
    if (req.custom_profile.empty()) {
        os << ",\"" << (req.theorem == "classical" ? "n" : "m") << "\":" << req.dim;
        os << ",\"kappa\":" << fmt17(req.kappa);
    }
    os << ",\"p\":" << fmt17(req.p);
    if (req.theorem == "dirichlet") os << ",\"lambda\":" << fmt17(req.lambda);
    os << ",\"" << (req.theorem == "dirichlet" ? "inradius" : "diameter")
       << "\":" << fmt17(req.length);
    os << ",\"rel_tol\":" << fmt17(req.rel_tol);
    os << ",\"method\":\"" << req.method << "\"";
    os << ",\"profile\":[";
    for (std::size_t i = 0; i < problem.profile.terms.size(); ++i) {
        const auto& t = problem.profile.terms[i];
        os << (i ? "," : "") << "[" << fmt17(t.multiplicity) << "," << fmt17(t.curvature)
           << "]";
    }
    os << "]}";
}

int run_with_solver_errors(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "invalid request: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
}

int cmd_bound(const Request& req, const std::string& out_path) {
    return run_with_solver_errors([&]() -> int {
        const auto problem = build_problem(req);
        model::require_valid(problem);

        const bool run_shoot = req.method == "shoot" || req.method == "both";
        const bool run_oracle = req.method == "oracle" || req.method == "both";

        std::optional<shoot::EigenResult> sres;
        std::optional<oracle::Estimate> ores;
        if (run_shoot) sres = shoot::solve(problem, req.rel_tol);
        if (run_oracle) ores = oracle::estimate(problem, req.oracle_n, req.oracle_max_iters);

        std::ostringstream os;
        os << "{\"request\":";
        emit_request_json(os, req, problem);
        os << ",\"eigenvalue\":{";
        if (run_shoot) os << "\"shoot\":" << fmt17(sres->eigenvalue);
        if (run_oracle)
            os << (run_shoot ? "," : "") << "\"oracle\":" << fmt17(ores->richardson);
        os << "}";
        if (const auto cf = flat_closed_form(problem))
            os << ",\"closed_form\":" << fmt17(*cf);
        os << ",\"method\":\"" << req.method << "\"";
        if (run_shoot) {
            os << ",\"residual\":" << fmt17(sres->diagnostics.terminal_flux);
            os << ",\"iterations\":" << sres->diagnostics.bisections;
        } else {
            os << ",\"residual\":" << fmt17(std::abs(ores->fine - ores->coarse));
            os << ",\"iterations\":" << ores->iterations;
        }
        if (run_shoot && run_oracle)
            os << ",\"disagreement\":"
               << fmt17(std::abs(sres->eigenvalue - ores->richardson) / sres->eigenvalue);

        os << ",\"certificate\":[";
        if (run_shoot) {
            const auto& traj = sres->certificate;
            for (int i = 0; i < kCertificatePoints; ++i) {
                const double s = traj.terminal_s * i / (kCertificatePoints - 1);
                os << (i ? "," : "") << "[" << fmt17(s) << "," << fmt17(traj.eval(s).phi)
                   << "]";
            }
        } else {
            const auto& phi = ores->phi_fine;
            const int n = ores->n_fine;
            for (int i = 0; i < kCertificatePoints; ++i) {
                const double s = problem.half_length * i / (kCertificatePoints - 1);
                const double x = static_cast<double>(i) * n / (kCertificatePoints - 1);
                const int j = std::min(static_cast<int>(x), n - 1);
                const double frac = x - j;
                const double phi_s = phi[j] * (1 - frac) + phi[j + 1] * frac;
                os << (i ? "," : "") << "[" << fmt17(s) << "," << fmt17(phi_s) << "]";
            }
        }
        os << "],\"validation\":\"ok\"}\n";

        if (out_path.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream file(out_path);
            file << os.str();
        }
        return 0;
    });
}

// ------------------------------------------------------------------- sweep

struct GridAxis {
    std::string key;
    std::vector<double> values;
};

std::vector<double> parse_axis_values(const std::string& spec) {
    std::vector<double> values;
    if (spec.find(':') != std::string::npos) {
        // start:stop:count
        std::stringstream ss(spec);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
            !std::getline(ss, c, ':') || !ss.eof())
            throw DomainError("grid range '" + spec + "' is not start:stop:count");
        const double start = std::stod(a);
        const double stop = std::stod(b);
        const long count = std::stol(c);
        if (count < 1) throw DomainError("grid range count must be >= 1");
        for (long i = 0; i < count; ++i)
            values.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    } else {
        std::stringstream ss(spec);
        std::string part;
        while (std::getline(ss, part, ','))
            values.push_back(std::stod(part));
    }
    if (values.empty()) throw DomainError("empty grid axis");
    return values;
}

// canonical axis order; rows are emitted in this lexicographic nesting
const std::vector<std::string> kAxisOrder = {"m", "p", "kappa", "lambda", "length"};

std::map<std::string, std::vector<double>> parse_grid(const std::string& text) {
    std::map<std::string, std::vector<double>> axes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw DomainError("grid axis '" + item + "' is missing '='");
        std::string key = item.substr(0, eq);
        std::transform(key.begin(), key.end(), key.begin(), ::tolower);
        if (key == "n") key = "m";
        if (key == "d" || key == "diameter" || key == "r" || key == "inradius")
            key = "length";
        if (std::find(kAxisOrder.begin(), kAxisOrder.end(), key) == kAxisOrder.end())
            throw DomainError("unknown grid axis '" + item.substr(0, eq) + "'");
        axes[key] = parse_axis_values(item.substr(eq + 1));
    }
    if (!axes.count("m")) axes["m"] = {2};
    if (!axes.count("p")) axes["p"] = {2};
    if (!axes.count("kappa")) axes["kappa"] = {0};
    if (!axes.count("lambda")) axes["lambda"] = {0};
    if (!axes.count("length")) axes["length"] = {1};
    return axes;
}

struct SweepRow {
    Request req;
    std::string eigenvalue; // empty on failure
    std::string residual;
    std::string error;
};

void run_sweep_point(SweepRow& row) {
    try {
        const auto problem = build_problem(row.req);
        model::require_valid(problem);
        if (row.req.method == "oracle") {
            const auto est = oracle::estimate(problem, row.req.oracle_n);
            row.eigenvalue = fmt17(est.richardson);
            row.residual = fmt17(std::abs(est.fine - est.coarse));
        } else {
            const auto sol = shoot::solve(problem, row.req.rel_tol);
            row.eigenvalue = fmt17(sol.eigenvalue);
            row.residual = fmt17(sol.diagnostics.terminal_flux);
        }
    } catch (const std::exception& e) {
        std::string what = e.what();
        std::replace(what.begin(), what.end(), ',', ';');
        std::replace(what.begin(), what.end(), '\n', ' ');
        row.error = what;
    }
}

int sweep_thread_count(std::size_t points) {
    if (const char* env = std::getenv("EIGENBOUND_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<int>(std::min<long>(n, 64));
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return static_cast<int>(std::min<std::size_t>(std::max(1u, hc), points));
}

int cmd_sweep(const Request& base, const std::string& grid_text, const std::string& out_path) {
    std::map<std::string, std::vector<double>> axes;
    try {
        axes = parse_grid(grid_text);
    } catch (const std::exception& e) {
        std::cerr << "invalid grid: " << e.what() << "\n";
        return kExitValidation;
    }

    std::vector<SweepRow> rows;
    for (double m : axes["m"])
        for (double p : axes["p"])
            for (double kappa : axes["kappa"])
                for (double lambda : axes["lambda"])
                    for (double length : axes["length"]) {
                        SweepRow row;
                        row.req = base;
                        row.req.dim = static_cast<int>(m);
                        row.req.p = p;
                        row.req.kappa = kappa;
                        row.req.lambda = lambda;
                        row.req.length = length;
                        rows.push_back(std::move(row));
                    }

    const int nthreads = sweep_thread_count(rows.size());
    if (nthreads <= 1) {
        for (auto& row : rows) run_sweep_point(row);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < rows.size(); i = next++)
                    run_sweep_point(rows[i]);
            });
        for (auto& th : pool) th.join();
    }

    std::ostringstream os;
    os << "theorem,m,p,kappa,lambda,length,method,eigenvalue,residual,error\n";
    bool any_ok = false;
    for (const auto& row : rows) {
        os << row.req.theorem << "," << row.req.dim << "," << fmt17(row.req.p) << ","
           << fmt17(row.req.kappa) << ","
           << (row.req.theorem == "dirichlet" ? fmt17(row.req.lambda) : std::string()) << ","
           << fmt17(row.req.length) << "," << row.req.method << "," << row.eigenvalue << ","
           << row.residual << "," << row.error << "\n";
        if (row.error.empty()) any_ok = true;
    }

    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream file(out_path);
        file << os.str();
    }
    return any_ok ? 0 : kExitSolver;
}

// -------------------------------------------------------------------- flow

int cmd_flow(const Request& req, int nodes, double horizon, const std::string& out_path) {
    return run_with_solver_errors([&]() -> int {
        const auto problem = build_problem(req);
        model::require_valid(problem);
        const auto sol = shoot::solve(problem, req.rel_tol);
        const auto& traj = sol.certificate;
        const auto state =
            flow::make_state(problem, nodes, [&](double s) { return traj.eval(s).phi; });
        const double rate = flow::decay_rate(problem, state, horizon);
        const double expected = std::pow(sol.eigenvalue, 1.0 / (req.p - 1.0));

        std::ostringstream os;
        os << "{\"request\":";
        emit_request_json(os, req, problem);
        os << ",\"eigenvalue\":" << fmt17(sol.eigenvalue);
        os << ",\"expected_rate\":" << fmt17(expected);
        os << ",\"measured_rate\":" << fmt17(rate);
        os << ",\"relative_error\":" << fmt17(std::abs(rate - expected) / expected);
        os << ",\"nodes\":" << nodes << ",\"time\":" << fmt17(horizon) << "}\n";
        if (out_path.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream file(out_path);
            file << os.str();
        }
        return 0;
    });
}

// ------------------------------------------------------------------ verify

int cmd_verify(const std::string& criteria_list, const std::string& inject_fault,
               bool no_timing, const std::string& out_path) {
    verify::Options opts;
    opts.inject_fault = inject_fault;
    if (!criteria_list.empty()) {
        std::stringstream ss(criteria_list);
        std::string item;
        while (std::getline(ss, item, ','))
            opts.criteria.push_back(std::stoi(item));
    }
    const auto results = verify::run(opts);
    verify::print_report(std::cout, results, !no_timing);
    if (!out_path.empty()) {
        std::ofstream file(out_path);
        verify::print_report(file, results, !no_timing);
    }
    return verify::all_passed(results) ? 0 : 1;
}

} // namespace

namespace {

// required fields per theorem kind: diameter for neumann/classical,
// inradius and lambda for dirichlet
int check_theorem_flags(const CLI::App* cmd, const std::string& theorem) {
    const bool dirichlet = theorem == "dirichlet";
    if (dirichlet && cmd->count("--diameter")) {
        std::cerr << "invalid request: dirichlet bounds take --inradius, not --diameter\n";
        return kExitValidation;
    }
    if (!dirichlet && cmd->count("--inradius")) {
        std::cerr << "invalid request: " << theorem << " bounds take --diameter\n";
        return kExitValidation;
    }
    if (!dirichlet && cmd->count("--lambda")) {
        std::cerr << "invalid request: --lambda applies only to dirichlet bounds\n";
        return kExitValidation;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-eigenvalue lower bounds for weighted 1-D p-Laplacian model problems"};
    app.require_subcommand(1);

    Request req;
    std::string out_path;

    auto add_request_flags = [&](CLI::App* cmd, bool with_method) {
        cmd->add_option("--m,--n", req.dim, "quaternionic dimension m (or classical n)");
        cmd->add_option("--p", req.p, "exponent p > 1")->required();
        cmd->add_option("--kappa", req.kappa, "curvature scale");
        cmd->add_option("--lambda", req.lambda, "boundary convexity (dirichlet only)");
        cmd->add_option("--diameter", req.length, "diameter D (neumann/classical)");
        cmd->add_option("--inradius", req.length, "inradius R (dirichlet)");
        cmd->add_option("--rel-tol", req.rel_tol, "eigenvalue bisection tolerance");
        cmd->add_option("--profile", req.custom_profile,
                        "custom drift profile a1:k1,a2:k2,... (bypasses --m/--kappa)");
        if (with_method) {
            cmd->add_option("--method", req.method, "shoot | oracle | both")
                ->check(CLI::IsMember({"shoot", "oracle", "both"}));
            cmd->add_option("--oracle-n", req.oracle_n, "oracle mesh cells");
            cmd->add_option("--oracle-max-iters", req.oracle_max_iters,
                            "oracle iteration cap");
        }
        cmd->add_option("--out", out_path, "write the report to a file");
    };

    auto* bound = app.add_subcommand("bound", "compute one eigenvalue lower bound");
    bound->add_option("theorem", req.theorem, "neumann | dirichlet | classical")
        ->required()
        ->check(CLI::IsMember({"neumann", "dirichlet", "classical"}));
    add_request_flags(bound, true);

    std::string grid_text;
    auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid into CSV");
    sweep->add_option("--theorem", req.theorem, "neumann | dirichlet | classical")
        ->check(CLI::IsMember({"neumann", "dirichlet", "classical"}));
    sweep->add_option("--grid", grid_text,
                      "axes like m=2,3;p=1.5,2;kappa=0;D=1:2:3 (lists or start:stop:count)")
        ->required();
    sweep->add_option("--method", req.method, "shoot | oracle")
        ->check(CLI::IsMember({"shoot", "oracle"}));
    sweep->add_option("--rel-tol", req.rel_tol, "eigenvalue bisection tolerance");
    sweep->add_option("--oracle-n", req.oracle_n, "oracle mesh cells");
    sweep->add_option("--out", out_path, "CSV output path (default stdout)");

    int flow_nodes = 257;
    double flow_time = 6.0;
    auto* flowcmd = app.add_subcommand("flow", "model heat-flow decay check");
    flowcmd->add_option("theorem", req.theorem, "neumann | classical")
        ->check(CLI::IsMember({"neumann", "classical"}));
    add_request_flags(flowcmd, false);
    flowcmd->add_option("--nodes", flow_nodes, "flow mesh nodes");
    flowcmd->add_option("--time", flow_time, "flow horizon T");

    std::string criteria_list, inject_fault;
    bool no_timing = false;
    auto* verifycmd = app.add_subcommand("verify", "run the verification suite");
    verifycmd->add_option("--criteria", criteria_list, "comma list, e.g. 1,3,9 (default all)");
    verifycmd->add_option("--inject-fault", inject_fault,
                          "test hook: weight-sign corrupts the duality check");
    verifycmd->add_flag("--no-timing", no_timing, "omit timing fields from the report");
    verifycmd->add_option("--out", out_path, "also write the report to a file");

    req.theorem = "neumann"; // default for sweep/flow

    CLI11_PARSE(app, argc, argv);

    if (bound->parsed()) {
        if (const int rc = check_theorem_flags(bound, req.theorem)) return rc;
        return cmd_bound(req, out_path);
    }
    if (sweep->parsed()) return cmd_sweep(req, grid_text, out_path);
    if (flowcmd->parsed()) {
        if (const int rc = check_theorem_flags(flowcmd, req.theorem)) return rc;
        return cmd_flow(req, flow_nodes, flow_time, out_path);
    }
    if (verifycmd->parsed()) return cmd_verify(criteria_list, inject_fault, no_timing, out_path);
    return 0;
}
