#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

// Drives the built binary end to end: exit codes, JSON schema, CSV layout,
// determinism, and the verify fault-injection hook.

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string out_path = "cli_stdout.tmp";
    const std::string err_path = "cli_stderr.tmp";
    const std::string cmd = env_prefix + "\"" + EIGENBOUND_CLI_PATH + "\" " + args + " > " +
                            out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WEXITSTATUS(status);
    res.out = slurp(out_path);
    res.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return res;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double pi_p(double p) {
    return 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
}

} // namespace

TEST_CASE("bound neumann flat case") {
    const auto res = run_cli("bound neumann --m 2 --p 2 --kappa 0 --diameter 3.14159265");
    REQUIRE(res.exit_code == 0);
    const json report = json::parse(res.out);
    CHECK(std::abs(report["eigenvalue"]["shoot"].get<double>() - 1.0) < 1e-6);
    CHECK(std::abs(report["closed_form"].get<double>() - 1.0) < 1e-6);
    CHECK(report["request"]["theorem"] == "neumann");
    CHECK(report["request"]["m"] == 2);
    CHECK(report["method"] == "shoot");
    CHECK(report["validation"] == "ok");
    CHECK(report["certificate"].size() == 129);
    CHECK(report.contains("residual"));
    CHECK(report.contains("iterations"));
    // certificate starts at the origin and is strictly increasing in s
    CHECK(report["certificate"][0][0].get<double>() == 0.0);
    CHECK(report["certificate"][0][1].get<double>() == 0.0);
}

TEST_CASE("bound schema is exactly the documented key set") {
    const auto res = run_cli("bound neumann --m 2 --p 1.5 --kappa 0 --diameter 1");
    REQUIRE(res.exit_code == 0);
    const json report = json::parse(res.out);
    const std::vector<std::string> expected = {"request",    "eigenvalue", "closed_form",
                                               "method",     "residual",   "iterations",
                                               "certificate", "validation"};
    CHECK(report.size() == expected.size());
    for (const auto& key : expected) CHECK(report.contains(key));
    // closed form evaluates (p-1) (pi_p / D)^p
    const double expect = 0.5 * std::pow(pi_p(1.5), 1.5);
    CHECK(std::abs(report["eigenvalue"]["shoot"].get<double>() - expect) / expect < 1e-6);
}

TEST_CASE("bound dirichlet with both methods reports a disagreement") {
    const auto res = run_cli(
        "bound dirichlet --m 2 --p 2 --kappa 0 --lambda 0 --inradius 1 --method both "
        "--oracle-n 1024");
    REQUIRE(res.exit_code == 0);
    const json report = json::parse(res.out);
    const double quarter = std::numbers::pi * std::numbers::pi / 4.0;
    CHECK(std::abs(report["eigenvalue"]["shoot"].get<double>() - quarter) < 1e-6);
    CHECK(std::abs(report["eigenvalue"]["oracle"].get<double>() - quarter) < 1e-4);
    CHECK(report.contains("disagreement"));
    CHECK(report["disagreement"].get<double>() < 1e-4);
}

TEST_CASE("custom profiles bypass the named constructors") {
    // a single (1, 0) term is the flat string: mu = (pi/D)^2
    const auto res = run_cli("bound neumann --profile 1:0 --p 2 --diameter 2");
    REQUIRE(res.exit_code == 0);
    const json report = json::parse(res.out);
    const double expect = std::numbers::pi * std::numbers::pi / 4.0;
    CHECK(std::abs(report["eigenvalue"]["shoot"].get<double>() - expect) / expect < 1e-6);
}

TEST_CASE("singular domains exit with the validation code") {
    const auto res =
        run_cli("bound neumann --m 2 --p 2 --kappa 1 --diameter 3.141592653589793");
    CHECK(res.exit_code == 2);
    CHECK(res.err.find("vanishes") != std::string::npos);
    const auto res2 =
        run_cli("bound dirichlet --m 2 --p 2 --kappa 0 --lambda 1 --inradius 2");
    CHECK(res2.exit_code == 2);
}

TEST_CASE("mismatched theorem flags are rejected") {
    CHECK(run_cli("bound neumann --m 2 --p 2 --kappa 0 --diameter 1 --lambda 0.5").exit_code ==
          2);
    CHECK(run_cli("bound neumann --m 2 --p 2 --kappa 0 --inradius 1").exit_code == 2);
    CHECK(run_cli("bound dirichlet --m 2 --p 2 --kappa 0 --lambda 0 --diameter 1").exit_code ==
          2);
}

TEST_CASE("solver failures exit with the solver code") {
    const auto res = run_cli(
        "bound dirichlet --m 2 --p 3 --kappa 0 --lambda 0 --inradius 1 --method oracle "
        "--oracle-n 512 --oracle-max-iters 2");
    CHECK(res.exit_code == 3);
}

TEST_CASE("identical requests produce identical bytes") {
    const std::string args = "bound dirichlet --m 3 --p 1.5 --kappa -1 --lambda 0.5 --inradius 1";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("sweep produces the full grid in canonical order") {
    const auto res =
        run_cli("sweep --theorem neumann --grid \"m=2,3;p=1.5,2;kappa=0;D=1:2:3\"");
    REQUIRE(res.exit_code == 0);
    const auto lines = split_lines(res.out);
    REQUIRE(lines.size() == 13); // header + 2*2*1*3
    CHECK(lines[0] == "theorem,m,p,kappa,lambda,length,method,eigenvalue,residual,error");

    // canonical nesting: m outermost, then p, kappa, lambda, length
    const auto first = split_csv(lines[1]);
    REQUIRE(first.size() == 10);
    CHECK(first[0] == "neumann");
    CHECK(first[1] == "2");
    CHECK(std::stod(first[2]) == 1.5);
    CHECK(std::stod(first[5]) == 1.0);
    const auto second = split_csv(lines[2]);
    CHECK(std::stod(second[5]) == 1.5);

    // flat rows match the closed form and decrease in D
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv(lines[i]);
        const double p = std::stod(fields[2]);
        const double D = std::stod(fields[5]);
        const double mu = std::stod(fields[7]);
        const double expect = (p - 1.0) * std::pow(pi_p(p) / D, p);
        CHECK(std::abs(mu - expect) / expect <= 1e-6);
        CHECK(fields[9].empty());
    }
    for (std::size_t i = 1; i + 1 < lines.size(); i += 3) {
        const double mu1 = std::stod(split_csv(lines[i])[7]);
        const double mu2 = std::stod(split_csv(lines[i + 1])[7]);
        const double mu3 = std::stod(split_csv(lines[i + 2])[7]);
        CHECK(mu1 > mu2);
        CHECK(mu2 > mu3);
    }
}

TEST_CASE("sweep records partial failures in the error column") {
    // kappa=1 with D=pi is singular; D=1 is fine
    const auto res = run_cli("sweep --theorem neumann --grid "
                             "\"m=2;p=2;kappa=1;D=1,3.141592653589793\"");
    REQUIRE(res.exit_code == 0); // not all rows failed
    const auto lines = split_lines(res.out);
    REQUIRE(lines.size() == 3);
    CHECK(split_csv(lines[1])[9].empty());
    CHECK(!split_csv(lines[2])[9].empty());
    CHECK(split_csv(lines[2])[7].empty());
}

TEST_CASE("sweep with the oracle method emits its values") {
    const auto res = run_cli("sweep --theorem dirichlet --method oracle --oracle-n 1024 "
                             "--grid \"m=2;p=3;kappa=0;lambda=0;R=1\"");
    REQUIRE(res.exit_code == 0);
    const auto lines = split_lines(res.out);
    REQUIRE(lines.size() == 2);
    const auto fields = split_csv(lines[1]);
    CHECK(fields[6] == "oracle");
    const double expect = 2.0 * std::pow(pi_p(3.0) / 2.0, 3.0);
    CHECK(std::abs(std::stod(fields[7]) - expect) / expect < 1e-4);
}

TEST_CASE("sweep is deterministic under the thread cap") {
    const std::string args =
        "sweep --theorem dirichlet --grid \"m=2;p=2;kappa=-1;lambda=0.3;R=0.5:1:3\"";
    const auto serial = run_cli(args, "EIGENBOUND_THREADS=1 ");
    const auto parallel = run_cli(args, "EIGENBOUND_THREADS=4 ");
    REQUIRE(serial.exit_code == 0);
    CHECK(serial.out == parallel.out);
}

TEST_CASE("flow subcommand measures the decay rate") {
    const auto res = run_cli(
        "flow neumann --m 2 --p 2 --kappa 0 --diameter 3.141592653589793 --nodes 129 "
        "--time 5");
    REQUIRE(res.exit_code == 0);
    const json report = json::parse(res.out);
    CHECK(std::abs(report["measured_rate"].get<double>() -
                   report["expected_rate"].get<double>()) /
              report["expected_rate"].get<double>() <
          0.01);
}

TEST_CASE("verify subset passes and reports per criterion") {
    const auto res = run_cli("verify --criteria 9 --no-timing");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("PASS 9 validation-behavior") != std::string::npos);
    CHECK(res.out.find("RESULT PASS 1/1") != std::string::npos);
}

TEST_CASE("verify reports are byte-identical apart from timing") {
    const auto a = run_cli("verify --criteria 9 --no-timing");
    const auto b = run_cli("verify --criteria 9 --no-timing");
    CHECK(a.out == b.out);
    CHECK(a.exit_code == b.exit_code);
}

TEST_CASE("an injected weight-sign bug trips the duality criterion") {
    const auto res = run_cli("verify --criteria 8 --inject-fault weight-sign --no-timing");
    CHECK(res.exit_code == 1);
    CHECK(res.out.find("FAIL 8") != std::string::npos);
}
