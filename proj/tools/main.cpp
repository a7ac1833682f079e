#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bvcontrol/analytic_examples.hpp"
#include "bvcontrol/selfcheck.hpp"
#include "bvcontrol/study_harness.hpp"
#include "bvcontrol/support_solver.hpp"

namespace {

bool is_pow2(int n) { return n >= 2 && (n & (n - 1)) == 0; }

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

bvc::OuterConfig make_outer(double epsilon, bool verbose) {
    bvc::OuterConfig cfg;
    cfg.epsilon = epsilon;
    if (verbose) {
        cfg.trace = [](int k, const bvc::OuterIterate& it, const std::string& status) {
            std::fprintf(stderr, "[outer %d] support size %d, objective %.12e, %s\n", k,
                         it.support_size, it.objective, status.c_str());
        };
    }
    return cfg;
}

int run_solve(const std::string& example, int n, double alpha, double epsilon,
              const std::string& output, bool verbose) {
    auto spec = bvc::example_by_name(example, alpha);
    auto mesh = bvc::uniform_mesh(n);
    auto yd = bvc::project_cell_averages(spec.target, mesh);
    auto result = bvc::run_outer(bvc::assemble_system(mesh, spec.coefficients),
                                 std::vector<double>(yd.values().begin(), yd.values().end()),
                                 alpha, make_outer(epsilon, verbose));

    nlohmann::ordered_json j;
    j["example"] = example;
    j["n"] = n;
    j["alpha"] = alpha;
    j["epsilon"] = epsilon;
    j["termination"] = bvc::to_string(result.termination);
    j["outer_iterations"] = result.outer_iterations;
    j["inner_iterations"] = result.solution.iterations;
    j["converged"] = result.solution.converged;
    j["objective"] = result.solution.objective;
    j["kkt_residual"] = result.solution.kkt_residual;
    j["assumption_ok"] = result.assumption_ok;
    j["support_nodes"] = result.support_nodes;
    j["control"] = result.control.to_json();
    j["state"] = std::vector<double>(result.solution.state.values().begin(),
                                     result.solution.state.values().end());
    j["adjoint"] = std::vector<double>(result.solution.adjoint.values().begin(),
                                       result.solution.adjoint.values().end());
    j["multiplier"] = std::vector<double>(result.solution.multiplier.values().begin(),
                                          result.solution.multiplier.values().end());
    write_output(output, j.dump(2) + "\n");

    const bool ok = result.termination != bvc::Termination::MaxIter && result.solution.converged;
    return ok ? 0 : 1;
}

int run_study_cmd(const std::string& example, int level_lo, int level_hi, double alpha,
                  double epsilon, int jobs, int reference_n, const std::string& format,
                  const std::string& output, bool verbose) {
    auto spec = bvc::example_by_name(example, alpha);
    bvc::StudyOptions opts;
    opts.outer = make_outer(epsilon, verbose);
    opts.jobs = jobs;
    opts.reference_cells = reference_n;
    auto report = bvc::run_study(spec, level_lo, level_hi, opts);

    write_output(output, format == "json" ? bvc::to_json(report).dump(2) + "\n"
                                          : bvc::to_csv(report));
    for (bool c : report.converged)
        if (!c) return 1;
    return 0;
}

int run_check(unsigned seed) {
    auto results = bvc::run_all_checks(seed);
    bool all = true;
    for (const auto& r : results) {
        std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all = all && r.passed;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed finite element solver for BV-regularized optimal control on (0,1)"};
    app.require_subcommand(1);

    const auto example_check = CLI::IsMember({"example1", "example2"});
    const auto pow2_check = CLI::Validator(
        [](std::string& s) {
            int v = 0;
            try {
                v = std::stoi(s);
            } catch (...) {
                return std::string("not an integer");
            }
            return is_pow2(v) ? std::string() : std::string("must be a power of two, at least 2");
        },
        "POW2");

    std::string example = "example1", output, format = "csv", levels = "2:8";
    int n = 256, jobs = 1, reference_n = 1024;
    double alpha = 1e-5, epsilon = 1e-10;
    unsigned seed = 1234;
    bool verbose = false;

    auto* solve = app.add_subcommand("solve", "Solve one problem instance and print JSON");
    solve->add_option("--example", example, "Built-in example name")->check(example_check);
    solve->add_option("--n", n, "Number of mesh cells")->check(pow2_check);
    solve->add_option("--alpha", alpha, "Regularization weight")->check(CLI::PositiveNumber);
    solve->add_option("--epsilon", epsilon, "Support-change stopping tolerance")
        ->check(CLI::PositiveNumber);
    solve->add_option("--output", output, "Output file (default stdout)");
    solve->add_flag("--verbose", verbose, "Trace outer iterations on stderr");

    auto* study = app.add_subcommand("study", "Run a mesh refinement study");
    study->add_option("--example", example, "Built-in example name")->check(example_check);
    study->add_option("--levels", levels, "Refinement range LO:HI as exponents of 2");
    study->add_option("--alpha", alpha, "Regularization weight")->check(CLI::PositiveNumber);
    study->add_option("--epsilon", epsilon, "Support-change stopping tolerance")
        ->check(CLI::PositiveNumber);
    study->add_option("--jobs", jobs, "Levels solved concurrently")->check(CLI::PositiveNumber);
    study->add_option("--reference-n", reference_n,
                      "Reference mesh cells when no exact solution exists")
        ->check(pow2_check);
    study->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    study->add_option("--output", output, "Output file (default stdout)");
    study->add_flag("--verbose", verbose, "Trace outer iterations on stderr");

    auto* check = app.add_subcommand("check", "Run built-in consistency checks");
    check->add_option("--seed", seed, "Seed for the randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (solve->parsed()) return run_solve(example, n, alpha, epsilon, output, verbose);
        if (study->parsed()) {
            const auto colon = levels.find(':');
            int lo = 0, hi = 0;
            try {
                if (colon == std::string::npos) throw std::invalid_argument("");
                lo = std::stoi(levels.substr(0, colon));
                hi = std::stoi(levels.substr(colon + 1));
            } catch (...) {
                std::cerr << "--levels expects LO:HI with integer exponents\n";
                return 2;
            }
            return run_study_cmd(example, lo, hi, alpha, epsilon, jobs, reference_n, format,
                                 output, verbose);
        }
        if (check->parsed()) return run_check(seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
