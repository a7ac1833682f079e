#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvcontrol/analytic_examples.hpp"
#include "bvcontrol/support_solver.hpp"

namespace bvc {

/// One refinement level: mesh width and the five error measures
/// (control L1, control L2, state L2, adjoint Linf, multiplier Linf).
struct StudyRecord {
    int cells = 0;
    double h = 0.0;
    std::array<double, 5> errors{};
};

struct EocRow {
    double h_coarse = 0.0;
    double h_fine = 0.0;
    std::array<double, 5> values{};  // NaN marks an undefined entry
};

struct StudyReport {
    std::string example;
    double alpha = 0.0;
    std::vector<StudyRecord> records;
    std::vector<bool> converged;          // per level
    std::vector<EocRow> eoc;              // records.size() - 1 rows
    std::array<double, 5> mean_eoc{};     // over defined entries
    std::array<double, 5> bestfit{};      // log-log least-squares slopes
};

/// Observed order between two levels; NaN when either error is not positive.
double eoc(double err_coarse, double err_fine, double h_coarse, double h_fine);

/// Least-squares slope of log(err) against log(h); needs two positive points.
double bestfit_slope(std::span<const double> hs, std::span<const double> errs);

/// Errors of a computed solution against the example's exact solution.
StudyRecord errors_vs_exact(const ExampleSpec& spec, const OuterResult& result);

/// Errors against a solution on a finer nested mesh standing in for the
/// exact one; piecewise-constant comparisons are exact on the fine cells.
StudyRecord errors_vs_reference(const OuterResult& reference, const OuterResult& result);

struct StudyOptions {
    OuterConfig outer;
    int jobs = 1;
    int reference_cells = 1024;  // only used when the example has no exact solution
};

/// Run the support solver on meshes with 2^level cells for level_lo..level_hi
/// and tabulate errors, per-pair EOCs, their mean, and fitted slopes.
/// Levels must lie in 2..12; without an exact solution they are capped so the
/// reference stays at least four times finer.
StudyReport run_study(const ExampleSpec& spec, int level_lo, int level_hi,
                      const StudyOptions& opts = {});

std::string to_csv(const StudyReport& report);
nlohmann::ordered_json to_json(const StudyReport& report);

}  // namespace bvc
