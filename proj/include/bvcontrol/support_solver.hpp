#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bvcontrol/reduced_problem.hpp"

namespace bvc {

enum class Termination { T1, T2, MaxIter };

std::string to_string(Termination t);

struct DetectResult {
    std::vector<int> nodes;  // interior node indices, ascending
    bool degenerate = false;
};

/// Interior nodes where the adjoint changes sign between neighboring cells.
/// Cell values within 1e-12 * max|p| of zero are flagged degenerate and
/// inherit the sign of their left neighbor.
DetectResult detect_support(const P0Function& adjoint);

struct OuterIterate {
    int support_size = 0;
    std::vector<int> support;
    std::vector<double> support_coords;
    double objective = 0.0;
};

/// Stopping test for the support iteration, applied to the incoming support
/// before it is solved.  With t_k the incoming support and records 0..k-1
/// already solved:
///   T1: |t_k| = |t_{k-1}| and ||t_k - t_{k-1}||_2 <= eps,
///   T2: |t_k| = |t_{k-1}| = |t_{k-2}|, ||t_k - t_{k-2}||_2 <= eps, and the
///       objective on t_k (= f^{k-2}, same support) is below f^{k-1}.
/// T2 accepts the better half of a 2-cycle that T1 cannot close.
std::optional<Termination> check_termination(std::span<const OuterIterate> solved,
                                             std::span<const double> incoming_coords,
                                             double epsilon);

struct OuterConfig {
    double epsilon = 1e-10;  // support-change tolerance on node coordinates
    int max_outer = 50;
    double inner_tol = 1e-12;
    int inner_max_iters = 200000;
    std::function<void(int iteration, const OuterIterate&, const std::string& status)> trace;
};

struct OuterResult {
    ReducedSolution solution;
    JumpControl control;  // pruned jump representation of the solution
    std::vector<int> support_nodes;
    int outer_iterations = 0;
    Termination termination = Termination::MaxIter;
    bool assumption_ok = true;  // no adjoint cell value within 1e-12 of zero
    std::vector<OuterIterate> history;
};

/// Support iteration: starting from the empty jump set, alternate between
/// solving the reduced problem on the current support and re-reading the
/// support from the sign changes of the resulting adjoint, until T1 or T2
/// fires; after max_outer rounds the best iterate is returned as MaxIter.
OuterResult run_outer(SystemPtr system, std::vector<double> target_cell_averages, double alpha,
                      const OuterConfig& config = {});

}  // namespace bvc
