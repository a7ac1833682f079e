#pragma once

#include <span>
#include <vector>

#include "bvcontrol/bv_control.hpp"
#include "bvcontrol/mixed_fem.hpp"

namespace bvc {

/// The finite-dimensional problem obtained by fixing the candidate jump set:
/// minimize over (a, c)
///
///     1/2 || y(a,c) - y_d ||^2_{L2}  +  alpha * sum_i |c_i|,
///
/// where y(a,c) solves the mixed system for the piecewise-constant control
/// with base value a and jump heights c at the given interior nodes.
struct ReducedProblem {
    ReducedProblem(SystemPtr system, std::vector<double> target_cell_averages, double alpha,
                   std::vector<int> support);

    SystemPtr system;
    std::vector<double> target_cell_averages;  // cell averages of y_d
    double alpha;
    std::vector<int> support;  // interior node indices, strictly increasing

    const Mesh& mesh() const { return *system->mesh(); }
    int support_size() const { return static_cast<int>(support.size()); }
};

struct ReducedSolution {
    double base = 0.0;
    std::vector<double> heights;  // aligned with the problem's support
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
    double kkt_residual = 0.0;
    P0Function state;       // y at the final point
    P0Function adjoint;     // p at the final point
    P1Function multiplier;  // Phi = antiderivative of p
};

/// Cell integrals of the control determined by (base, heights) on the
/// problem's support: u_j = (base + sum_{i : t_i <= x_j^-} c_i) h_j.
std::vector<double> control_to_cells(const ReducedProblem& prob, double base,
                                     std::span<const double> heights);

/// Full objective at (base, heights).
double objective(const ReducedProblem& prob, double base, std::span<const double> heights);

struct ControlGradient {
    double base = 0.0;
    std::vector<double> heights;
};

/// Gradient of the smooth part via one state and one adjoint solve:
/// d/da = Phi(1), d/dc_i = Phi(1) - Phi(t_i).
ControlGradient smooth_gradient(const ReducedProblem& prob, double base,
                                std::span<const double> heights);

double soft_threshold(double v, double lambda);

struct ProxOptions {
    double tol = 1e-12;
    int max_iters = 200000;
};

/// Accelerated proximal gradient with adaptive restart.  The smooth part is
/// quadratic in (a, c); its reduced Hessian is precomputed from one state
/// solve per coefficient, the step is 1/L with L estimated by power
/// iteration, and c is soft-thresholded by alpha/L each step.  Stops when
/// the prox-gradient residual falls below tol * (1 + |objective|); on
/// max_iters returns the best iterate with converged = false.
ReducedSolution prox_solve(const ReducedProblem& prob, double init_base,
                           std::span<const double> init_heights, const ProxOptions& opts = {});

/// Max violation of the first-order conditions at a solution:
/// |Phi(1)|, the clamp of max_node |Phi| - alpha, and |Phi(t_i) - alpha
/// sign(c_i)| over jumps with |c_i| > 1e-10.
double optimality_check(const ReducedProblem& prob, const ReducedSolution& sol);

/// The solution's control as a JumpControl; heights below prune_tol in
/// magnitude are dropped.
JumpControl to_jump_control(const ReducedProblem& prob, const ReducedSolution& sol,
                            double prune_tol = 1e-10);

}  // namespace bvc
