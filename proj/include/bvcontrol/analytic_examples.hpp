#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bvcontrol/bv_control.hpp"
#include "bvcontrol/mixed_fem.hpp"

namespace bvc {

/// Exact solution of -y'' = u, y(0) = y(1) = 0 for a piecewise-constant
/// source: a C^1 piecewise quadratic evaluated in closed form.
class StepSourceSolution {
public:
    explicit StepSourceSolution(const JumpControl& source);

    double value(double x) const;
    double derivative(double x) const;

private:
    int piece(double x) const;

    std::vector<double> breaks_;  // 0, jump locations, 1
    std::vector<double> source_;  // source value per piece
    std::vector<double> cum_;     // int_0^{b_k} u
    std::vector<double> cum_x_;   // int_0^{b_k} s u(s) ds
    double slope0_ = 0.0;         // y'(0)
};

struct ExactSolution {
    JumpControl control;                       // u-bar
    std::function<double(double)> state;       // y-bar
    std::function<double(double)> adjoint;     // p-bar
    std::function<double(double)> multiplier;  // Phi-bar
};

struct ExampleSpec {
    std::string name;
    Coefficients coefficients;
    double alpha = 0.0;
    std::function<double(double)> target;  // y_d
    std::optional<ExactSolution> exact;
};

/// Constructed test problem with known optimal control
///   u = 1/2 + 1_(xc,1) - 2 * 1_(1/2,1) + 3/2 * 1_(1-xc,1),
/// xc = arccos(c/4)/(2 pi), c = 12 - 4 sqrt(8).  The target y_d = y + p''
/// makes (u, y) optimal with multiplier Phi touching +-alpha exactly at the
/// three jump points.  All exact fields scale linearly with alpha.
ExampleSpec example1(double alpha = 1e-5);

/// Smooth target 1/(2 pi^2) (1 - cos(2 pi x)) without a known solution;
/// studies compare against a fine-grid reference.
ExampleSpec example2(double alpha = 1e-5);

ExampleSpec example_by_name(const std::string& name, double alpha = 1e-5);

struct ConsistencyReport {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Self-checks of the example-1 data on a uniform sample of size n: boundary
/// values, the adjoint identity -p'' = y - y_d, |Phi| <= alpha with equality
/// exactly at the jump points, and a mixed-FEM cross-check of the state.
ConsistencyReport verify_example1_consistency(const ExampleSpec& spec, int n);

}  // namespace bvc
