#include "bvcontrol/analytic_examples.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "bvcontrol/quadrature.hpp"

namespace bvc {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

StepSourceSolution::StepSourceSolution(const JumpControl& source) {
    const auto locs = source.locations();
    const auto heights = source.heights();
    breaks_.reserve(locs.size() + 2);
    breaks_.push_back(0.0);
    breaks_.insert(breaks_.end(), locs.begin(), locs.end());
    breaks_.push_back(1.0);

    source_.resize(breaks_.size() - 1);
    double v = source.base();
    for (std::size_t k = 0; k < source_.size(); ++k) {
        if (k > 0) v += heights[k - 1];
        source_[k] = v;
    }

    cum_.assign(breaks_.size(), 0.0);
    cum_x_.assign(breaks_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
        const double bl = breaks_[k], br = breaks_[k + 1];
        cum_[k + 1] = cum_[k] + source_[k] * (br - bl);
        cum_x_[k + 1] = cum_x_[k] + source_[k] * 0.5 * (br * br - bl * bl);
    }
    // y(x) = W(1) x - W(x) with W(x) = int_0^x (x - s) u(s) ds
    slope0_ = cum_[breaks_.size() - 1] - cum_x_[breaks_.size() - 1];
}

int StepSourceSolution::piece(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("StepSourceSolution: point outside [0,1]");
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    int k = static_cast<int>(it - breaks_.begin()) - 1;
    return std::min(k, static_cast<int>(source_.size()) - 1);
}

double StepSourceSolution::value(double x) const {
    const int k = piece(x);
    const double b = breaks_[k];
    const double integral = cum_[k] + source_[k] * (x - b);
    const double moment = cum_x_[k] + source_[k] * 0.5 * (x * x - b * b);
    const double w = x * integral - moment;
    return slope0_ * x - w;
}

double StepSourceSolution::derivative(double x) const {
    const int k = piece(x);
    const double integral = cum_[k] + source_[k] * (x - breaks_[k]);
    return slope0_ - integral;
}

ExampleSpec example1(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("example1: alpha must be positive");
    const double c = 12.0 - 4.0 * std::sqrt(8.0);
    const double xc = std::acos(c / 4.0) / (2.0 * kPi);

    JumpControl control(0.5, {xc, 0.5, 1.0 - xc}, {1.0, -2.0, 1.5});
    auto state = std::make_shared<const StepSourceSolution>(control);
    const double s = alpha / (2.0 * c);

    auto multiplier = [s, c](double x) {
        return s * ((1.0 - std::cos(4.0 * kPi * x)) - c * (1.0 - std::cos(2.0 * kPi * x)));
    };
    auto adjoint = [s, c](double x) {
        return s * (4.0 * kPi * std::sin(4.0 * kPi * x) - 2.0 * kPi * c * std::sin(2.0 * kPi * x));
    };
    // p'' enters the target: y_d = y + p''
    auto adjoint_dd = [s, c](double x) {
        const double p3 = kPi * kPi * kPi;
        return s * (-64.0 * p3 * std::sin(4.0 * kPi * x) + 8.0 * p3 * c * std::sin(2.0 * kPi * x));
    };
    auto target = [state, adjoint_dd](double x) { return state->value(x) + adjoint_dd(x); };

    ExampleSpec spec;
    spec.name = "example1";
    spec.coefficients = Coefficients::constant(1.0, 0.0);
    spec.alpha = alpha;
    spec.target = target;
    spec.exact = ExactSolution{control, [state](double x) { return state->value(x); },
                               std::move(adjoint), std::move(multiplier)};
    return spec;
}

ExampleSpec example2(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("example2: alpha must be positive");
    ExampleSpec spec;
    spec.name = "example2";
    spec.coefficients = Coefficients::constant(1.0, 0.0);
    spec.alpha = alpha;
    spec.target = [](double x) {
        return 0.5 / (kPi * kPi) * (1.0 - std::cos(2.0 * kPi * x));
    };
    return spec;
}

ExampleSpec example_by_name(const std::string& name, double alpha) {
    if (name == "example1") return example1(alpha);
    if (name == "example2") return example2(alpha);
    throw std::invalid_argument("unknown example: " + name);
}

ConsistencyReport verify_example1_consistency(const ExampleSpec& spec, int n) {
    if (n < 4) throw std::invalid_argument("verify_example1_consistency: need n >= 4");
    ConsistencyReport rep;
    auto fail = [&rep](std::string msg) {
        rep.ok = false;
        rep.failures.push_back(std::move(msg));
    };
    if (!spec.exact) {
        fail("no exact solution attached");
        return rep;
    }
    const auto& ex = *spec.exact;
    const double alpha = spec.alpha;

    const double c = 12.0 - 4.0 * std::sqrt(8.0);
    const double xc = std::acos(c / 4.0) / (2.0 * kPi);
    const double s = alpha / (2.0 * c);
    // second derivative of the adjoint, written out independently of the
    // target so an edited target cannot hide behind it
    auto pdd = [s, c](double x) {
        const double p3 = kPi * kPi * kPi;
        return s * (-64.0 * p3 * std::sin(4.0 * kPi * x) + 8.0 * p3 * c * std::sin(2.0 * kPi * x));
    };

    // boundary values
    if (std::abs(ex.state(0.0)) > 1e-14) fail("state not zero at x=0");
    if (std::abs(ex.state(1.0)) > 1e-14) fail("state not zero at x=1");
    if (std::abs(ex.multiplier(0.0)) > 1e-12 * alpha) fail("multiplier not zero at x=0");
    if (std::abs(ex.multiplier(1.0)) > 1e-12 * alpha) fail("multiplier not zero at x=1");

    // multiplier touches +-alpha exactly at the jump points
    const struct {
        double x, value;
        const char* what;
    } touches[] = {{xc, alpha, "Phi(xc) != alpha"},
                   {0.5, -alpha, "Phi(1/2) != -alpha"},
                   {1.0 - xc, alpha, "Phi(1-xc) != alpha"}};
    for (const auto& t : touches)
        if (std::abs(ex.multiplier(t.x) - t.value) > 1e-12 * alpha) fail(t.what);

    // adjoint identity -p'' = y - y_d and the multiplier bound on the sample
    double worst_id = 0.0, phimax = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) / n;
        const double lhs = -pdd(x);
        const double rhs = ex.state(x) - spec.target(x);
        const double scale = std::max({std::abs(lhs), std::abs(rhs), alpha});
        worst_id = std::max(worst_id, std::abs(lhs - rhs) / scale);
        phimax = std::max(phimax, std::abs(ex.multiplier(x)));
    }
    if (worst_id > 1e-10) fail("adjoint identity -p'' = y - y_d violated");
    if (phimax > alpha * (1.0 + 1e-12)) fail("|Phi| exceeds alpha");

    // tie the p'' formula above to the coded adjoint by finite differences
    for (double x : {0.1, 0.3, 0.37, 0.62, 0.9}) {
        const double d = 1e-3;
        const double fd = (-ex.adjoint(x + 2 * d) + 16.0 * ex.adjoint(x + d) -
                           30.0 * ex.adjoint(x) + 16.0 * ex.adjoint(x - d) -
                           ex.adjoint(x - 2 * d)) /
                          (12.0 * d * d);
        if (std::abs(fd - pdd(x)) > 1e-6 * std::abs(pdd(x)))
            fail("p'' inconsistent with finite differences of p");
    }

    // mixed-FEM cross-check of the closed-form state
    const int cells = std::clamp(n, 4, 4096);
    auto mesh = uniform_mesh(cells);
    auto sys = assemble_system(mesh, spec.coefficients);
    const auto u_cells = cell_integrals(ex.control, *mesh);
    const auto fem = sys->solve_state(u_cells);
    double err2 = 0.0;
    for (int i = 0; i < cells; ++i) {
        const auto [xl, xr] = mesh->cell(i);
        const double avg = gauss5_average(ex.state, xl, xr);
        const double d = fem.state.value(i) - avg;
        err2 += (xr - xl) * d * d;
    }
    if (std::sqrt(err2) > 0.5 * mesh->h_max()) fail("closed-form state disagrees with mixed FEM");

    return rep;
}

}  // namespace bvc
