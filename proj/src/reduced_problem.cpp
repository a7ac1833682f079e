#include "bvcontrol/reduced_problem.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace bvc {

namespace {

double l1_tail(std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) s += std::abs(v[i]);
    return s;
}

// Smooth part of the reduced objective as an explicit quadratic
// g(v) = 1/2 v^T H v - b^T v + c0 over v = (a, c_1..c_m).  Built from one
// state solve per coefficient; keeps every optimizer step O(m^2).
struct Quadratic {
    std::vector<std::vector<double>> H;
    std::vector<double> b;
    double c0 = 0.0;

    int dim() const { return static_cast<int>(b.size()); }

    std::vector<double> grad(std::span<const double> v) const {
        std::vector<double> g(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            double s = -b[i];
            for (std::size_t j = 0; j < b.size(); ++j) s += H[i][j] * v[j];
            g[i] = s;
        }
        return g;
    }

    double value(std::span<const double> v) const {
        double s = c0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            double hv = 0.0;
            for (std::size_t j = 0; j < b.size(); ++j) hv += H[i][j] * v[j];
            s += 0.5 * v[i] * hv - b[i] * v[i];
        }
        return s;
    }
};

Quadratic build_quadratic(const ReducedProblem& prob) {
    const int m = prob.support_size();
    const int dim = m + 1;
    const int n = prob.mesh().cell_count();
    const auto& h = prob.mesh().cell_sizes();
    const auto& yd = prob.target_cell_averages;

    std::vector<std::vector<double>> responses(dim);
    std::vector<double> unit(m, 0.0);
    for (int i = 0; i < dim; ++i) {
        double base = (i == 0) ? 1.0 : 0.0;
        if (i > 0) unit[i - 1] = 1.0;
        auto u = control_to_cells(prob, base, unit);
        auto sol = prob.system->solve_state(u);
        responses[i].assign(sol.state.values().begin(), sol.state.values().end());
        if (i > 0) unit[i - 1] = 0.0;
    }

    Quadratic q;
    q.H.assign(dim, std::vector<double>(dim, 0.0));
    q.b.assign(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += h[k] * responses[i][k] * responses[j][k];
            q.H[i][j] = q.H[j][i] = s;
        }
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += h[k] * responses[i][k] * yd[k];
        q.b[i] = s;
    }
    for (int k = 0; k < n; ++k) q.c0 += 0.5 * h[k] * yd[k] * yd[k];
    return q;
}

// Largest eigenvalue of H by 50 power iterations from a fixed start vector.
double lipschitz_estimate(const Quadratic& q) {
    const int dim = q.dim();
    std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    std::vector<double> w(dim);
    double rayleigh = 0.0;
    for (int it = 0; it < 50; ++it) {
        for (int i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j) s += q.H[i][j] * v[j];
            w[i] = s;
        }
        double nw = 0.0, vw = 0.0;
        for (int i = 0; i < dim; ++i) {
            nw += w[i] * w[i];
            vw += v[i] * w[i];
        }
        rayleigh = vw;
        nw = std::sqrt(nw);
        if (!(nw > 0.0)) break;
        for (int i = 0; i < dim; ++i) v[i] = w[i] / nw;
    }
    return rayleigh;
}

std::vector<double> prox_point(std::span<const double> v, std::span<const double> g, double step_l,
                               double alpha) {
    std::vector<double> x(v.size());
    x[0] = v[0] - g[0] / step_l;
    for (std::size_t i = 1; i < v.size(); ++i)
        x[i] = soft_threshold(v[i] - g[i] / step_l, alpha / step_l);
    return x;
}

}  // namespace

ReducedProblem::ReducedProblem(SystemPtr system_, std::vector<double> target, double alpha_,
                               std::vector<int> support_)
    : system(std::move(system_)),
      target_cell_averages(std::move(target)),
      alpha(alpha_),
      support(std::move(support_)) {
    if (!system) throw std::invalid_argument("ReducedProblem: null system");
    const int n = system->mesh()->cell_count();
    if (static_cast<int>(target_cell_averages.size()) != n)
        throw std::invalid_argument("ReducedProblem: target needs one cell average per cell");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("ReducedProblem: alpha must be positive");
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 1 || support[i] > n - 1)
            throw std::invalid_argument("ReducedProblem: support nodes must be interior");
        if (i > 0 && support[i] <= support[i - 1])
            throw std::invalid_argument("ReducedProblem: support must be strictly increasing");
    }
}

std::vector<double> control_to_cells(const ReducedProblem& prob, double base,
                                     std::span<const double> heights) {
    if (heights.size() != prob.support.size())
        throw std::invalid_argument("control_to_cells: one height per support node required");
    const auto& h = prob.mesh().cell_sizes();
    const int n = prob.mesh().cell_count();
    std::vector<double> u(n);
    double v = base;
    std::size_t k = 0;
    for (int j = 0; j < n; ++j) {
        while (k < heights.size() && prob.support[k] <= j) v += heights[k++];
        u[j] = v * h[j];
    }
    return u;
}

double objective(const ReducedProblem& prob, double base, std::span<const double> heights) {
    const auto u = control_to_cells(prob, base, heights);
    const auto sol = prob.system->solve_state(u);
    const auto& h = prob.mesh().cell_sizes();
    const auto y = sol.state.values();
    double track = 0.0;
    for (int j = 0; j < prob.mesh().cell_count(); ++j) {
        const double r = y[j] - prob.target_cell_averages[j];
        track += h[j] * r * r;
    }
    double pen = 0.0;
    for (double c : heights) pen += std::abs(c);
    return 0.5 * track + prob.alpha * pen;
}

ControlGradient smooth_gradient(const ReducedProblem& prob, double base,
                                std::span<const double> heights) {
    const auto u = control_to_cells(prob, base, heights);
    const auto st = prob.system->solve_state(u);
    const auto& h = prob.mesh().cell_sizes();
    const int n = prob.mesh().cell_count();
    std::vector<double> r(n);
    for (int j = 0; j < n; ++j)
        r[j] = h[j] * (st.state.value(j) - prob.target_cell_averages[j]);
    const auto ad = prob.system->solve_adjoint(r);
    const auto phi = antiderivative(ad.state);
    const double phi_end = phi.value(n);
    ControlGradient g;
    g.base = phi_end;
    g.heights.resize(prob.support.size());
    for (std::size_t i = 0; i < prob.support.size(); ++i)
        g.heights[i] = phi_end - phi.value(prob.support[i]);
    return g;
}

double soft_threshold(double v, double lambda) {
    if (v > lambda) return v - lambda;
    if (v < -lambda) return v + lambda;
    return 0.0;
}

ReducedSolution prox_solve(const ReducedProblem& prob, double init_base,
                           std::span<const double> init_heights, const ProxOptions& opts) {
    const int m = prob.support_size();
    if (static_cast<int>(init_heights.size()) != m)
        throw std::invalid_argument("prox_solve: initial heights must match the support");
    if (!(opts.tol > 0.0) || opts.max_iters < 1)
        throw std::invalid_argument("prox_solve: bad options");
    const int dim = m + 1;

    const Quadratic quad = build_quadratic(prob);
    double lip = 1.1 * lipschitz_estimate(quad);
    if (!(lip > 0.0)) throw std::runtime_error("prox_solve: Lipschitz estimate failed");

    std::vector<double> x(dim, 0.0);
    x[0] = init_base;
    for (int i = 0; i < m; ++i) x[i + 1] = init_heights[i];

    const auto full = [&](std::span<const double> v) {
        return quad.value(v) + prob.alpha * l1_tail(v);
    };
    const auto residual_at = [&](std::span<const double> v, double step_l) {
        const auto g = quad.grad(v);
        const auto t = prox_point(v, g, step_l, prob.alpha);
        double r = 0.0;
        for (int i = 0; i < dim; ++i) r = std::max(r, std::abs(v[i] - t[i]));
        return step_l * r;
    };

    double fx = full(x);
    std::vector<double> x_old = x, yv = x;
    std::vector<double> best_x = x;
    double best_f = fx;
    double theta = 1.0;
    int it = 0;
    bool converged = residual_at(x, lip) <= opts.tol * (1.0 + std::abs(fx));

    while (!converged && it < opts.max_iters) {
        ++it;
        const auto gy = quad.grad(yv);
        const double gval_y = quad.value(yv);
        auto x_new = prox_point(yv, gy, lip, prob.alpha);
        for (int bt = 0; bt < 60; ++bt) {
            double lin = gval_y, dist2 = 0.0;
            for (int i = 0; i < dim; ++i) {
                const double d = x_new[i] - yv[i];
                lin += gy[i] * d;
                dist2 += d * d;
            }
            if (quad.value(x_new) <= lin + 0.5 * lip * dist2 + 1e-15 * (1.0 + std::abs(gval_y)))
                break;
            lip *= 2.0;  // the power-iteration estimate was short; halve the step
            x_new = prox_point(yv, gy, lip, prob.alpha);
        }
        const double f_new = full(x_new);

        if (f_new > fx + 1e-15 * (1.0 + std::abs(fx))) {
            // objective went up: drop momentum and restart from the last
            // accepted iterate (the next pass is a plain descent step)
            theta = 1.0;
            yv = x;
            if (residual_at(x, lip) <= opts.tol * (1.0 + std::abs(fx))) converged = true;
            continue;
        }

        assert(f_new <= fx + 1e-12 * (1.0 + std::abs(fx)));
        const double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        const double beta = (theta - 1.0) / theta_new;
        x_old.swap(x);
        x = std::move(x_new);
        for (int i = 0; i < dim; ++i) yv[i] = x[i] + beta * (x[i] - x_old[i]);
        theta = theta_new;
        fx = f_new;
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
        if (residual_at(x, lip) <= opts.tol * (1.0 + std::abs(fx))) converged = true;
    }

    if (!converged) x = best_x;

    // Reassemble the returned quantities through the mixed system so the
    // reported objective, adjoint, and multiplier come from the FEM path.
    std::vector<double> heights(x.begin() + 1, x.end());
    const auto u = control_to_cells(prob, x[0], heights);
    auto st = prob.system->solve_state(u);
    const auto& h = prob.mesh().cell_sizes();
    const int n = prob.mesh().cell_count();
    std::vector<double> r(n);
    double track = 0.0;
    for (int j = 0; j < n; ++j) {
        const double d = st.state.value(j) - prob.target_cell_averages[j];
        r[j] = h[j] * d;
        track += h[j] * d * d;
    }
    auto ad = prob.system->solve_adjoint(r);
    auto phi = antiderivative(ad.state);

    ReducedSolution sol{x[0],
                        std::move(heights),
                        0.5 * track + prob.alpha * l1_tail(x),
                        converged,
                        it,
                        0.0,
                        std::move(st.state),
                        std::move(ad.state),
                        std::move(phi)};
    sol.kkt_residual = optimality_check(prob, sol);
    return sol;
}

double optimality_check(const ReducedProblem& prob, const ReducedSolution& sol) {
    const auto phi = sol.multiplier.values();
    const int n = prob.mesh().cell_count();
    double res = std::abs(phi[n]);
    double phimax = 0.0;
    for (int i = 0; i <= n; ++i) phimax = std::max(phimax, std::abs(phi[i]));
    res = std::max(res, std::max(0.0, phimax - prob.alpha));
    for (std::size_t i = 0; i < sol.heights.size(); ++i) {
        const double c = sol.heights[i];
        if (std::abs(c) <= 1e-10) continue;
        const double sign = c > 0.0 ? 1.0 : -1.0;
        res = std::max(res, std::abs(phi[prob.support[i]] - prob.alpha * sign));
    }
    return res;
}

JumpControl to_jump_control(const ReducedProblem& prob, const ReducedSolution& sol,
                            double prune_tol) {
    const auto& nodes = prob.mesh().nodes();
    std::vector<double> locs, heights;
    for (std::size_t i = 0; i < sol.heights.size(); ++i) {
        if (std::abs(sol.heights[i]) > prune_tol) {
            locs.push_back(nodes[prob.support[i]]);
            heights.push_back(sol.heights[i]);
        }
    }
    return JumpControl(sol.base, std::move(locs), std::move(heights));
}

}  // namespace bvc
