#include "bvcontrol/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "bvcontrol/analytic_examples.hpp"
#include "bvcontrol/reduced_problem.hpp"
#include "bvcontrol/support_solver.hpp"

namespace bvc {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

std::vector<double> random_cells(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

std::vector<int> random_support(int n, std::mt19937& rng) {
    std::bernoulli_distribution pick(0.5);
    std::vector<int> s;
    for (int i = 1; i < n; ++i)
        if (pick(rng)) s.push_back(i);
    if (s.empty()) s.push_back(n / 2);
    return s;
}

// Plain Gaussian elimination with partial pivoting, sized for the oracle.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
        if (a[piv * n + k] == 0.0) throw std::runtime_error("oracle system is singular");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            std::swap(rhs[k], rhs[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double m = a[i * n + k] / a[k * n + k];
            for (int j = k; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
            rhs[i] -= m * rhs[k];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = k + 1; j < n; ++j) rhs[k] -= a[k * n + j] * rhs[j];
        rhs[k] /= a[k * n + k];
    }
    return rhs;
}

}  // namespace

CheckResult check_gradient_fd(unsigned seed) {
    CheckResult res{"gradient_fd", true, ""};
    std::mt19937 rng(seed);
    const double step = 1e-6;
    double worst = 0.0;

    for (int n : {8, 32, 128}) {
        auto system = assemble_system(uniform_mesh(n), Coefficients::constant(1.0));
        ReducedProblem prob(system, random_cells(n, rng), 1e-3, random_support(n, rng));
        const int m = prob.support_size();

        std::uniform_real_distribution<double> mag(0.1, 1.0);
        std::bernoulli_distribution flip(0.5);
        for (int trial = 0; trial < 20; ++trial) {
            // heights bounded away from zero so the |c| subtraction below is
            // smooth on the whole difference stencil
            double base = mag(rng) * (flip(rng) ? 1.0 : -1.0);
            std::vector<double> c(m);
            for (double& ci : c) ci = mag(rng) * (flip(rng) ? 1.0 : -1.0);

            auto smooth = [&](double a, std::span<const double> h) {
                double l1 = 0.0;
                for (double hi : h) l1 += std::abs(hi);
                return objective(prob, a, h) - prob.alpha * l1;
            };
            ControlGradient grad = smooth_gradient(prob, base, c);

            double scale = std::abs(grad.base);
            for (double g : grad.heights) scale = std::max(scale, std::abs(g));
            scale = std::max(scale, 1.0);

            double err = std::abs(grad.base -
                                  (smooth(base + step, c) - smooth(base - step, c)) / (2 * step));
            for (int i = 0; i < m; ++i) {
                std::vector<double> cp = c, cm = c;
                cp[i] += step;
                cm[i] -= step;
                err = std::max(err,
                               std::abs(grad.heights[i] - (smooth(base, cp) - smooth(base, cm)) /
                                                              (2 * step)));
            }
            worst = std::max(worst, err / scale);
            if (err > 1e-6 * scale) {
                res.passed = false;
                res.detail = fmt("relative gradient mismatch %.3e at n=%g", err / scale, n);
            }
        }
    }
    if (res.passed) res.detail = fmt("worst relative deviation %.3e", worst);
    return res;
}

CheckResult check_small_support_oracle(unsigned seed) {
    CheckResult res{"small_support_oracle", true, ""};
    std::mt19937 rng(seed);
    const int n = 8, m = 7, dim = m + 1;
    auto system = assemble_system(uniform_mesh(n), Coefficients::constant(1.0));
    const auto& h = system->mesh()->cell_sizes();
    const double alphas[5] = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    double worst = 0.0;

    for (int round = 0; round < 5; ++round) {
        auto yd = random_cells(n, rng);
        ReducedProblem prob(system, yd, alphas[round], {1, 2, 3, 4, 5, 6, 7});

        // reduced Hessian and linear term from one state solve per coefficient
        std::vector<P0Function> basis;
        for (int j = 0; j < dim; ++j) {
            std::vector<double> e(m, 0.0);
            if (j > 0) e[j - 1] = 1.0;
            basis.push_back(
                system->solve_state(control_to_cells(prob, j == 0 ? 1.0 : 0.0, e)).state);
        }
        std::vector<double> hess(dim * dim), lin(dim);
        for (int j = 0; j < dim; ++j) {
            for (int k = 0; k <= j; ++k) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += h[i] * basis[j].value(i) * basis[k].value(i);
                hess[j * dim + k] = hess[k * dim + j] = s;
            }
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += h[i] * yd[i] * basis[j].value(i);
            lin[j] = s;
        }

        // every sign pattern of the heights; base is always free
        double best = std::numeric_limits<double>::infinity();
        int patterns = 1;
        for (int i = 0; i < m; ++i) patterns *= 3;
        for (int pat = 0; pat < patterns; ++pat) {
            int digits = pat, sigma[m];
            for (int i = 0; i < m; ++i, digits /= 3) sigma[i] = digits % 3 - 1;
            std::vector<int> free_idx{0};
            for (int i = 0; i < m; ++i)
                if (sigma[i] != 0) free_idx.push_back(i + 1);
            const int nf = static_cast<int>(free_idx.size());
            std::vector<double> sub(nf * nf), rhs(nf);
            for (int r = 0; r < nf; ++r) {
                for (int s = 0; s < nf; ++s) sub[r * nf + s] = hess[free_idx[r] * dim + free_idx[s]];
                rhs[r] = lin[free_idx[r]] -
                         (free_idx[r] > 0 ? prob.alpha * sigma[free_idx[r] - 1] : 0.0);
            }
            auto v = dense_solve(std::move(sub), std::move(rhs));
            std::vector<double> c(m, 0.0);
            for (int r = 1; r < nf; ++r) c[free_idx[r] - 1] = v[r];
            best = std::min(best, objective(prob, v[0], c));
        }

        auto sol = prox_solve(prob, 0.0, std::vector<double>(m, 0.0));
        const double gap = std::abs(sol.objective - best);
        worst = std::max(worst, gap);
        if (!sol.converged || gap > 1e-8) {
            res.passed = false;
            res.detail = fmt("objective gap %.3e at alpha=%.1e", gap, prob.alpha);
        }
    }
    if (res.passed) res.detail = fmt("worst objective gap %.3e", worst);
    return res;
}

CheckResult check_kkt() {
    CheckResult res{"kkt_conditions", true, ""};
    struct Case {
        const char* example;
        int cells;
    } cases[] = {{"example1", 64}, {"example1", 256}, {"example2", 64}};
    double worst = 0.0;

    for (const auto& cs : cases) {
        auto spec = example_by_name(cs.example);
        auto mesh = uniform_mesh(cs.cells);
        auto yd = project_cell_averages(spec.target, mesh);
        auto result = run_outer(assemble_system(mesh, spec.coefficients),
                                std::vector<double>(yd.values().begin(), yd.values().end()),
                                spec.alpha, {});
        const double rel = result.solution.kkt_residual / spec.alpha;
        worst = std::max(worst, rel);
        if (result.termination == Termination::MaxIter || !result.solution.converged ||
            rel > 1e-6) {
            res.passed = false;
            res.detail += fmt("residual/alpha %.3e on ", rel);
            res.detail += cs.example;
            res.detail += fmt(" n=%g; ", cs.cells);
        }
    }
    if (res.passed) res.detail = fmt("worst residual %.3e * alpha", worst);
    return res;
}

CheckResult check_example1_consistency() {
    CheckResult res{"example1_consistency", true, ""};
    auto report = verify_example1_consistency(example1(), 512);
    res.passed = report.ok;
    for (std::size_t i = 0; i < report.failures.size(); ++i) {
        if (i) res.detail += "; ";
        res.detail += report.failures[i];
    }
    if (res.passed) res.detail = "all identities hold";
    return res;
}

std::vector<CheckResult> run_all_checks(unsigned seed) {
    return {check_gradient_fd(seed), check_small_support_oracle(seed + 1), check_kkt(),
            check_example1_consistency()};
}

}  // namespace bvc
