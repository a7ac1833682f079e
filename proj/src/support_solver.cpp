#include "bvcontrol/support_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace bvc {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::T1: return "T1";
        case Termination::T2: return "T2";
        case Termination::MaxIter: return "MaxIter";
    }
    return "?";
}

DetectResult detect_support(const P0Function& adjoint) {
    const int n = adjoint.size();
    double linf = 0.0;
    for (int i = 0; i < n; ++i) linf = std::max(linf, std::abs(adjoint.value(i)));
    const double tiny = 1e-12 * linf;

    DetectResult out;
    int first = -1;
    for (int i = 0; i < n; ++i) {
        if (std::abs(adjoint.value(i)) > tiny) {
            first = i;
            break;
        }
    }
    if (first != 0) out.degenerate = true;  // leading tiny cells (or all zero)
    if (first < 0) return out;

    int sign = adjoint.value(first) > 0.0 ? 1 : -1;
    for (int i = first + 1; i < n; ++i) {
        const double p = adjoint.value(i);
        int s = sign;
        if (std::abs(p) > tiny) s = p > 0.0 ? 1 : -1;
        else out.degenerate = true;
        if (s != sign) out.nodes.push_back(i);
        sign = s;
    }
    return out;
}

namespace {

double coord_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

std::optional<Termination> check_termination(std::span<const OuterIterate> solved,
                                             std::span<const double> incoming_coords,
                                             double epsilon) {
    const std::size_t k = solved.size();
    const int m = static_cast<int>(incoming_coords.size());
    if (k >= 1 && solved[k - 1].support_size == m &&
        coord_distance(incoming_coords, solved[k - 1].support_coords) <= epsilon)
        return Termination::T1;
    if (k >= 2 && solved[k - 1].support_size == m && solved[k - 2].support_size == m &&
        coord_distance(incoming_coords, solved[k - 2].support_coords) <= epsilon &&
        solved[k - 2].objective < solved[k - 1].objective)
        return Termination::T2;
    return std::nullopt;
}

OuterResult run_outer(SystemPtr system, std::vector<double> target_cell_averages, double alpha,
                      const OuterConfig& config) {
    if (!system) throw std::invalid_argument("run_outer: null system");
    if (!(config.epsilon >= 0.0) || config.max_outer < 1)
        throw std::invalid_argument("run_outer: bad config");
    const auto& nodes = system->mesh()->nodes();
    const ProxOptions inner{config.inner_tol, config.inner_max_iters};

    std::vector<OuterIterate> history;
    std::vector<int> support;  // incoming t_k
    std::vector<std::optional<ReducedSolution>> last(2);  // [0] = newest
    std::vector<std::vector<int>> last_support(2);
    double warm_base = 0.0;
    std::vector<int> warm_support;
    std::vector<double> warm_heights;

    auto coords_of = [&nodes](const std::vector<int>& s) {
        std::vector<double> c(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) c[i] = nodes[s[i]];
        return c;
    };

    auto finish = [&](ReducedSolution sol, std::vector<int> sol_support, Termination term,
                      int iterations) {
        ReducedProblem prob(system, target_cell_averages, alpha, sol_support);
        JumpControl control = to_jump_control(prob, sol);
        bool ok = true;
        for (int i = 0; i < sol.adjoint.size(); ++i)
            if (std::abs(sol.adjoint.value(i)) <= 1e-12) ok = false;
        return OuterResult{std::move(sol), std::move(control), std::move(sol_support),
                           iterations,    term,               ok,
                           std::move(history)};
    };

    for (int k = 0; k < config.max_outer; ++k) {
        const auto coords = coords_of(support);
        if (auto term = check_termination(history, coords, config.epsilon)) {
            // T1 adopts the last solve (same support), T2 the one before it
            const int back = (*term == Termination::T1) ? 0 : 1;
            ReducedSolution sol = *last[back];
            history.push_back(OuterIterate{static_cast<int>(support.size()), support, coords,
                                           sol.objective});
            if (config.trace) config.trace(k, history.back(), to_string(*term));
            return finish(std::move(sol), last_support[back], *term, k + 1);
        }

        ReducedProblem prob(system, target_cell_averages, alpha, support);
        // warm start: keep heights at nodes retained from the previous support
        std::vector<double> init(support.size(), 0.0);
        for (std::size_t i = 0; i < support.size(); ++i)
            for (std::size_t j = 0; j < warm_support.size(); ++j)
                if (warm_support[j] == support[i]) init[i] = warm_heights[j];
        ReducedSolution sol = prox_solve(prob, warm_base, init, inner);

        history.push_back(OuterIterate{static_cast<int>(support.size()), support, coords,
                                       sol.objective});
        if (config.trace) config.trace(k, history.back(), "solved");

        warm_base = sol.base;
        warm_support = support;
        warm_heights = sol.heights;

        const DetectResult det = detect_support(sol.adjoint);
        last[1] = std::move(last[0]);
        last[0] = std::move(sol);
        last_support[1] = std::move(last_support[0]);
        last_support[0] = support;
        support = det.nodes;
    }

    // max_outer exhausted: hand back the best objective seen
    int best = -1;
    for (std::size_t i = 0; i < history.size(); ++i)
        if (best < 0 || history[i].objective < history[best].objective)
            best = static_cast<int>(i);
    const bool newest_is_best = best == static_cast<int>(history.size()) - 1;
    ReducedSolution sol = newest_is_best ? *last[0] : *last[1];
    std::vector<int> sol_support = newest_is_best ? last_support[0] : last_support[1];
    if (!newest_is_best && static_cast<int>(history.size()) >= 2 &&
        best != static_cast<int>(history.size()) - 2) {
        // best iterate fell out of the two-solution window: re-solve it
        ReducedProblem prob(system, target_cell_averages, alpha, history[best].support);
        std::vector<double> init(history[best].support.size(), 0.0);
        sol = prox_solve(prob, 0.0, init, inner);
        sol_support = history[best].support;
    }
    return finish(std::move(sol), std::move(sol_support), Termination::MaxIter, config.max_outer);
}

}  // namespace bvc
