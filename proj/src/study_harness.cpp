#include "bvcontrol/study_harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "bvcontrol/quadrature.hpp"

namespace bvc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double eoc(double err_coarse, double err_fine, double h_coarse, double h_fine) {
    if (!(h_coarse > 0.0) || !(h_fine > 0.0) || h_coarse == h_fine)
        throw std::invalid_argument("eoc: mesh widths must be positive and distinct");
    if (!(err_coarse > 0.0) || !(err_fine > 0.0) || !std::isfinite(err_coarse) ||
        !std::isfinite(err_fine))
        return kNaN;
    return std::log(err_coarse / err_fine) / std::log(h_coarse / h_fine);
}

double bestfit_slope(std::span<const double> hs, std::span<const double> errs) {
    if (hs.size() != errs.size()) throw std::invalid_argument("bestfit_slope: length mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (hs[i] > 0.0 && errs[i] > 0.0 && std::isfinite(errs[i])) {
            lx.push_back(std::log(hs[i]));
            ly.push_back(std::log(errs[i]));
        }
    }
    if (lx.size() < 2) throw std::invalid_argument("bestfit_slope: need at least 2 positive points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

StudyRecord errors_vs_exact(const ExampleSpec& spec, const OuterResult& result) {
    if (!spec.exact) throw std::invalid_argument("errors_vs_exact: example has no exact solution");
    const auto& ex = *spec.exact;
    const MeshPtr mesh = result.solution.state.mesh();
    const auto& phi = result.solution.multiplier;

    StudyRecord rec;
    rec.cells = mesh->cell_count();
    rec.h = mesh->h_max();
    rec.errors[0] = l1_distance(ex.control, result.control);
    rec.errors[1] = l2_distance(ex.control, result.control);

    double y2 = 0.0, plinf = 0.0, philinf = 0.0;
    for (int i = 0; i < mesh->cell_count(); ++i) {
        const auto [xl, xr] = mesh->cell(i);
        const double half = 0.5 * (xr - xl), mid = 0.5 * (xl + xr);
        const double yi = result.solution.state.value(i);
        const double pi = result.solution.adjoint.value(i);
        for (int q = 0; q < 5; ++q) {
            const double x = mid + half * kGauss5Nodes[q];
            const double dy = ex.state(x) - yi;
            y2 += half * kGauss5Weights[q] * dy * dy;
            plinf = std::max(plinf, std::abs(ex.adjoint(x) - pi));
            philinf = std::max(philinf, std::abs(ex.multiplier(x) - phi.evaluate(x)));
        }
        plinf = std::max(plinf, std::abs(ex.adjoint(mid) - pi));
    }
    for (int i = 0; i < mesh->node_count(); ++i) {
        const double x = mesh->nodes()[i];
        philinf = std::max(philinf, std::abs(ex.multiplier(x) - phi.value(i)));
    }
    rec.errors[2] = std::sqrt(y2);
    rec.errors[3] = plinf;
    rec.errors[4] = philinf;
    return rec;
}

StudyRecord errors_vs_reference(const OuterResult& reference, const OuterResult& result) {
    const MeshPtr fine = reference.solution.state.mesh();
    const MeshPtr coarse = result.solution.state.mesh();
    const auto parent = parent_cells(*coarse, *fine);

    StudyRecord rec;
    rec.cells = coarse->cell_count();
    rec.h = coarse->h_max();
    rec.errors[0] = l1_distance(reference.control, result.control);
    rec.errors[1] = l2_distance(reference.control, result.control);

    double y2 = 0.0, plinf = 0.0;
    const auto& hf = fine->cell_sizes();
    for (int f = 0; f < fine->cell_count(); ++f) {
        const double dy = reference.solution.state.value(f) - result.solution.state.value(parent[f]);
        y2 += hf[f] * dy * dy;
        plinf = std::max(plinf, std::abs(reference.solution.adjoint.value(f) -
                                         result.solution.adjoint.value(parent[f])));
    }
    double philinf = 0.0;
    for (int i = 0; i < fine->node_count(); ++i) {
        const double x = fine->nodes()[i];
        philinf = std::max(philinf, std::abs(reference.solution.multiplier.value(i) -
                                             result.solution.multiplier.evaluate(x)));
    }
    rec.errors[2] = std::sqrt(y2);
    rec.errors[3] = plinf;
    rec.errors[4] = philinf;
    return rec;
}

namespace {

OuterResult solve_level(const ExampleSpec& spec, int cells, const OuterConfig& outer) {
    auto mesh = uniform_mesh(cells);
    auto sys = assemble_system(mesh, spec.coefficients);
    auto yd = project_cell_averages(spec.target, mesh);
    return run_outer(std::move(sys), std::vector<double>(yd.values().begin(), yd.values().end()),
                     spec.alpha, outer);
}

}  // namespace

StudyReport run_study(const ExampleSpec& spec, int level_lo, int level_hi,
                      const StudyOptions& opts) {
    if (level_lo < 2 || level_hi > 12 || level_lo > level_hi)
        throw std::invalid_argument("run_study: levels must satisfy 2 <= lo <= hi <= 12");
    if (!spec.exact) {
        if (opts.reference_cells < 4 ||
            (opts.reference_cells & (opts.reference_cells - 1)) != 0)
            throw std::invalid_argument("run_study: reference cell count must be a power of two");
        if ((1 << level_hi) * 4 > opts.reference_cells)
            throw std::invalid_argument(
                "run_study: levels are capped four-fold below the reference resolution");
    }

    OuterConfig outer = opts.outer;
    std::mutex trace_mutex;
    if (outer.trace && opts.jobs > 1) {
        auto inner = outer.trace;
        outer.trace = [&trace_mutex, inner](int k, const OuterIterate& it, const std::string& s) {
            std::lock_guard<std::mutex> lock(trace_mutex);
            inner(k, it, s);
        };
    }

    std::optional<OuterResult> reference;
    if (!spec.exact) reference = solve_level(spec, opts.reference_cells, outer);

    const int count = level_hi - level_lo + 1;
    std::vector<std::optional<OuterResult>> results(count);
    std::vector<std::exception_ptr> errors(count);

    auto work = [&](int idx) {
        try {
            results[idx] = solve_level(spec, 1 << (level_lo + idx), outer);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    };
    if (opts.jobs <= 1) {
        for (int i = 0; i < count; ++i) work(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int threads = std::min(opts.jobs, count);
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
            });
        for (auto& th : pool) th.join();
    }
    for (int i = 0; i < count; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);

    StudyReport report;
    report.example = spec.name;
    report.alpha = spec.alpha;
    for (int i = 0; i < count; ++i) {
        const OuterResult& res = *results[i];
        report.records.push_back(spec.exact ? errors_vs_exact(spec, res)
                                            : errors_vs_reference(*reference, res));
        report.converged.push_back(res.termination != Termination::MaxIter &&
                                   res.solution.converged);
    }

    for (int i = 1; i < count; ++i) {
        EocRow row;
        row.h_coarse = report.records[i - 1].h;
        row.h_fine = report.records[i].h;
        for (int j = 0; j < 5; ++j)
            row.values[j] = eoc(report.records[i - 1].errors[j], report.records[i].errors[j],
                                row.h_coarse, row.h_fine);
        report.eoc.push_back(row);
    }

    for (int j = 0; j < 5; ++j) {
        double sum = 0.0;
        int defined = 0;
        for (const auto& row : report.eoc) {
            if (std::isfinite(row.values[j])) {
                sum += row.values[j];
                ++defined;
            }
        }
        report.mean_eoc[j] = defined > 0 ? sum / defined : kNaN;

        std::vector<double> hs, errs;
        for (const auto& rec : report.records) {
            hs.push_back(rec.h);
            errs.push_back(rec.errors[j]);
        }
        try {
            report.bestfit[j] = bestfit_slope(hs, errs);
        } catch (const std::invalid_argument&) {
            report.bestfit[j] = kNaN;
        }
    }
    return report;
}

namespace {

std::string fmt6(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string to_csv(const StudyReport& report) {
    std::string out = "h,err_u_l1,err_u_l2,err_y_l2,err_p_linf,err_phi_linf\n";
    for (const auto& rec : report.records) {
        out += fmt6(rec.h);
        for (double e : rec.errors) out += "," + fmt6(e);
        out += "\n";
    }
    out += "# eoc\n";
    for (const auto& row : report.eoc) {
        out += fmt6(row.h_coarse) + "," + fmt6(row.h_fine);
        for (double v : row.values) out += "," + fmt6(v);
        out += "\n";
    }
    out += "# mean";
    for (double v : report.mean_eoc) out += "," + fmt6(v);
    out += "\n# bestfit";
    for (double v : report.bestfit) out += "," + fmt6(v);
    out += "\n";
    return out;
}

nlohmann::ordered_json to_json(const StudyReport& report) {
    nlohmann::ordered_json j;
    j["example"] = report.example;
    j["alpha"] = report.alpha;
    j["records"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const auto& rec = report.records[i];
        j["records"].push_back({{"cells", rec.cells},
                                {"h", rec.h},
                                {"err_u_l1", rec.errors[0]},
                                {"err_u_l2", rec.errors[1]},
                                {"err_y_l2", rec.errors[2]},
                                {"err_p_linf", rec.errors[3]},
                                {"err_phi_linf", rec.errors[4]},
                                {"converged", static_cast<bool>(report.converged[i])}});
    }
    j["eoc"] = nlohmann::ordered_json::array();
    for (const auto& row : report.eoc)
        j["eoc"].push_back(
            {{"h_coarse", row.h_coarse}, {"h_fine", row.h_fine}, {"values", row.values}});
    j["mean_eoc"] = report.mean_eoc;
    j["bestfit"] = report.bestfit;
    return j;
}

}  // namespace bvc
