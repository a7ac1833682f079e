#include "bvcontrol/mixed_fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bvcontrol/quadrature.hpp"

namespace bvc {

namespace {

int locate_cell(const Mesh& mesh, double x) {
    const auto& nodes = mesh.nodes();
    if (x < nodes.front() || x > nodes.back())
        throw std::invalid_argument("evaluate: point outside [0,1]");
    auto it = std::lower_bound(nodes.begin() + 1, nodes.end(), x);
    return static_cast<int>(it - nodes.begin()) - 1;
}

}  // namespace

Coefficients Coefficients::constant(double a, double d) {
    return Coefficients{[a](double) { return a; }, [d](double) { return d; }};
}

P0Function::P0Function(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_ || static_cast<int>(values_.size()) != mesh_->cell_count())
        throw std::invalid_argument("P0Function: one value per cell required");
}

double P0Function::evaluate(double x) const { return values_[locate_cell(*mesh_, x)]; }

P1Function::P1Function(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_ || static_cast<int>(values_.size()) != mesh_->node_count())
        throw std::invalid_argument("P1Function: one value per node required");
}

double P1Function::evaluate(double x) const {
    const int i = locate_cell(*mesh_, x);
    const auto [xl, xr] = mesh_->cell(i);
    const double t = (x - xl) / (xr - xl);
    return values_[i] * (1.0 - t) + values_[i + 1] * t;
}

double l2_inner(const P0Function& f, const P0Function& g) {
    if (!same_mesh(f.mesh(), g.mesh()))
        throw std::invalid_argument("l2_inner: functions live on different meshes");
    const auto& h = f.mesh()->cell_sizes();
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i) acc += h[i] * f.value(i) * g.value(i);
    return acc;
}

double l2_norm(const P0Function& f) { return std::sqrt(l2_inner(f, f)); }

P0Function project_cell_averages(const std::function<double(double)>& f, MeshPtr mesh) {
    if (!mesh || !f) throw std::invalid_argument("project_cell_averages: null argument");
    std::vector<double> vals(mesh->cell_count());
    for (int i = 0; i < mesh->cell_count(); ++i) {
        const auto [xl, xr] = mesh->cell(i);
        vals[i] = gauss5_average(f, xl, xr);
    }
    return P0Function(std::move(mesh), std::move(vals));
}

struct MixedSystem::DenseCholesky {
    int n = 0;
    std::vector<double> lower;  // row-major, lower triangle including diagonal

    static DenseCholesky factorize(const std::vector<std::vector<double>>& m) {
        DenseCholesky c;
        c.n = static_cast<int>(m.size());
        c.lower.assign(static_cast<std::size_t>(c.n) * c.n, 0.0);
        auto l = [&c](int i, int j) -> double& {
            return c.lower[static_cast<std::size_t>(i) * c.n + j];
        };
        for (int i = 0; i < c.n; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = m[i][j];
                for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
                if (j < i) {
                    l(i, j) = s / l(j, j);
                } else {
                    if (!(s > 0.0))
                        throw std::runtime_error("schur solve: K is not positive definite");
                    l(i, i) = std::sqrt(s);
                }
            }
        }
        return c;
    }

    void solve_in_place(std::span<double> b) const {
        auto l = [this](int i, int j) {
            return lower[static_cast<std::size_t>(i) * n + j];
        };
        for (int i = 0; i < n; ++i) {
            double s = b[i];
            for (int k = 0; k < i; ++k) s -= l(i, k) * b[k];
            b[i] = s / l(i, i);
        }
        for (int i = n; i-- > 0;) {
            double s = b[i];
            for (int k = i + 1; k < n; ++k) s -= l(k, i) * b[k];
            b[i] = s / l(i, i);
        }
    }
};

struct MixedSystem::SchurState {
    std::once_flag once;
    std::shared_ptr<const DenseCholesky> factor;
};

MixedSystem MixedSystem::assemble(MeshPtr mesh, const Coefficients& coeff) {
    if (!mesh) throw std::invalid_argument("assemble: null mesh");
    if (!coeff.diffusion || !coeff.reaction)
        throw std::invalid_argument("assemble: coefficients not set");
    const int n = mesh->cell_count();

    MixedSystem sys;
    sys.mesh_ = std::move(mesh);
    sys.a_diag_.assign(n + 1, 0.0);
    sys.a_sub_.assign(n, 0.0);
    sys.d_diag_.assign(n, 0.0);

    for (int i = 0; i < n; ++i) {
        const auto [xl, xr] = sys.mesh_->cell(i);
        const double h = xr - xl;
        const double xm = 0.5 * (xl + xr);
        double mll = 0.0, mlr = 0.0, mrr = 0.0, dint = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double x = xm + 0.5 * h * kGauss3Nodes[q];
            const double w = 0.5 * h * kGauss3Weights[q];
            const double a = coeff.diffusion(x);
            const double d = coeff.reaction(x);
            if (!(a > 0.0) || !std::isfinite(a))
                throw std::invalid_argument("assemble: diffusion coefficient must be positive");
            if (d < 0.0 || !std::isfinite(d))
                throw std::invalid_argument("assemble: reaction coefficient must be nonnegative");
            const double el = (xr - x) / h;
            const double er = (x - xl) / h;
            mll += w * el * el / a;
            mlr += w * el * er / a;
            mrr += w * er * er / a;
            dint += w * d;
        }
        sys.a_diag_[i] += mll;
        sys.a_diag_[i + 1] += mrr;
        sys.a_sub_[i] += mlr;
        sys.d_diag_[i] = dint;
    }

    // Interleaved block matrix (z_0, y_0, z_1, y_1, ..., z_N): symmetric
    // quasidefinite with bandwidth 2, so LDL^T needs no pivoting and the
    // pivots alternate in sign (positive on z slots, negative on y slots).
    const int dim = 2 * n + 1;
    std::vector<std::vector<double>> diags(3);
    diags[0].assign(dim, 0.0);
    diags[1].assign(dim - 1, 0.0);
    diags[2].assign(dim - 2, 0.0);
    for (int i = 0; i <= n; ++i) diags[0][2 * i] = sys.a_diag_[i];
    for (int j = 0; j < n; ++j) diags[0][2 * j + 1] = -sys.d_diag_[j];
    for (int j = 0; j < n; ++j) {
        diags[1][2 * j] = -1.0;     // (y_j, z_j)
        diags[1][2 * j + 1] = 1.0;  // (z_{j+1}, y_j)
    }
    for (int i = 0; i < n; ++i) diags[2][2 * i] = sys.a_sub_[i];

    auto block = SymmetricBandFactor::factorize(std::move(diags));
    for (int k = 0; k < dim; ++k) {
        const bool positive = block.pivots()[k] > 0.0;
        if (positive != (k % 2 == 0))
            throw std::runtime_error("assemble: block factorization lost quasidefiniteness");
    }
    sys.block_ = std::make_shared<const SymmetricBandFactor>(std::move(block));

    std::vector<std::vector<double>> adiags(2);
    adiags[0] = sys.a_diag_;
    adiags[1] = sys.a_sub_;
    sys.a_factor_ =
        std::make_shared<const SymmetricBandFactor>(SymmetricBandFactor::factorize(std::move(adiags)));
    sys.schur_state_ = std::make_shared<SchurState>();
    return sys;
}

SystemPtr assemble_system(MeshPtr mesh, const Coefficients& coeff) {
    return std::make_shared<const MixedSystem>(MixedSystem::assemble(std::move(mesh), coeff));
}

std::vector<double> MixedSystem::apply_gradient(std::span<const double> y) const {
    const int n = mesh_->cell_count();
    if (static_cast<int>(y.size()) != n)
        throw std::invalid_argument("apply_gradient: cell vector length mismatch");
    std::vector<double> out(n + 1);
    for (int r = 0; r <= n; ++r) {
        double v = 0.0;
        if (r > 0) v += y[r - 1];
        if (r < n) v -= y[r];
        out[r] = v;
    }
    return out;
}

std::vector<double> MixedSystem::apply_divergence(std::span<const double> z) const {
    const int n = mesh_->cell_count();
    if (static_cast<int>(z.size()) != n + 1)
        throw std::invalid_argument("apply_divergence: node vector length mismatch");
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = z[j + 1] - z[j];
    return out;
}

std::vector<double> MixedSystem::flux_mass_solve(std::vector<double> rhs) const {
    if (rhs.size() != a_diag_.size())
        throw std::invalid_argument("flux_mass_solve: length mismatch");
    a_factor_->solve_in_place(rhs);
    return rhs;
}

MixedSystem::Solution MixedSystem::solve_state(std::span<const double> cell_loads) const {
    const int n = mesh_->cell_count();
    if (static_cast<int>(cell_loads.size()) != n)
        throw std::invalid_argument("solve_state: expected one load per cell");
    std::vector<double> w(2 * n + 1, 0.0);
    for (int j = 0; j < n; ++j) w[2 * j + 1] = -cell_loads[j];
    block_->solve_in_place(w);
    std::vector<double> z(n + 1), y(n);
    for (int i = 0; i <= n; ++i) z[i] = w[2 * i];
    for (int j = 0; j < n; ++j) y[j] = w[2 * j + 1];
    return Solution{P1Function(mesh_, std::move(z)), P0Function(mesh_, std::move(y))};
}

MixedSystem::Solution MixedSystem::solve_adjoint(std::span<const double> cell_residuals) const {
    return solve_state(cell_residuals);
}

const MixedSystem::DenseCholesky& MixedSystem::ensure_schur() const {
    std::call_once(schur_state_->once, [this] {
        schur_state_->factor = std::make_shared<const DenseCholesky>(
            DenseCholesky::factorize(dense_reduced_matrix()));
    });
    return *schur_state_->factor;
}

std::vector<std::vector<double>> MixedSystem::dense_reduced_matrix() const {
    const int n = mesh_->cell_count();
    std::vector<std::vector<double>> k(n, std::vector<double>(n, 0.0));
    std::vector<double> col(n + 1);
    for (int j = 0; j < n; ++j) {
        // K e_j = B^T A^{-1} B e_j + D e_j
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = -1.0;
        col[j + 1] = 1.0;
        col = flux_mass_solve(std::move(col));
        for (int i = 0; i < n; ++i) k[i][j] = col[i + 1] - col[i];
        k[j][j] += d_diag_[j];
    }
    return k;
}

MixedSystem::Solution MixedSystem::solve_state_via_schur(std::span<const double> cell_loads) const {
    const int n = mesh_->cell_count();
    if (static_cast<int>(cell_loads.size()) != n)
        throw std::invalid_argument("solve_state_via_schur: expected one load per cell");
    const DenseCholesky& schur = ensure_schur();
    std::vector<double> y(cell_loads.begin(), cell_loads.end());
    schur.solve_in_place(y);
    std::vector<double> z = flux_mass_solve(apply_gradient(y));
    for (double& v : z) v = -v;
    return Solution{P1Function(mesh_, std::move(z)), P0Function(mesh_, std::move(y))};
}

std::pair<double, double> MixedSystem::weak_residuals(const Solution& sol,
                                                      std::span<const double> cell_loads) const {
    const int n = mesh_->cell_count();
    const auto z = sol.flux.values();
    const auto y = sol.state.values();
    double r1 = 0.0, r2 = 0.0;
    for (int i = 0; i <= n; ++i) {
        double v = a_diag_[i] * z[i];
        if (i > 0) v += a_sub_[i - 1] * z[i - 1];
        if (i < n) v += a_sub_[i] * z[i + 1];
        if (i > 0) v += y[i - 1];
        if (i < n) v -= y[i];
        r1 = std::max(r1, std::abs(v));
    }
    for (int j = 0; j < n; ++j) {
        const double v = -(z[j + 1] - z[j]) + d_diag_[j] * y[j] - cell_loads[j];
        r2 = std::max(r2, std::abs(v));
    }
    return {r1, r2};
}

}  // namespace bvc
