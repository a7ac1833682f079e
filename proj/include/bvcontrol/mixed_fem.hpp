#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "bvcontrol/banded.hpp"
#include "bvcontrol/mesh.hpp"

namespace bvc {

/// Problem coefficients for -(a y')' + d y = u.  a must be positive and d
/// nonnegative; both are checked at the quadrature points during assembly.
struct Coefficients {
    std::function<double(double)> diffusion;  // a
    std::function<double(double)> reaction;   // d

    static Coefficients constant(double a, double d = 0.0);
};

/// Piecewise-constant function (one value per cell).
class P0Function {
public:
    P0Function(MeshPtr mesh, std::vector<double> values);

    const MeshPtr& mesh() const { return mesh_; }
    std::span<const double> values() const { return values_; }
    double value(int cell) const { return values_[cell]; }
    int size() const { return static_cast<int>(values_.size()); }

    /// Value at x in [0,1]; on a node returns the left cell's value.
    double evaluate(double x) const;

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

/// Continuous piecewise-linear function (one value per node).
class P1Function {
public:
    P1Function(MeshPtr mesh, std::vector<double> values);

    const MeshPtr& mesh() const { return mesh_; }
    std::span<const double> values() const { return values_; }
    double value(int node) const { return values_[node]; }
    int size() const { return static_cast<int>(values_.size()); }

    double evaluate(double x) const;

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

double l2_norm(const P0Function& f);
double l2_inner(const P0Function& f, const P0Function& g);

/// Cell averages of a pointwise function, by 5-point Gauss per cell.
P0Function project_cell_averages(const std::function<double(double)>& f, MeshPtr mesh);

/// Lowest-order mixed discretization of -(a y')' + d y = u with y(0)=y(1)=0:
/// continuous piecewise-linear flux z ~ a y' and piecewise-constant state y,
///
///     A z + B y = 0,        -B^T z + D y = u,
///
/// with A the (1/a)-weighted P1 mass matrix, B the incidence matrix with
/// column j carrying -1 at row j and +1 at row j+1, and D the diagonal of
/// cell integrals of d.  Eliminating z gives (B^T A^{-1} B + D) y = u.
class MixedSystem {
public:
    struct Solution {
        P1Function flux;   // z
        P0Function state;  // y
    };

    static MixedSystem assemble(MeshPtr mesh, const Coefficients& coeff);

    const MeshPtr& mesh() const { return mesh_; }

    /// Tridiagonal A (main diagonal, length N+1; subdiagonal, length N).
    const std::vector<double>& flux_mass_diag() const { return a_diag_; }
    const std::vector<double>& flux_mass_sub() const { return a_sub_; }
    /// Diagonal of D (length N).
    const std::vector<double>& reaction_diag() const { return d_diag_; }

    std::vector<double> apply_gradient(std::span<const double> y) const;    // B y
    std::vector<double> apply_divergence(std::span<const double> z) const;  // B^T z
    std::vector<double> flux_mass_solve(std::vector<double> rhs) const;     // A^{-1} rhs

    /// Solve the mixed system for cell loads u_i = int_{I_i} u.  Uses the
    /// banded factorization of the interleaved block form; O(N) per call.
    Solution solve_state(std::span<const double> cell_loads) const;

    /// Adjoint solve; the operator is self-adjoint, so this is solve_state
    /// applied to the cell residuals int_{I_i} (y_h - y_d).
    Solution solve_adjoint(std::span<const double> cell_residuals) const;

    /// Same solve through the Schur complement: dense K = B^T A^{-1} B + D
    /// factored by Cholesky (built lazily), then z = -A^{-1} B y.  Kept as an
    /// independent route for verification.
    Solution solve_state_via_schur(std::span<const double> cell_loads) const;

    /// Dense K, row-major N x N.  For inspection and tests.
    std::vector<std::vector<double>> dense_reduced_matrix() const;

    /// Max-norm residuals of the two discrete weak equations at (z, y).
    std::pair<double, double> weak_residuals(const Solution& sol,
                                             std::span<const double> cell_loads) const;

private:
    MixedSystem() = default;

    struct DenseCholesky;
    const DenseCholesky& ensure_schur() const;

    MeshPtr mesh_;
    std::vector<double> a_diag_, a_sub_, d_diag_;
    std::shared_ptr<const SymmetricBandFactor> block_;  // interleaved (z,y) LDL^T
    std::shared_ptr<const SymmetricBandFactor> a_factor_;

    // Lazily built Schur factor; heap-held so the system stays movable.
    struct SchurState;
    std::shared_ptr<SchurState> schur_state_;
};

using SystemPtr = std::shared_ptr<const MixedSystem>;

SystemPtr assemble_system(MeshPtr mesh, const Coefficients& coeff);

}  // namespace bvc
