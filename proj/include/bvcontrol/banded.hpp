#pragma once

#include <span>
#include <vector>

namespace bvc {

/// LDL^T factorization of a symmetric band matrix without pivoting.
///
/// Stores the lower band by diagonals: diags[0] is the main diagonal
/// (length n), diags[k] the k-th subdiagonal (length n-k).  Factorization
/// succeeds for any symmetric quasidefinite ordering (all pivots stay
/// nonzero); a vanishing pivot throws.
class SymmetricBandFactor {
public:
    static SymmetricBandFactor factorize(std::vector<std::vector<double>> diags);

    std::size_t size() const { return diags_.empty() ? 0 : diags_[0].size(); }
    std::size_t bandwidth() const { return diags_.size() - 1; }

    /// Pivots of D; their signs reveal the inertia of the matrix.
    const std::vector<double>& pivots() const { return diags_[0]; }

    void solve_in_place(std::span<double> rhs) const;
    std::vector<double> solve(std::vector<double> rhs) const;

private:
    explicit SymmetricBandFactor(std::vector<std::vector<double>> diags)
        : diags_(std::move(diags)) {}

    // diags_[0] holds D, diags_[k>0] the unit lower factor's subdiagonals.
    std::vector<std::vector<double>> diags_;
};

}  // namespace bvc
