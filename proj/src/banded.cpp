#include "bvcontrol/banded.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bvc {

SymmetricBandFactor SymmetricBandFactor::factorize(std::vector<std::vector<double>> diags) {
    if (diags.empty() || diags[0].empty())
        throw std::invalid_argument("band factorize: empty matrix");
    const std::size_t n = diags[0].size();
    const std::size_t w = diags.size() - 1;
    for (std::size_t k = 1; k <= w; ++k)
        if (diags[k].size() != n - k)
            throw std::invalid_argument("band factorize: diagonal " + std::to_string(k) +
                                        " has wrong length");

    // Right-looking LDL^T restricted to the band.  Band width is preserved:
    // eliminating column k only touches rows k+1..k+w.
    for (std::size_t k = 0; k < n; ++k) {
        const double d = diags[0][k];
        if (!(std::abs(d) > 0.0) || !std::isfinite(d))
            throw std::runtime_error("band factorize: zero pivot at index " + std::to_string(k));
        const std::size_t reach = std::min(w, n - 1 - k);
        for (std::size_t i = 1; i <= reach; ++i) {
            const double lik = diags[i][k] / d;          // L(k+i, k)
            for (std::size_t j = i; j <= reach; ++j) {
                // M(k+j, k+i) -= L(k+j,k) * d * L(k+i,k); stored at diags[j-i][k+i]
                diags[j - i][k + i] -= diags[j][k] * lik;
            }
            diags[i][k] = lik;
        }
    }
    return SymmetricBandFactor(std::move(diags));
}

void SymmetricBandFactor::solve_in_place(std::span<double> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n)
        throw std::invalid_argument("band solve: rhs length mismatch");
    const std::size_t w = bandwidth();
    // L x = b
    for (std::size_t k = 0; k < n; ++k) {
        const double xk = rhs[k];
        const std::size_t reach = std::min(w, n - 1 - k);
        for (std::size_t i = 1; i <= reach; ++i) rhs[k + i] -= diags_[i][k] * xk;
    }
    // D x = b
    for (std::size_t k = 0; k < n; ++k) rhs[k] /= diags_[0][k];
    // L^T x = b
    for (std::size_t k = n; k-- > 0;) {
        double acc = rhs[k];
        const std::size_t reach = std::min(w, n - 1 - k);
        for (std::size_t i = 1; i <= reach; ++i) acc -= diags_[i][k] * rhs[k + i];
        rhs[k] = acc;
    }
}

std::vector<double> SymmetricBandFactor::solve(std::vector<double> rhs) const {
    solve_in_place(rhs);
    return rhs;
}

}  // namespace bvc
