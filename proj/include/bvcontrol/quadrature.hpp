#pragma once

#include <array>

namespace bvc {

// Gauss-Legendre rules on [-1,1].
inline constexpr std::array<double, 3> kGauss3Nodes = {-0.7745966692414834, 0.0,
                                                       0.7745966692414834};
inline constexpr std::array<double, 3> kGauss3Weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

inline constexpr std::array<double, 5> kGauss5Nodes = {-0.9061798459386640, -0.5384693101056831,
                                                       0.0, 0.5384693101056831,
                                                       0.9061798459386640};
inline constexpr std::array<double, 5> kGauss5Weights = {0.23692688505618909, 0.47862867049936647,
                                                         0.5688888888888889, 0.47862867049936647,
                                                         0.23692688505618909};

/// Integral of f over [xl, xr] by the 5-point rule (exact through degree 9).
template <typename F>
double gauss5_integral(F&& f, double xl, double xr) {
    const double half = 0.5 * (xr - xl);
    const double mid = 0.5 * (xl + xr);
    double acc = 0.0;
    for (int q = 0; q < 5; ++q) acc += kGauss5Weights[q] * f(mid + half * kGauss5Nodes[q]);
    return half * acc;
}

template <typename F>
double gauss5_average(F&& f, double xl, double xr) {
    return gauss5_integral(f, xl, xr) / (xr - xl);
}

}  // namespace bvc
