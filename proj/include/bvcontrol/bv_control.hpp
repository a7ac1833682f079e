#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "bvcontrol/mesh.hpp"
#include "bvcontrol/mixed_fem.hpp"

namespace bvc {

/// Piecewise-constant function on (0,1) written as a base value plus jumps:
///
///     u(x) = base + sum_{i : x_i < x} c_i,
///
/// with strictly increasing jump locations in the open interval.  Functions
/// of this form are exactly the BV controls the discrete problem produces,
/// and they admit exact L1/L2 distances and an exact BV seminorm.
class JumpControl {
public:
    JumpControl(double base, std::vector<double> locations, std::vector<double> heights);

    static JumpControl constant(double base) { return JumpControl(base, {}, {}); }

    double base() const { return base_; }
    std::span<const double> locations() const { return locations_; }
    std::span<const double> heights() const { return heights_; }
    int jump_count() const { return static_cast<int>(locations_.size()); }

    /// Value at x in [0,1]; at a jump location this is the left limit.
    double evaluate(double x) const;

    /// Total variation: sum of |c_i|.
    double bv_seminorm() const;

    nlohmann::ordered_json to_json() const;
    static JumpControl from_json(const nlohmann::json& j);

private:
    double base_;
    std::vector<double> locations_;
    std::vector<double> heights_;
};

/// Exact integrals of u over each mesh cell (splits cells at jump locations).
std::vector<double> cell_integrals(const JumpControl& u, const Mesh& mesh);

/// L2 projection onto piecewise constants: cell averages.
P0Function upsilon_project(const JumpControl& u, MeshPtr mesh);

/// The piecewise-constant function as a JumpControl (jumps at interior nodes).
JumpControl to_jump_control(const P0Function& f);

/// Nodal antiderivative of a P0 function: Phi(x_i) = sum_{j<=i} p_j h_j,
/// Phi(0) = 0, extended piecewise linearly.
P1Function antiderivative(const P0Function& p);

/// Exact L1 / L2 distances between two jump controls.
double l1_distance(const JumpControl& u, const JumpControl& v);
double l2_distance(const JumpControl& u, const JumpControl& v);

}  // namespace bvc
