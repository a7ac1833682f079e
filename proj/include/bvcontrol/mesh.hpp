#pragma once

#include <memory>
#include <utility>
#include <vector>

namespace bvc {

/// Partition 0 = x_0 < x_1 < ... < x_N = 1 of the unit interval.
/// Cell i (0-based) is the open interval (x_i, x_{i+1}).
class Mesh {
public:
    /// Uniform partition into n >= 2 cells.
    static Mesh uniform(int n);

    /// Partition from an explicit node vector; validates ordering and endpoints.
    explicit Mesh(std::vector<double> nodes);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& cell_sizes() const { return sizes_; }
    int cell_count() const { return static_cast<int>(sizes_.size()); }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    double h_max() const { return h_max_; }
    std::pair<double, double> cell(int i) const { return {nodes_[i], nodes_[i + 1]}; }

private:
    std::vector<double> nodes_;
    std::vector<double> sizes_;
    double h_max_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr uniform_mesh(int n);
MeshPtr mesh_from_nodes(std::vector<double> nodes);

/// True when the two meshes refer to the same partition.
bool same_mesh(const MeshPtr& a, const MeshPtr& b);

/// For a fine mesh whose nodes contain every coarse node, map each fine
/// cell to the coarse cell containing it.  Throws when not nested.
std::vector<int> parent_cells(const Mesh& coarse, const Mesh& fine);

}  // namespace bvc
