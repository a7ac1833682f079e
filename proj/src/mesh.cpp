#include "bvcontrol/mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace bvc {

Mesh Mesh::uniform(int n) {
    if (n < 2) throw std::invalid_argument("Mesh::uniform: need at least 2 cells");
    std::vector<double> nodes(n + 1);
    for (int i = 0; i <= n; ++i) nodes[i] = static_cast<double>(i) / n;
    nodes[n] = 1.0;
    return Mesh(std::move(nodes));
}

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("Mesh: need at least 2 nodes");
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
        throw std::invalid_argument("Mesh: endpoints must be 0 and 1");
    sizes_.resize(nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        const double h = nodes_[i + 1] - nodes_[i];
        if (!(h > 0.0)) throw std::invalid_argument("Mesh: nodes must be strictly increasing");
        sizes_[i] = h;
        h_max_ = std::max(h_max_, h);
    }
}

MeshPtr uniform_mesh(int n) { return std::make_shared<const Mesh>(Mesh::uniform(n)); }

MeshPtr mesh_from_nodes(std::vector<double> nodes) {
    return std::make_shared<const Mesh>(Mesh(std::move(nodes)));
}

bool same_mesh(const MeshPtr& a, const MeshPtr& b) {
    return a == b || (a && b && a->nodes() == b->nodes());
}

std::vector<int> parent_cells(const Mesh& coarse, const Mesh& fine) {
    const auto& cn = coarse.nodes();
    const auto& fn = fine.nodes();
    std::vector<int> parent(fine.cell_count());
    std::size_t ci = 0;  // coarse node index such that cn[ci] <= current fine node
    for (int f = 0; f < fine.cell_count(); ++f) {
        if (fn[f] == cn[ci + 1]) ++ci;          // crossed into the next coarse cell
        else if (fn[f] > cn[ci + 1])
            throw std::invalid_argument("parent_cells: meshes are not nested");
        parent[f] = static_cast<int>(ci);
    }
    // every coarse node must appear among the fine nodes
    for (std::size_t i = 0; i < cn.size(); ++i)
        if (!std::binary_search(fn.begin(), fn.end(), cn[i]))
            throw std::invalid_argument("parent_cells: meshes are not nested");
    return parent;
}

}  // namespace bvc
