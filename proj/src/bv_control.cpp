#include "bvcontrol/bv_control.hpp"

#include <cmath>
#include <stdexcept>

namespace bvc {

JumpControl::JumpControl(double base, std::vector<double> locations, std::vector<double> heights)
    : base_(base), locations_(std::move(locations)), heights_(std::move(heights)) {
    if (locations_.size() != heights_.size())
        throw std::invalid_argument("JumpControl: locations/heights length mismatch");
    if (!std::isfinite(base_)) throw std::invalid_argument("JumpControl: base not finite");
    for (std::size_t i = 0; i < locations_.size(); ++i) {
        if (!(locations_[i] > 0.0 && locations_[i] < 1.0))
            throw std::invalid_argument("JumpControl: jump locations must lie in (0,1)");
        if (i > 0 && !(locations_[i] > locations_[i - 1]))
            throw std::invalid_argument("JumpControl: jump locations must be strictly increasing");
        if (!std::isfinite(heights_[i]))
            throw std::invalid_argument("JumpControl: jump height not finite");
    }
}

double JumpControl::evaluate(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("JumpControl: point outside [0,1]");
    double v = base_;
    for (std::size_t i = 0; i < locations_.size() && locations_[i] < x; ++i) v += heights_[i];
    return v;
}

double JumpControl::bv_seminorm() const {
    double s = 0.0;
    for (double c : heights_) s += std::abs(c);
    return s;
}

nlohmann::ordered_json JumpControl::to_json() const {
    nlohmann::ordered_json j;
    j["base"] = base_;
    j["jumps"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < locations_.size(); ++i)
        j["jumps"].push_back({{"x", locations_[i]}, {"c", heights_[i]}});
    return j;
}

JumpControl JumpControl::from_json(const nlohmann::json& j) {
    std::vector<double> locs, heights;
    if (j.contains("jumps")) {
        for (const auto& e : j.at("jumps")) {
            locs.push_back(e.at("x").get<double>());
            heights.push_back(e.at("c").get<double>());
        }
    }
    return JumpControl(j.at("base").get<double>(), std::move(locs), std::move(heights));
}

std::vector<double> cell_integrals(const JumpControl& u, const Mesh& mesh) {
    const auto locs = u.locations();
    const auto heights = u.heights();
    const std::size_t m = locs.size();
    std::vector<double> out(mesh.cell_count());
    std::size_t k = 0;
    double v = u.base();
    for (int i = 0; i < mesh.cell_count(); ++i) {
        const auto [xl, xr] = mesh.cell(i);
        // a jump sitting exactly on the left node belongs to this cell entirely
        while (k < m && locs[k] <= xl) v += heights[k++];
        double pos = xl, acc = 0.0;
        while (k < m && locs[k] < xr) {
            acc += v * (locs[k] - pos);
            pos = locs[k];
            v += heights[k++];
        }
        acc += v * (xr - pos);
        out[i] = acc;
    }
    return out;
}

P0Function upsilon_project(const JumpControl& u, MeshPtr mesh) {
    if (!mesh) throw std::invalid_argument("upsilon_project: null mesh");
    std::vector<double> vals = cell_integrals(u, *mesh);
    const auto& h = mesh->cell_sizes();
    for (int i = 0; i < mesh->cell_count(); ++i) vals[i] /= h[i];
    return P0Function(std::move(mesh), std::move(vals));
}

JumpControl to_jump_control(const P0Function& f) {
    const auto v = f.values();
    const auto& nodes = f.mesh()->nodes();
    std::vector<double> locs, heights;
    for (int i = 1; i < f.size(); ++i) {
        const double c = v[i] - v[i - 1];
        if (c != 0.0) {
            locs.push_back(nodes[i]);
            heights.push_back(c);
        }
    }
    return JumpControl(v.empty() ? 0.0 : v[0], std::move(locs), std::move(heights));
}

P1Function antiderivative(const P0Function& p) {
    const auto& h = p.mesh()->cell_sizes();
    std::vector<double> phi(p.size() + 1);
    phi[0] = 0.0;
    for (int i = 0; i < p.size(); ++i) phi[i + 1] = phi[i] + p.value(i) * h[i];
    return P1Function(p.mesh(), std::move(phi));
}

namespace {

template <typename Accum>
void sweep_difference(const JumpControl& u, const JumpControl& v, Accum&& accum) {
    const auto ul = u.locations(), uh = u.heights();
    const auto vl = v.locations(), vh = v.heights();
    std::size_t iu = 0, iv = 0;
    double pos = 0.0, du = u.base(), dv = v.base();
    while (true) {
        double next = 1.0;
        if (iu < ul.size()) next = std::min(next, ul[iu]);
        if (iv < vl.size()) next = std::min(next, vl[iv]);
        if (next > pos) accum(next - pos, du - dv);
        if (next >= 1.0) break;
        while (iu < ul.size() && ul[iu] == next) du += uh[iu++];
        while (iv < vl.size() && vl[iv] == next) dv += vh[iv++];
        pos = next;
    }
}

}  // namespace

double l1_distance(const JumpControl& u, const JumpControl& v) {
    double acc = 0.0;
    sweep_difference(u, v, [&acc](double len, double diff) { acc += len * std::abs(diff); });
    return acc;
}

double l2_distance(const JumpControl& u, const JumpControl& v) {
    double acc = 0.0;
    sweep_difference(u, v, [&acc](double len, double diff) { acc += len * diff * diff; });
    return std::sqrt(acc);
}

}  // namespace bvc
