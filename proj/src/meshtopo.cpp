#include "condsweep/meshtopo.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <unordered_map>

#include "condsweep/errors.hpp"

namespace condsweep {

namespace {

void require_welded(const TriangleMesh& mesh, const char* what)
{
    if (!mesh.welded) {
        throw Error(ErrorCode::RequiresWeld, std::string(what) + ": mesh must be welded first");
    }
}

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b)
{
    if (a > b) {
        std::swap(a, b);
    }
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

    std::uint32_t find(std::uint32_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::uint32_t> parent_;
};

std::unordered_map<std::uint64_t, std::uint32_t> edge_use_counts(const TriangleMesh& mesh)
{
    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    counts.reserve(mesh.triangles.size() * 2);
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            ++counts[edge_key(t[e], t[(e + 1) % 3])];
        }
    }
    return counts;
}

TriangleMesh compact(const std::vector<Vec3>& vertices, std::vector<Triangle> triangles)
{
    TriangleMesh out;
    out.welded = true;
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (auto& t : triangles) {
        for (auto& v : t) {
            auto [it, inserted] = remap.try_emplace(v, static_cast<std::uint32_t>(out.vertices.size()));
            if (inserted) {
                out.vertices.push_back(vertices[v]);
            }
            v = it->second;
        }
    }
    out.triangles = std::move(triangles);
    return out;
}

}  // namespace

TriangleMesh weld(const TriangleMesh& mesh, double quantum)
{
    if (!(quantum >= 0.0) || !std::isfinite(quantum)) {
        throw Error(ErrorCode::InvalidArgument, "weld: quantum must be a nonnegative finite number");
    }
    using Key = std::array<std::int64_t, 3>;
    std::map<Key, std::uint32_t> slots;
    std::vector<std::uint32_t> canonical(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        Key key;
        for (int a = 0; a < 3; ++a) {
            if (quantum == 0.0) {
                const double c = mesh.vertices[v][a] + 0.0;  // folds -0 into +0
                std::memcpy(&key[a], &c, sizeof(double));
            } else {
                key[a] = std::llround(mesh.vertices[v][a] / quantum);
            }
        }
        canonical[v] = slots.try_emplace(key, static_cast<std::uint32_t>(v)).first->second;
    }
    std::vector<Triangle> kept;
    kept.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        const Triangle m{canonical.at(t[0]), canonical.at(t[1]), canonical.at(t[2])};
        if (m[0] != m[1] && m[1] != m[2] && m[0] != m[2]) {
            kept.push_back(m);
        }
    }
    return compact(mesh.vertices, std::move(kept));
}

std::vector<std::uint32_t> component_labels(const TriangleMesh& mesh)
{
    require_welded(mesh, "connected_components");
    const std::size_t f = mesh.triangles.size();
    DisjointSets sets(f);
    std::unordered_map<std::uint64_t, std::uint32_t> first_user;
    first_user.reserve(2 * f);
    for (std::uint32_t t = 0; t < f; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            auto [it, inserted] = first_user.try_emplace(edge_key(tri[e], tri[(e + 1) % 3]), t);
            if (!inserted) {
                sets.unite(it->second, t);
            }
        }
    }
    std::vector<std::uint32_t> labels(f);
    std::unordered_map<std::uint32_t, std::uint32_t> numbering;
    for (std::uint32_t t = 0; t < f; ++t) {
        labels[t] = numbering.try_emplace(sets.find(t), static_cast<std::uint32_t>(numbering.size())).first->second;
    }
    return labels;
}

std::size_t connected_components(const TriangleMesh& mesh)
{
    const auto labels = component_labels(mesh);
    std::uint32_t count = 0;
    for (auto l : labels) {
        count = std::max(count, l + 1);
    }
    return count;
}

std::vector<TriangleMesh> split(const TriangleMesh& mesh)
{
    const auto labels = component_labels(mesh);
    std::vector<std::vector<Triangle>> groups;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (labels[t] >= groups.size()) {
            groups.resize(labels[t] + 1);
        }
        groups[labels[t]].push_back(mesh.triangles[t]);
    }
    std::vector<TriangleMesh> parts;
    parts.reserve(groups.size());
    for (auto& g : groups) {
        parts.push_back(compact(mesh.vertices, std::move(g)));
    }
    return parts;
}

bool is_watertight(const TriangleMesh& mesh)
{
    require_welded(mesh, "is_watertight");
    for (const auto& [edge, uses] : edge_use_counts(mesh)) {
        if (uses != 2) {
            return false;
        }
    }
    return true;
}

long long euler_characteristic(const TriangleMesh& mesh)
{
    require_welded(mesh, "euler_characteristic");
    std::vector<unsigned char> used(mesh.vertices.size(), 0);
    long long v = 0;
    for (const auto& t : mesh.triangles) {
        for (auto i : t) {
            if (!used.at(i)) {
                used[i] = 1;
                ++v;
            }
        }
    }
    const auto e = static_cast<long long>(edge_use_counts(mesh).size());
    return v - e + static_cast<long long>(mesh.triangles.size());
}

double surface_area(const TriangleMesh& mesh)
{
    double area = 0.0;
    for (const auto& t : mesh.triangles) {
        const Vec3& a = mesh.vertices.at(t[0]);
        area += 0.5 * (mesh.vertices.at(t[1]) - a).cross(mesh.vertices.at(t[2]) - a).norm();
    }
    return area;
}

TopologySummary summarize(const TriangleMesh& mesh, std::size_t min_faces)
{
    TopologySummary s;
    s.vertices = mesh.vertices.size();
    s.faces = mesh.triangles.size();
    s.area = surface_area(mesh);
    s.euler = euler_characteristic(mesh);
    for (const auto& part : split(mesh)) {
        if (part.triangles.size() < min_faces) {
            continue;
        }
        ++s.components;
        if (is_watertight(part)) {
            ++s.watertight_components;
        }
    }
    return s;
}

}  // namespace condsweep
