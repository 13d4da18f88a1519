#include "condsweep/isosurface.hpp"

#include <cstdint>
#include <vector>

namespace condsweep {

namespace {

#include "mc_table.inc"

// Corner offsets (x, y, z) in the table's numbering.
constexpr int kCorner[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}, {0, 1, 0}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1},
};

constexpr int kEdgeCorners[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

}  // namespace

TriangleMesh marching_cubes(const ScalarGrid& grid)
{
    const GridSpec& spec = grid.spec;
    const int g = spec.resolution;
    const float level = static_cast<float>(grid.level);
    TriangleMesh mesh;
    mesh.welded = true;
    if (g < 2) {
        return mesh;
    }

    // One slot per lattice edge: 3 * (index of the lower endpoint) + axis.
    std::vector<std::int32_t> edge_vertex(3 * spec.voxel_count(), -1);

    auto vertex_on_edge = [&](int i, int j, int k, int axis) -> std::uint32_t {
        const std::size_t base = spec.index(i, j, k);
        std::int32_t& slot = edge_vertex[3 * base + static_cast<std::size_t>(axis)];
        if (slot < 0) {
            const int di = axis == 0, dj = axis == 1, dk = axis == 2;
            const double v0 = grid.values[base];
            const double v1 = grid.values[spec.index(i + di, j + dj, k + dk)];
            const double t = (grid.level - v0) / (v1 - v0);
            const Vec3 p0 = spec.center(i, j, k);
            const Vec3 p1 = spec.center(i + di, j + dj, k + dk);
            slot = static_cast<std::int32_t>(mesh.vertices.size());
            mesh.vertices.push_back(p0 + t * (p1 - p0));
        }
        return static_cast<std::uint32_t>(slot);
    };

    for (int k = 0; k + 1 < g; ++k) {
        for (int j = 0; j + 1 < g; ++j) {
            for (int i = 0; i + 1 < g; ++i) {
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    if (grid.at(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]) < level) {
                        cube |= 1 << c;
                    }
                }
                if (cube == 0 || cube == 255) {
                    continue;
                }
                std::uint32_t ids[12];
                bool have[12] = {};
                const int* row = kTriTable[cube];
                for (int t = 0; row[t] != -1; ++t) {
                    const int e = row[t];
                    if (!have[e]) {
                        const int* a = kCorner[kEdgeCorners[e][0]];
                        const int* b = kCorner[kEdgeCorners[e][1]];
                        const int axis = a[0] != b[0] ? 0 : (a[1] != b[1] ? 1 : 2);
                        ids[e] = vertex_on_edge(i + std::min(a[0], b[0]), j + std::min(a[1], b[1]),
                                                k + std::min(a[2], b[2]), axis);
                        have[e] = true;
                    }
                }
                for (int t = 0; row[t] != -1; t += 3) {
                    mesh.triangles.push_back({ids[row[t]], ids[row[t + 1]], ids[row[t + 2]]});
                }
            }
        }
    }
    return mesh;
}

std::size_t voxel_components(const ScalarGrid& grid)
{
    const GridSpec& spec = grid.spec;
    const int g = spec.resolution;
    const std::size_t gs = static_cast<std::size_t>(g);
    const float level = static_cast<float>(grid.level);
    std::vector<unsigned char> seen(grid.values.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t components = 0;

    for (std::size_t start = 0; start < grid.values.size(); ++start) {
        if (seen[start] || !(grid.values[start] < level)) {
            continue;
        }
        ++components;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            const int i = static_cast<int>(v % gs);
            const int j = static_cast<int>((v / gs) % gs);
            const int k = static_cast<int>(v / (gs * gs));
            const int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                                  {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
            for (const auto& n : nb) {
                if (n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] >= g || n[1] >= g || n[2] >= g) {
                    continue;
                }
                const std::size_t w = spec.index(n[0], n[1], n[2]);
                if (!seen[w] && grid.values[w] < level) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
    }
    return components;
}

}  // namespace condsweep
