#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Geometry>

namespace condsweep {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle soup. `welded` records that coincident vertices have been
/// merged, which the topology queries require.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    bool welded = false;

    bool empty() const noexcept { return triangles.empty(); }
};

}  // namespace condsweep
