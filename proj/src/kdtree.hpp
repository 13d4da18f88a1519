#pragma once

#include <cstddef>
#include <vector>

#include "condsweep/mesh.hpp"

namespace condsweep::detail {

/// Static 3D kd-tree answering exact nearest-point distance queries.
class KdTree {
public:
    explicit KdTree(std::vector<Vec3> points);

    /// Squared distance from q to the closest stored point.
    double nearest_squared(const Vec3& q) const;

private:
    struct Node {
        std::size_t begin;
        std::size_t end;
        int axis;
        int left = -1;
        int right = -1;
        Vec3 lo;
        Vec3 hi;
    };

    int build(std::size_t begin, std::size_t end);
    void search(int node, const Vec3& q, double& best) const;

    std::vector<Vec3> points_;
    std::vector<Node> nodes_;
};

}  // namespace condsweep::detail
