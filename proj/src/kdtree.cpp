#include "kdtree.hpp"

#include <algorithm>
#include <limits>

namespace condsweep::detail {

namespace {
constexpr std::size_t kLeafSize = 8;
}

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points))
{
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        build(0, points_.size());
    }
}

int KdTree::build(std::size_t begin, std::size_t end)
{
    Node node{begin, end, 0, -1, -1, points_[begin], points_[begin]};
    for (std::size_t i = begin; i < end; ++i) {
        node.lo = node.lo.cwiseMin(points_[i]);
        node.hi = node.hi.cwiseMax(points_[i]);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) {
        return id;
    }
    int axis = 0;
    (node.hi - node.lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(points_.begin() + static_cast<std::ptrdiff_t>(begin),
                     points_.begin() + static_cast<std::ptrdiff_t>(mid),
                     points_.begin() + static_cast<std::ptrdiff_t>(end),
                     [axis](const Vec3& a, const Vec3& b) { return a[axis] < b[axis]; });
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].axis = axis;
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
}

double KdTree::nearest_squared(const Vec3& q) const
{
    double best = std::numeric_limits<double>::infinity();
    if (!nodes_.empty()) {
        search(0, q, best);
    }
    return best;
}

void KdTree::search(int id, const Vec3& q, double& best) const
{
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    const Vec3 gap = (node.lo - q).cwiseMax(q - node.hi).cwiseMax(0.0);
    if (gap.squaredNorm() >= best) {
        return;
    }
    if (node.left < 0) {
        for (std::size_t i = node.begin; i < node.end; ++i) {
            best = std::min(best, (points_[i] - q).squaredNorm());
        }
        return;
    }
    // Visit the child on q's side first so the bound tightens early.
    const Node& left = nodes_[static_cast<std::size_t>(node.left)];
    const bool left_first = q[node.axis] <= left.hi[node.axis];
    search(left_first ? node.left : node.right, q, best);
    search(left_first ? node.right : node.left, q, best);
}

}  // namespace condsweep::detail
