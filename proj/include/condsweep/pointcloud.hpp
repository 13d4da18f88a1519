#pragma once

#include <cstddef>
#include <vector>

#include "condsweep/mesh.hpp"
#include "condsweep/rng.hpp"

namespace condsweep {

/// Ordered 3D points. When `on_unit_sphere` is set every point has unit norm.
struct PointCloud {
    std::vector<Vec3> points;
    bool on_unit_sphere = false;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
};

/// Golden-spiral lattice: z_i = 1 - (2i+1)/n, azimuth i * pi * (3 - sqrt 5).
PointCloud fibonacci_sphere(std::size_t n);

/// B_i = (A_i + d_i) / |A_i + d_i| with d_i ~ N(0, sigma^2 I), three gaussian
/// draws per point in x, y, z order. A draw whose sum has norm below 1e-12 is
/// redrawn, at most 16 times. sigma = 0 returns the input unchanged.
PointCloud perturb_on_sphere(const PointCloud& cloud, double sigma, SeededRng& rng);

/// Great-circle interpolation between unit vectors. Falls back to normalized
/// lerp for angles below 1e-6; throws AmbiguousSlerp within 1e-6 of antipodal.
Vec3 slerp_point(const Vec3& a, const Vec3& b, double alpha);

PointCloud slerp_cloud(const PointCloud& a, const PointCloud& b, double alpha);

/// Area-weighted triangle choice followed by uniform barycentric sampling.
/// Each sample consumes three uniforms: triangle choice, then two barycentric.
PointCloud sample_surface(const TriangleMesh& mesh, std::size_t n, SeededRng& rng);

/// Uniform scale + translation moving the bounding-box center to the origin
/// and the largest half-dimension to `half_extent`.
PointCloud scale_to_box(const PointCloud& cloud, double half_extent);

}  // namespace condsweep
