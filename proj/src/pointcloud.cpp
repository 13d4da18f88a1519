#include "condsweep/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "condsweep/errors.hpp"

namespace condsweep {

namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kSmallAngle = 1e-6;
constexpr int kMaxRedraws = 16;

bool is_unit(const Vec3& v) { return std::abs(v.norm() - 1.0) <= kUnitTolerance; }

void require_unit_cloud(const PointCloud& cloud, const char* what)
{
    if (!cloud.on_unit_sphere) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + ": cloud is not flagged as on the unit sphere");
    }
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!is_unit(cloud.points[i])) {
            throw Error(ErrorCode::InvalidArgument,
                        std::string(what) + ": point " + std::to_string(i) + " is not unit length");
        }
    }
}

}  // namespace

PointCloud fibonacci_sphere(std::size_t n)
{
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "fibonacci_sphere: n must be positive");
    }
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double nd = static_cast<double>(n);
    PointCloud cloud;
    cloud.on_unit_sphere = true;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double id = static_cast<double>(i);
        const double z = 1.0 - (2.0 * id + 1.0) / nd;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double theta = id * golden_angle;
        cloud.points.emplace_back(r * std::cos(theta), r * std::sin(theta), z);
    }
    return cloud;
}

PointCloud perturb_on_sphere(const PointCloud& cloud, double sigma, SeededRng& rng)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorCode::InvalidArgument, "perturb_on_sphere: sigma must be a nonnegative finite number");
    }
    require_unit_cloud(cloud, "perturb_on_sphere");
    if (sigma == 0.0) {
        return cloud;
    }
    PointCloud out;
    out.on_unit_sphere = true;
    out.points.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& a = cloud.points[i];
        bool placed = false;
        for (int attempt = 0; attempt <= kMaxRedraws && !placed; ++attempt) {
            const double dx = rng.gaussian() * sigma;
            const double dy = rng.gaussian() * sigma;
            const double dz = rng.gaussian() * sigma;
            const Vec3 moved = a + Vec3(dx, dy, dz);
            const double norm = moved.norm();
            if (norm >= 1e-12) {
                out.points.push_back(moved / norm);
                placed = true;
            }
        }
        if (!placed) {
            throw Error(ErrorCode::InvalidArgument,
                        "perturb_on_sphere: could not renormalize point " + std::to_string(i));
        }
    }
    return out;
}

Vec3 slerp_point(const Vec3& a, const Vec3& b, double alpha)
{
    if (!is_unit(a) || !is_unit(b)) {
        throw Error(ErrorCode::InvalidArgument, "slerp_point: endpoints must be unit vectors");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "slerp_point: alpha must lie in [0, 1]");
    }
    if (alpha == 0.0 || a == b) {
        return a;
    }
    if (alpha == 1.0) {
        return b;
    }
    // atan2 keeps the angle accurate near 0 and pi where acos loses digits.
    const double cosine = std::clamp(a.dot(b), -1.0, 1.0);
    const double omega = std::atan2(a.cross(b).norm(), cosine);
    if (omega > std::numbers::pi - kSmallAngle) {
        throw Error(ErrorCode::AmbiguousSlerp, "slerp_point: endpoints are nearly antipodal");
    }
    Vec3 out;
    if (omega < kSmallAngle) {
        out = (1.0 - alpha) * a + alpha * b;
    } else {
        const double s = std::sin(omega);
        out = (std::sin((1.0 - alpha) * omega) / s) * a + (std::sin(alpha * omega) / s) * b;
    }
    return out / out.norm();
}

PointCloud slerp_cloud(const PointCloud& a, const PointCloud& b, double alpha)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::InvalidArgument, "slerp_cloud: point counts differ");
    }
    require_unit_cloud(a, "slerp_cloud");
    require_unit_cloud(b, "slerp_cloud");
    PointCloud out;
    out.on_unit_sphere = true;
    out.points.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        try {
            out.points.push_back(slerp_point(a.points[i], b.points[i], alpha));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::AmbiguousSlerp) {
                throw Error(ErrorCode::AmbiguousSlerp,
                            "slerp_cloud: point " + std::to_string(i) + " endpoints are nearly antipodal");
            }
            throw;
        }
    }
    return out;
}

PointCloud sample_surface(const TriangleMesh& mesh, std::size_t n, SeededRng& rng)
{
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "sample_surface: n must be positive");
    }
    std::vector<double> cumulative;
    cumulative.reserve(mesh.triangles.size());
    double total = 0.0;
    for (const auto& t : mesh.triangles) {
        const Vec3& p0 = mesh.vertices.at(t[0]);
        const Vec3& p1 = mesh.vertices.at(t[1]);
        const Vec3& p2 = mesh.vertices.at(t[2]);
        total += 0.5 * (p1 - p0).cross(p2 - p0).norm();
        cumulative.push_back(total);
    }
    if (!(total > 0.0)) {
        throw Error(ErrorCode::DegenerateMesh, "sample_surface: mesh has zero surface area");
    }
    PointCloud out;
    out.points.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double pick = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
        if (it == cumulative.end()) {
            --it;
        }
        const auto& t = mesh.triangles[static_cast<std::size_t>(it - cumulative.begin())];
        const double r1 = std::sqrt(rng.uniform());
        const double r2 = rng.uniform();
        const Vec3& p0 = mesh.vertices[t[0]];
        const Vec3& p1 = mesh.vertices[t[1]];
        const Vec3& p2 = mesh.vertices[t[2]];
        out.points.push_back((1.0 - r1) * p0 + r1 * (1.0 - r2) * p1 + r1 * r2 * p2);
    }
    return out;
}

PointCloud scale_to_box(const PointCloud& cloud, double half_extent)
{
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "scale_to_box: cloud is empty");
    }
    if (!(half_extent > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "scale_to_box: half_extent must be positive");
    }
    Vec3 lo = cloud.points.front();
    Vec3 hi = lo;
    for (const auto& p : cloud.points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 center = 0.5 * (lo + hi);
    const double max_half = 0.5 * (hi - lo).maxCoeff();
    if (!(max_half > 0.0)) {
        throw Error(ErrorCode::DegenerateCloud, "scale_to_box: cloud has zero extent");
    }
    const double scale = half_extent / max_half;
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) {
        out.points.push_back((p - center) * scale);
    }
    return out;
}

}  // namespace condsweep
