#include "condsweep/bracket.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "condsweep/errors.hpp"
#include "condsweep/meshtopo.hpp"
#include "condsweep/rng.hpp"

namespace condsweep {

namespace {

using Vec2 = Eigen::Vector2d;
using Map2 = std::function<Vec3(const Vec2&)>;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); }

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidParams, "synth_bracket: " + what); }

// Emits a triangle oriented so its normal has a positive component along `outward`.
void emit(TriangleMesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& outward)
{
    const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
    const bool flip = (b - a).cross(c - a).dot(outward) < 0.0;
    mesh.vertices.push_back(a);
    mesh.vertices.push_back(flip ? c : b);
    mesh.vertices.push_back(flip ? b : c);
    mesh.triangles.push_back({base, base + 1, base + 2});
}

std::vector<Vec2> circle(const Vec2& center, double r)
{
    std::vector<Vec2> pts(kBracketHoleSegments);
    for (int m = 0; m < kBracketHoleSegments; ++m) {
        const double phi = 2.0 * std::numbers::pi * m / kBracketHoleSegments;
        pts[static_cast<std::size_t>(m)] = center + r * Vec2(std::cos(phi), std::sin(phi));
    }
    return pts;
}

// Rectangle [lo, hi] minus the polygonal hole. Each rectangle corner fans to the
// quarter of the hole facing it, and one triangle per side bridges neighbouring
// corners, so the outer boundary keeps exactly its four corner vertices.
void face_with_hole(TriangleMesh& mesh, const Vec2& lo, const Vec2& hi, const std::vector<Vec2>& hole,
                    const Map2& to3, const Vec3& outward)
{
    const Vec2 corners[4] = {{hi.x(), hi.y()}, {lo.x(), hi.y()}, {lo.x(), lo.y()}, {hi.x(), lo.y()}};
    const int quarter = kBracketHoleSegments / 4;
    const double scale = (hi - lo).squaredNorm();
    auto add = [&](const Vec2& a, const Vec2& b, const Vec2& c) {
        if (signed_area2(a, b, c) <= 1e-12 * scale) {
            invalid("hole does not fit inside its slab face");
        }
        emit(mesh, to3(a), to3(b), to3(c), outward);
    };
    for (int k = 0; k < 4; ++k) {
        for (int m = k * quarter; m < (k + 1) * quarter; ++m) {
            const auto next = static_cast<std::size_t>((m + 1) % kBracketHoleSegments);
            add(hole[static_cast<std::size_t>(m)], corners[k], hole[next]);
        }
        const auto split = static_cast<std::size_t>(((k + 1) * quarter) % kBracketHoleSegments);
        add(hole[split], corners[k], corners[(k + 1) % 4]);
    }
}

// Cylinder wall joining the same hole drawn on two parallel faces.
void hole_wall(TriangleMesh& mesh, const std::vector<Vec2>& hole, const Vec2& center, const Map2& near,
               const Map2& far)
{
    const auto n = hole.size();
    for (std::size_t m = 0; m < n; ++m) {
        const Vec2& p = hole[m];
        const Vec2& q = hole[(m + 1) % n];
        const Vec2 mid = 0.5 * (p + q) - center;
        // Outward from the solid points into the hole, toward its axis.
        const Vec3 inward = near(center + mid) - near(center + 2.0 * mid);
        emit(mesh, near(p), near(q), far(q), inward);
        emit(mesh, near(p), far(q), far(p), inward);
    }
}

// Ear clipping of a simple counterclockwise polygon.
std::vector<std::array<std::size_t, 3>> ear_clip(const std::vector<Vec2>& poly)
{
    std::vector<std::size_t> idx(poly.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    std::vector<std::array<std::size_t, 3>> tris;
    while (idx.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const std::size_t a = idx[(i + idx.size() - 1) % idx.size()];
            const std::size_t b = idx[i];
            const std::size_t c = idx[(i + 1) % idx.size()];
            if (signed_area2(poly[a], poly[b], poly[c]) <= 0.0) {
                continue;
            }
            bool blocked = false;
            for (std::size_t j : idx) {
                if (j == a || j == b || j == c) {
                    continue;
                }
                const Vec2& p = poly[j];
                if (signed_area2(poly[a], poly[b], p) >= 0.0 && signed_area2(poly[b], poly[c], p) >= 0.0 &&
                    signed_area2(poly[c], poly[a], p) >= 0.0) {
                    blocked = true;
                    break;
                }
            }
            if (!blocked) {
                tris.push_back({a, b, c});
                idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
        }
        if (!clipped) {
            invalid("profile polygon is not simple");
        }
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

double signed_volume(const TriangleMesh& mesh)
{
    double v = 0.0;
    for (const auto& t : mesh.triangles) {
        v += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
    }
    return v / 6.0;
}

}  // namespace

BracketDims bracket_dims(std::uint64_t seed)
{
    SeededRng rng(seed);
    BracketDims d{};
    d.length = 1.0 + 0.2 * rng.uniform();
    d.height = 0.9 + 0.2 * rng.uniform();
    d.width = 0.6 + 0.1 * rng.uniform();
    return d;
}

TriangleMesh synth_bracket(const BracketParams& params)
{
    const double r = params.hole_radius;
    const double f = params.fillet;
    const double t = params.thickness;
    if (!(r > 0.0) || !(f > 0.0) || !(t > 0.0) || !std::isfinite(r + f + t)) {
        invalid("hole_radius, fillet and thickness must be positive");
    }
    const BracketDims dims = bracket_dims(params.seed);
    const double len = dims.length;
    const double hgt = dims.height;
    const double wid = dims.width;
    const double flat = t + f;  // where the flat faces inside the corner start
    if (flat >= len || flat >= hgt) {
        invalid("thickness plus fillet exceeds the slab length");
    }

    // Counterclockwise profile in (x, z). Arc endpoints are set exactly so they
    // coincide with the neighbouring flat faces.
    std::vector<Vec2> profile = {{0.0, 0.0}, {len, 0.0}, {len, t}, {flat, t}};
    for (int s = 1; s < kBracketFilletSegments; ++s) {
        const double phi = 1.5 * std::numbers::pi - 0.5 * std::numbers::pi * s / kBracketFilletSegments;
        profile.emplace_back(flat + f * std::cos(phi), flat + f * std::sin(phi));
    }
    profile.emplace_back(t, flat);
    profile.emplace_back(t, hgt);
    profile.emplace_back(0.0, hgt);

    TriangleMesh mesh;
    for (const auto& tri : ear_clip(profile)) {
        for (double y : {0.0, wid}) {
            auto at = [&](std::size_t i) { return Vec3(profile[i].x(), y, profile[i].y()); };
            emit(mesh, at(tri[0]), at(tri[1]), at(tri[2]), Vec3(0.0, y == 0.0 ? -1.0 : 1.0, 0.0));
        }
    }

    // Profile edges with a hole: bottom (0), top of base (2), inner upright
    // face (fillet end), outer upright face (last).
    const std::size_t inner_edge = profile.size() - 3;
    const std::size_t outer_edge = profile.size() - 1;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (i == 0 || i == 2 || i == inner_edge || i == outer_edge) {
            continue;
        }
        const Vec2& p = profile[i];
        const Vec2& q = profile[(i + 1) % profile.size()];
        const Vec3 outward((q - p).y(), 0.0, -(q - p).x());
        const Vec3 p0(p.x(), 0.0, p.y()), p1(p.x(), wid, p.y());
        const Vec3 q0(q.x(), 0.0, q.y()), q1(q.x(), wid, q.y());
        emit(mesh, p0, q0, q1, outward);
        emit(mesh, p0, q1, p1, outward);
    }

    // Base hole runs along z, centered on the flat top face.
    const Vec2 base_center(0.5 * (flat + len), 0.5 * wid);
    if (base_center.x() - r <= flat || base_center.x() + r >= len || 2.0 * r >= wid) {
        invalid("hole larger than the base slab");
    }
    const auto base_hole = circle(base_center, r);
    const Map2 at_bottom = [](const Vec2& a) { return Vec3(a.x(), a.y(), 0.0); };
    const Map2 at_top = [t](const Vec2& a) { return Vec3(a.x(), a.y(), t); };
    face_with_hole(mesh, {0.0, 0.0}, {len, wid}, base_hole, at_bottom, Vec3(0, 0, -1));
    face_with_hole(mesh, {flat, 0.0}, {len, wid}, base_hole, at_top, Vec3(0, 0, 1));
    hole_wall(mesh, base_hole, base_center, at_bottom, at_top);

    // Upright hole runs along x, in (y, z) coordinates.
    const Vec2 up_center(0.5 * wid, 0.5 * (flat + hgt));
    if (up_center.y() - r <= flat || up_center.y() + r >= hgt || 2.0 * r >= wid) {
        invalid("hole larger than the upright slab");
    }
    const auto up_hole = circle(up_center, r);
    const Map2 at_outer = [](const Vec2& a) { return Vec3(0.0, a.x(), a.y()); };
    const Map2 at_inner = [t](const Vec2& a) { return Vec3(t, a.x(), a.y()); };
    face_with_hole(mesh, {0.0, 0.0}, {wid, hgt}, up_hole, at_outer, Vec3(-1, 0, 0));
    face_with_hole(mesh, {0.0, flat}, {wid, hgt}, up_hole, at_inner, Vec3(1, 0, 0));
    hole_wall(mesh, up_hole, up_center, at_outer, at_inner);

    TriangleMesh out = weld(mesh, 0.0);
    if (!(signed_volume(out) > 0.0)) {
        invalid("construction produced an inverted solid");
    }
    return out;
}

std::vector<BracketParams> bracket_family(std::size_t count, std::uint64_t seed)
{
    std::vector<BracketParams> family;
    family.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SeededRng rng(mix_seed(seed, i));
        BracketParams p;
        p.thickness = 0.12 + 0.08 * rng.uniform();
        p.hole_radius = 0.13 + 0.09 * rng.uniform();
        p.fillet = 0.03 + 0.12 * rng.uniform();
        p.seed = rng.next_u64();
        family.push_back(p);
    }
    return family;
}

}  // namespace condsweep
