// Shared fixtures and brute-force oracles for the test suites. Nothing here
// calls into the library code under test beyond its data types.
#pragma once

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "condsweep/errors.hpp"
#include "condsweep/grid.hpp"
#include "condsweep/mesh.hpp"
#include "condsweep/rng.hpp"

#define CHECK_ERROR_CODE(expr, expected)                                   \
    do {                                                                   \
        bool thrown_ = false;                                              \
        try {                                                              \
            (void)(expr);                                                  \
        } catch (const condsweep::Error& e_) {                             \
            thrown_ = true;                                                \
            CHECK_MESSAGE(e_.code() == (expected), e_.what());             \
        }                                                                  \
        CHECK_MESSAGE(thrown_, "expected a condsweep::Error from " #expr); \
    } while (false)

namespace testing {

using condsweep::TriangleMesh;
using condsweep::Vec3;

inline TriangleMesh tetrahedron(const Vec3& offset = Vec3::Zero())
{
    TriangleMesh m;
    m.vertices = {offset + Vec3(0, 0, 0), offset + Vec3(1, 0, 0), offset + Vec3(0, 1, 0), offset + Vec3(0, 0, 1)};
    m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    m.welded = true;
    return m;
}

inline TriangleMesh concat(const TriangleMesh& a, const TriangleMesh& b)
{
    TriangleMesh m = a;
    const auto base = static_cast<std::uint32_t>(a.vertices.size());
    m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
    for (auto t : b.triangles) {
        m.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
    m.welded = a.welded && b.welded;
    return m;
}

/// Unit cube as a 12-triangle soup with 36 independent vertices.
inline TriangleMesh cube_soup()
{
    const Vec3 c[8] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    const int quads[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {2, 3, 7, 6}, {1, 2, 6, 5}, {0, 4, 7, 3}};
    TriangleMesh m;
    for (const auto& q : quads) {
        for (const auto& tri : {std::array<int, 3>{q[0], q[1], q[2]}, std::array<int, 3>{q[0], q[2], q[3]}}) {
            const auto base = static_cast<std::uint32_t>(m.vertices.size());
            for (int v : tri) {
                m.vertices.push_back(c[v]);
            }
            m.triangles.push_back({base, base + 1, base + 2});
        }
    }
    return m;
}

/// Watertight torus grid triangulation, genus 1.
inline TriangleMesh torus(int nu = 12, int nv = 8, double big = 1.0, double small = 0.3)
{
    TriangleMesh m;
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double u = 2.0 * std::numbers::pi * i / nu;
            const double v = 2.0 * std::numbers::pi * j / nv;
            m.vertices.emplace_back((big + small * std::cos(v)) * std::cos(u),
                                    (big + small * std::cos(v)) * std::sin(u), small * std::sin(v));
        }
    }
    auto id = [&](int i, int j) { return static_cast<std::uint32_t>(((i + nu) % nu) * nv + (j + nv) % nv); };
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    m.welded = true;
    return m;
}

inline double signed_volume(const TriangleMesh& m)
{
    double v = 0.0;
    for (const auto& t : m.triangles) {
        v += m.vertices[t[0]].dot(m.vertices[t[1]].cross(m.vertices[t[2]]));
    }
    return v / 6.0;
}

/// Naive breadth-first flood over triangles, comparing every pair for a shared edge.
inline std::size_t flood_fill_components(const TriangleMesh& m)
{
    auto share_edge = [&](std::size_t a, std::size_t b) {
        int common = 0;
        for (auto x : m.triangles[a]) {
            for (auto y : m.triangles[b]) {
                common += x == y ? 1 : 0;
            }
        }
        return common >= 2;
    };
    std::vector<bool> seen(m.triangles.size(), false);
    std::size_t count = 0;
    for (std::size_t s = 0; s < m.triangles.size(); ++s) {
        if (seen[s]) {
            continue;
        }
        ++count;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            const auto t = q.front();
            q.pop();
            for (std::size_t o = 0; o < m.triangles.size(); ++o) {
                if (!seen[o] && share_edge(t, o)) {
                    seen[o] = true;
                    q.push(o);
                }
            }
        }
    }
    return count;
}

/// Components of the graph linking points at distance <= 2 r.
inline std::size_t ball_graph_components(const std::vector<Vec3>& pts, double r)
{
    std::vector<std::size_t> parent(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        parent[i] = i;
    }
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::size_t count = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if ((pts[i] - pts[j]).norm() <= 2.0 * r) {
                const auto a = find(i);
                const auto b = find(j);
                if (a != b) {
                    parent[a] = b;
                    --count;
                }
            }
        }
    }
    return count;
}

/// Smallest |d_ij - 2r| over all pairs.
inline double closest_gap_to_contact(const std::vector<Vec3>& pts, double r)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            best = std::min(best, std::abs((pts[i] - pts[j]).norm() - 2.0 * r));
        }
    }
    return best;
}

/// Trilinear interpolation of a grid sampled at voxel centers.
inline double trilinear(const condsweep::ScalarGrid& g, const Vec3& p)
{
    double f[3];
    int base[3];
    const int n = g.spec.resolution;
    for (int a = 0; a < 3; ++a) {
        const double u = (p[a] - g.spec.lower[a]) / g.spec.edge(a) - 0.5;
        base[a] = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
        f[a] = u - base[a];
    }
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) {
        const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
        const double w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
        acc += w * g.at(base[0] + dx, base[1] + dy, base[2] + dz);
    }
    return acc;
}

/// Fills a grid by evaluating `field` at every voxel center.
inline condsweep::ScalarGrid sample_field(const condsweep::GridSpec& spec, const std::function<double(const Vec3&)>& field)
{
    condsweep::ScalarGrid g;
    g.spec = spec;
    g.values.resize(spec.voxel_count());
    for (int k = 0; k < spec.resolution; ++k) {
        for (int j = 0; j < spec.resolution; ++j) {
            for (int i = 0; i < spec.resolution; ++i) {
                g.values[spec.index(i, j, k)] = static_cast<float>(field(spec.center(i, j, k)));
            }
        }
    }
    return g;
}

/// Cyclic Jacobi eigensolver for a symmetric matrix; eigenvalues descending,
/// eigenvectors as columns.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigen(Eigen::MatrixXd a)
{
    const auto n = a.rows();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off < 1e-300) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) > a(y, y); });
    Eigen::VectorXd values(n);
    Eigen::MatrixXd vectors(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    return {values, vectors};
}

// Property-test generators draw from their own engine so they stay
// independent of the stream under test.
using Gen = std::mt19937_64;

inline double uniform_in(Gen& gen, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }

inline std::size_t index_in(Gen& gen, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
}

inline double normal(Gen& gen) { return std::normal_distribution<double>(0.0, 1.0)(gen); }

/// Uniformly distributed unit vector.
inline Vec3 random_unit(Gen& gen)
{
    for (;;) {
        Vec3 v(normal(gen), normal(gen), normal(gen));
        if (v.norm() > 1e-6) {
            return v.normalized();
        }
    }
}

}  // namespace testing
