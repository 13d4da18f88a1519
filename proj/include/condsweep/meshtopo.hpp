#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "condsweep/mesh.hpp"

namespace condsweep {

/// Merges vertices whose coordinates agree after snapping to multiples of
/// `quantum` (0 merges bit-identical coordinates only), drops triangles that
/// collapse and any vertex no triangle references. Vertex order follows first
/// appearance.
TriangleMesh weld(const TriangleMesh& mesh, double quantum);

/// Triangles are adjacent iff they share an edge (both endpoints).
/// Throws RequiresWeld on an unwelded mesh.
std::size_t connected_components(const TriangleMesh& mesh);

/// Component label per triangle, numbered in order of each component's first triangle.
std::vector<std::uint32_t> component_labels(const TriangleMesh& mesh);

/// One compacted mesh per component, in label order.
std::vector<TriangleMesh> split(const TriangleMesh& mesh);

/// Every undirected edge is used by exactly two triangles.
bool is_watertight(const TriangleMesh& mesh);

/// V - E + F, with V counting referenced vertices and E unique undirected edges.
long long euler_characteristic(const TriangleMesh& mesh);

double surface_area(const TriangleMesh& mesh);

struct TopologySummary {
    std::size_t components = 0;
    std::size_t watertight_components = 0;
    long long euler = 0;
    double area = 0.0;
    std::size_t vertices = 0;
    std::size_t faces = 0;
};

/// Counts only components with at least `min_faces` triangles; the other
/// fields describe the whole mesh.
TopologySummary summarize(const TriangleMesh& mesh, std::size_t min_faces = 0);

}  // namespace condsweep
