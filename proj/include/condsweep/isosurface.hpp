#pragma once

#include <cstddef>

#include "condsweep/grid.hpp"
#include "condsweep/mesh.hpp"

namespace condsweep {

/// Table-driven extraction of the grid's level set with linear edge
/// interpolation. Each lattice edge yields at most one vertex, so the result
/// is welded; triangles wind counter-clockwise seen from outside (the side
/// above the level). A grid without a sign change gives an empty mesh.
TriangleMesh marching_cubes(const ScalarGrid& grid);

/// Number of 6-connected components of the interior voxel set (values below
/// the level).
std::size_t voxel_components(const ScalarGrid& grid);

}  // namespace condsweep
