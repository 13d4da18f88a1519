#pragma once

#include <cstddef>
#include <vector>

#include "condsweep/mesh.hpp"

namespace condsweep {

/// Axis-aligned lattice of G^3 sample points. Samples sit at voxel centers:
/// sample (i, j, k) is at lower + (index + 0.5) * edge along each axis.
struct GridSpec {
    int resolution = 32;
    Vec3 lower{-1.25, -1.25, -1.25};
    Vec3 upper{1.25, 1.25, 1.25};

    /// Throws InvalidArgument unless G >= 2 and upper > lower componentwise.
    void validate() const;

    std::size_t voxel_count() const noexcept
    {
        const auto g = static_cast<std::size_t>(resolution);
        return g * g * g;
    }

    double edge(int axis) const noexcept { return (upper[axis] - lower[axis]) / resolution; }

    Vec3 center(int i, int j, int k) const noexcept
    {
        return {lower.x() + (i + 0.5) * edge(0), lower.y() + (j + 0.5) * edge(1),
                lower.z() + (k + 0.5) * edge(2)};
    }

    /// x-fastest linear index.
    std::size_t index(int i, int j, int k) const noexcept
    {
        const auto g = static_cast<std::size_t>(resolution);
        return static_cast<std::size_t>(i) + g * (static_cast<std::size_t>(j) + g * static_cast<std::size_t>(k));
    }
};

/// Default lattice: the unit sphere plus a margin.
GridSpec default_grid(int resolution);

/// Sampled scalar field; the surface is the `level` set, interior is below it.
struct ScalarGrid {
    GridSpec spec;
    std::vector<float> values;
    double level = 0.0;

    float at(int i, int j, int k) const { return values[spec.index(i, j, k)]; }
};

}  // namespace condsweep
