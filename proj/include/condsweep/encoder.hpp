#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "condsweep/grid.hpp"
#include "condsweep/pointcloud.hpp"

namespace condsweep {

/// Flat conditioning vector. Files and the wire protocol carry float32, so a
/// vector read back from either is the float32 rounding of what was written.
struct ConditionVector {
    std::vector<double> values;
    std::string encoder_id;

    std::size_t dim() const noexcept { return values.size(); }

    /// Throws InvalidArgument on an empty or non-finite vector.
    void validate() const;
};

inline constexpr const char* kDensityEncoderId = "density";
inline constexpr const char* kCoordsEncoderId = "coords";

/// 1.5 voxel edges.
double default_bandwidth(const GridSpec& spec);

/// Unnormalized kernel splat: each voxel center v receives
/// sum_i k(|v - q_i|) with k(d) = exp(-d^2 / 2h^2) - exp(-9/2) for d <= 3h and
/// zero beyond, so the truncation is continuous. Points are splatted in
/// lexicographic order, which makes the result independent of input order.
std::vector<double> splat_density(const PointCloud& cloud, const GridSpec& spec, double bandwidth);

/// Splat, then divide by the grid maximum.
ConditionVector encode_density(const PointCloud& cloud, const GridSpec& spec, double bandwidth);

/// Coordinates interleaved x y z in input order.
ConditionVector encode_coords(const PointCloud& cloud);

}  // namespace condsweep
