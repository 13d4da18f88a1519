#include "condsweep/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "condsweep/errors.hpp"

namespace condsweep {

void ConditionVector::validate() const
{
    if (values.empty()) {
        throw Error(ErrorCode::InvalidArgument, "condition vector is empty");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "condition vector has a non-finite entry");
        }
    }
}

double default_bandwidth(const GridSpec& spec) { return 1.5 * spec.edge(0); }

std::vector<double> splat_density(const PointCloud& cloud, const GridSpec& spec, double bandwidth)
{
    spec.validate();
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "encode_density: cloud is empty");
    }
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw Error(ErrorCode::InvalidArgument, "encode_density: bandwidth must be positive");
    }

    std::vector<Vec3> ordered = cloud.points;
    std::sort(ordered.begin(), ordered.end(), [](const Vec3& a, const Vec3& b) {
        return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    });

    const int g = spec.resolution;
    const double support = 3.0 * bandwidth;
    const double support2 = support * support;
    const double inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    const double floor_value = std::exp(-4.5);

    std::vector<double> field(spec.voxel_count(), 0.0);
    for (const Vec3& q : ordered) {
        int lo[3];
        int hi[3];
        bool outside = false;
        for (int a = 0; a < 3; ++a) {
            const double e = spec.edge(a);
            lo[a] = std::max(0, static_cast<int>(std::ceil((q[a] - support - spec.lower[a]) / e - 0.5)));
            hi[a] = std::min(g - 1, static_cast<int>(std::floor((q[a] + support - spec.lower[a]) / e - 0.5)));
            outside = outside || lo[a] > hi[a];
        }
        if (outside) {
            continue;
        }
        for (int k = lo[2]; k <= hi[2]; ++k) {
            for (int j = lo[1]; j <= hi[1]; ++j) {
                for (int i = lo[0]; i <= hi[0]; ++i) {
                    const double d2 = (spec.center(i, j, k) - q).squaredNorm();
                    if (d2 <= support2) {
                        field[spec.index(i, j, k)] += std::exp(-d2 * inv_two_h2) - floor_value;
                    }
                }
            }
        }
    }
    return field;
}

ConditionVector encode_density(const PointCloud& cloud, const GridSpec& spec, double bandwidth)
{
    const std::vector<double> field = splat_density(cloud, spec, bandwidth);
    const double peak = *std::max_element(field.begin(), field.end());
    if (!(peak > 0.0)) {
        throw Error(ErrorCode::OutOfBounds, "encode_density: no point falls within the grid bounds");
    }
    ConditionVector c;
    c.encoder_id = kDensityEncoderId;
    c.values.resize(field.size());
    for (std::size_t v = 0; v < field.size(); ++v) {
        c.values[v] = field[v] / peak;
    }
    return c;
}

ConditionVector encode_coords(const PointCloud& cloud)
{
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "encode_coords: cloud is empty");
    }
    ConditionVector c;
    c.encoder_id = kCoordsEncoderId;
    c.values.reserve(3 * cloud.size());
    for (const auto& p : cloud.points) {
        for (int a = 0; a < 3; ++a) {
            c.values.push_back(p[a]);
        }
    }
    return c;
}

}  // namespace condsweep
