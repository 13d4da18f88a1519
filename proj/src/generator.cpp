#include "condsweep/generator.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "condsweep/errors.hpp"
#include "condsweep/external.hpp"
#include "kdtree.hpp"

namespace condsweep {

std::size_t fill_cavities(ScalarGrid& grid)
{
    const GridSpec& spec = grid.spec;
    const int g = spec.resolution;
    const float level = static_cast<float>(grid.level);
    std::vector<unsigned char> reached(grid.values.size(), 0);
    std::vector<std::size_t> stack;

    auto visit = [&](int i, int j, int k) {
        const std::size_t v = spec.index(i, j, k);
        if (!reached[v] && !(grid.values[v] < level)) {
            reached[v] = 1;
            stack.push_back(v);
        }
    };
    for (int k = 0; k < g; ++k) {
        for (int j = 0; j < g; ++j) {
            for (int i = 0; i < g; ++i) {
                if (i == 0 || j == 0 || k == 0 || i == g - 1 || j == g - 1 || k == g - 1) {
                    visit(i, j, k);
                }
            }
        }
    }
    const std::size_t gs = static_cast<std::size_t>(g);
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        const int i = static_cast<int>(v % gs);
        const int j = static_cast<int>((v / gs) % gs);
        const int k = static_cast<int>(v / (gs * gs));
        if (i > 0) visit(i - 1, j, k);
        if (i + 1 < g) visit(i + 1, j, k);
        if (j > 0) visit(i, j - 1, k);
        if (j + 1 < g) visit(i, j + 1, k);
        if (k > 0) visit(i, j, k - 1);
        if (k + 1 < g) visit(i, j, k + 1);
    }

    std::size_t changed = 0;
    for (std::size_t v = 0; v < grid.values.size(); ++v) {
        float& value = grid.values[v];
        if (!reached[v] && !(value < level)) {
            const float mirrored = level - (value - level);
            value = mirrored < level ? mirrored : std::nextafter(level, -std::numeric_limits<float>::infinity());
            ++changed;
        }
    }
    return changed;
}

ScalarGrid decode_density(const ConditionVector& c, const GridSpec& spec, double tau, bool solid)
{
    spec.validate();
    if (c.encoder_id != kDensityEncoderId) {
        throw Error(ErrorCode::InvalidArgument, "decode_density: condition was produced by encoder '" + c.encoder_id + "'");
    }
    if (c.dim() != spec.voxel_count()) {
        throw Error(ErrorCode::DimMismatch, "decode_density: condition has dim " + std::to_string(c.dim()) +
                                                ", grid needs " + std::to_string(spec.voxel_count()));
    }
    if (!(tau > 0.0 && tau < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "decode_density: tau must lie in (0, 1)");
    }
    ScalarGrid grid;
    grid.spec = spec;
    grid.level = 0.0;
    grid.values.resize(c.dim());
    for (std::size_t v = 0; v < c.dim(); ++v) {
        grid.values[v] = static_cast<float>(tau - c.values[v]);
    }
    if (solid) {
        fill_cavities(grid);
    }
    return grid;
}

ScalarGrid decode_balls(const ConditionVector& c, const GridSpec& spec, double radius, bool solid)
{
    spec.validate();
    if (c.encoder_id != kCoordsEncoderId) {
        throw Error(ErrorCode::InvalidArgument, "decode_balls: condition was produced by encoder '" + c.encoder_id + "'");
    }
    if (c.dim() == 0 || c.dim() % 3 != 0) {
        throw Error(ErrorCode::DimMismatch, "decode_balls: condition dim " + std::to_string(c.dim()) +
                                                " is not a positive multiple of 3");
    }
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "decode_balls: radius must be positive");
    }
    std::vector<Vec3> centers;
    centers.reserve(c.dim() / 3);
    for (std::size_t p = 0; p < c.dim(); p += 3) {
        centers.emplace_back(c.values[p], c.values[p + 1], c.values[p + 2]);
    }
    const detail::KdTree tree(std::move(centers));

    ScalarGrid grid;
    grid.spec = spec;
    grid.level = 0.0;
    grid.values.resize(spec.voxel_count());
    const int g = spec.resolution;
    for (int k = 0; k < g; ++k) {
        for (int j = 0; j < g; ++j) {
            for (int i = 0; i < g; ++i) {
                const double d = std::sqrt(tree.nearest_squared(spec.center(i, j, k)));
                grid.values[spec.index(i, j, k)] = static_cast<float>(d - radius);
            }
        }
    }
    if (solid) {
        fill_cavities(grid);
    }
    return grid;
}

ScalarGrid decode(GeneratorBackend& backend, const ConditionVector& c, std::uint64_t seed, const GridSpec& spec)
{
    if (c.dim() != backend.declared_cond_dim()) {
        throw Error(ErrorCode::DimMismatch, "decode: backend '" + backend.backend_id() + "' expects dim " +
                                                std::to_string(backend.declared_cond_dim()) + ", got " +
                                                std::to_string(c.dim()));
    }
    return backend.decode_checked(c, seed, spec);
}

DensityBackend::DensityBackend(GridSpec spec, double tau, double bandwidth, bool solid)
    : spec_(spec), tau_(tau), bandwidth_(bandwidth), solid_(solid)
{
    spec_.validate();
    if (!(tau > 0.0 && tau < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "density backend: tau must lie in (0, 1)");
    }
    if (!(bandwidth > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "density backend: bandwidth must be positive");
    }
}

ConditionVector DensityBackend::encode(const PointCloud& cloud) { return encode_density(cloud, spec_, bandwidth_); }

ScalarGrid DensityBackend::decode_checked(const ConditionVector& c, std::uint64_t, const GridSpec& spec)
{
    return decode_density(c, spec, tau_, solid_);
}

BallsBackend::BallsBackend(std::size_t point_count, double radius, bool solid)
    : point_count_(point_count), radius_(radius), solid_(solid)
{
    if (point_count == 0) {
        throw Error(ErrorCode::InvalidArgument, "balls backend: point count must be positive");
    }
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "balls backend: radius must be positive");
    }
}

ConditionVector BallsBackend::encode(const PointCloud& cloud) { return encode_coords(cloud); }

ScalarGrid BallsBackend::decode_checked(const ConditionVector& c, std::uint64_t, const GridSpec& spec)
{
    return decode_balls(c, spec, radius_, solid_);
}

BackendConfig resolve_defaults(BackendConfig config, const GridSpec& grid)
{
    if (config.radius == 0.0) {
        config.radius = 3.0 * grid.edge(0);
    }
    if (config.bandwidth == 0.0) {
        config.bandwidth = default_bandwidth(grid);
    }
    return config;
}

std::unique_ptr<GeneratorBackend> make_backend(const BackendConfig& raw, const GridSpec& grid, std::size_t point_count)
{
    const BackendConfig config = resolve_defaults(raw, grid);
    if (config.id == "density") {
        return std::make_unique<DensityBackend>(grid, config.tau, config.bandwidth, config.solid);
    }
    if (config.id == "balls") {
        return std::make_unique<BallsBackend>(point_count, config.radius, config.solid);
    }
    if (config.id == "external") {
        return connect_external(config);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown backend '" + config.id + "'");
}

}  // namespace condsweep
