#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "condsweep/encoder.hpp"
#include "condsweep/grid.hpp"

namespace condsweep {

/// Fills enclosed exterior pockets: non-interior voxels that are not
/// 6-connected to the grid boundary through other non-interior voxels are
/// reflected below the level. Returns the number of voxels changed.
std::size_t fill_cavities(ScalarGrid& grid);

/// values = tau - F, level 0, negative inside. With `solid` set, enclosed
/// pockets are filled so the result describes a solid rather than a hollow shell.
ScalarGrid decode_density(const ConditionVector& c, const GridSpec& spec, double tau, bool solid = true);

/// values = min_i |v - q_i| - radius at voxel centers, level 0.
ScalarGrid decode_balls(const ConditionVector& c, const GridSpec& spec, double radius, bool solid = true);

/// Conditional generator: configured by a condition vector, emits a scalar
/// field whose zero level set is the shape. Backends also own the encoder
/// that produces their conditions.
class GeneratorBackend {
public:
    virtual ~GeneratorBackend() = default;

    virtual std::string backend_id() const = 0;
    virtual std::size_t declared_cond_dim() const = 0;
    virtual std::optional<std::uint64_t> reported_weight_count() const { return std::nullopt; }

    /// Whether encode/decode may be called from several threads at once.
    virtual bool concurrent() const { return true; }

    virtual ConditionVector encode(const PointCloud& cloud) = 0;

    /// Called through condsweep::decode, which has already checked the dimension.
    virtual ScalarGrid decode_checked(const ConditionVector& c, std::uint64_t seed, const GridSpec& spec) = 0;
};

/// Rejects dimension mismatches, then forwards to the backend. The seed is
/// passed through unchanged; analytic backends ignore it.
ScalarGrid decode(GeneratorBackend& backend, const ConditionVector& c, std::uint64_t seed, const GridSpec& spec);

class DensityBackend final : public GeneratorBackend {
public:
    DensityBackend(GridSpec spec, double tau, double bandwidth, bool solid = true);

    std::string backend_id() const override { return "density"; }
    std::size_t declared_cond_dim() const override { return spec_.voxel_count(); }
    ConditionVector encode(const PointCloud& cloud) override;
    ScalarGrid decode_checked(const ConditionVector& c, std::uint64_t seed, const GridSpec& spec) override;

    double tau() const noexcept { return tau_; }
    double bandwidth() const noexcept { return bandwidth_; }

private:
    GridSpec spec_;
    double tau_;
    double bandwidth_;
    bool solid_;
};

class BallsBackend final : public GeneratorBackend {
public:
    BallsBackend(std::size_t point_count, double radius, bool solid = true);

    std::string backend_id() const override { return "balls"; }
    std::size_t declared_cond_dim() const override { return 3 * point_count_; }
    ConditionVector encode(const PointCloud& cloud) override;
    ScalarGrid decode_checked(const ConditionVector& c, std::uint64_t seed, const GridSpec& spec) override;

    double radius() const noexcept { return radius_; }

private:
    std::size_t point_count_;
    double radius_;
    bool solid_;
};

struct BackendConfig {
    std::string id = "density";
    double tau = 0.35;
    double radius = 0.0;     ///< 0 selects 3 voxel edges
    double bandwidth = 0.0;  ///< 0 selects default_bandwidth(grid)
    bool solid = true;
    std::string command;     ///< external: launch command speaking the wire protocol
    std::string address;     ///< external: host:port
    double timeout_seconds = 30.0;
};

/// Resolves the zero-valued defaults in `config` against a grid.
BackendConfig resolve_defaults(BackendConfig config, const GridSpec& grid);

/// `point_count` sizes the balls backend's condition (3N).
std::unique_ptr<GeneratorBackend> make_backend(const BackendConfig& config, const GridSpec& grid,
                                               std::size_t point_count);

}  // namespace condsweep
