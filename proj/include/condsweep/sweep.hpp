#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "condsweep/generator.hpp"
#include "condsweep/grid.hpp"

namespace condsweep {

struct SweepConfig {
    std::size_t n = 1000;
    double sigma = 0.3;
    std::uint64_t seed = 42;         ///< perturbation seed for endpoint B
    std::uint64_t decode_seed = 42;  ///< forwarded to the generator
    std::size_t steps = 100;
    GridSpec grid = default_grid(64);
    BackendConfig backend;
    std::size_t persistence = 3;
    std::string meshes_dir;  ///< when set, one OBJ per step is written here
    unsigned threads = 0;    ///< 0 = hardware concurrency
};

struct SweepRecord {
    double alpha = 0.0;
    std::size_t components = 0;
    std::size_t watertight_components = 0;
    std::size_t vertices = 0;
    std::size_t faces = 0;
    std::optional<std::size_t> oracle_components;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    std::optional<double> alpha_star;
    /// The same detector applied to the voxel-oracle counts.
    std::optional<double> oracle_alpha_star;
    SweepConfig config;
};

/// Index of the first step starting a run of `persistence` consecutive
/// counts >= 2.
std::optional<std::size_t> first_persistent_split(std::span<const std::size_t> counts, std::size_t persistence);

std::optional<double> detect_alpha_star(std::span<const SweepRecord> records, std::size_t persistence = 3);

/// Endpoints A = fibonacci_sphere(n), B = perturb_on_sphere(A, sigma, seed);
/// for alpha on the inclusive uniform grid of `steps` values: slerp, encode,
/// decode, extract, weld(0) and count. Records come back in alpha order
/// whatever the thread count.
SweepResult run_sweep(const SweepConfig& config);
SweepResult run_sweep(const SweepConfig& config, GeneratorBackend& backend);

struct ReplicateResult {
    std::vector<SweepResult> runs;
    std::size_t detected = 0;
    std::optional<double> alpha_star_min;
    std::optional<double> alpha_star_median;
    std::optional<double> alpha_star_max;
};

/// One sweep per seed, each using that seed for both the perturbation and
/// the generator.
ReplicateResult replicate_sweep(const SweepConfig& config, std::span<const std::uint64_t> seeds);

/// Header `alpha,components,watertight_components,vertices,faces,oracle_components`,
/// alpha with six decimals.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Components against alpha as a single polyline with labeled axes.
void write_sweep_svg(std::ostream& out, const SweepResult& result);

}  // namespace condsweep
