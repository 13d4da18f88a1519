#pragma once

#include <cstdint>
#include <vector>

#include "condsweep/mesh.hpp"

namespace condsweep {

/// Parameters of one synthetic L-bracket.
///
/// The bracket is an L-shaped profile in the xz-plane extruded along y: a base
/// slab (z in [0, t]) and an upright slab (x in [0, t]) joined by a concave
/// fillet of radius `fillet` in the inner corner. Each slab has one circular
/// through-hole of radius `hole_radius` centered on its flat face. The seed
/// jitters the overall length, height and width.
struct BracketParams {
    double hole_radius = 0.18;
    double fillet = 0.08;
    double thickness = 0.16;
    std::uint64_t seed = 42;
};

/// Polygon resolution of each hole and of the fillet arc.
inline constexpr int kBracketHoleSegments = 32;
inline constexpr int kBracketFilletSegments = 8;

struct BracketDims {
    double length;  ///< extent of the base along x
    double height;  ///< extent of the upright along z
    double width;   ///< extrusion depth along y
};

/// The seed-dependent outer dimensions.
BracketDims bracket_dims(std::uint64_t seed);

/// Builds the welded, outward-oriented, watertight genus-2 mesh. Throws
/// InvalidParams when a parameter is nonpositive or a hole does not fit inside
/// its slab face. Surface area strictly decreases with the hole radius as long
/// as it exceeds roughly half the thickness.
TriangleMesh synth_bracket(const BracketParams& params);

/// `count` parameter sets drawn from the default family, item i seeded by
/// mix_seed(seed, i): thickness in [0.12, 0.20], hole radius in [0.13, 0.22],
/// fillet in [0.03, 0.15].
std::vector<BracketParams> bracket_family(std::size_t count, std::uint64_t seed);

}  // namespace condsweep
