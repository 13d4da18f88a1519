#include "condsweep/grid.hpp"

#include "condsweep/errors.hpp"

namespace condsweep {

void GridSpec::validate() const
{
    if (resolution < 2) {
        throw Error(ErrorCode::InvalidArgument, "grid resolution must be at least 2");
    }
    for (int a = 0; a < 3; ++a) {
        if (!(upper[a] > lower[a])) {
            throw Error(ErrorCode::InvalidArgument, "grid upper bound must exceed lower bound on every axis");
        }
    }
}

GridSpec default_grid(int resolution)
{
    GridSpec spec;
    spec.resolution = resolution;
    return spec;
}

}  // namespace condsweep
