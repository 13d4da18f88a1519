#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "condsweep/encoder.hpp"
#include "condsweep/rng.hpp"

namespace condsweep {

/// Principal subspace of a set of condition vectors.
struct PcaModel {
    Eigen::VectorXd mean;       ///< length C
    Eigen::MatrixXd modes;      ///< C x d, orthonormal columns
    Eigen::VectorXd mode_stds;  ///< length d, descending
    Eigen::VectorXd explained;  ///< length d, eigenvalue share of the total variance
    std::size_t k_train = 0;
    std::string encoder_id;

    std::size_t cond_dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
    std::size_t mode_count() const noexcept { return static_cast<std::size_t>(modes.cols()); }
};

/// Coordinates in units of per-mode standard deviations.
struct SubspaceCoords {
    std::vector<double> z;
};

/// Mean-centers the k conditions and eigendecomposes their k x k Gram matrix
/// instead of the C x C covariance; modes are X^T u / sqrt(lambda). Keeps at
/// most `d` modes with lambda > 1e-10 * lambda_1, each flipped so its
/// largest-magnitude entry is positive.
PcaModel pca_fit(std::span<const ConditionVector> conditions, std::size_t d);

SubspaceCoords project(const PcaModel& model, const ConditionVector& c);

ConditionVector reconstruct(const PcaModel& model, const SubspaceCoords& coords);

/// z_j ~ N(0, beta^2), one gaussian draw per mode in order.
SubspaceCoords sample_coords(const PcaModel& model, double beta, SeededRng& rng);

/// Linear in standardized coordinates, then reconstructed.
ConditionVector interpolate(const PcaModel& model, const ConditionVector& a, const ConditionVector& b, double t);

}  // namespace condsweep
