#include "condsweep/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "condsweep/errors.hpp"

namespace condsweep {

namespace {

constexpr double kRankThreshold = 1e-10;

void require_dim(const PcaModel& model, const ConditionVector& c, const char* what)
{
    if (c.dim() != model.cond_dim()) {
        throw Error(ErrorCode::DimMismatch, std::string(what) + ": condition has dim " + std::to_string(c.dim()) +
                                                ", model has " + std::to_string(model.cond_dim()));
    }
}

}  // namespace

PcaModel pca_fit(std::span<const ConditionVector> conditions, std::size_t d)
{
    const std::size_t k = conditions.size();
    if (k < 2) {
        throw Error(ErrorCode::InsufficientData, "pca_fit: at least two conditions are required");
    }
    if (d == 0) {
        throw Error(ErrorCode::InvalidArgument, "pca_fit: requested mode count must be positive");
    }
    const std::size_t c_dim = conditions.front().dim();
    for (const auto& c : conditions) {
        if (c.dim() != c_dim) {
            throw Error(ErrorCode::DimMismatch, "pca_fit: conditions have differing dimensions");
        }
    }
    const auto rows = static_cast<Eigen::Index>(k);
    const auto cols = static_cast<Eigen::Index>(c_dim);

    Eigen::MatrixXd centered(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        centered.row(r) = Eigen::Map<const Eigen::VectorXd>(conditions[static_cast<std::size_t>(r)].values.data(), cols).transpose();
    }
    PcaModel model;
    model.k_train = k;
    model.encoder_id = conditions.front().encoder_id;
    model.mean = centered.colwise().mean().transpose();
    centered.rowwise() -= model.mean.transpose();

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(rows, rows);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(centered);
    gram = gram.selfadjointView<Eigen::Lower>();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::InvalidArgument, "pca_fit: Gram eigendecomposition failed");
    }
    // Eigen sorts ascending.
    const Eigen::VectorXd lambda = solver.eigenvalues().reverse().cwiseMax(0.0);
    const Eigen::MatrixXd basis = solver.eigenvectors().rowwise().reverse();
    const double total = lambda.sum();

    std::size_t rank = 0;
    if (lambda(0) > 0.0) {
        while (rank < k && lambda(static_cast<Eigen::Index>(rank)) > kRankThreshold * lambda(0)) {
            ++rank;
        }
    }
    const auto kept = static_cast<Eigen::Index>(std::min(d, rank));

    model.modes.resize(cols, kept);
    model.mode_stds.resize(kept);
    model.explained.resize(kept);
    for (Eigen::Index j = 0; j < kept; ++j) {
        Eigen::VectorXd w = centered.transpose() * basis.col(j) / std::sqrt(lambda(j));
        // One Gram-Schmidt pass against earlier modes removes the drift that
        // small eigenvalues amplify.
        for (Eigen::Index p = 0; p < j; ++p) {
            w -= model.modes.col(p).dot(w) * model.modes.col(p);
        }
        w.normalize();
        Eigen::Index peak = 0;
        w.cwiseAbs().maxCoeff(&peak);
        if (w(peak) < 0.0) {
            w = -w;
        }
        model.modes.col(j) = w;
        model.mode_stds(j) = std::sqrt(lambda(j) / static_cast<double>(k - 1));
        model.explained(j) = lambda(j) / total;
    }
    return model;
}

SubspaceCoords project(const PcaModel& model, const ConditionVector& c)
{
    require_dim(model, c, "project");
    const Eigen::VectorXd offset =
        Eigen::Map<const Eigen::VectorXd>(c.values.data(), static_cast<Eigen::Index>(c.dim())) -
        model.mean;
    SubspaceCoords coords;
    coords.z.resize(model.mode_count());
    for (std::size_t j = 0; j < model.mode_count(); ++j) {
        const double s = model.mode_stds(static_cast<Eigen::Index>(j));
        if (!(s > 0.0)) {
            throw Error(ErrorCode::DegenerateMode, "project: mode " + std::to_string(j) + " has zero variance");
        }
        coords.z[j] = model.modes.col(static_cast<Eigen::Index>(j)).dot(offset) / s;
    }
    return coords;
}

ConditionVector reconstruct(const PcaModel& model, const SubspaceCoords& coords)
{
    if (coords.z.size() != model.mode_count()) {
        throw Error(ErrorCode::DimMismatch, "reconstruct: expected " + std::to_string(model.mode_count()) +
                                                " coordinates, got " + std::to_string(coords.z.size()));
    }
    Eigen::VectorXd out = model.mean;
    for (std::size_t j = 0; j < coords.z.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out += (coords.z[j] * model.mode_stds(jj)) * model.modes.col(jj);
    }
    ConditionVector c;
    c.encoder_id = model.encoder_id;
    c.values.resize(static_cast<std::size_t>(out.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        c.values[static_cast<std::size_t>(i)] = out(i);
    }
    return c;
}

SubspaceCoords sample_coords(const PcaModel& model, double beta, SeededRng& rng)
{
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw Error(ErrorCode::InvalidArgument, "sample_coords: beta must be a nonnegative finite number");
    }
    SubspaceCoords coords;
    coords.z.resize(model.mode_count());
    for (double& z : coords.z) {
        z = beta * rng.gaussian();
    }
    return coords;
}

ConditionVector interpolate(const PcaModel& model, const ConditionVector& a, const ConditionVector& b, double t)
{
    if (!(t >= 0.0 && t <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "interpolate: t must lie in [0, 1]");
    }
    const SubspaceCoords za = project(model, a);
    const SubspaceCoords zb = project(model, b);
    SubspaceCoords mixed;
    mixed.z.resize(za.z.size());
    for (std::size_t j = 0; j < za.z.size(); ++j) {
        mixed.z[j] = za.z[j] + t * (zb.z[j] - za.z[j]);
    }
    return reconstruct(model, mixed);
}

}  // namespace condsweep
