#include "support.hpp"

#include "condsweep/subspace.hpp"

using namespace condsweep;
using namespace testing;

namespace {

ConditionVector from_eigen(const Eigen::VectorXd& v)
{
    ConditionVector c;
    c.values.assign(v.data(), v.data() + v.size());
    c.encoder_id = "test";
    return c;
}

Eigen::VectorXd to_eigen(const ConditionVector& c)
{
    return Eigen::Map<const Eigen::VectorXd>(c.values.data(), static_cast<Eigen::Index>(c.dim()));
}

// Rows drawn around a random low-dimensional structure plus noise.
std::vector<ConditionVector> random_instance(Gen& gen, Eigen::Index c_dim, Eigen::Index k)
{
    const Eigen::Index latent = static_cast<Eigen::Index>(index_in(gen, 1, static_cast<std::size_t>(k)));
    Eigen::MatrixXd basis(c_dim, latent);
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        basis.data()[i] = normal(gen);
    }
    Eigen::VectorXd mean(c_dim);
    for (Eigen::Index i = 0; i < c_dim; ++i) {
        mean(i) = uniform_in(gen, -2, 2);
    }
    std::vector<ConditionVector> rows;
    for (Eigen::Index r = 0; r < k; ++r) {
        Eigen::VectorXd z(latent);
        for (Eigen::Index i = 0; i < latent; ++i) {
            z(i) = normal(gen) * (1.0 + static_cast<double>(i));
        }
        Eigen::VectorXd x = mean + basis * z;
        for (Eigen::Index i = 0; i < c_dim; ++i) {
            x(i) += 0.05 * normal(gen);
        }
        rows.push_back(from_eigen(x));
    }
    return rows;
}

Eigen::VectorXd sign_normalized(Eigen::VectorXd v)
{
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    return v(peak) < 0 ? Eigen::VectorXd(-v) : v;
}

double orthonormality_residual(const PcaModel& m)
{
    const auto d = static_cast<Eigen::Index>(m.mode_count());
    return (m.modes.transpose() * m.modes - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("Gram route agrees with a direct covariance eigensolve")
{
    Gen gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c_dim = static_cast<Eigen::Index>(index_in(gen, 2, 50));
        const auto k = static_cast<Eigen::Index>(index_in(gen, 2, 20));
        const auto rows = random_instance(gen, c_dim, k);
        const PcaModel model = pca_fit(rows, 100);

        Eigen::MatrixXd x(k, c_dim);
        for (Eigen::Index r = 0; r < k; ++r) {
            x.row(r) = to_eigen(rows[static_cast<std::size_t>(r)]).transpose();
        }
        const Eigen::VectorXd mean = x.colwise().mean().transpose();
        x.rowwise() -= mean.transpose();
        const Eigen::MatrixXd cov = x.transpose() * x / static_cast<double>(k - 1);
        const auto [values, vectors] = jacobi_eigen(cov);

        CHECK((model.mean - mean).cwiseAbs().maxCoeff() <= 1e-12);
        const auto expected_rank = std::min(c_dim, k - 1);
        REQUIRE(static_cast<Eigen::Index>(model.mode_count()) == expected_rank);
        for (Eigen::Index j = 0; j < expected_rank; ++j) {
            CHECK_MESSAGE(std::abs(model.mode_stds(j) - std::sqrt(std::max(0.0, values(j)))) <= 1e-9,
                          "trial " << trial << " mode " << j);
            const double gap = std::min(j > 0 ? values(j - 1) - values(j) : 1e300,
                                        j + 1 < c_dim ? values(j) - values(j + 1) : 1e300);
            if (gap > 1e-6 * values(0)) {
                const Eigen::VectorXd diff = sign_normalized(model.modes.col(j)) - sign_normalized(vectors.col(j));
                CHECK_MESSAGE(diff.cwiseAbs().maxCoeff() <= 1e-9, "trial " << trial << " mode " << j);
            }
        }
        // Whole retained subspace through its projector, independent of sign and order.
        const Eigen::MatrixXd top = vectors.leftCols(expected_rank);
        const Eigen::MatrixXd p_direct = top * top.transpose();
        const Eigen::MatrixXd p_gram = model.modes * model.modes.transpose();
        CHECK((p_direct - p_gram).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(orthonormality_residual(model) <= 1e-9);
    }
}

TEST_CASE("model invariants and the round trip at full rank")
{
    Gen gen(37);
    for (int trial = 0; trial < 15; ++trial) {
        // Wide instances (C > k) keep the smallest centered singular value away
        // from the rank cutoff, so "full rank" means exactly k - 1 modes.
        const auto k = static_cast<Eigen::Index>(index_in(gen, 3, 25));
        const auto c_dim = static_cast<Eigen::Index>(index_in(gen, static_cast<std::size_t>(k) + 2, 60));
        const auto rows = random_instance(gen, c_dim, k);
        const PcaModel model = pca_fit(rows, 1000);
        REQUIRE(static_cast<Eigen::Index>(model.mode_count()) == k - 1);
        CHECK(orthonormality_residual(model) <= 1e-9);
        double sum = 0.0;
        for (Eigen::Index j = 0; j < model.mode_stds.size(); ++j) {
            CHECK(model.mode_stds(j) >= 0.0);
            if (j > 0) {
                CHECK(model.mode_stds(j) <= model.mode_stds(j - 1));
                CHECK(model.explained(j) <= model.explained(j - 1));
            }
            sum += model.explained(j);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        for (const auto& c : rows) {
            const auto back = reconstruct(model, project(model, c));
            const double rel = (to_eigen(back) - to_eigen(c)).norm() / to_eigen(c).norm();
            CHECK(rel <= 1e-6);
        }

        // Training reconstruction error never grows as modes are added.
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t d = 1; d <= model.mode_count(); ++d) {
            const PcaModel truncated = pca_fit(rows, d);
            double err = 0.0;
            for (const auto& c : rows) {
                err += (to_eigen(reconstruct(truncated, project(truncated, c))) - to_eigen(c)).squaredNorm();
            }
            CHECK(err <= previous * (1.0 + 1e-9) + 1e-18);
            previous = err;
        }
    }
}

TEST_CASE("fit examples")
{
    SUBCASE("identical vectors have no modes")
    {
        std::vector<ConditionVector> rows(4, from_eigen(Eigen::VectorXd::Constant(6, 0.7)));
        const auto model = pca_fit(rows, 10);
        CHECK(model.mode_count() == 0);
        CHECK(model.k_train == 4);
        CHECK(reconstruct(model, SubspaceCoords{}).values == rows[0].values);
    }
    SUBCASE("three collinear vectors")
    {
        Eigen::VectorXd mu(5), v(5);
        mu << 1, -2, 0.5, 3, 0;
        v << 0.3, 0.1, -0.7, 0.2, 0.4;
        std::vector<ConditionVector> rows;
        for (double t : {-1.0, 0.0, 1.0}) {
            rows.push_back(from_eigen(mu + t * v));
        }
        const auto model = pca_fit(rows, 5);
        REQUIRE(model.mode_count() == 1);
        CHECK(std::abs(std::abs(model.modes.col(0).dot(v.normalized())) - 1.0) <= 1e-12);
        CHECK(model.mode_stds(0) == doctest::Approx(v.norm()).epsilon(1e-12));
        // Direct 5 x 5 covariance oracle.
        Eigen::MatrixXd cov = v * v.transpose() * (2.0 / 2.0);
        const auto [values, vectors] = jacobi_eigen(cov);
        CHECK(std::sqrt(values(0)) == doctest::Approx(model.mode_stds(0)).epsilon(1e-12));
        CHECK((sign_normalized(vectors.col(0)) - sign_normalized(model.modes.col(0))).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(model.explained(0) == doctest::Approx(1.0));
    }
    SUBCASE("mode count is capped at d")
    {
        Gen gen(41);
        const auto rows = random_instance(gen, 30, 20);
        CHECK(pca_fit(rows, 3).mode_count() == 3);
        CHECK(pca_fit(rows, 100).mode_count() <= 19);
    }
    SUBCASE("errors")
    {
        std::vector<ConditionVector> one{from_eigen(Eigen::VectorXd::Ones(3))};
        CHECK_ERROR_CODE(pca_fit(one, 2), ErrorCode::InsufficientData);
        std::vector<ConditionVector> mixed{from_eigen(Eigen::VectorXd::Ones(3)), from_eigen(Eigen::VectorXd::Ones(4))};
        CHECK_ERROR_CODE(pca_fit(mixed, 2), ErrorCode::DimMismatch);
    }
}

TEST_CASE("project and reconstruct")
{
    Gen gen(43);
    const auto rows = random_instance(gen, 12, 8);
    const auto model = pca_fit(rows, 100);
    const ConditionVector mean = from_eigen(model.mean);
    for (double z : project(model, mean).z) {
        CHECK(std::abs(z) <= 1e-12);
    }
    const auto e1 = project(model, from_eigen(model.mean + model.mode_stds(0) * model.modes.col(0))).z;
    CHECK(std::abs(e1[0] - 1.0) <= 1e-9);
    for (std::size_t j = 1; j < e1.size(); ++j) {
        CHECK(std::abs(e1[j]) <= 1e-9);
    }

    SubspaceCoords zero{std::vector<double>(model.mode_count(), 0.0)};
    CHECK((to_eigen(reconstruct(model, zero)) - model.mean).cwiseAbs().maxCoeff() == 0.0);
    SubspaceCoords first = zero;
    first.z[0] = 1.0;
    CHECK((to_eigen(reconstruct(model, first)) - (model.mean + model.mode_stds(0) * model.modes.col(0)))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    CHECK(reconstruct(model, zero).encoder_id == "test");

    CHECK_ERROR_CODE(reconstruct(model, SubspaceCoords{{1.0}}), ErrorCode::DimMismatch);
    CHECK_ERROR_CODE(project(model, from_eigen(Eigen::VectorXd::Zero(3))), ErrorCode::DimMismatch);

    PcaModel degenerate = model;
    degenerate.mode_stds(degenerate.mode_stds.size() - 1) = 0.0;
    CHECK_ERROR_CODE(project(degenerate, mean), ErrorCode::DegenerateMode);
}

TEST_CASE("sampling")
{
    Gen gen(47);
    const auto rows = random_instance(gen, 20, 12);
    const auto model = pca_fit(rows, 100);
    SUBCASE("beta = 0 yields the mean")
    {
        SeededRng rng(42);
        const auto z = sample_coords(model, 0.0, rng);
        for (double v : z.z) {
            CHECK(v == 0.0);
        }
        CHECK((to_eigen(reconstruct(model, z)) - model.mean).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("seeded sampling is deterministic")
    {
        SeededRng a(42), b(42);
        CHECK(sample_coords(model, 1.0, a).z == sample_coords(model, 1.0, b).z);
    }
    SUBCASE("per-mode spread matches beta")
    {
        SeededRng rng(42);
        const std::size_t d = model.mode_count();
        std::vector<double> sq(d, 0.0);
        const int draws = 10000;
        for (int i = 0; i < draws; ++i) {
            const auto z = sample_coords(model, 1.0, rng);
            REQUIRE(z.z.size() == d);
            for (std::size_t j = 0; j < d; ++j) {
                sq[j] += z.z[j] * z.z[j];
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            CHECK(std::abs(std::sqrt(sq[j] / draws) - 1.0) <= 0.05);
        }
    }
    SUBCASE("negative beta is rejected")
    {
        SeededRng rng(1);
        CHECK_ERROR_CODE(sample_coords(model, -1.0, rng), ErrorCode::InvalidArgument);
    }
}

TEST_CASE("interpolation in standardized coordinates")
{
    Gen gen(53);
    const auto rows = random_instance(gen, 15, 10);
    const auto model = pca_fit(rows, 4);
    const auto& a = rows[0];
    const auto& b = rows[1];
    auto projection = [&](const ConditionVector& c) { return to_eigen(reconstruct(model, project(model, c))); };
    CHECK((to_eigen(interpolate(model, a, b, 0.0)) - projection(a)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((to_eigen(interpolate(model, a, b, 1.0)) - projection(b)).cwiseAbs().maxCoeff() <= 1e-12);
    const auto mid = to_eigen(interpolate(model, a, b, 0.5));
    CHECK((mid - 0.5 * (projection(a) + projection(b))).cwiseAbs().maxCoeff() <= 1e-9);
    for (double t : {0.0, 0.3, 0.9}) {
        CHECK((to_eigen(interpolate(model, a, a, t)) - projection(a)).cwiseAbs().maxCoeff() <= 1e-9);
    }
}
