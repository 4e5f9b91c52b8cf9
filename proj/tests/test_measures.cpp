#include "doctest.h"

#include <cmath>
#include <vector>

#include "wbary/error.hpp"
#include "wbary/measures.hpp"
#include "wbary/stats.hpp"

using namespace wbary;

TEST_CASE("grid quantile picks the ceil(t m) node") {
    const Measure1D mu = Measure1D::from_grid(make_quantile_grid({1.0, 2.0, 3.0, 4.0}));
    CHECK(quantile(mu, 0.1) == 1.0);
    CHECK(quantile(mu, 0.25) == 1.0); // F(1) = 0.25, left-continuous inverse
    CHECK(quantile(mu, 0.26) == 2.0);
    CHECK(quantile(mu, 0.5) == 2.0);
    CHECK(quantile(mu, 0.75) == 3.0);
    CHECK(quantile(mu, 0.99) == 4.0);
}

TEST_CASE("atomic quantile is the generalized inverse cdf") {
    const Measure1D mu = Measure1D::from_atoms({0.0, 1.0, 5.0}, {0.2, 0.3, 0.5});
    CHECK(quantile(mu, 0.1) == 0.0);
    CHECK(quantile(mu, 0.2) == 0.0);
    CHECK(quantile(mu, 0.2 + 1e-9) == 1.0);
    CHECK(quantile(mu, 0.5) == 1.0);
    CHECK(quantile(mu, 0.9) == 5.0);
}

TEST_CASE("quantile rejects t outside the open unit interval") {
    const Measure1D mu = Measure1D::from_atoms({0.0}, {1.0});
    CHECK_THROWS_AS(quantile(mu, 0.0), Error);
    CHECK_THROWS_AS(quantile(mu, 1.0), Error);
    CHECK_THROWS_AS(quantile(mu, -0.5), Error);
    CHECK_THROWS_AS(quantile(mu, 2.0), Error);
}

TEST_CASE("from_atoms sorts, merges near-duplicates, drops zero weights") {
    const Measure1D mu =
        Measure1D::from_atoms({3.0, 1.0, 1.0 + 1e-13, 2.0}, {0.25, 0.25, 0.25, 0.25});
    REQUIRE(mu.atoms().size() == 3);
    CHECK(mu.atoms()[0].x == 1.0);
    CHECK(mu.atoms()[0].w == doctest::Approx(0.5));
    CHECK(mu.atoms()[1].x == 2.0);
    CHECK(mu.atoms()[2].x == 3.0);

    const Measure1D nu = Measure1D::from_atoms({0.0, 1.0, 2.0}, {0.5, 0.0, 0.5});
    CHECK(nu.atoms().size() == 2);
}

TEST_CASE("weights renormalize within 1e-6 and reject beyond") {
    const Measure1D mu = Measure1D::from_atoms({0.0, 1.0}, {0.5, 0.5 + 5e-7});
    CHECK(mu.atoms()[0].w + mu.atoms()[1].w == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(Measure1D::from_atoms({0.0, 1.0}, {0.5, 0.6}), Error);
    CHECK_THROWS_AS(Measure1D::from_atoms({0.0, 1.0}, {-0.1, 1.1}), Error);
}

TEST_CASE("to_quantile_grid recovers equally weighted atoms exactly") {
    const int n = 101;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = norm_quantile((i + 0.5) / n);
    const Measure1D mu = Measure1D::from_atoms(xs, std::vector<double>(n, 1.0 / n));
    const QuantileGrid g = to_quantile_grid(mu, n);
    for (int i = 0; i < n; ++i) CHECK(g.values[i] == xs[i]);
}

TEST_CASE("to_quantile_grid splits mass proportionally") {
    const Measure1D mu = Measure1D::from_atoms({-1.0, 2.0}, {0.25, 0.75});
    const QuantileGrid g = to_quantile_grid(mu, 4);
    CHECK(g.values[0] == -1.0); // t = 1/8
    CHECK(g.values[1] == 2.0);  // t = 3/8
    CHECK(g.values[2] == 2.0);
    CHECK(g.values[3] == 2.0);
}

TEST_CASE("grid round trip through a grid-kind measure is exact") {
    const QuantileGrid g = make_quantile_grid({-2.0, -0.5, -0.5, 0.25, 1.0, 3.0});
    const Measure1D mu = Measure1D::from_grid(g);
    const QuantileGrid back = to_quantile_grid(mu, g.size());
    for (int i = 0; i < g.size(); ++i) CHECK(back.values[i] == g.values[i]);
}

TEST_CASE("quantile grids must be nondecreasing") {
    CHECK_THROWS_AS(make_quantile_grid({1.0, 0.5}), Error);
    CHECK_THROWS_AS(make_quantile_grid({1.0}), Error);
}

TEST_CASE("discrete measures validate shape and weights") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 1, 0, 0, 1;
    const DiscreteMeasure mu = make_discrete(pts);
    CHECK(mu.size() == 3);
    CHECK(mu.dim() == 2);
    CHECK(mu.weights()(0) == doctest::Approx(1.0 / 3));

    Eigen::VectorXd bad(3);
    bad << 0.5, 0.4, 0.2;
    CHECK_THROWS_AS(make_discrete(pts, bad), Error);
}

TEST_CASE("1D conversions round trip") {
    Eigen::MatrixXd pts(4, 1);
    pts << 2.0, -1.0, 2.0, 0.5;
    const Measure1D mu = to_measure1d(make_discrete(pts));
    REQUIRE(mu.atoms().size() == 3); // duplicates merged
    CHECK(mu.atoms()[0].x == -1.0);
    CHECK(mu.atoms()[2].x == 2.0);
    CHECK(mu.atoms()[2].w == doctest::Approx(0.5));

    const DiscreteMeasure back = to_discrete(mu);
    CHECK(back.size() == 3);
    CHECK(back.dim() == 1);
    CHECK(back.points()(0, 0) == -1.0);
}

TEST_CASE("mean and second moment") {
    const Measure1D mu = Measure1D::from_atoms({-1.0, 3.0}, {0.5, 0.5});
    CHECK(mean(mu) == doctest::Approx(1.0));
    CHECK(second_moment(mu) == doctest::Approx(5.0));

    Eigen::MatrixXd pts(2, 2);
    pts << 1, 0, 0, 2;
    CHECK(second_moment(make_discrete(pts)) == doctest::Approx(0.5 * 1 + 0.5 * 4));
}

TEST_CASE("gaussian measures require symmetric positive definite covariance") {
    Eigen::MatrixXd cov(2, 2);
    cov << 2.0, 0.5, 0.5, 1.0;
    const GaussianMeasure g = make_gaussian(Eigen::Vector2d(0.0, 1.0), cov);
    CHECK(g.dim() == 2);

    Eigen::MatrixXd asym(2, 2);
    asym << 2.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(make_gaussian(Eigen::Vector2d::Zero(), asym), Error);

    Eigen::MatrixXd neg(2, 2);
    neg << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(make_gaussian(Eigen::Vector2d::Zero(), neg), Error);
}

TEST_CASE("support bounds come from the merged atoms") {
    const Measure1D mu = Measure1D::from_atoms({4.0, -2.0, 1.0}, {0.2, 0.3, 0.5});
    CHECK(mu.min_support() == -2.0);
    CHECK(mu.max_support() == 4.0);
}
