#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wbary/barycenter.hpp"
#include "wbary/deformations.hpp"
#include "wbary/error.hpp"
#include "wbary/measures.hpp"
#include "wbary/rng.hpp"
#include "wbary/transport.hpp"

using namespace wbary;

namespace {

Measure1D random_atomic(Rng& rng, int max_atoms) {
    const int n = 1 + static_cast<int>(rng.below(max_atoms));
    std::vector<double> xs(n), ws(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        xs[i] = rng.uniform(-3.0, 3.0);
        ws[i] = 0.1 + rng.uniform();
        total += ws[i];
    }
    for (double& w : ws) w /= total;
    return Measure1D::from_atoms(std::move(xs), std::move(ws));
}

Eigen::MatrixXd rot(double theta) {
    Eigen::MatrixXd g(2, 2);
    g << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return g;
}

} // namespace

TEST_CASE("pair barycenter endpoints return the inputs") {
    const Measure1D mu = Measure1D::from_atoms({0.0, 2.0}, {0.5, 0.5});
    const Measure1D nu = Measure1D::from_atoms({-1.0, 1.0, 3.0}, {0.2, 0.3, 0.5});
    CHECK(w2_1d(pair_barycenter(mu, nu, 1.0), mu) == doctest::Approx(0.0).scale(1.0));
    CHECK(w2_1d(pair_barycenter(mu, nu, 0.0), nu) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(pair_barycenter(mu, nu, -0.1), Error);
    CHECK_THROWS_AS(pair_barycenter(mu, nu, 1.1), Error);
}

TEST_CASE("pair barycenter of deltas sits at the weighted average") {
    const Measure1D a = Measure1D::from_atoms({1.0}, {1.0});
    const Measure1D b = Measure1D::from_atoms({5.0}, {1.0});
    const Measure1D mid = pair_barycenter(a, b, 0.25);
    REQUIRE(mid.atoms().size() == 1);
    CHECK(mid.atoms()[0].x == doctest::Approx(0.25 * 1.0 + 0.75 * 5.0));
}

TEST_CASE("pair barycenter interpolates matched quantiles") {
    const Measure1D mu = Measure1D::from_atoms({0.0, 1.0}, {0.5, 0.5});
    const Measure1D nu = Measure1D::from_atoms({2.0, 3.0}, {0.5, 0.5});
    const Measure1D mid = pair_barycenter(mu, nu, 0.5);
    REQUIRE(mid.atoms().size() == 2);
    CHECK(mid.atoms()[0].x == doctest::Approx(1.0));
    CHECK(mid.atoms()[1].x == doctest::Approx(2.0));
}

TEST_CASE("pair barycenter is the w2 midpoint") {
    Rng rng(17);
    const Measure1D mu = random_atomic(rng, 8);
    const Measure1D nu = random_atomic(rng, 8);
    const Measure1D mid = pair_barycenter(mu, nu, 0.5);
    const double d = w2_1d(mu, nu);
    CHECK(w2_1d(mu, mid) == doctest::Approx(d / 2).epsilon(1e-9));
    CHECK(w2_1d(mid, nu) == doctest::Approx(d / 2).epsilon(1e-9));
}

TEST_CASE("iterated barycenter matches the multimarginal oracle in 1d") {
    Rng rng(301);
    for (int rep = 0; rep < 8; ++rep) {
        std::vector<Measure1D> ms;
        std::vector<DiscreteMeasure> ds;
        for (int j = 0; j < 3; ++j) {
            ms.push_back(random_atomic(rng, 5));
            ds.push_back(to_discrete(ms.back()));
        }
        Eigen::Vector3d w(0.2, 0.5, 0.3);
        const Measure1D ib = iterated_barycenter(ms, w);
        const MultiMarginalSolution mm = multimarginal_oracle(ds, w);
        CHECK(w2_1d(ib, to_measure1d(mm.barycenter)) < 1e-7);
    }
}

TEST_CASE("iterated barycenter ignores input order in 1d") {
    Rng rng(55);
    std::vector<Measure1D> ms;
    for (int j = 0; j < 4; ++j) ms.push_back(random_atomic(rng, 6));
    const Eigen::Vector4d w(0.1, 0.2, 0.3, 0.4);
    const Measure1D base = iterated_barycenter(ms, w);
    std::vector<int> perm = {2, 0, 3, 1};
    std::vector<Measure1D> shuffled;
    Eigen::Vector4d wp;
    for (int k = 0; k < 4; ++k) {
        shuffled.push_back(ms[perm[k]]);
        wp(k) = w(perm[k]);
    }
    CHECK(w2_1d(base, iterated_barycenter(shuffled, wp)) < 1e-9);
}

TEST_CASE("barycenter weights must be positive and normalized") {
    const std::vector<Measure1D> ms = {Measure1D::from_atoms({0.0}, {1.0}),
                                       Measure1D::from_atoms({1.0}, {1.0})};
    CHECK_THROWS_AS(iterated_barycenter(ms, Eigen::Vector2d(0.5, 0.6)), Error);
    CHECK_THROWS_AS(iterated_barycenter(ms, Eigen::Vector2d(-0.5, 1.5)), Error);
    CHECK_THROWS_AS(iterated_barycenter(ms, Eigen::Vector3d(0.3, 0.3, 0.4)), Error);
}

TEST_CASE("requantized folds stay close to the exact fold") {
    Rng rng(91);
    std::vector<Measure1D> ms;
    for (int j = 0; j < 5; ++j) ms.push_back(random_atomic(rng, 10));
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(5, 0.2);
    const Measure1D exact = iterated_barycenter(ms, w);
    const Measure1D coarse = iterated_barycenter(ms, w, 512);
    CHECK(w2_1d(exact, coarse) < 0.25);
}

TEST_CASE("discrete pair barycenter moves atoms along the optimal plan") {
    Eigen::MatrixXd a(2, 2), b(2, 2);
    a << 0, 0, 1, 0;
    b << 0, 2, 1, 2;
    const DiscreteMeasure mid = pair_barycenter(make_discrete(a), make_discrete(b), 0.5);
    // optimal plan lifts each point straight up; midpoint at height 1
    REQUIRE(mid.size() == 2);
    CHECK(mid.points()(0, 1) == doctest::Approx(1.0));
    CHECK(mid.points()(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("gaussian pair barycenter on commuting covariances") {
    const GaussianMeasure a =
        make_gaussian(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 4.0).asDiagonal());
    const GaussianMeasure b =
        make_gaussian(Eigen::Vector2d(2.0, -2.0), Eigen::Vector2d(9.0, 1.0).asDiagonal());
    const GaussianMeasure mid = pair_barycenter(a, b, 0.5);
    CHECK(mid.mean(0) == doctest::Approx(1.0));
    CHECK(mid.mean(1) == doctest::Approx(-1.0));
    // commuting case: sigma interpolates linearly per axis
    CHECK(mid.cov(0, 0) == doctest::Approx(4.0).epsilon(1e-9));  // ((1+3)/2)^2
    CHECK(mid.cov(1, 1) == doctest::Approx(2.25).epsilon(1e-9)); // ((2+1)/2)^2
    CHECK(std::abs(mid.cov(0, 1)) < 1e-9);
}

TEST_CASE("gaussian fixed point reproduces the commuting closed form") {
    std::vector<Eigen::MatrixXd> covs;
    covs.push_back(Eigen::Vector2d(1.0, 4.0).asDiagonal());
    covs.push_back(Eigen::Vector2d(4.0, 1.0).asDiagonal());
    covs.push_back(Eigen::Vector2d(9.0, 0.25).asDiagonal());
    const Eigen::Vector3d w(0.5, 0.25, 0.25);
    const Eigen::MatrixXd m = gaussian_barycenter_fixedpoint(covs, w);
    const double s0 = 0.5 * 1.0 + 0.25 * 2.0 + 0.25 * 3.0;  // sum of weighted sigmas
    const double s1 = 0.5 * 2.0 + 0.25 * 1.0 + 0.25 * 0.5;
    CHECK(m(0, 0) == doctest::Approx(s0 * s0).epsilon(1e-8));
    CHECK(m(1, 1) == doctest::Approx(s1 * s1).epsilon(1e-8));
    CHECK(std::abs(m(0, 1)) < 1e-8);
}

TEST_CASE("gaussian fixed point satisfies its own equation") {
    std::vector<Eigen::MatrixXd> covs = {Eigen::Vector2d(1.0, 4.0).asDiagonal(),
                                         rot(M_PI / 4) * Eigen::Vector2d(4.0, 1.0).asDiagonal() *
                                             rot(M_PI / 4).transpose(),
                                         Eigen::MatrixXd::Identity(2, 2)};
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(3, 1.0 / 3);
    const Eigen::MatrixXd m = gaussian_barycenter_fixedpoint(covs, w, 1e-12);
    const Eigen::MatrixXd rm = spd_sqrt(m);
    const Eigen::MatrixXd rmi = spd_inv_sqrt(m);
    Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(2, 2);
    for (int j = 0; j < 3; ++j) inner += w(j) * spd_sqrt(rm * covs[j] * rm);
    const Eigen::MatrixXd g = rmi * inner * inner * rmi;
    CHECK((g - m).norm() <= 1e-10);
}

TEST_CASE("iterated gaussian barycenter is order-dependent off the commuting case") {
    std::vector<Eigen::MatrixXd> covs = {Eigen::Vector2d(1.0, 4.0).asDiagonal(),
                                         rot(M_PI / 4) * Eigen::Vector2d(4.0, 1.0).asDiagonal() *
                                             rot(M_PI / 4).transpose(),
                                         Eigen::MatrixXd::Identity(2, 2)};
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(3, 1.0 / 3);
    const Eigen::MatrixXd fwd = gaussian_iterated_barycenter(covs, w);
    std::vector<Eigen::MatrixXd> rev = {covs[2], covs[0], covs[1]};
    const Eigen::MatrixXd bwd = gaussian_iterated_barycenter(rev, w);
    CHECK((fwd - bwd).norm() > 1e-6);

    const Eigen::MatrixXd fixed = gaussian_barycenter_fixedpoint(covs, w);
    CHECK((fwd - fixed).norm() > 1e-3); // iterated construction is not the true barycenter
}

TEST_CASE("gaussian iterated barycenter of two inputs equals the pair formula") {
    const Eigen::MatrixXd s = Eigen::Vector2d(1.0, 4.0).asDiagonal();
    const Eigen::MatrixXd t =
        rot(0.3) * Eigen::Vector2d(2.0, 0.5).asDiagonal() * rot(0.3).transpose();
    const Eigen::Vector2d w(0.6, 0.4);
    const Eigen::MatrixXd ib = gaussian_iterated_barycenter({s, t}, w);
    const GaussianMeasure pair = pair_barycenter(make_gaussian(Eigen::Vector2d::Zero(), s),
                                                 make_gaussian(Eigen::Vector2d::Zero(), t), 0.6);
    CHECK((ib - pair.cov).norm() < 1e-10);
}

TEST_CASE("admissible barycenter equals the pushforward by the average map") {
    const Measure1D mu =
        Measure1D::from_atoms({-2.0, -0.5, 0.5, 2.0}, {0.25, 0.25, 0.25, 0.25});
    const std::vector<Deformation> maps = {make_scale_location(1.3, 0.4),
                                           make_scale_location(0.8, -1.0),
                                           make_scale_location(1.0, 0.6)};
    const Eigen::Vector3d w(0.5, 0.3, 0.2);
    const Measure1D bary = admissible_barycenter(mu, maps, w);
    // closed form: average scale 1.09, average offset -0.0 ... computed directly
    std::vector<double> xs, ws;
    for (const auto& a : mu.atoms()) {
        xs.push_back(0.5 * (1.3 * a.x + 0.4) + 0.3 * (0.8 * a.x - 1.0) + 0.2 * (1.0 * a.x + 0.6));
        ws.push_back(a.w);
    }
    const Measure1D expected = Measure1D::from_atoms(xs, ws);
    CHECK(w2_1d(bary, expected) < 1e-12);
}

TEST_CASE("admissible barycenter rejects cross-family map sets") {
    const Measure1D mu = Measure1D::from_atoms({0.5, 1.0}, {0.5, 0.5});
    const MonotoneMap1D prof({0.0, 4.0}, {0.0, 8.0});
    const std::vector<Deformation> maps = {make_scale_location(2.0, 0.0), make_radial(prof)};
    CHECK_THROWS_AS(admissible_barycenter(mu, maps, Eigen::Vector2d(0.5, 0.5)), Error);
}

TEST_CASE("multimarginal objective for two marginals is the scaled squared w2") {
    Rng rng(404);
    for (int rep = 0; rep < 5; ++rep) {
        const Measure1D a = random_atomic(rng, 5);
        const Measure1D b = random_atomic(rng, 5);
        const Eigen::Vector2d w(0.3, 0.7);
        const MultiMarginalSolution mm = multimarginal_oracle({to_discrete(a), to_discrete(b)}, w);
        const double d = w2_1d(a, b);
        CHECK(mm.objective == doctest::Approx(0.3 * 0.7 * d * d).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("multimarginal support tuples carry the full mass") {
    Rng rng(11);
    const Measure1D a = random_atomic(rng, 4);
    const Measure1D b = random_atomic(rng, 4);
    const MultiMarginalSolution mm =
        multimarginal_oracle({to_discrete(a), to_discrete(b)}, Eigen::Vector2d(0.5, 0.5));
    double total = 0.0;
    for (const double m : mm.mass) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& tuple : mm.support) CHECK(tuple.size() == 2);
}

TEST_CASE("multimarginal rejects oversized products") {
    Eigen::MatrixXd pts(50, 1);
    for (int i = 0; i < 50; ++i) pts(i, 0) = i;
    const DiscreteMeasure m = make_discrete(pts);
    CHECK_THROWS_AS(multimarginal_oracle({m, m, m}, Eigen::Vector3d(0.4, 0.3, 0.3)), Error);
}
