#include "doctest.h"

#include <cmath>
#include <vector>

#include "wbary/deformations.hpp"
#include "wbary/error.hpp"
#include "wbary/measures.hpp"
#include "wbary/rng.hpp"

using namespace wbary;

TEST_CASE("scale-location applies and inverts") {
    const Deformation t = make_scale_location(2.0, 1.0);
    CHECK(apply1(t, 3.0) == doctest::Approx(7.0));
    const Deformation s = inverse(t);
    CHECK(apply1(s, 7.0) == doctest::Approx(3.0));
    CHECK(deformation_dim(t) == 1);
    CHECK_THROWS_AS(make_scale_location(-1.0, 0.0), Error);
    CHECK_THROWS_AS(make_scale_location(0.0, 0.0), Error);
}

TEST_CASE("identity is a fixed point of apply and inverse") {
    const Deformation id = make_identity();
    CHECK(deformation_dim(id) == -1);
    CHECK(apply1(id, -2.5) == -2.5);
    const Eigen::Vector3d x(1.0, -1.0, 4.0);
    CHECK((apply(inverse(id), x) - x).norm() == 0.0);
}

TEST_CASE("product-increasing maps act coordinatewise") {
    std::vector<MonotoneMap1D> maps;
    maps.emplace_back(std::vector<double>{-1.0, 1.0}, std::vector<double>{-2.0, 2.0}); // 2x
    maps.emplace_back(std::vector<double>{-1.0, 1.0}, std::vector<double>{0.0, 2.0});  // x+1
    const Deformation t = make_product_increasing(maps);
    CHECK(deformation_dim(t) == 2);
    const Eigen::Vector2d y = apply(t, Eigen::Vector2d(0.5, 0.5));
    CHECK(y(0) == doctest::Approx(1.0));
    CHECK(y(1) == doctest::Approx(1.5));
    const Eigen::Vector2d back = apply(inverse(t), y);
    CHECK(back(0) == doctest::Approx(0.5));
    CHECK(back(1) == doctest::Approx(0.5));
}

TEST_CASE("radial distortion rescales along rays and fixes the origin") {
    const MonotoneMap1D profile({0.0, 1.0, 2.0}, {0.0, 2.0, 4.0}); // f(r) = 2r
    const Deformation t = make_radial(profile);
    CHECK(deformation_dim(t) == -1);
    const Eigen::Vector2d y = apply(t, Eigen::Vector2d(3.0, 4.0));
    CHECK(y(0) == doctest::Approx(6.0));
    CHECK(y(1) == doctest::Approx(8.0));
    CHECK(apply(t, Eigen::Vector2d::Zero()).norm() == 0.0);
    CHECK(apply1(t, -1.5) == doctest::Approx(-3.0)); // f(|x|) sign(x) in 1D

    const MonotoneMap1D shifted({0.0, 1.0}, {0.5, 1.5});
    CHECK_THROWS_AS(make_radial(shifted), Error); // f(0) != 0
}

TEST_CASE("orthogonal conjugate rotates, applies, rotates back") {
    Eigen::MatrixXd g(2, 2);
    g << 0.0, -1.0, 1.0, 0.0;
    const Deformation inner = make_scale_location(Eigen::Vector2d(2.0, 3.0), Eigen::Vector2d::Zero());
    const Deformation t = make_orthogonal_conjugate(g, inner);
    const Eigen::Vector2d y = apply(t, Eigen::Vector2d(1.0, 0.0));
    CHECK(y(0) == doctest::Approx(3.0));
    CHECK(y(1) == doctest::Approx(0.0).scale(1.0));
    const Eigen::Vector2d back = apply(inverse(t), y);
    CHECK(back(0) == doctest::Approx(1.0));
    CHECK(back(1) == doctest::Approx(0.0).scale(1.0));

    Eigen::MatrixXd skew(2, 2);
    skew << 1.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(make_orthogonal_conjugate(skew, inner), Error);
}

TEST_CASE("push_forward maps atoms and keeps weights") {
    const Measure1D mu = Measure1D::from_atoms({-1.0, 0.0, 2.0}, {0.25, 0.25, 0.5});
    const Measure1D nu = push_forward(mu, make_scale_location(2.0, 1.0));
    REQUIRE(nu.atoms().size() == 3);
    CHECK(nu.atoms()[0].x == doctest::Approx(-1.0));
    CHECK(nu.atoms()[2].x == doctest::Approx(5.0));
    CHECK(nu.atoms()[2].w == doctest::Approx(0.5));
}

TEST_CASE("admissibility accepts same-family pairs and the identity wildcard") {
    const auto probe = probe_grid(-4.0, 4.0, 33);
    const Deformation a = make_scale_location(2.0, 1.0);
    const Deformation b = make_scale_location(0.5, -3.0);
    CHECK(check_admissible_pair(a, b, probe));
    CHECK(check_admissible_pair(a, make_identity(), probe));
    CHECK(check_admissible_pair(make_identity(), b, probe));

    const MonotoneMap1D f({-4.0, 0.0, 4.0}, {-8.0, 0.0, 2.0});
    const Deformation p1 = make_product_increasing({f});
    const Deformation p2 = make_product_increasing({identity_map()});
    CHECK(check_admissible_pair(p1, p2, probe));

    const MonotoneMap1D prof({0.0, 2.0, 4.0}, {0.0, 1.0, 6.0});
    CHECK(check_admissible_pair(make_radial(prof), make_radial(prof), probe));
}

TEST_CASE("admissibility rejects cross-family pairs") {
    const auto probe = probe_grid(-4.0, 4.0, 33);
    const Deformation sl = make_scale_location(2.0, 0.0);
    const MonotoneMap1D prof({0.0, 4.0}, {0.0, 8.0});
    CHECK_FALSE(check_admissible_pair(sl, make_radial(prof), probe));
}

TEST_CASE("admissibility requires matching dimensions") {
    const auto probe = probe_grid(-1.0, 1.0, 9);
    const Deformation a = make_scale_location(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d::Zero());
    const Deformation b =
        make_scale_location(Eigen::Vector3d(1.0, 2.0, 3.0), Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(check_admissible_pair(a, b, probe), Error);
}

TEST_CASE("conjugates are admissible only with a shared frame") {
    const auto probe = probe_grid(-2.0, 2.0, 17);
    Eigen::MatrixXd g(2, 2), h(2, 2);
    g << 0.0, -1.0, 1.0, 0.0;
    const double c = std::sqrt(0.5);
    h << c, -c, c, c;
    const Deformation in1 = make_scale_location(Eigen::Vector2d(2.0, 1.0), Eigen::Vector2d::Zero());
    const Deformation in2 = make_scale_location(Eigen::Vector2d(1.0, 3.0), Eigen::Vector2d::Zero());
    CHECK(check_admissible_pair(make_orthogonal_conjugate(g, in1), make_orthogonal_conjugate(g, in2),
                                probe));
    CHECK_FALSE(check_admissible_pair(make_orthogonal_conjugate(g, in1),
                                      make_orthogonal_conjugate(h, in2), probe));
}

TEST_CASE("scale-location averages have a closed form") {
    const std::vector<Deformation> maps = {make_scale_location(2.0, 1.0),
                                           make_scale_location(4.0, -3.0)};
    const Eigen::Vector2d w(0.5, 0.5);
    const Deformation avg = average_deformation(maps, w, probe_grid(-4.0, 4.0, 9));
    for (const double x : {-3.0, -1.0, 0.0, 0.7, 2.0}) {
        CHECK(apply1(avg, x) == doctest::Approx(3.0 * x - 1.0).epsilon(1e-14));
    }
}

TEST_CASE("averages of map families interpolate pointwise at the grid") {
    const MonotoneMap1D f({-2.0, 0.0, 2.0}, {-4.0, 0.0, 2.0});
    const std::vector<Deformation> maps = {make_product_increasing({f}),
                                           make_product_increasing({identity_map()})};
    const Eigen::Vector2d w(0.25, 0.75);
    const auto grid = probe_grid(-2.0, 2.0, 9);
    const Deformation avg = average_deformation(maps, w, grid);
    for (const double x : grid) {
        CHECK(apply1(avg, x) == doctest::Approx(0.25 * f(x) + 0.75 * x).epsilon(1e-12));
    }
}

TEST_CASE("average_deformation validates weights and families") {
    const std::vector<Deformation> maps = {make_scale_location(2.0, 0.0),
                                           make_scale_location(1.0, 1.0)};
    const auto grid = probe_grid(-1.0, 1.0, 5);
    CHECK_THROWS_AS(average_deformation(maps, Eigen::Vector2d(0.7, 0.7), grid), Error);
    CHECK_THROWS_AS(average_deformation(maps, Eigen::Vector2d(-0.5, 1.5), grid), Error);

    const MonotoneMap1D prof({0.0, 1.0}, {0.0, 2.0});
    const std::vector<Deformation> mixed = {make_scale_location(2.0, 0.0), make_radial(prof)};
    CHECK_THROWS_AS(average_deformation(mixed, Eigen::Vector2d(0.5, 0.5), grid), Error);
}

TEST_CASE("random deformations are reproducible and respect the spread cap") {
    DeformationProcess proc;
    proc.family = DeformationProcess::Family::scale_location;
    proc.spread = 0.3;
    Rng r1(99), r2(99);
    const Deformation a = random_deformation(proc, r1);
    const Deformation b = random_deformation(proc, r2);
    for (const double x : probe_grid(-5.0, 5.0, 21)) CHECK(apply1(a, x) == apply1(b, x));

    proc.spread = 0.0;
    Rng r3(1);
    const Deformation id = random_deformation(proc, r3);
    CHECK(apply1(id, 1.25) == 1.25);

    proc.spread = 1.0;
    Rng r4(1);
    CHECK_THROWS_AS(random_deformation(proc, r4), Error);
}

TEST_CASE("random draws stay strictly increasing for every family") {
    Rng rng(2024);
    for (const auto family : {DeformationProcess::Family::scale_location,
                              DeformationProcess::Family::product_increasing,
                              DeformationProcess::Family::radial}) {
        DeformationProcess proc;
        proc.family = family;
        proc.spread = 0.4;
        if (family != DeformationProcess::Family::scale_location) proc.spread = 0.25;
        for (int rep = 0; rep < 5; ++rep) {
            const Deformation t = random_deformation(proc, rng);
            const auto grid = probe_grid(family == DeformationProcess::Family::radial ? 0.0 : -8.0,
                                         8.0, 65);
            for (std::size_t k = 1; k < grid.size(); ++k) {
                CHECK(apply1(t, grid[k]) > apply1(t, grid[k - 1]));
            }
        }
    }
}

TEST_CASE("antithetic pairs average to the identity exactly") {
    for (const auto family : {DeformationProcess::Family::scale_location,
                              DeformationProcess::Family::product_increasing,
                              DeformationProcess::Family::radial}) {
        DeformationProcess proc;
        proc.family = family;
        proc.spread = 0.2;
        proc.antithetic = true;
        Rng rng(31);
        const auto pair = sample_deformations(proc, 2, rng);
        REQUIRE(pair.size() == 2);
        const Eigen::Vector2d w(0.5, 0.5);
        const auto grid = probe_grid(-6.0, 6.0, 25);
        const Deformation avg = average_deformation(pair, w, grid);
        for (const double x : grid) CHECK(apply1(avg, x) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("sampled deformation lists are rng-stream deterministic") {
    DeformationProcess proc;
    proc.family = DeformationProcess::Family::product_increasing;
    proc.spread = 0.3;
    Rng r1(5), r2(5);
    const auto a = sample_deformations(proc, 4, r1);
    const auto b = sample_deformations(proc, 4, r2);
    REQUIRE(a.size() == 4);
    for (int j = 0; j < 4; ++j) {
        for (const double x : probe_grid(-7.0, 7.0, 15)) {
            CHECK(apply1(a[j], x) == apply1(b[j], x));
        }
    }
}
