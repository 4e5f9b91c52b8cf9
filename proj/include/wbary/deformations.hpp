#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "wbary/measures.hpp"
#include "wbary/rng.hpp"
#include "wbary/transport.hpp"

namespace wbary {

struct Deformation;

struct Identity {};

/// x -> a .* x + b, a > 0 componentwise.
struct ScaleLocation {
    Eigen::VectorXd scale;
    Eigen::VectorXd offset;
};

/// Coordinatewise increasing maps, one per axis.
struct ProductIncreasing {
    std::vector<MonotoneMap1D> maps;
};

/// x -> x * f(|x|)/|x| with f increasing, f(0) = 0; 0 maps to 0.
struct RadialDistortion {
    MonotoneMap1D profile;
};

/// x -> G^T (inner(G x)) for orthogonal G.
struct OrthogonalConjugate {
    Eigen::MatrixXd frame;
    std::shared_ptr<const Deformation> inner;
};

struct Deformation {
    std::variant<Identity, ScaleLocation, ProductIncreasing, RadialDistortion, OrthogonalConjugate> v;
};

Deformation make_identity();
Deformation make_scale_location(double scale, double offset);
Deformation make_scale_location(Eigen::VectorXd scale, Eigen::VectorXd offset);
Deformation make_product_increasing(std::vector<MonotoneMap1D> maps);
Deformation make_radial(MonotoneMap1D profile);
Deformation make_orthogonal_conjugate(Eigen::MatrixXd frame, Deformation inner);

/// -1 when the map works in any dimension (Identity, RadialDistortion).
int deformation_dim(const Deformation& t);

Eigen::VectorXd apply(const Deformation& t, const Eigen::VectorXd& x);
double apply1(const Deformation& t, double x);

Deformation inverse(const Deformation& t);

DiscreteMeasure push_forward(const DiscreteMeasure& mu, const Deformation& t);
Measure1D push_forward(const Measure1D& mu, const Deformation& t);

std::vector<double> probe_grid(double lo, double hi, int count);

/// True iff a o inverse(b) passes the family-specific gradient-of-convex
/// test on the probe grid. Cross-family pairs are conservatively rejected;
/// Identity is compatible with every family.
bool check_admissible_pair(const Deformation& a, const Deformation& b,
                           const std::vector<double>& probe);

/// Pointwise convex combination sum_j lambda_j T_j, materialized exactly at
/// the grid points for map-valued families; exact closed form when all maps
/// are scale-location.
Deformation average_deformation(const std::vector<Deformation>& maps,
                                const Eigen::VectorXd& weights,
                                const std::vector<double>& grid);

/// One-dimensional random warp generator for the simulation experiments.
struct DeformationProcess {
    enum class Family { scale_location, product_increasing, radial };

    Family family = Family::scale_location;
    double spread = 0.1;
    std::uint64_t seed = 0;
    bool centered = true;
    /// Pair consecutive draws so each pair averages to the identity exactly.
    bool antithetic = false;
    double domain_lo = -8.0;
    double domain_hi = 8.0;
    int knots = 65;
};

/// Single draw. Centered processes satisfy E[T(x)] = x for every x.
Deformation random_deformation(const DeformationProcess& proc, Rng& rng);

/// count draws; antithetic processes emit reflection pairs.
std::vector<Deformation> sample_deformations(const DeformationProcess& proc, int count, Rng& rng);

} // namespace wbary
