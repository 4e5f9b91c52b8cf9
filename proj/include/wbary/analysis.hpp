#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wbary/measures.hpp"
#include "wbary/transport.hpp"

namespace wbary {

/// Curve t -> ((1-t) Id + t T)_# base, extended to all real t.
struct GeodesicCurve {
    Measure1D base;
    MonotoneMap1D direction;
    int grid_m = 512;
};

GeodesicCurve make_geodesic(Measure1D base, MonotoneMap1D direction, int grid_m = 512);

/// The map S_j with mu_j = (S_j)_# mu_B.
MonotoneMap1D transport_to_barycenter(const Measure1D& bary, const Measure1D& mu);

/// Squared W2 distances to the barycenter, the clustering features.
Eigen::VectorXd discriminant_features(const Measure1D& bary, const std::vector<Measure1D>& measures,
                                      int m = 512);

struct GeodesicPoint {
    Measure1D measure;
    bool warned; // t outside the validity range or mapped values non-monotone
};

GeodesicPoint geodesic_point(const GeodesicCurve& curve, double t);

struct ValidityRange {
    double t_min;
    double t_max;
};

/// Interval of t keeping (1-t) Id + t T increasing, from the extreme knot
/// slopes a <= T' <= b: (1/(a-1), 1/(b-1)), unbounded sides when a >= 1 or
/// b <= 1; the whole line when T is the identity or a pure shift.
ValidityRange validity_range(const GeodesicCurve& curve);

struct GeodesicDistance {
    double d2;
    double t_star;
};

/// Projection of mu_j onto the curve in L2(mu_B) quantile coordinates:
/// t* = <r, T o F_B^{-1} - F_B^{-1}> / ||...||^2, d2 the squared residual.
GeodesicDistance dist_to_geodesic(const Measure1D& mu_j, const GeodesicCurve& curve,
                                  const Measure1D& bary);

struct PcaResult {
    QuantileGrid barycenter;             // F_B^{-1} at midpoint nodes
    Eigen::MatrixXd residuals;           // J x m, r_j = F_j^{-1} - F_B^{-1}
    Eigen::MatrixXd components;          // k x m, orthonormal under (1/m) sum
    Eigen::VectorXd eigenvalues;         // nonincreasing, (1/J) sum of squared projections
    Eigen::MatrixXd scores;              // J x k, t*_j per component
    std::vector<ValidityRange> validity; // per component
};

/// Functional PCA of the quantile residuals in L2(mu_B) via the J x J Gram
/// matrix.
PcaResult geodesic_pca(const std::vector<Measure1D>& measures, const Measure1D& bary, int k,
                       int m = 512);

/// Direction map Id + v_i along the grid knots (throws when non-monotone).
MonotoneMap1D component_map(const PcaResult& result, int component);

} // namespace wbary
