#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wbary/measures.hpp"

namespace wbary {

/// Piecewise-linear nondecreasing map given by knots (x, T(x)).
class MonotoneMap1D {
public:
    enum class Extrapolation { clamp, linear };

    MonotoneMap1D(std::vector<double> xs, std::vector<double> ys,
                  Extrapolation mode = Extrapolation::linear);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] const std::vector<double>& xs() const { return xs_; }
    [[nodiscard]] const std::vector<double>& ys() const { return ys_; }
    [[nodiscard]] Extrapolation extrapolation() const { return mode_; }

    /// Knot swap; requires strictly increasing values.
    [[nodiscard]] MonotoneMap1D inverse() const;

private:
    std::vector<double> xs_; // strictly increasing
    std::vector<double> ys_; // nondecreasing
    Extrapolation mode_;
};

MonotoneMap1D identity_map();

/// One segment of the 1D quantile coupling: mass moved from atom i of the
/// source to atom j of the target.
struct CouplingSegment {
    double mass;
    int i;
    int j;
};

std::vector<CouplingSegment> quantile_coupling(const Measure1D& mu, const Measure1D& nu);

/// 2-Wasserstein distance. Two atomic measures use the exact merged-breakpoint
/// formula; any grid-kind input falls back to the m-point midpoint rule.
double w2_1d(const Measure1D& mu, const Measure1D& nu, int m = 512);

/// 1D Brenier map T = G^{-1} o F with knots at the atoms of mu; at each atom
/// the value is the barycentric projection of the quantile coupling.
MonotoneMap1D brenier_map_1d(const Measure1D& mu, const Measure1D& nu);

struct TransportPlan {
    Eigen::MatrixXd coupling; // n x m, nonnegative, marginals = weights
    double cost;              // squared-W2 value
};

/// Exact discrete OT by the transportation simplex. Deterministic pivoting.
TransportPlan solve_ot_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

double w2_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Symmetric eigendecomposition roots with eigenvalue floor 1e-14.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& S);
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& S);

/// Optimal map x -> Ax from N(0,S) to N(0,T):
/// A = T^{1/2} (T^{1/2} S T^{1/2})^{-1/2} T^{1/2}, symmetric PD, A S A = T.
Eigen::MatrixXd gaussian_ot_map(const Eigen::MatrixXd& S, const Eigen::MatrixXd& T);

} // namespace wbary
