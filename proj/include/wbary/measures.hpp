#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wbary/error.hpp"

namespace wbary {

/// Quantile function sampled at midpoint nodes: values[k] = F^{-1}((k+1/2)/m)
/// for k = 0..m-1, so (1/m) * sum g(values[k]) is a midpoint rule for
/// integrals of g(F^{-1}) over (0,1) with no boundary evaluation.
struct QuantileGrid {
    std::vector<double> values; // nondecreasing, size >= 2

    [[nodiscard]] int size() const { return static_cast<int>(values.size()); }
};

QuantileGrid make_quantile_grid(std::vector<double> values);

/// Weighted point cloud in R^d: the universal empirical representation.
class DiscreteMeasure {
public:
    DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

    [[nodiscard]] const Eigen::MatrixXd& points() const { return points_; }
    [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }
    [[nodiscard]] int size() const { return static_cast<int>(points_.rows()); }
    [[nodiscard]] int dim() const { return static_cast<int>(points_.cols()); }

private:
    Eigen::MatrixXd points_;  // n x d
    Eigen::VectorXd weights_; // n, nonnegative, sums to 1
};

/// Uniform weights 1/n.
DiscreteMeasure make_discrete(Eigen::MatrixXd points);
/// Explicit weights; renormalized when |sum - 1| <= 1e-6, rejected beyond.
DiscreteMeasure make_discrete(Eigen::MatrixXd points, Eigen::VectorXd weights);

struct Atom {
    double x;
    double w;
};

/// One-dimensional measure with c.d.f. / generalized-inverse access. Either a
/// merged atom list (strictly increasing x) or a uniform quantile grid.
class Measure1D {
public:
    enum class Kind { atomic, grid };

    /// Sorts, merges atoms closer than 1e-12, validates weights.
    static Measure1D from_atoms(std::vector<double> xs, std::vector<double> ws);
    static Measure1D from_grid(QuantileGrid grid);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_grid() const { return kind_ == Kind::grid; }

    /// Merged atom view (grid kind: equal values merged, each node mass 1/m).
    [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
    /// Grid kind only.
    [[nodiscard]] const QuantileGrid& grid() const;

    [[nodiscard]] double min_support() const { return atoms_.front().x; }
    [[nodiscard]] double max_support() const { return atoms_.back().x; }

private:
    Kind kind_ = Kind::atomic;
    std::vector<Atom> atoms_;
    QuantileGrid grid_; // kept only for grid kind
};

/// Left-continuous generalized inverse F^{-1}(t) = inf{x : F(x) >= t}, t in (0,1).
double quantile(const Measure1D& mu, double t);

QuantileGrid to_quantile_grid(const Measure1D& mu, int m);

/// d == 1 only: sorted, merged atomic form.
Measure1D to_measure1d(const DiscreteMeasure& mu);
DiscreteMeasure to_discrete(const Measure1D& mu);

double second_moment(const DiscreteMeasure& mu);
double second_moment(const Measure1D& mu);
double mean(const Measure1D& mu);

/// Mean + SPD covariance, for the closed-form Gaussian theory.
struct GaussianMeasure {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    [[nodiscard]] int dim() const { return static_cast<int>(mean.size()); }
};

/// Validates symmetry (1e-10) and positive definiteness.
GaussianMeasure make_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);

} // namespace wbary
