#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wbary/deformations.hpp"
#include "wbary/measures.hpp"
#include "wbary/transport.hpp"

namespace wbary {

/// McCann interpolant between mu (weight lambda) and nu: optimally coupled
/// mass at (x, y) placed at lambda x + (1-lambda) y. lambda = 1 gives mu.
Measure1D pair_barycenter(const Measure1D& mu, const Measure1D& nu, double lambda);
DiscreteMeasure pair_barycenter(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double lambda);
GaussianMeasure pair_barycenter(const GaussianMeasure& mu, const GaussianMeasure& nu, double lambda);

/// Left fold of pair barycenters with cumulative weights: the accumulated
/// measure over the first j-1 inputs carries weight (lambda_1+...+lambda_{j-1})
/// / (lambda_1+...+lambda_j) against input j. requantize > 0 compresses the
/// accumulated measure onto that many quantile nodes between folds.
Measure1D iterated_barycenter(const std::vector<Measure1D>& measures,
                              const Eigen::VectorXd& weights, int requantize = 0);
DiscreteMeasure iterated_barycenter(const std::vector<DiscreteMeasure>& measures,
                                    const Eigen::VectorXd& weights);
GaussianMeasure iterated_barycenter(const std::vector<GaussianMeasure>& measures,
                                    const Eigen::VectorXd& weights);

/// Barycenter of the warped measures (T_j)_# mu as the pushforward of mu by
/// the weighted average map. Maps must pass the pairwise admissibility check.
Measure1D admissible_barycenter(const Measure1D& mu, const std::vector<Deformation>& maps,
                                const Eigen::VectorXd& weights);
DiscreteMeasure admissible_barycenter(const DiscreteMeasure& mu,
                                      const std::vector<Deformation>& maps,
                                      const Eigen::VectorXd& weights);

/// Picard iteration M <- M^{-1/2} (sum_j lambda_j (M^{1/2} S_j M^{1/2})^{1/2})^2 M^{-1/2}
/// from M_0 = sum_j lambda_j S_j; the returned M has fixed-point residual
/// ||G(M) - M||_F <= tol.
Eigen::MatrixXd gaussian_barycenter_fixedpoint(const std::vector<Eigen::MatrixXd>& covs,
                                               const Eigen::VectorXd& weights, double tol = 1e-10,
                                               int max_iter = 500);

/// Covariance of the fold of pairwise Gaussian interpolants (order-dependent
/// for d >= 2).
Eigen::MatrixXd gaussian_iterated_barycenter(const std::vector<Eigen::MatrixXd>& covs,
                                             const Eigen::VectorXd& weights);

struct MultiMarginalSolution {
    std::vector<std::vector<int>> support; // atom index per marginal, positive-mass tuples
    std::vector<double> mass;
    DiscreteMeasure barycenter; // image under x -> sum_j lambda_j x_j
    double objective;
};

/// Exact LP over the product support minimizing
/// sum_j lambda_j |x_{i_j} - xbar|^2; its pushforward by the averaging map is
/// the barycenter.
MultiMarginalSolution multimarginal_oracle(const std::vector<DiscreteMeasure>& measures,
                                           const Eigen::VectorXd& weights,
                                           long long tuple_cap = 100000);

} // namespace wbary
