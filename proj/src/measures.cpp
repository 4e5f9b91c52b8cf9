#include "wbary/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wbary {

namespace {

void require_finite(const std::vector<double>& xs, const char* what) {
    for (double x : xs) {
        require(std::isfinite(x), "NonFinite", std::string(what) + " contains a non-finite value");
    }
}

} // namespace

QuantileGrid make_quantile_grid(std::vector<double> values) {
    require(values.size() >= 2, "Empty", "quantile grid needs at least 2 values");
    require_finite(values, "quantile grid");
    for (std::size_t k = 1; k < values.size(); ++k) {
        require(values[k] >= values[k - 1], "OutOfRange", "quantile grid values must be nondecreasing");
    }
    return QuantileGrid{std::move(values)};
}

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    require(points_.rows() > 0, "Empty", "measure needs at least one point");
    require(points_.cols() > 0, "Empty", "points need at least one coordinate");
    require(points_.rows() == weights_.size(), "DimensionMismatch", "points/weights size mismatch");
    require(points_.allFinite(), "NonFinite", "points contain a non-finite value");
    require(weights_.allFinite(), "NonFinite", "weights contain a non-finite value");
    require((weights_.array() >= 0.0).all(), "BadWeights", "weights must be nonnegative");
    const double total = weights_.sum();
    require(std::abs(total - 1.0) <= 1e-6, "BadWeights", "weights must sum to 1");
    weights_ /= total;
}

DiscreteMeasure make_discrete(Eigen::MatrixXd points) {
    const Eigen::Index n = points.rows();
    require(n > 0, "Empty", "measure needs at least one point");
    return DiscreteMeasure(std::move(points), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure make_discrete(Eigen::MatrixXd points, Eigen::VectorXd weights) {
    return DiscreteMeasure(std::move(points), std::move(weights));
}

Measure1D Measure1D::from_atoms(std::vector<double> xs, std::vector<double> ws) {
    require(!xs.empty(), "Empty", "measure needs at least one atom");
    require(xs.size() == ws.size(), "DimensionMismatch", "atom/weight size mismatch");
    require_finite(xs, "atoms");
    require_finite(ws, "weights");
    double total = 0.0;
    for (double w : ws) {
        require(w >= 0.0, "BadWeights", "weights must be nonnegative");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-6, "BadWeights", "weights must sum to 1");

    std::vector<int> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return xs[a] < xs[b]; });

    Measure1D mu;
    mu.kind_ = Kind::atomic;
    for (int i : order) {
        const double w = ws[i] / total;
        if (w == 0.0) continue;
        if (!mu.atoms_.empty() && xs[i] - mu.atoms_.back().x <= 1e-12) {
            mu.atoms_.back().w += w;
        } else {
            mu.atoms_.push_back({xs[i], w});
        }
    }
    require(!mu.atoms_.empty(), "BadWeights", "all atoms have zero weight");
    return mu;
}

Measure1D Measure1D::from_grid(QuantileGrid grid) {
    Measure1D mu;
    mu.kind_ = Kind::grid;
    const double unit = 1.0 / static_cast<double>(grid.size());
    for (double v : grid.values) {
        if (!mu.atoms_.empty() && v - mu.atoms_.back().x <= 1e-12) {
            mu.atoms_.back().w += unit;
        } else {
            mu.atoms_.push_back({v, unit});
        }
    }
    mu.grid_ = std::move(grid);
    return mu;
}

const QuantileGrid& Measure1D::grid() const {
    require(kind_ == Kind::grid, "KindMismatch", "measure has no quantile grid");
    return grid_;
}

double quantile(const Measure1D& mu, double t) {
    require(t > 0.0 && t < 1.0, "OutOfRange", "quantile level must be in (0, 1)");
    if (mu.is_grid()) {
        const auto& values = mu.grid().values;
        const int m = static_cast<int>(values.size());
        const int k = std::clamp(static_cast<int>(std::ceil(t * m)) - 1, 0, m - 1);
        return values[k];
    }
    double cum = 0.0;
    const auto& atoms = mu.atoms();
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
        cum += atoms[i].w;
        if (cum >= t) return atoms[i].x;
    }
    return atoms.back().x;
}

QuantileGrid to_quantile_grid(const Measure1D& mu, int m) {
    require(m >= 2, "OutOfRange", "grid size must be at least 2");
    std::vector<double> values(m);
    const auto& atoms = mu.atoms();
    std::size_t i = 0;
    double cum = atoms[0].w;
    for (int k = 0; k < m; ++k) {
        const double t = (k + 0.5) / m;
        while (i + 1 < atoms.size() && cum < t) cum += atoms[++i].w;
        values[k] = atoms[i].x;
    }
    return QuantileGrid{std::move(values)};
}

Measure1D to_measure1d(const DiscreteMeasure& mu) {
    require(mu.dim() == 1, "DimensionMismatch", "only one-dimensional measures convert");
    std::vector<double> xs(mu.size()), ws(mu.size());
    for (int i = 0; i < mu.size(); ++i) {
        xs[i] = mu.points()(i, 0);
        ws[i] = mu.weights()(i);
    }
    return Measure1D::from_atoms(std::move(xs), std::move(ws));
}

DiscreteMeasure to_discrete(const Measure1D& mu) {
    const auto& atoms = mu.atoms();
    const int n = static_cast<int>(atoms.size());
    Eigen::MatrixXd pts(n, 1);
    Eigen::VectorXd ws(n);
    for (int i = 0; i < n; ++i) {
        pts(i, 0) = atoms[i].x;
        ws(i) = atoms[i].w;
    }
    return DiscreteMeasure(std::move(pts), std::move(ws));
}

double second_moment(const DiscreteMeasure& mu) {
    return (mu.points().array().square().rowwise().sum() * mu.weights().array()).sum();
}

double second_moment(const Measure1D& mu) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += a.w * a.x * a.x;
    return s;
}

double mean(const Measure1D& mu) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += a.w * a.x;
    return s;
}

GaussianMeasure make_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    require(mean.size() > 0, "Empty", "mean must be nonempty");
    require(cov.rows() == cov.cols() && cov.rows() == mean.size(), "DimensionMismatch",
            "covariance shape must match mean");
    require(mean.allFinite() && cov.allFinite(), "NonFinite", "gaussian parameters must be finite");
    require((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-10, "NotSPD",
            "covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
    require(es.eigenvalues().minCoeff() > 0.0, "NotSPD", "covariance must be positive definite");
    return GaussianMeasure{std::move(mean), std::move(cov)};
}

} // namespace wbary
