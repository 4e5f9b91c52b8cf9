#include "wbary/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wbary {

GeodesicCurve make_geodesic(Measure1D base, MonotoneMap1D direction, int grid_m) {
    require(grid_m >= 2, "OutOfRange", "grid size must be at least 2");
    return GeodesicCurve{std::move(base), std::move(direction), grid_m};
}

MonotoneMap1D transport_to_barycenter(const Measure1D& bary, const Measure1D& mu) {
    return brenier_map_1d(bary, mu);
}

Eigen::VectorXd discriminant_features(const Measure1D& bary, const std::vector<Measure1D>& measures,
                                      int m) {
    Eigen::VectorXd features(measures.size());
    for (std::size_t j = 0; j < measures.size(); ++j) {
        const double w = w2_1d(bary, measures[j], m);
        features(j) = w * w;
    }
    return features;
}

namespace {

const double kInf = std::numeric_limits<double>::infinity();

ValidityRange slope_validity(const std::vector<double>& xs, const std::vector<double>& ys) {
    bool is_identity = true;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (std::abs(ys[k] - xs[k]) > 1e-12) {
            is_identity = false;
            break;
        }
    }
    if (is_identity || xs.size() < 2) return {-kInf, kInf};
    double a = kInf, b = -kInf;
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double slope = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
        a = std::min(a, slope);
        b = std::max(b, slope);
    }
    // pure shift: the interpolant stays increasing for every t
    if (std::abs(a - 1.0) <= 1e-12 && std::abs(b - 1.0) <= 1e-12) return {-kInf, kInf};
    return {a < 1.0 ? 1.0 / (a - 1.0) : -kInf, b > 1.0 ? 1.0 / (b - 1.0) : kInf};
}

} // namespace

ValidityRange validity_range(const GeodesicCurve& curve) {
    return slope_validity(curve.direction.xs(), curve.direction.ys());
}

GeodesicPoint geodesic_point(const GeodesicCurve& curve, double t) {
    require(std::isfinite(t), "NonFinite", "t must be finite");
    const QuantileGrid grid = to_quantile_grid(curve.base, curve.grid_m);
    std::vector<double> values(grid.values.size());
    bool monotone = true;
    for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = (1.0 - t) * grid.values[k] + t * curve.direction(grid.values[k]);
        if (k > 0 && values[k] < values[k - 1]) monotone = false;
    }
    const ValidityRange range = validity_range(curve);
    const bool warned = !monotone || t < range.t_min || t > range.t_max;
    std::sort(values.begin(), values.end());
    return GeodesicPoint{Measure1D::from_grid(QuantileGrid{std::move(values)}), warned};
}

namespace {

struct GridVectors {
    std::vector<double> base;     // F_B^{-1}(t_k)
    Eigen::VectorXd displacement; // T(F_B^{-1}(t_k)) - F_B^{-1}(t_k)
};

GridVectors direction_on_grid(const GeodesicCurve& curve, const Measure1D& bary) {
    GridVectors g;
    g.base = to_quantile_grid(bary, curve.grid_m).values;
    g.displacement.resize(curve.grid_m);
    for (int k = 0; k < curve.grid_m; ++k) {
        g.displacement(k) = curve.direction(g.base[k]) - g.base[k];
    }
    return g;
}

GeodesicDistance project_residual(const Eigen::VectorXd& residual, const Eigen::VectorXd& dvec) {
    const int m = static_cast<int>(dvec.size());
    const double norm2 = dvec.squaredNorm() / m;
    require(norm2 > 1e-24, "DegenerateDirection", "direction map is the identity");
    const double inner = residual.dot(dvec) / m;
    const double t_star = inner / norm2;
    const double r2 = residual.squaredNorm() / m;
    return GeodesicDistance{std::max(r2 - inner * inner / norm2, 0.0), t_star};
}

} // namespace

GeodesicDistance dist_to_geodesic(const Measure1D& mu_j, const GeodesicCurve& curve,
                                  const Measure1D& bary) {
    const GridVectors g = direction_on_grid(curve, bary);
    Eigen::VectorXd residual(curve.grid_m);
    for (int k = 0; k < curve.grid_m; ++k) {
        residual(k) = quantile(mu_j, (k + 0.5) / curve.grid_m) - g.base[k];
    }
    return project_residual(residual, g.displacement);
}

PcaResult geodesic_pca(const std::vector<Measure1D>& measures, const Measure1D& bary, int k,
                       int m) {
    const int J = static_cast<int>(measures.size());
    require(J >= 1, "Empty", "needs at least one measure");
    require(m >= 2, "OutOfRange", "grid size must be at least 2");
    require(k >= 1 && k <= std::min(J, m), "BadK", "component count must be in [1, min(J, m)]");

    PcaResult out;
    out.barycenter = to_quantile_grid(bary, m);
    out.residuals.resize(J, m);
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < m; ++i) {
            out.residuals(j, i) = quantile(measures[j], (i + 0.5) / m) - out.barycenter.values[i];
        }
    }

    const Eigen::MatrixXd gram = out.residuals * out.residuals.transpose() / m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    require(es.info() == Eigen::Success, "NoConvergence", "eigendecomposition failed");

    out.components = Eigen::MatrixXd::Zero(k, m);
    out.eigenvalues.resize(k);
    out.scores = Eigen::MatrixXd::Zero(J, k);
    out.validity.reserve(k);
    for (int c = 0; c < k; ++c) {
        const int src = J - 1 - c; // eigenvalues come back ascending
        const double s = std::max(es.eigenvalues()(src), 0.0);
        out.eigenvalues(c) = s / J;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
        if (s > 1e-14) {
            v = out.residuals.transpose() * es.eigenvectors().col(src) / std::sqrt(s);
            int peak = 0;
            for (int i = 1; i < m; ++i) {
                if (std::abs(v(i)) > std::abs(v(peak))) peak = i;
            }
            if (v(peak) < 0.0) v = -v;
            // unit direction: t*_j is a plain inner product
            out.scores.col(c) = out.residuals * v / m;
        }
        out.components.row(c) = v.transpose();

        std::vector<double> xs, ys;
        for (int i = 0; i < m; ++i) {
            const double x = out.barycenter.values[i];
            if (!xs.empty() && x == xs.back()) {
                ys.back() = 0.5 * (ys.back() + x + v(i)); // duplicate grid node
            } else {
                xs.push_back(x);
                ys.push_back(x + v(i));
            }
        }
        out.validity.push_back(slope_validity(xs, ys));
    }
    return out;
}

MonotoneMap1D component_map(const PcaResult& result, int component) {
    require(component >= 0 && component < result.components.rows(), "BadK",
            "component index out of range");
    std::vector<double> xs, ys;
    const int m = result.barycenter.size();
    for (int i = 0; i < m; ++i) {
        const double x = result.barycenter.values[i];
        const double y = x + result.components(component, i);
        if (!xs.empty() && x == xs.back()) {
            ys.back() = 0.5 * (ys.back() + y);
        } else {
            xs.push_back(x);
            ys.push_back(y);
        }
    }
    return MonotoneMap1D(std::move(xs), std::move(ys));
}

} // namespace wbary
