#include "wbary/barycenter.hpp"

#include <algorithm>
#include <cmath>

#include "simplex.hpp"

namespace wbary {

namespace {

Eigen::VectorXd simplex_weights(const Eigen::VectorXd& weights, std::size_t count) {
    require(count >= 1, "Empty", "needs at least one measure");
    require(static_cast<std::size_t>(weights.size()) == count, "WeightError",
            "one weight per measure required");
    require(weights.allFinite(), "WeightError", "weights must be finite");
    require((weights.array() > 0.0).all(), "WeightError", "weights must be positive");
    require(std::abs(weights.sum() - 1.0) <= 1e-9, "WeightError", "weights must sum to 1");
    return weights / weights.sum();
}

void check_lambda(double lambda) {
    require(lambda >= 0.0 && lambda <= 1.0, "OutOfRange", "lambda must be in [0, 1]");
}

} // namespace

Measure1D pair_barycenter(const Measure1D& mu, const Measure1D& nu, double lambda) {
    check_lambda(lambda);
    if (lambda == 1.0) return mu;
    if (lambda == 0.0) return nu;
    const auto& a = mu.atoms();
    const auto& b = nu.atoms();
    std::vector<double> xs, ws;
    for (const auto& s : quantile_coupling(mu, nu)) {
        xs.push_back(lambda * a[s.i].x + (1.0 - lambda) * b[s.j].x);
        ws.push_back(s.mass);
    }
    return Measure1D::from_atoms(std::move(xs), std::move(ws));
}

DiscreteMeasure pair_barycenter(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                double lambda) {
    check_lambda(lambda);
    if (lambda == 1.0) return mu;
    if (lambda == 0.0) return nu;
    const TransportPlan plan = solve_ot_lp(mu, nu);
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> ws;
    for (int i = 0; i < mu.size(); ++i) {
        for (int j = 0; j < nu.size(); ++j) {
            const double mass = plan.coupling(i, j);
            if (mass <= 1e-15) continue;
            pts.push_back(lambda * mu.points().row(i).transpose() +
                          (1.0 - lambda) * nu.points().row(j).transpose());
            ws.push_back(mass);
        }
    }
    Eigen::MatrixXd points(pts.size(), mu.dim());
    Eigen::VectorXd weights(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        points.row(k) = pts[k].transpose();
        weights(k) = ws[k];
    }
    return DiscreteMeasure(std::move(points), std::move(weights));
}

GaussianMeasure pair_barycenter(const GaussianMeasure& mu, const GaussianMeasure& nu,
                                double lambda) {
    check_lambda(lambda);
    require(mu.dim() == nu.dim(), "DimensionMismatch", "measures live in different dimensions");
    const Eigen::VectorXd mean = lambda * mu.mean + (1.0 - lambda) * nu.mean;
    const Eigen::MatrixXd A = gaussian_ot_map(mu.cov, nu.cov);
    const Eigen::MatrixXd C =
        lambda * Eigen::MatrixXd::Identity(mu.dim(), mu.dim()) + (1.0 - lambda) * A;
    const Eigen::MatrixXd cov = C * mu.cov * C;
    return make_gaussian(mean, 0.5 * (cov + cov.transpose()));
}

namespace {

template <class M, class Fold>
M fold_barycenter(const std::vector<M>& measures, const Eigen::VectorXd& weights, Fold fold) {
    const Eigen::VectorXd lam = simplex_weights(weights, measures.size());
    M acc = measures[0];
    double cum = lam(0);
    for (std::size_t j = 1; j < measures.size(); ++j) {
        const double next = cum + lam(j);
        acc = fold(acc, measures[j], cum / next);
        cum = next;
    }
    return acc;
}

} // namespace

Measure1D iterated_barycenter(const std::vector<Measure1D>& measures,
                              const Eigen::VectorXd& weights, int requantize) {
    return fold_barycenter(measures, weights,
                           [requantize](const Measure1D& acc, const Measure1D& next, double lam) {
                               Measure1D bar = pair_barycenter(acc, next, lam);
                               if (requantize > 0) {
                                   bar = Measure1D::from_grid(to_quantile_grid(bar, requantize));
                               }
                               return bar;
                           });
}

DiscreteMeasure iterated_barycenter(const std::vector<DiscreteMeasure>& measures,
                                    const Eigen::VectorXd& weights) {
    return fold_barycenter(measures, weights,
                           [](const DiscreteMeasure& acc, const DiscreteMeasure& next, double lam) {
                               return pair_barycenter(acc, next, lam);
                           });
}

GaussianMeasure iterated_barycenter(const std::vector<GaussianMeasure>& measures,
                                    const Eigen::VectorXd& weights) {
    return fold_barycenter(measures, weights,
                           [](const GaussianMeasure& acc, const GaussianMeasure& next, double lam) {
                               return pair_barycenter(acc, next, lam);
                           });
}

namespace {

void check_admissible_family(const std::vector<Deformation>& maps,
                             const std::vector<double>& probe) {
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (std::size_t j = i + 1; j < maps.size(); ++j) {
            require(check_admissible_pair(maps[i], maps[j], probe), "NotAdmissible",
                    "maps fail the pairwise admissibility check");
        }
    }
}

} // namespace

Measure1D admissible_barycenter(const Measure1D& mu, const std::vector<Deformation>& maps,
                                const Eigen::VectorXd& weights) {
    require(!maps.empty(), "Empty", "needs at least one map");
    // grid at the atoms so the averaged map is evaluated exactly where pushed
    std::vector<double> grid;
    grid.reserve(mu.atoms().size());
    for (const auto& a : mu.atoms()) grid.push_back(a.x);
    if (grid.size() == 1) grid.push_back(grid[0] + 1.0);
    check_admissible_family(maps, grid);
    return push_forward(mu, average_deformation(maps, weights, grid));
}

DiscreteMeasure admissible_barycenter(const DiscreteMeasure& mu,
                                      const std::vector<Deformation>& maps,
                                      const Eigen::VectorXd& weights) {
    require(!maps.empty(), "Empty", "needs at least one map");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(mu.size()) * mu.dim());
    for (int i = 0; i < mu.size(); ++i) {
        for (int k = 0; k < mu.dim(); ++k) grid.push_back(mu.points()(i, k));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.size() == 1) grid.push_back(grid[0] + 1.0);
    check_admissible_family(maps, grid);
    return push_forward(mu, average_deformation(maps, weights, grid));
}

Eigen::MatrixXd gaussian_barycenter_fixedpoint(const std::vector<Eigen::MatrixXd>& covs,
                                               const Eigen::VectorXd& weights, double tol,
                                               int max_iter) {
    const Eigen::VectorXd lam = simplex_weights(weights, covs.size());
    require(tol > 0.0, "OutOfRange", "tolerance must be positive");
    const int d = static_cast<int>(covs[0].rows());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t j = 0; j < covs.size(); ++j) {
        require(covs[j].rows() == d && covs[j].cols() == d, "DimensionMismatch",
                "covariances must share a dimension");
        M += lam(j) * covs[j];
    }
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::MatrixXd root = spd_sqrt(M);
        const Eigen::MatrixXd inv_root = spd_inv_sqrt(M);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t j = 0; j < covs.size(); ++j) {
            sum += lam(j) * spd_sqrt(root * covs[j] * root);
        }
        Eigen::MatrixXd next = inv_root * sum * sum * inv_root;
        next = 0.5 * (next + next.transpose());
        residual = (next - M).norm();
        if (residual <= tol) return M;
        M = next;
    }
    fail("NoConvergence",
         "fixed point not reached after " + std::to_string(max_iter) +
             " iterations, last residual " + std::to_string(residual));
}

Eigen::MatrixXd gaussian_iterated_barycenter(const std::vector<Eigen::MatrixXd>& covs,
                                             const Eigen::VectorXd& weights) {
    const Eigen::VectorXd lam = simplex_weights(weights, covs.size());
    const int d = static_cast<int>(covs[0].rows());
    Eigen::MatrixXd acc = covs[0];
    double cum = lam(0);
    for (std::size_t j = 1; j < covs.size(); ++j) {
        require(covs[j].rows() == d && covs[j].cols() == d, "DimensionMismatch",
                "covariances must share a dimension");
        const double next = cum + lam(j);
        const double t = cum / next;
        const Eigen::MatrixXd A = gaussian_ot_map(acc, covs[j]);
        const Eigen::MatrixXd C = t * Eigen::MatrixXd::Identity(d, d) + (1.0 - t) * A;
        acc = C * acc * C;
        acc = 0.5 * (acc + acc.transpose());
        cum = next;
    }
    return acc;
}

MultiMarginalSolution multimarginal_oracle(const std::vector<DiscreteMeasure>& measures,
                                           const Eigen::VectorXd& weights, long long tuple_cap) {
    const Eigen::VectorXd lam = simplex_weights(weights, measures.size());
    const int J = static_cast<int>(measures.size());
    const int d = measures[0].dim();
    long long tuples = 1;
    for (const auto& m : measures) {
        require(m.dim() == d, "DimensionMismatch", "measures live in different dimensions");
        tuples *= m.size();
        require(tuples <= tuple_cap, "TooLarge", "product support exceeds the tuple cap");
    }
    const int n_vars = static_cast<int>(tuples);

    // constraints: every atom of marginal 1, all but the last atom for j >= 2
    // (dropped rows are implied by total mass, keeping A full row rank)
    std::vector<int> row_offset(J);
    int n_rows = 0;
    for (int j = 0; j < J; ++j) {
        row_offset[j] = n_rows;
        n_rows += j == 0 ? measures[j].size() : measures[j].size() - 1;
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_rows, n_vars);
    Eigen::VectorXd b(n_rows);
    for (int j = 0; j < J; ++j) {
        const int keep = j == 0 ? measures[j].size() : measures[j].size() - 1;
        for (int r = 0; r < keep; ++r) b(row_offset[j] + r) = measures[j].weights()(r);
    }

    Eigen::VectorXd cost(n_vars);
    std::vector<int> idx(J, 0);
    for (int v = 0; v < n_vars; ++v) {
        Eigen::VectorXd bar = Eigen::VectorXd::Zero(d);
        for (int j = 0; j < J; ++j) bar += lam(j) * measures[j].points().row(idx[j]).transpose();
        double c = 0.0;
        for (int j = 0; j < J; ++j) {
            c += lam(j) * (measures[j].points().row(idx[j]).transpose() - bar).squaredNorm();
            const int keep = j == 0 ? measures[j].size() : measures[j].size() - 1;
            if (idx[j] < keep) A(row_offset[j] + idx[j], v) = 1.0;
        }
        cost(v) = c;
        for (int j = J - 1; j >= 0; --j) { // lexicographic, last marginal fastest
            if (++idx[j] < measures[j].size()) break;
            idx[j] = 0;
        }
    }

    const detail::LpSolution sol = detail::solve_equality_lp(A, b, cost);

    MultiMarginalSolution out{{}, {}, make_discrete(Eigen::MatrixXd::Zero(1, d)), sol.objective};
    std::vector<Eigen::VectorXd> pts;
    std::fill(idx.begin(), idx.end(), 0);
    for (int v = 0; v < n_vars; ++v) {
        if (sol.x(v) > 1e-12) {
            out.support.emplace_back(idx);
            out.mass.push_back(sol.x(v));
            Eigen::VectorXd bar = Eigen::VectorXd::Zero(d);
            for (int j = 0; j < J; ++j) {
                bar += lam(j) * measures[j].points().row(idx[j]).transpose();
            }
            pts.push_back(std::move(bar));
        }
        for (int j = J - 1; j >= 0; --j) {
            if (++idx[j] < measures[j].size()) break;
            idx[j] = 0;
        }
    }
    Eigen::MatrixXd points(pts.size(), d);
    Eigen::VectorXd mass(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        points.row(k) = pts[k].transpose();
        mass(k) = out.mass[k];
    }
    out.barycenter = DiscreteMeasure(std::move(points), std::move(mass));
    return out;
}

} // namespace wbary
