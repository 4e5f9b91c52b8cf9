#include "wbary/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wbary/stats.hpp"
#include "wbary/transport.hpp"

namespace wbary {

SmoothedMeasure::SmoothedMeasure(DiscreteMeasure base, double eps, SmoothOptions opts)
    : base_(std::move(base)), eps_(eps), opts_(opts),
      rep_(base_.dim() == 1 ? Representation::mixture_1d : Representation::sampled) {
    require(eps_ >= 0.0 && std::isfinite(eps_), "BadBandwidth", "bandwidth must be nonnegative");
    require(opts_.grid_m >= 2, "OutOfRange", "grid size must be at least 2");
    require(opts_.samples >= 1, "OutOfRange", "sample count must be positive");
    if (rep_ == Representation::mixture_1d) {
        const Measure1D atoms = wbary::to_measure1d(base_);
        double cum = 0.0;
        for (const auto& a : atoms.atoms()) {
            xs_.push_back(a.x);
            cum += a.w;
            cum_.push_back(cum);
        }
    }
}

SmoothedMeasure smooth(const DiscreteMeasure& base, double eps, SmoothOptions opts) {
    return SmoothedMeasure(base, eps, opts);
}

double SmoothedMeasure::mixture_quantile(double t, double lo) const {
    const double sd = std::sqrt(eps_);
    double hi = xs_.back() + sd * norm_quantile(t);
    if (hi <= lo) return lo;
    auto cdf = [&](double x) {
        double f = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            const double w = cum_[i] - (i == 0 ? 0.0 : cum_[i - 1]);
            f += w * norm_cdf((x - xs_[i]) / sd);
        }
        return f;
    };
    auto pdf = [&](double x) {
        double f = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            const double w = cum_[i] - (i == 0 ? 0.0 : cum_[i - 1]);
            const double u = (x - xs_[i]) / sd;
            f += w * std::exp(-0.5 * u * u);
        }
        return f / (sd * std::sqrt(2.0 * std::numbers::pi));
    };
    // bracketed Newton: bisection step whenever Newton leaves [lo, hi]
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
        const double f = cdf(x) - t;
        (f < 0.0 ? lo : hi) = x;
        const double df = pdf(x);
        double next = df > 0.0 ? x - f / df : x;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

double SmoothedMeasure::quantile(double t) const {
    require(rep_ == Representation::mixture_1d, "KindMismatch", "mixture quantile needs d = 1");
    require(t > 0.0 && t < 1.0, "OutOfRange", "quantile level must be in (0, 1)");
    if (eps_ == 0.0) {
        const auto it = std::lower_bound(cum_.begin(), cum_.end(), t);
        return xs_[std::min<std::size_t>(it - cum_.begin(), xs_.size() - 1)];
    }
    return mixture_quantile(t, xs_.front() + std::sqrt(eps_) * norm_quantile(t));
}

Measure1D SmoothedMeasure::to_measure1d() const {
    require(rep_ == Representation::mixture_1d, "KindMismatch", "needs d = 1");
    if (eps_ == 0.0) return wbary::to_measure1d(base_);
    const int m = opts_.grid_m;
    std::vector<double> values(m);
    // quantiles are increasing, so each solve starts at its predecessor
    double lo = xs_.front() + std::sqrt(eps_) * norm_quantile(0.5 / m);
    for (int k = 0; k < m; ++k) {
        values[k] = mixture_quantile((k + 0.5) / m, lo);
        lo = values[k];
    }
    return Measure1D::from_grid(QuantileGrid{std::move(values)});
}

DiscreteMeasure SmoothedMeasure::to_discrete() const {
    if (eps_ == 0.0) return base_;
    const int n = base_.size(), d = base_.dim();
    const int s = std::max(opts_.samples, n);

    // largest-remainder allocation of s samples across atoms, one minimum
    std::vector<int> counts(n, 1);
    std::vector<std::pair<double, int>> remainders(n);
    int assigned = n;
    for (int i = 0; i < n; ++i) {
        const double share = base_.weights()(i) * s;
        const int extra = std::max(0, static_cast<int>(std::floor(share)) - 1);
        counts[i] += extra;
        assigned += extra;
        remainders[i] = {-(share - std::floor(share)), i};
    }
    std::sort(remainders.begin(), remainders.end());
    for (int k = 0; assigned < s; ++k) {
        ++counts[remainders[k % n].second];
        ++assigned;
    }

    const double sd = std::sqrt(eps_);
    Rng rng(opts_.seed);
    Eigen::MatrixXd pts(assigned, d);
    Eigen::VectorXd ws(assigned);
    int row = 0;
    for (int i = 0; i < n; ++i) {
        const int c = counts[i];
        Eigen::MatrixXd z(c, d);
        for (int k = 0; k < c; ++k) {
            for (int q = 0; q < d; ++q) z(k, q) = rng.normal();
        }
        if (c > 1) {
            z.rowwise() -= z.colwise().mean();
            const double ss = z.squaredNorm();
            if (ss > 0.0) z *= std::sqrt(static_cast<double>(d) * c / ss);
        } else {
            z.setZero();
        }
        for (int k = 0; k < c; ++k) {
            pts.row(row) = base_.points().row(i) + sd * z.row(k);
            ws(row) = base_.weights()(i) / c;
            ++row;
        }
    }
    return DiscreteMeasure(std::move(pts), std::move(ws));
}

namespace {

Eigen::VectorXd group_weights(const Eigen::VectorXd& weights, std::size_t count) {
    if (weights.size() == 0) {
        return Eigen::VectorXd::Constant(count, 1.0 / static_cast<double>(count));
    }
    return weights;
}

double group_bandwidth(const TemplateConfig& cfg, const DiscreteMeasure& group) {
    return cfg.bandwidth < 0.0 ? 1.0 / static_cast<double>(group.size()) : cfg.bandwidth;
}

} // namespace

Measure1D template_estimate(const std::vector<DiscreteMeasure>& groups, const TemplateConfig& cfg) {
    require(!groups.empty(), "EmptyGroup", "needs at least one group");
    std::vector<Measure1D> smoothed;
    smoothed.reserve(groups.size());
    for (std::size_t j = 0; j < groups.size(); ++j) {
        require(groups[j].dim() == 1, "DimensionMismatch", "needs one-dimensional groups");
        const SmoothOptions opts{cfg.grid_m, cfg.samples, cfg.seed + j};
        smoothed.push_back(smooth(groups[j], group_bandwidth(cfg, groups[j]), opts).to_measure1d());
    }
    return iterated_barycenter(smoothed, group_weights(cfg.weights, groups.size()));
}

DiscreteMeasure template_estimate_nd(const std::vector<DiscreteMeasure>& groups,
                                     const TemplateConfig& cfg) {
    require(!groups.empty(), "EmptyGroup", "needs at least one group");
    std::vector<DiscreteMeasure> smoothed;
    smoothed.reserve(groups.size());
    for (std::size_t j = 0; j < groups.size(); ++j) {
        const SmoothOptions opts{cfg.grid_m, cfg.samples, cfg.seed + j};
        smoothed.push_back(smooth(groups[j], group_bandwidth(cfg, groups[j]), opts).to_discrete());
    }
    return iterated_barycenter(smoothed, group_weights(cfg.weights, groups.size()));
}

ExperimentReport consistency_experiment(const Measure1D& tmpl, const DeformationProcess& proc,
                                        const ExperimentConfig& cfg) {
    require(proc.centered, "OutOfRange", "experiment expects a centered process");
    require(!cfg.j_values.empty(), "Empty", "needs at least one J value");
    require(cfg.replicates >= 1, "OutOfRange", "needs at least one replicate");

    const int R = cfg.replicates;
    const int nj = static_cast<int>(cfg.j_values.size());
    ExperimentReport report;
    report.j_values = cfg.j_values;
    report.errors.resize(R, nj);
    report.process = proc;
    report.config = cfg;

    const Rng root(proc.seed);
    for (int jv = 0; jv < nj; ++jv) {
        const int J = cfg.j_values[jv];
        require(J >= 1, "OutOfRange", "J must be positive");
        for (int r = 0; r < R; ++r) {
            Rng stream = root.fork(static_cast<std::uint64_t>(jv)).fork(static_cast<std::uint64_t>(r));
            const std::vector<Deformation> maps = sample_deformations(proc, J, stream);
            std::vector<Measure1D> warped;
            warped.reserve(J);
            for (const auto& t : maps) {
                if (cfg.samples_per_group <= 0) {
                    warped.push_back(push_forward(tmpl, t));
                } else {
                    const int n = cfg.samples_per_group;
                    Eigen::MatrixXd pts(n, 1);
                    for (int i = 0; i < n; ++i) {
                        pts(i, 0) = apply1(t, quantile(tmpl, stream.uniform()));
                    }
                    const SmoothOptions opts{cfg.grid_m, 128, 0};
                    warped.push_back(
                        smooth(make_discrete(std::move(pts)), 1.0 / n, opts).to_measure1d());
                }
            }
            const Eigen::VectorXd lam = Eigen::VectorXd::Constant(J, 1.0 / J);
            const Measure1D est = iterated_barycenter(warped, lam);
            report.errors(r, jv) = w2_1d(est, tmpl, cfg.grid_m);
        }
    }

    report.mean_error = report.errors.colwise().mean();
    report.median_error.resize(nj);
    report.q90_error.resize(nj);
    report.exceed_freq.resize(nj);
    for (int jv = 0; jv < nj; ++jv) {
        std::vector<double> col(R);
        for (int r = 0; r < R; ++r) col[r] = report.errors(r, jv);
        std::sort(col.begin(), col.end());
        report.median_error(jv) = col[(R - 1) / 2];
        report.q90_error(jv) = col[static_cast<int>(0.9 * (R - 1))];
        int count = 0;
        for (double e : col) count += e >= cfg.exceed_threshold;
        report.exceed_freq(jv) = static_cast<double>(count) / R;
    }
    return report;
}

BoundCheck control_bound_check(const Measure1D& mu, const std::vector<Deformation>& maps,
                               const Measure1D& nu, int grid_m) {
    require(!maps.empty(), "Empty", "needs at least one map");
    const int J = static_cast<int>(maps.size());
    const Eigen::VectorXd lam = Eigen::VectorXd::Constant(J, 1.0 / J);

    const Measure1D bar = admissible_barycenter(mu, maps, lam);
    const double lhs = w2_1d(bar, nu, grid_m);

    const MonotoneMap1D t_nu = brenier_map_1d(mu, nu);
    double sum = 0.0;
    for (const auto& a : mu.atoms()) {
        double avg = 0.0;
        for (const auto& t : maps) avg += apply1(t, a.x);
        avg /= J;
        const double diff = avg - t_nu(a.x);
        sum += a.w * diff * diff;
    }
    return BoundCheck{lhs, std::sqrt(sum)};
}

} // namespace wbary
