#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wbary/barycenter.hpp"
#include "wbary/deformations.hpp"
#include "wbary/measures.hpp"
#include "wbary/rng.hpp"

namespace wbary {

struct SmoothOptions {
    int grid_m = 512;    // mixture_1d materialization nodes
    int samples = 128;   // sampled materialization size per unit mass
    std::uint64_t seed = 0;
};

/// base convolved with N(0, eps I_d). One-dimensional bases expose the exact
/// mixture quantile; higher dimensions materialize by sampling.
class SmoothedMeasure {
public:
    enum class Representation { mixture_1d, sampled };

    SmoothedMeasure(DiscreteMeasure base, double eps, SmoothOptions opts);

    [[nodiscard]] const DiscreteMeasure& base() const { return base_; }
    [[nodiscard]] double bandwidth() const { return eps_; }
    [[nodiscard]] Representation representation() const { return rep_; }

    /// Exact mixture inverse c.d.f. (1D only), bisection+Newton to 1e-10.
    [[nodiscard]] double quantile(double t) const;
    /// eps = 0 returns the base atoms exactly; else an opts.grid_m grid.
    [[nodiscard]] Measure1D to_measure1d() const;
    /// Moment-matched batch samples: each atom's batch is centered and scaled
    /// so its mean squared displacement is exactly d*eps, making the coupling
    /// bound W2 <= sqrt(d*eps) hold deterministically.
    [[nodiscard]] DiscreteMeasure to_discrete() const;

private:
    double mixture_quantile(double t, double lo) const;

    DiscreteMeasure base_;
    double eps_;
    SmoothOptions opts_;
    Representation rep_;
    std::vector<double> xs_, cum_; // 1D sorted atoms with cumulative weights
};

SmoothedMeasure smooth(const DiscreteMeasure& base, double eps, SmoothOptions opts = {});

struct TemplateConfig {
    double bandwidth = -1.0; // negative: 1/n per group
    int grid_m = 512;
    Eigen::VectorXd weights; // empty: uniform
    int samples = 128;       // sampled smoothing size (d >= 2)
    std::uint64_t seed = 0;
};

/// Iterated barycenter of the smoothed empirical group measures (1D).
Measure1D template_estimate(const std::vector<DiscreteMeasure>& groups, const TemplateConfig& cfg);
/// Same pipeline on sampled smoothed measures (d >= 2).
DiscreteMeasure template_estimate_nd(const std::vector<DiscreteMeasure>& groups,
                                     const TemplateConfig& cfg);

struct ExperimentConfig {
    std::vector<int> j_values = {4, 16, 64};
    int replicates = 50;
    int samples_per_group = 0; // 0: exact pushforward of the template
    int grid_m = 512;
    double exceed_threshold = 0.05;
};

struct ExperimentReport {
    std::vector<int> j_values;
    Eigen::MatrixXd errors;      // replicates x |J|
    Eigen::VectorXd mean_error;  // per J
    Eigen::VectorXd median_error;
    Eigen::VectorXd q90_error;
    Eigen::VectorXd exceed_freq; // fraction of replicates with error >= threshold
    DeformationProcess process;
    ExperimentConfig config;
};

/// Draws J warps per replicate, forms the warped measures, and records the
/// W2 error of their iterated barycenter against the template.
ExperimentReport consistency_experiment(const Measure1D& tmpl, const DeformationProcess& proc,
                                        const ExperimentConfig& cfg);

struct BoundCheck {
    double lhs; // W2(barycenter of warped measures, nu)
    double rhs; // ||(1/J) sum T_j - T_nu||_{L2(mu)}
};

/// Both sides of the transport-average control bound, with T_nu the 1D
/// Brenier map from mu to nu.
BoundCheck control_bound_check(const Measure1D& mu, const std::vector<Deformation>& maps,
                               const Measure1D& nu, int grid_m = 512);

} // namespace wbary
