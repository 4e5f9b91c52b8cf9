#include "wbary/deformations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wbary {

Deformation make_identity() { return Deformation{Identity{}}; }

Deformation make_scale_location(double scale, double offset) {
    return make_scale_location(Eigen::VectorXd::Constant(1, scale),
                               Eigen::VectorXd::Constant(1, offset));
}

Deformation make_scale_location(Eigen::VectorXd scale, Eigen::VectorXd offset) {
    require(scale.size() > 0, "Empty", "scale must be nonempty");
    require(scale.size() == offset.size(), "DimensionMismatch", "scale/offset size mismatch");
    require(scale.allFinite() && offset.allFinite(), "NonFinite", "parameters must be finite");
    require((scale.array() > 0.0).all(), "OutOfRange", "scale must be positive");
    return Deformation{ScaleLocation{std::move(scale), std::move(offset)}};
}

Deformation make_product_increasing(std::vector<MonotoneMap1D> maps) {
    require(!maps.empty(), "Empty", "needs at least one coordinate map");
    for (const auto& f : maps) {
        for (std::size_t k = 1; k < f.ys().size(); ++k) {
            require(f.ys()[k] > f.ys()[k - 1], "OutOfRange",
                    "coordinate maps must be strictly increasing");
        }
    }
    return Deformation{ProductIncreasing{std::move(maps)}};
}

Deformation make_radial(MonotoneMap1D profile) {
    for (std::size_t k = 1; k < profile.ys().size(); ++k) {
        require(profile.ys()[k] > profile.ys()[k - 1], "OutOfRange",
                "radial profile must be strictly increasing");
    }
    require(std::abs(profile(0.0)) <= 1e-12, "OutOfRange", "radial profile must fix 0");
    return Deformation{RadialDistortion{std::move(profile)}};
}

Deformation make_orthogonal_conjugate(Eigen::MatrixXd frame, Deformation inner) {
    require(frame.rows() == frame.cols() && frame.rows() > 0, "DimensionMismatch",
            "frame must be square");
    require(frame.allFinite(), "NonFinite", "frame must be finite");
    const Eigen::MatrixXd gram = frame.transpose() * frame;
    require((gram - Eigen::MatrixXd::Identity(frame.rows(), frame.cols())).cwiseAbs().maxCoeff() <=
                1e-10,
            "OutOfRange", "frame must be orthogonal");
    const int d = deformation_dim(inner);
    require(d < 0 || d == frame.rows(), "DimensionMismatch", "inner map dimension mismatch");
    return Deformation{OrthogonalConjugate{
        std::move(frame), std::make_shared<const Deformation>(std::move(inner))}};
}

int deformation_dim(const Deformation& t) {
    return std::visit(
        [](const auto& d) -> int {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ScaleLocation>) {
                return static_cast<int>(d.scale.size());
            } else if constexpr (std::is_same_v<T, ProductIncreasing>) {
                return static_cast<int>(d.maps.size());
            } else if constexpr (std::is_same_v<T, OrthogonalConjugate>) {
                return static_cast<int>(d.frame.rows());
            } else {
                return -1;
            }
        },
        t.v);
}

Eigen::VectorXd apply(const Deformation& t, const Eigen::VectorXd& x) {
    const int d = deformation_dim(t);
    require(d < 0 || d == x.size(), "DimensionMismatch", "point dimension mismatch");
    return std::visit(
        [&x](const auto& def) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(def)>;
            if constexpr (std::is_same_v<T, Identity>) {
                return x;
            } else if constexpr (std::is_same_v<T, ScaleLocation>) {
                return (def.scale.array() * x.array() + def.offset.array()).matrix();
            } else if constexpr (std::is_same_v<T, ProductIncreasing>) {
                Eigen::VectorXd y(x.size());
                for (int k = 0; k < x.size(); ++k) y(k) = def.maps[k](x(k));
                return y;
            } else if constexpr (std::is_same_v<T, RadialDistortion>) {
                const double r = x.norm();
                if (r == 0.0) return x;
                return x * (def.profile(r) / r);
            } else {
                return def.frame.transpose() * apply(*def.inner, def.frame * x);
            }
        },
        t.v);
}

double apply1(const Deformation& t, double x) {
    return apply(t, Eigen::VectorXd::Constant(1, x))(0);
}

Deformation inverse(const Deformation& t) {
    return std::visit(
        [](const auto& def) -> Deformation {
            using T = std::decay_t<decltype(def)>;
            if constexpr (std::is_same_v<T, Identity>) {
                return make_identity();
            } else if constexpr (std::is_same_v<T, ScaleLocation>) {
                const Eigen::VectorXd inv_scale = def.scale.cwiseInverse();
                return make_scale_location(inv_scale,
                                           (-def.offset.array() * inv_scale.array()).matrix());
            } else if constexpr (std::is_same_v<T, ProductIncreasing>) {
                std::vector<MonotoneMap1D> maps;
                maps.reserve(def.maps.size());
                for (const auto& f : def.maps) maps.push_back(f.inverse());
                return make_product_increasing(std::move(maps));
            } else if constexpr (std::is_same_v<T, RadialDistortion>) {
                return make_radial(def.profile.inverse());
            } else {
                return make_orthogonal_conjugate(def.frame, inverse(*def.inner));
            }
        },
        t.v);
}

DiscreteMeasure push_forward(const DiscreteMeasure& mu, const Deformation& t) {
    Eigen::MatrixXd pts(mu.size(), mu.dim());
    for (int i = 0; i < mu.size(); ++i) {
        pts.row(i) = apply(t, mu.points().row(i).transpose()).transpose();
    }
    return DiscreteMeasure(std::move(pts), mu.weights());
}

Measure1D push_forward(const Measure1D& mu, const Deformation& t) {
    const auto& atoms = mu.atoms();
    std::vector<double> xs(atoms.size()), ws(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        xs[i] = apply1(t, atoms[i].x);
        ws[i] = atoms[i].w;
    }
    return Measure1D::from_atoms(std::move(xs), std::move(ws));
}

std::vector<double> probe_grid(double lo, double hi, int count) {
    require(count >= 2 && hi > lo, "OutOfRange", "bad probe grid");
    std::vector<double> grid(count);
    for (int k = 0; k < count; ++k) {
        grid[k] = lo + (hi - lo) * static_cast<double>(k) / (count - 1);
    }
    return grid;
}

namespace {

enum class Family { identity, product_like, radial, conjugate };

Family family_of(const Deformation& t) {
    return std::visit(
        [](const auto& def) -> Family {
            using T = std::decay_t<decltype(def)>;
            if constexpr (std::is_same_v<T, Identity>) return Family::identity;
            if constexpr (std::is_same_v<T, ScaleLocation>) return Family::product_like;
            if constexpr (std::is_same_v<T, ProductIncreasing>) return Family::product_like;
            if constexpr (std::is_same_v<T, RadialDistortion>) return Family::radial;
            return Family::conjugate;
        },
        t.v);
}

std::vector<double> radial_probe(const std::vector<double>& probe) {
    std::vector<double> rs;
    rs.reserve(probe.size() + 1);
    rs.push_back(0.0);
    for (double x : probe) rs.push_back(std::abs(x));
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    return rs;
}

constexpr double kMonotoneTol = 1e-9;

} // namespace

bool check_admissible_pair(const Deformation& a, const Deformation& b,
                           const std::vector<double>& probe) {
    require(!probe.empty(), "Empty", "probe grid must be nonempty");
    const int da = deformation_dim(a), db = deformation_dim(b);
    require(da < 0 || db < 0 || da == db, "DimensionMismatch", "maps live in different dimensions");
    const Family fa = family_of(a), fb = family_of(b);
    if (fa == Family::identity || fb == Family::identity) return true;
    if (fa != fb) return false;

    Deformation binv = make_identity();
    try {
        binv = inverse(b);
    } catch (const Error&) {
        return false;
    }

    if (fa == Family::product_like) {
        const int d = std::max({da, db, 1});
        Eigen::MatrixXd values(probe.size(), d);
        for (std::size_t p = 0; p < probe.size(); ++p) {
            const Eigen::VectorXd x = Eigen::VectorXd::Constant(d, probe[p]);
            values.row(p) = apply(a, apply(binv, x)).transpose();
        }
        for (int k = 0; k < d; ++k) {
            for (std::size_t p = 1; p < probe.size(); ++p) {
                if (values(p, k) < values(p - 1, k) - kMonotoneTol) return false;
            }
        }
        return true;
    }
    if (fa == Family::radial) {
        const auto& fa_prof = std::get<RadialDistortion>(a.v).profile;
        const auto& fbinv_prof = std::get<RadialDistortion>(binv.v).profile;
        double prev = -std::numeric_limits<double>::infinity();
        for (double r : radial_probe(probe)) {
            const double g = fa_prof(fbinv_prof(r));
            if (r == 0.0 && std::abs(g) > kMonotoneTol) return false;
            if (g < prev - kMonotoneTol) return false;
            prev = g;
        }
        return true;
    }
    const auto& ca = std::get<OrthogonalConjugate>(a.v);
    const auto& cb = std::get<OrthogonalConjugate>(b.v);
    if ((ca.frame - cb.frame).cwiseAbs().maxCoeff() > 1e-10) return false;
    return check_admissible_pair(*ca.inner, *cb.inner, probe);
}

namespace {

Eigen::VectorXd normalized_weights(const Eigen::VectorXd& weights, std::size_t count) {
    require(static_cast<std::size_t>(weights.size()) == count, "WeightError",
            "one weight per map required");
    require(weights.allFinite(), "WeightError", "weights must be finite");
    require((weights.array() > 0.0).all(), "WeightError", "weights must be positive");
    const double total = weights.sum();
    require(std::abs(total - 1.0) <= 1e-9, "WeightError", "weights must sum to 1");
    return weights / total;
}

std::vector<double> sorted_unique(std::vector<double> grid) {
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

} // namespace

Deformation average_deformation(const std::vector<Deformation>& maps,
                                const Eigen::VectorXd& weights, const std::vector<double>& grid) {
    require(!maps.empty(), "Empty", "needs at least one map");
    const Eigen::VectorXd lam = normalized_weights(weights, maps.size());

    int d = -1;
    for (const auto& t : maps) {
        const int dt = deformation_dim(t);
        require(dt < 0 || d < 0 || dt == d, "DimensionMismatch", "maps live in different dimensions");
        if (dt >= 0) d = dt;
    }

    bool any_product = false, any_scale = false, any_radial = false, any_conjugate = false;
    for (const auto& t : maps) {
        switch (family_of(t)) {
            case Family::identity: break;
            case Family::product_like:
                (std::holds_alternative<ScaleLocation>(t.v) ? any_scale : any_product) = true;
                break;
            case Family::radial: any_radial = true; break;
            case Family::conjugate: any_conjugate = true; break;
        }
    }
    require(static_cast<int>(any_product || any_scale) + static_cast<int>(any_radial) +
                    static_cast<int>(any_conjugate) <=
                1,
            "NotAdmissible", "maps mix deformation families");

    if (!any_product && !any_scale && !any_radial && !any_conjugate) return make_identity();

    if (any_scale && !any_product) {
        const int dim = d < 0 ? 1 : d;
        Eigen::VectorXd scale = Eigen::VectorXd::Zero(dim), offset = Eigen::VectorXd::Zero(dim);
        for (std::size_t j = 0; j < maps.size(); ++j) {
            if (const auto* sl = std::get_if<ScaleLocation>(&maps[j].v)) {
                scale += lam(j) * sl->scale;
                offset += lam(j) * sl->offset;
            } else {
                scale.array() += lam(j);
            }
        }
        return make_scale_location(std::move(scale), std::move(offset));
    }

    if (any_product || any_scale) {
        const int dim = d < 0 ? 1 : d;
        const std::vector<double> xs = sorted_unique(grid);
        require(xs.size() >= 2, "OutOfRange", "grid needs at least 2 distinct points");
        std::vector<MonotoneMap1D> coords;
        coords.reserve(dim);
        for (int k = 0; k < dim; ++k) {
            std::vector<double> ys(xs.size(), 0.0);
            for (std::size_t j = 0; j < maps.size(); ++j) {
                for (std::size_t p = 0; p < xs.size(); ++p) {
                    const double fx = std::visit(
                        [&](const auto& def) -> double {
                            using T = std::decay_t<decltype(def)>;
                            if constexpr (std::is_same_v<T, ScaleLocation>) {
                                return def.scale(k) * xs[p] + def.offset(k);
                            } else if constexpr (std::is_same_v<T, ProductIncreasing>) {
                                return def.maps[k](xs[p]);
                            } else {
                                return xs[p];
                            }
                        },
                        maps[j].v);
                    ys[p] += lam(j) * fx;
                }
            }
            coords.emplace_back(xs, std::move(ys));
        }
        return make_product_increasing(std::move(coords));
    }

    if (any_radial) {
        std::vector<double> rs = radial_probe(sorted_unique(grid));
        if (rs.size() < 2) rs.push_back(1.0);
        std::vector<double> ys(rs.size(), 0.0);
        for (std::size_t j = 0; j < maps.size(); ++j) {
            const auto* rad = std::get_if<RadialDistortion>(&maps[j].v);
            for (std::size_t p = 0; p < rs.size(); ++p) {
                ys[p] += lam(j) * (rad ? rad->profile(rs[p]) : rs[p]);
            }
        }
        return make_radial(MonotoneMap1D(std::move(rs), std::move(ys)));
    }

    const OrthogonalConjugate* first = nullptr;
    for (const auto& t : maps) {
        if ((first = std::get_if<OrthogonalConjugate>(&t.v))) break;
    }
    std::vector<Deformation> inners;
    inners.reserve(maps.size());
    for (const auto& t : maps) {
        if (const auto* oc = std::get_if<OrthogonalConjugate>(&t.v)) {
            require((oc->frame - first->frame).cwiseAbs().maxCoeff() <= 1e-10, "NotAdmissible",
                    "conjugating frames differ");
            inners.push_back(*oc->inner);
        } else {
            inners.push_back(make_identity());
        }
    }
    return make_orthogonal_conjugate(first->frame, average_deformation(inners, lam, grid));
}

namespace {

double spread_cap(DeformationProcess::Family family) {
    return family == DeformationProcess::Family::scale_location ? 1.0 : 0.5;
}

/// h(x) = x + s A (sin(wx + phi) - sin phi): strictly increasing for sAw < 1,
/// fixes 0, and has mean id over phi ~ U(0, 2pi).
MonotoneMap1D wave_map(double lo, double hi, int knots, double s, double amp, double omega,
                       double phase) {
    std::vector<double> xs = probe_grid(lo, hi, knots);
    std::vector<double> ys(xs.size());
    const double base = std::sin(phase);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        ys[k] = xs[k] + s * amp * (std::sin(omega * xs[k] + phase) - base);
    }
    return MonotoneMap1D(std::move(xs), std::move(ys));
}

Deformation reflect(const Deformation& t) {
    return std::visit(
        [](const auto& def) -> Deformation {
            using T = std::decay_t<decltype(def)>;
            if constexpr (std::is_same_v<T, Identity>) {
                return make_identity();
            } else if constexpr (std::is_same_v<T, ScaleLocation>) {
                return make_scale_location((2.0 - def.scale.array()).matrix(),
                                           (-def.offset.array()).matrix());
            } else if constexpr (std::is_same_v<T, ProductIncreasing>) {
                std::vector<MonotoneMap1D> maps;
                maps.reserve(def.maps.size());
                for (const auto& f : def.maps) {
                    std::vector<double> ys(f.xs().size());
                    for (std::size_t k = 0; k < ys.size(); ++k) ys[k] = 2.0 * f.xs()[k] - f.ys()[k];
                    maps.emplace_back(f.xs(), std::move(ys));
                }
                return make_product_increasing(std::move(maps));
            } else if constexpr (std::is_same_v<T, RadialDistortion>) {
                std::vector<double> ys(def.profile.xs().size());
                for (std::size_t k = 0; k < ys.size(); ++k) {
                    ys[k] = 2.0 * def.profile.xs()[k] - def.profile.ys()[k];
                }
                return make_radial(MonotoneMap1D(def.profile.xs(), std::move(ys)));
            } else {
                return make_orthogonal_conjugate(def.frame, reflect(*def.inner));
            }
        },
        t.v);
}

} // namespace

Deformation random_deformation(const DeformationProcess& proc, Rng& rng) {
    const double s = proc.spread;
    require(s >= 0.0 && std::isfinite(s), "BadSpread", "spread must be nonnegative");
    require(s < spread_cap(proc.family), "BadSpread", "spread too large for the family");
    if (s == 0.0) return make_identity();

    if (proc.family == DeformationProcess::Family::scale_location) {
        const double u = rng.uniform(-s, s);
        const double v = rng.uniform(-s, s);
        return make_scale_location(1.0 + u, proc.centered ? v : v + 0.5 * s);
    }

    const double amp = rng.uniform();
    const double omega = 1.0 + static_cast<double>(rng.below(2));
    const double phase = proc.centered ? rng.uniform(0.0, 2.0 * std::numbers::pi) : 0.0;
    if (proc.family == DeformationProcess::Family::product_increasing) {
        std::vector<MonotoneMap1D> maps;
        maps.push_back(wave_map(proc.domain_lo, proc.domain_hi, proc.knots, s, amp, omega, phase));
        return make_product_increasing(std::move(maps));
    }
    const double radius = std::max(std::abs(proc.domain_lo), std::abs(proc.domain_hi));
    return make_radial(wave_map(0.0, radius, proc.knots, s, amp, omega, phase));
}

std::vector<Deformation> sample_deformations(const DeformationProcess& proc, int count, Rng& rng) {
    require(count >= 0, "OutOfRange", "count must be nonnegative");
    std::vector<Deformation> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        out.push_back(random_deformation(proc, rng));
        if (proc.antithetic && static_cast<int>(out.size()) < count) {
            out.push_back(reflect(out.back()));
        }
    }
    return out;
}

} // namespace wbary
