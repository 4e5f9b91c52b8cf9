#include "wbary/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wbary {

MonotoneMap1D::MonotoneMap1D(std::vector<double> xs, std::vector<double> ys, Extrapolation mode)
    : xs_(std::move(xs)), ys_(std::move(ys)), mode_(mode) {
    require(!xs_.empty(), "Empty", "map needs at least one knot");
    require(xs_.size() == ys_.size(), "DimensionMismatch", "knot coordinate size mismatch");
    for (std::size_t k = 0; k < xs_.size(); ++k) {
        require(std::isfinite(xs_[k]) && std::isfinite(ys_[k]), "NonFinite", "knots must be finite");
        if (k > 0) {
            require(xs_[k] > xs_[k - 1], "OutOfRange", "knot x-values must be strictly increasing");
            require(ys_[k] >= ys_[k - 1], "OutOfRange", "knot values must be nondecreasing");
        }
    }
}

double MonotoneMap1D::operator()(double x) const {
    const int n = static_cast<int>(xs_.size());
    if (n == 1) {
        // single knot: unit slope through it
        return mode_ == Extrapolation::clamp ? ys_[0] : ys_[0] + (x - xs_[0]);
    }
    if (x <= xs_.front()) {
        if (mode_ == Extrapolation::clamp || x == xs_.front()) return ys_.front();
        const double s = (ys_[1] - ys_[0]) / (xs_[1] - xs_[0]);
        return ys_[0] + s * (x - xs_[0]);
    }
    if (x >= xs_.back()) {
        if (mode_ == Extrapolation::clamp || x == xs_.back()) return ys_.back();
        const double s = (ys_[n - 1] - ys_[n - 2]) / (xs_[n - 1] - xs_[n - 2]);
        return ys_.back() + s * (x - xs_.back());
    }
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const int k = static_cast<int>(it - xs_.begin()) - 1;
    const double t = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
    return ys_[k] + t * (ys_[k + 1] - ys_[k]);
}

MonotoneMap1D MonotoneMap1D::inverse() const {
    for (std::size_t k = 1; k < ys_.size(); ++k) {
        require(ys_[k] > ys_[k - 1], "NotInvertible", "map is flat on a knot interval");
    }
    return MonotoneMap1D(ys_, xs_, mode_);
}

MonotoneMap1D identity_map() { return MonotoneMap1D({0.0, 1.0}, {0.0, 1.0}); }

std::vector<CouplingSegment> quantile_coupling(const Measure1D& mu, const Measure1D& nu) {
    const auto& a = mu.atoms();
    const auto& b = nu.atoms();
    std::vector<CouplingSegment> segments;
    segments.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    double prev = 0.0, ca = a[0].w, cb = b[0].w;
    while (true) {
        const double cur = std::min(ca, cb);
        if (cur > prev) segments.push_back({cur - prev, static_cast<int>(i), static_cast<int>(j)});
        prev = cur;
        const bool adv_a = ca <= cb, adv_b = cb <= ca;
        if (adv_a) {
            if (++i == a.size()) break;
            ca += a[i].w;
        }
        if (adv_b) {
            if (++j == b.size()) break;
            cb += b[j].w;
        }
    }
    return segments;
}

double w2_1d(const Measure1D& mu, const Measure1D& nu, int m) {
    if (!mu.is_grid() && !nu.is_grid()) {
        const auto& a = mu.atoms();
        const auto& b = nu.atoms();
        double total = 0.0;
        for (const auto& s : quantile_coupling(mu, nu)) {
            const double d = a[s.i].x - b[s.j].x;
            total += s.mass * d * d;
        }
        return std::sqrt(std::max(total, 0.0));
    }
    require(m >= 2, "OutOfRange", "grid size must be at least 2");
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const double t = (k + 0.5) / m;
        const double d = quantile(mu, t) - quantile(nu, t);
        total += d * d;
    }
    return std::sqrt(total / m);
}

MonotoneMap1D brenier_map_1d(const Measure1D& mu, const Measure1D& nu) {
    const auto& a = mu.atoms();
    const auto& b = nu.atoms();
    const int n = static_cast<int>(a.size());
    std::vector<double> xs(n), ys(n, 0.0);
    for (int i = 0; i < n; ++i) xs[i] = a[i].x;
    for (const auto& s : quantile_coupling(mu, nu)) ys[s.i] += s.mass * b[s.j].x;
    for (int i = 0; i < n; ++i) ys[i] /= a[i].w;
    // barycentric projections are nondecreasing; guard rounding
    for (int i = 1; i < n; ++i) ys[i] = std::max(ys[i], ys[i - 1]);
    return MonotoneMap1D(std::move(xs), std::move(ys));
}

namespace {

struct BasicCell {
    int i;
    int j;
    double flow;
};

constexpr double kReducedCostTol = 1e-12;

} // namespace

TransportPlan solve_ot_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require(mu.dim() == nu.dim(), "DimensionMismatch", "measures live in different dimensions");
    const int n = mu.size(), m = nu.size();
    require(static_cast<long long>(n) * m <= 1000000LL, "TooLarge", "coupling exceeds the entry cap");

    Eigen::MatrixXd cost(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            cost(i, j) = (mu.points().row(i) - nu.points().row(j)).squaredNorm();
        }
    }
    const Eigen::VectorXd& a = mu.weights();
    const Eigen::VectorXd& b = nu.weights();

    // northwest-corner start: exactly n+m-1 basics, possibly degenerate
    std::vector<BasicCell> basis;
    basis.reserve(n + m - 1);
    std::vector<char> is_basic(static_cast<std::size_t>(n) * m, 0);
    {
        int i = 0, j = 0;
        double ra = a(0), rb = b(0);
        while (true) {
            const double f = std::min(ra, rb);
            basis.push_back({i, j, f});
            is_basic[static_cast<std::size_t>(i) * m + j] = 1;
            ra -= f;
            rb -= f;
            const bool last_i = i == n - 1, last_j = j == m - 1;
            if (last_i && last_j) break;
            if (last_i || (!last_j && ra > rb)) {
                rb = b(++j);
            } else {
                ra = a(++i);
            }
        }
    }

    // node 0..n-1 = rows, n..n+m-1 = columns
    std::vector<double> u(n), v(m);
    std::vector<std::vector<int>> adj(n + m);
    std::vector<int> parent_edge(n + m), bfs_order(n + m);

    const long long max_pivots = 200000 + 200LL * (n + m);
    long long degenerate_run = 0;
    const long long bland_after = 50LL * (n + m);

    for (long long pivot = 0;; ++pivot) {
        require(pivot < max_pivots, "NoConvergence", "transport simplex exceeded pivot cap");

        for (auto& lists : adj) lists.clear();
        for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
            adj[basis[k].i].push_back(k);
            adj[n + basis[k].j].push_back(k);
        }

        // potentials from the basis tree, rooted at row 0
        {
            std::fill(parent_edge.begin(), parent_edge.end(), -2);
            int head = 0, tail = 0;
            bfs_order[tail++] = 0;
            parent_edge[0] = -1;
            u[0] = 0.0;
            while (head < tail) {
                const int node = bfs_order[head++];
                for (int k : adj[node]) {
                    const int other = node < n ? n + basis[k].j : basis[k].i;
                    if (parent_edge[other] != -2) continue;
                    parent_edge[other] = k;
                    if (other >= n) {
                        v[other - n] = cost(basis[k].i, basis[k].j) - u[basis[k].i];
                    } else {
                        u[other] = cost(basis[k].i, basis[k].j) - v[basis[k].j];
                    }
                    bfs_order[tail++] = other;
                }
            }
        }

        // entering cell: Dantzig, Bland after a long degenerate run
        int ei = -1, ej = -1;
        const bool bland = degenerate_run > bland_after;
        double best = -kReducedCostTol;
        for (int i = 0; i < n && (ei < 0 || !bland); ++i) {
            for (int j = 0; j < m; ++j) {
                if (is_basic[static_cast<std::size_t>(i) * m + j]) continue;
                const double r = cost(i, j) - u[i] - v[j];
                if (r < best) {
                    ei = i;
                    ej = j;
                    if (bland) break;
                    best = r;
                }
            }
        }
        if (ei < 0) break; // optimal

        // unique tree path between the entering cell's endpoints
        {
            std::fill(parent_edge.begin(), parent_edge.end(), -2);
            int head = 0, tail = 0;
            bfs_order[tail++] = ei;
            parent_edge[ei] = -1;
            while (head < tail && parent_edge[n + ej] == -2) {
                const int node = bfs_order[head++];
                for (int k : adj[node]) {
                    const int other = node < n ? n + basis[k].j : basis[k].i;
                    if (parent_edge[other] != -2) continue;
                    parent_edge[other] = k;
                    bfs_order[tail++] = other;
                }
            }
        }
        require(parent_edge[n + ej] != -2, "NoConvergence", "basis lost connectivity");
        std::vector<int> path; // edges from the column endpoint back to the row endpoint
        for (int node = n + ej; node != ei;) {
            const int k = parent_edge[node];
            path.push_back(k);
            node = node == n + basis[k].j ? basis[k].i : n + basis[k].j;
        }

        // alternating signs: path[0] loses flow, path[1] gains, ...
        double theta = std::numeric_limits<double>::infinity();
        int leave_pos = -1;
        for (std::size_t p = 0; p < path.size(); p += 2) {
            if (basis[path[p]].flow < theta) {
                theta = basis[path[p]].flow;
                leave_pos = static_cast<int>(p);
            }
        }
        for (std::size_t p = 0; p < path.size(); ++p) {
            basis[path[p]].flow += (p % 2 == 0) ? -theta : theta;
        }
        const int leaving = path[leave_pos];
        is_basic[static_cast<std::size_t>(basis[leaving].i) * m + basis[leaving].j] = 0;
        is_basic[static_cast<std::size_t>(ei) * m + ej] = 1;
        basis[leaving] = {ei, ej, theta};

        degenerate_run = theta < 1e-15 ? degenerate_run + 1 : 0;
    }

    TransportPlan plan{Eigen::MatrixXd::Zero(n, m), 0.0};
    for (const auto& cell : basis) {
        const double f = std::max(cell.flow, 0.0);
        plan.coupling(cell.i, cell.j) = f;
        plan.cost += f * cost(cell.i, cell.j);
    }
    return plan;
}

double w2_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return std::sqrt(std::max(solve_ot_lp(mu, nu).cost, 0.0));
}

namespace {

Eigen::MatrixXd spd_eig_power(const Eigen::MatrixXd& S, double exponent) {
    require(S.rows() == S.cols(), "DimensionMismatch", "matrix must be square");
    require(S.allFinite(), "NonFinite", "matrix must be finite");
    require((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-10, "NotSPD", "matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
    Eigen::VectorXd lam = es.eigenvalues();
    require(lam.minCoeff() > 1e-14, "NotSPD", "matrix must be positive definite");
    for (int k = 0; k < lam.size(); ++k) lam(k) = std::pow(lam(k), exponent);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& S) { return spd_eig_power(S, 0.5); }

Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& S) { return spd_eig_power(S, -0.5); }

Eigen::MatrixXd gaussian_ot_map(const Eigen::MatrixXd& S, const Eigen::MatrixXd& T) {
    require(S.rows() == T.rows() && S.cols() == T.cols(), "DimensionMismatch",
            "covariances must share a dimension");
    const Eigen::MatrixXd ts = spd_sqrt(T);
    const Eigen::MatrixXd mid = spd_inv_sqrt(ts * S * ts);
    Eigen::MatrixXd A = ts * mid * ts;
    return 0.5 * (A + A.transpose());
}

} // namespace wbary
