#pragma once

// Dense two-phase revised simplex for small equality-form LPs:
//   min c.x  s.t.  A x = b (A full row rank, b >= 0), x >= 0.
// Deterministic pivoting: Dantzig with first-index ties, Bland after a long
// degenerate run. Library-internal.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wbary/error.hpp"

namespace wbary::detail {

struct LpSolution {
    Eigen::VectorXd x;
    double objective;
};

inline LpSolution solve_equality_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& c) {
    const int rows = static_cast<int>(A.rows());
    const int cols = static_cast<int>(A.cols());
    require(b.size() == rows && c.size() == cols, "DimensionMismatch", "LP shape mismatch");
    require((b.array() >= -1e-12).all(), "OutOfRange", "LP needs nonnegative rhs");

    // extended problem: real columns then one artificial per row
    const int total = cols + rows;
    std::vector<int> basis(rows);
    for (int r = 0; r < rows; ++r) basis[r] = cols + r;

    auto column = [&](int j) -> Eigen::VectorXd {
        if (j < cols) return A.col(j);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(rows);
        e(j - cols) = 1.0;
        return e;
    };

    constexpr double kTol = 1e-11;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::MatrixXd basis_mat(rows, rows);
    Eigen::VectorXd xb = b;
    auto refactor = [&] {
        for (int r = 0; r < rows; ++r) basis_mat.col(r) = column(basis[r]);
        lu.compute(basis_mat);
        xb = lu.solve(b);
    };

    auto run_phase = [&](const Eigen::VectorXd& cost, bool allow_artificial) {
        long long degenerate_run = 0;
        const long long bland_after = 50LL * (rows + cols);
        const long long max_pivots = 100000 + 200LL * (rows + cols);
        std::vector<char> in_basis(total);
        for (long long pivot = 0;; ++pivot) {
            require(pivot < max_pivots, "NoConvergence", "simplex exceeded pivot cap");
            refactor();
            Eigen::VectorXd cb(rows);
            for (int r = 0; r < rows; ++r) cb(r) = cost(basis[r]);
            const Eigen::VectorXd y = lu.transpose().solve(cb);

            const bool bland = degenerate_run > bland_after;
            int enter = -1;
            double best = -kTol;
            const int scan = allow_artificial ? total : cols;
            std::fill(in_basis.begin(), in_basis.end(), 0);
            for (int r = 0; r < rows; ++r) in_basis[basis[r]] = 1;
            for (int j = 0; j < scan; ++j) {
                if (in_basis[j]) continue;
                const double reduced = cost(j) - y.dot(column(j));
                if (reduced < best) {
                    enter = j;
                    if (bland) break;
                    best = reduced;
                }
            }
            if (enter < 0) break;

            const Eigen::VectorXd dir = lu.solve(column(enter));
            int leave = -1;
            double theta = std::numeric_limits<double>::infinity();
            for (int r = 0; r < rows; ++r) {
                if (dir(r) > 1e-11) {
                    const double ratio = std::max(xb(r), 0.0) / dir(r);
                    // prefer kicking artificials out on ties
                    if (ratio < theta - 1e-13 ||
                        (ratio < theta + 1e-13 && leave >= 0 && basis[r] >= cols &&
                         basis[leave] < cols)) {
                        theta = ratio;
                        leave = r;
                    }
                }
            }
            require(leave >= 0, "NoConvergence", "LP unbounded");
            basis[leave] = enter;
            degenerate_run = theta < 1e-13 ? degenerate_run + 1 : 0;
        }
    };

    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(total);
    phase1_cost.tail(rows).setOnes();
    run_phase(phase1_cost, true);

    double infeasibility = 0.0;
    for (int r = 0; r < rows; ++r) {
        if (basis[r] >= cols) infeasibility += std::abs(xb(r));
    }
    require(infeasibility <= 1e-9, "NoConvergence", "LP infeasible");

    // pivot any zero-level artificial out of the basis (A has full row rank)
    for (int r = 0; r < rows; ++r) {
        if (basis[r] < cols) continue;
        refactor();
        std::vector<char> in_basis(total, 0);
        for (int q = 0; q < rows; ++q) in_basis[basis[q]] = 1;
        for (int j = 0; j < cols; ++j) {
            if (in_basis[j]) continue;
            if (std::abs(lu.solve(column(j))(r)) > 1e-9) {
                basis[r] = j;
                break;
            }
        }
        require(basis[r] < cols, "NoConvergence", "LP row rank deficient");
    }

    refactor();
    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(total);
    phase2_cost.head(cols) = c;
    run_phase(phase2_cost, false);

    LpSolution sol{Eigen::VectorXd::Zero(cols), 0.0};
    for (int r = 0; r < rows; ++r) {
        if (basis[r] < cols) sol.x(basis[r]) = std::max(xb(r), 0.0);
    }
    sol.objective = c.dot(sol.x);
    return sol;
}

} // namespace wbary::detail
