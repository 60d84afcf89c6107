#pragma once

// Brute-force reference optimum and a family of random well-conditioned
// programs, shared by the LP unit tests and the acceptance harness.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "oactl/errors.hpp"
#include "oactl/kernels.hpp"
#include "oactl/lp.hpp"

namespace toys {

// Reference optimum by vertex enumeration: every vertex of a bounded
// polyhedron is the intersection of n active constraints, so solving all
// n x n subsystems and keeping the feasible ones finds the optimum.
inline double brute_force_lp(const oactl::LinearProgram& lp) {
  using oactl::LpRow;
  using oactl::RowSense;
  const int n = lp.num_vars();
  if (n > 4) throw oactl::InputError("brute_force_lp supports at most 4 variables");
  struct Cons {
    Eigen::VectorXd a;
    double b;
    bool eq;
  };
  std::vector<Cons> cons;
  for (int r = 0; r < lp.num_rows(); ++r) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    const LpRow& row = lp.row(r);
    for (std::size_t k = 0; k < row.idx.size(); ++k) a[row.idx[k]] += row.val[k];
    cons.push_back({a, row.rhs, row.sense == RowSense::EQ});
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper_bound(j))) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a[j] = 1.0;
      cons.push_back({a, lp.upper_bound(j), false});
    }
    if (std::isfinite(lp.lower_bound(j))) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a[j] = -1.0;
      cons.push_back({a, -lp.lower_bound(j), false});
    }
  }

  const int m = static_cast<int>(cons.size());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) c[j] = lp.objective_coef(j);

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(n);
  // Iterate over all n-subsets of the constraint list.
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd b(n);
      for (int i = 0; i < n; ++i) {
        A.row(i) = cons[pick[i]].a.transpose();
        b[i] = cons[pick[i]].b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(b);
      for (const Cons& cc : cons) {
        const double lhs = cc.a.dot(x);
        if (cc.eq ? std::abs(lhs - cc.b) > 1e-7 : lhs > cc.b + 1e-7) return;
      }
      best = std::min(best, c.dot(x));
      return;
    }
    for (int i = start; i <= m - (n - depth); ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Bounded 3-variable program with 5 halfspace cuts through a random interior
// point (guaranteed feasible), optionally one equality through the same point.
inline oactl::LinearProgram random_lp(int instance, bool with_eq) {
  using oactl::uniform01;
  const int n = 3;
  oactl::LinearProgram lp(n, "random" + std::to_string(instance));
  Eigen::VectorXd interior(n);
  for (int j = 0; j < n; ++j) {
    lp.set_bounds(j, -2.0 - uniform01(77, instance, 10 + j),
                  2.0 + uniform01(77, instance, 20 + j));
    lp.set_objective(j, 2.0 * uniform01(77, instance, 30 + j) - 1.0);
    interior[j] = 2.0 * uniform01(77, instance, 40 + j) - 1.0;
  }
  for (int r = 0; r < 5; ++r) {
    std::vector<int> idx;
    std::vector<double> val;
    Eigen::VectorXd a(n);
    for (int j = 0; j < n; ++j) {
      a[j] = 2.0 * uniform01(77, instance, 100 + 10 * r + j) - 1.0;
      idx.push_back(j);
      val.push_back(a[j]);
    }
    const double slack = 0.1 + uniform01(77, instance, 100 + 10 * r + 9);
    lp.add_le_row(idx, val, a.dot(interior) + slack);
  }
  if (with_eq) {
    Eigen::VectorXd a(n);
    for (int j = 0; j < n; ++j) a[j] = 2.0 * uniform01(77, instance, 200 + j) - 1.0;
    lp.add_eq_row({0, 1, 2}, {a[0], a[1], a[2]}, a.dot(interior));
  }
  return lp;
}

}  // namespace toys
