#pragma once

// Min-cost flow by brute-force vertex enumeration of the flow polytope, for
// networks with a handful of arcs.

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bab/flow.h"

namespace bab::testing {

// Every vertex of {conservation, 0 <= f <= cap} fixes each arc at a bound or
// leaves it free with the free arcs determined by the equalities. Tries all
// 3^m bound patterns.
inline std::optional<double> EnumerateMinCostFlow(const FlowNetwork& net,
                                                  int s, int t,
                                                  double target) {
  const int m = net.num_arcs();
  const int nodes = net.num_nodes();
  // Rows: every node's net inflow (source -target, sink +target).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nodes, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nodes);
  for (int j = 0; j < m; ++j) {
    a(net.arc(j).tail, j) -= 1.0;
    a(net.arc(j).head, j) += 1.0;
  }
  b(s) -= target;
  b(t) += target;

  std::optional<double> best;
  std::vector<int> pattern(m, 0);  // 0 lower, 1 upper, 2 free
  while (true) {
    bool valid = true;
    for (int j = 0; j < m; ++j) {
      if (pattern[j] == 1 && std::isinf(net.arc(j).capacity)) valid = false;
    }
    if (valid) {
      std::vector<int> free;
      Eigen::VectorXd rhs = b;
      Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
      for (int j = 0; j < m; ++j) {
        if (pattern[j] == 2) {
          free.push_back(j);
        } else if (pattern[j] == 1) {
          f(j) = net.arc(j).capacity;
          rhs -= a.col(j) * f(j);
        }
      }
      bool solved = true;
      if (!free.empty()) {
        Eigen::MatrixXd sub(nodes, free.size());
        for (size_t k = 0; k < free.size(); ++k) sub.col(k) = a.col(free[k]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
        if (qr.rank() < static_cast<int>(free.size())) {
          solved = false;
        } else {
          const Eigen::VectorXd x = qr.solve(rhs);
          for (size_t k = 0; k < free.size(); ++k) f(free[k]) = x(k);
        }
      }
      if (solved && (a * f - b).cwiseAbs().maxCoeff() < 1e-9) {
        bool feasible = true;
        double cost = 0.0;
        for (int j = 0; j < m; ++j) {
          if (f(j) < -1e-9 || f(j) > net.arc(j).capacity + 1e-9) {
            feasible = false;
          }
          cost += f(j) * net.arc(j).unit_cost;
        }
        if (feasible && (!best || cost < *best)) best = cost;
      }
    }
    int j = 0;
    while (j < m && ++pattern[j] == 3) pattern[j++] = 0;
    if (j == m) break;
  }
  return best;
}

}  // namespace bab::testing
