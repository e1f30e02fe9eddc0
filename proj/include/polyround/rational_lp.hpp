#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace polyround::polygen {

// A feasibility system over exact rationals: find coefficients c such that
//   lo_i <= sum_j c_j * x_i^(degree_j) <= hi_i   for every row i.
// Every binary64 input converts to its rational losslessly before entering
// the system.
struct RationalLPProblem {
  std::vector<int> degrees;  // term degrees, strictly ascending, nonnegative
  struct Row {
    mpq_class x;
    mpq_class lo;
    mpq_class hi;
  };
  std::vector<Row> rows;
};

struct LPStats {
  int iterations = 0;
  mpq_class margin;  // common slack achieved by the returned point (capped at 1)
};

// Any feasible point of the system, or nullopt when the system is provably
// infeasible (exact arithmetic; infeasibility is definitive). The solution is
// verified by substitution before it is returned. Throws ResourceLimitError
// at the iteration cap.
//
// Internally runs an exact revised simplex on the dual of the margin program
//   max z s.t. sum_j c_j x_i^(d_j) + z <= hi_i, -sum_j ... + z <= -lo_i, z <= 1;
// the system is feasible iff the optimal margin z* >= 0, and the row
// multipliers at optimality are the coefficients.
std::optional<std::vector<mpq_class>> solve_lp(const RationalLPProblem& problem,
                                               LPStats* stats = nullptr);

// Exact conversions between binary64 and rationals.
mpq_class rational_of_double(double x);
double double_of_rational_rne(const mpq_class& q);

}  // namespace polyround::polygen
