#pragma once

#include <variant>

#include "coherent/numeric.hpp"

namespace coherent {

/// Find x >= 0 with lhs * x = rhs, all entries exact rationals.
struct FeasibilityProblem {
  RationalMatrix lhs;
  RationalVector rhs;

  std::size_t rows() const { return static_cast<std::size_t>(lhs.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(lhs.cols()); }
};

/// Witness: solution >= 0 and lhs * solution = rhs, exactly.
struct FeasibleResult {
  RationalVector solution;
};

/// Farkas certificate: farkas^T * lhs <= 0 componentwise and
/// farkas^T * rhs > 0, exactly.
struct InfeasibleResult {
  RationalVector farkas;
};

using FeasibilityOutcome = std::variant<FeasibleResult, InfeasibleResult>;

/// Exactly one of the two certificates, verified before returning.
/// Deterministic for a fixed problem (Bland's rule, canonical column order).
FeasibilityOutcome solve_feasibility(const FeasibilityProblem& problem);

enum class Sense { Minimize, Maximize };

struct OptimizeResult {
  Rational value;
  RationalVector solution;
};

/// Optimizes objective^T * x over {x >= 0, lhs x = rhs}. Throws
/// std::runtime_error when the problem is infeasible or the objective is
/// unbounded over the feasible set.
OptimizeResult optimize(const FeasibilityProblem& problem, const RationalVector& objective,
                        Sense sense);

/// Exact post-hoc certificate check; throws std::logic_error on violation.
void verify_certificate(const FeasibilityProblem& problem, const FeasibilityOutcome& outcome);

}  // namespace coherent
