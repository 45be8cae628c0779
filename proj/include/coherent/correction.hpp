#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coherent/coherence.hpp"
#include "coherent/scoring.hpp"

namespace coherent {

struct CorrectionOptions {
  CheckLimits limits{};
  /// Duality-gap stopping tolerance of the conditional-gradient path.
  HighFloat tolerance = HighFloat("1e-9");
  std::size_t max_iterations = 100000;
};

/// Result of projecting an assessment onto the kind-appropriate hull of
/// indicator vertices. `corrected` always lies in the hull exactly: the
/// reported weights are non-negative rationals summing to one whose vertex
/// combination reproduces it. On the Brier path the point is the exact
/// Bregman projection; on the iterative path it is within the duality-gap
/// tolerance of it.
struct CorrectionResult {
  Kind mode = Kind::Belief;
  std::string rule_name;
  /// True when the divergence and corrected point are exact (Brier path, or
  /// a coherent input under any rule).
  bool exact = true;
  std::vector<Rational> corrected;
  std::variant<Rational, HighFloat> divergence;
  /// Lexicographically minimal basic weight vector over the column family.
  std::map<AtomMask, Rational> hull_weights;
  /// Set when other weight vectors realize the same corrected point.
  bool weight_degenerate = false;
  /// Necessity: the winning (or witness) chain.
  std::optional<Chain> chain;

  Rational divergence_rational() const { return std::get<Rational>(divergence); }
  HighFloat divergence_value() const;
};

/// Exact nearest point (squared Euclidean distance) in the convex hull of
/// the given vertex columns, with realizing weights. The geometric kernel
/// behind the Brier-path corrections, usable on any rational vertex set.
struct HullPoint {
  std::vector<Rational> point;
  std::vector<Rational> weights;
};
HullPoint nearest_hull_point(const RationalMatrix& vertices, const std::vector<Rational>& target);

/// Projection onto conv of all 2^m - 1 indicator vertices.
CorrectionResult correct_belief(const Assessment& assessment, const AnyRule& rule,
                                const CorrectionOptions& options = {});
/// Projection onto conv of the atom vertices; weights form a probability.
CorrectionResult correct_probability(const Assessment& assessment, const AnyRule& rule,
                                     const CorrectionOptions& options = {});
/// Projects onto every chain hull and returns the divergence minimizer;
/// ties break toward the lexicographically smallest permutation. Weights
/// form a consonant mass along the reported chain.
CorrectionResult correct_necessity(const Assessment& assessment, const AnyRule& rule,
                                   const CorrectionOptions& options = {});
/// Dispatch on assessment.kind.
CorrectionResult correct(const Assessment& assessment, const AnyRule& rule,
                         const CorrectionOptions& options = {});

}  // namespace coherent
