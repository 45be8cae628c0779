#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coherent/coherence.hpp"
#include "coherent/numeric.hpp"

namespace coherent {

/// Binary-outcome scoring rule on the exact path: scores are finite
/// rationals (the Brier rule, or any user rule with rational curves).
struct ExactRule {
  std::string name;
  bool bounded = true;
  std::function<Rational(int outcome, const Rational& forecast)> score;
};

/// Scoring rule on the high-precision path; scores may be +infinity (the
/// logarithmic rule at its singular corners).
struct RealRule {
  std::string name;
  bool bounded = true;
  std::function<HighFloat(int outcome, const HighFloat& forecast)> score;
};

Rational brier_score(int outcome, const Rational& forecast);
HighFloat logarithmic_score(int outcome, const HighFloat& forecast);
HighFloat spherical_score(int outcome, const HighFloat& forecast);

ExactRule brier_rule();
RealRule logarithmic_rule();
RealRule spherical_rule();

template <class Rule>
struct RuleTraits;
template <>
struct RuleTraits<ExactRule> {
  using Value = Rational;
  static Value forecast(const Rational& r) { return r; }
};
template <>
struct RuleTraits<RealRule> {
  using Value = HighFloat;
  static Value forecast(const Rational& r) { return to_highfloat(r); }
};

/// Bilinear extension s(p,x) = p s(1,x) + (1-p) s(0,x); zero-probability
/// terms are skipped so 0 * infinity contributes nothing.
template <class Rule>
typename RuleTraits<Rule>::Value extend_rule(const Rule& rule, const Rational& p,
                                             const Rational& x) {
  using Value = typename RuleTraits<Rule>::Value;
  const auto forecast = RuleTraits<Rule>::forecast(x);
  Value total(0);
  if (p > 0) total += Value(RuleTraits<Rule>::forecast(p)) * rule.score(1, forecast);
  if (p < 1) total += Value(RuleTraits<Rule>::forecast(1 - p)) * rule.score(0, forecast);
  return total;
}

/// Extension at high-precision arguments (used by iterative projections).
HighFloat extend_rule(const RealRule& rule, const HighFloat& p, const HighFloat& x);

/// Bregman divergence of a bounded rule:
/// d_s(u,v) = sum s(u_i, v_i) - sum s(u_i, u_i). Throws on unbounded rules.
template <class Rule>
typename RuleTraits<Rule>::Value bregman_divergence(const Rule& rule,
                                                    std::span<const Rational> u,
                                                    std::span<const Rational> v) {
  if (!rule.bounded)
    throw std::invalid_argument("Bregman divergence requires a bounded rule (got " +
                                rule.name + ")");
  if (u.size() != v.size())
    throw std::invalid_argument("Bregman divergence needs equal-length vectors");
  typename RuleTraits<Rule>::Value total(0);
  for (std::size_t i = 0; i < u.size(); ++i)
    total += extend_rule(rule, u[i], v[i]) - extend_rule(rule, u[i], u[i]);
  return total;
}

/// Total penalty per element of the column family:
/// L(B) = sum_i s(indicator(E_i, B), value_i).
template <class Value>
struct PenaltyProfile {
  std::vector<AtomMask> columns;
  std::vector<Value> values;
};

template <class Rule>
PenaltyProfile<typename RuleTraits<Rule>::Value> penalty_profile(
    const Assessment& assessment, const Rule& rule, const AtomSet& atoms,
    std::span<const AtomMask> columns);

/// Brute-force coherence-by-domination refuter: searches the grid
/// {0, step, 2 step, ..., 1}^n for a distinct assessment whose penalty is
/// strictly lower on every column. Returns the first hit in lexicographic
/// grid order, or nullopt. Throws SizeLimitError when the grid exceeds
/// max_points.
template <class Rule>
std::optional<std::vector<Rational>> refute_by_grid(const Assessment& assessment,
                                                    const Rule& rule, const AtomSet& atoms,
                                                    std::span<const AtomMask> columns,
                                                    const Rational& step,
                                                    std::size_t max_points = 4000000);

/// Pointwise properness check: on the (denominator+1)-point grid, the
/// extension p -> s(p, x) must attain its minimum over x only at x = p.
template <class Rule>
bool proper_on_grid(const Rule& rule, unsigned denominator = 20);

using AnyRule = std::variant<ExactRule, RealRule>;

/// Open rule registry. Registration runs the grid properness check instead
/// of trusting the caller; improper rules are rejected.
class RuleRegistry {
 public:
  /// brier, log, spherical.
  static RuleRegistry standard();

  void register_rule(ExactRule rule);
  void register_rule(RealRule rule);
  const AnyRule* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, AnyRule, std::less<>> rules_;
};

}  // namespace coherent
