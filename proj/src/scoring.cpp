#include "coherent/scoring.hpp"

#include <limits>
#include <sstream>

namespace coherent {

namespace {

std::vector<AtomMask> assessment_row_masks(const Assessment& assessment, const AtomSet& atoms) {
  std::vector<AtomMask> masks;
  masks.reserve(assessment.size());
  for (const auto& event : assessment.family) {
    auto mask = atoms.mask_of(event);
    if (!mask)
      throw std::invalid_argument("assessed event " + event.to_string() +
                                  " is not a union of atoms");
    masks.push_back(*mask);
  }
  return masks;
}

void require_unit_range(const Rational& x) {
  if (x < 0 || x > 1)
    throw std::invalid_argument("forecast " + format_rational(x) + " lies outside [0,1]");
}

}  // namespace

Rational brier_score(int outcome, const Rational& forecast) {
  require_unit_range(forecast);
  const Rational diff = Rational(outcome) - forecast;
  return diff * diff;
}

HighFloat logarithmic_score(int outcome, const HighFloat& forecast) {
  // -ln|1 - i - x|: the score of the arm the outcome did not take.
  const HighFloat mass = outcome == 1 ? forecast : HighFloat(1) - forecast;
  if (mass <= 0) return std::numeric_limits<HighFloat>::infinity();
  return -log(mass);
}

HighFloat spherical_score(int outcome, const HighFloat& forecast) {
  const HighFloat hit = outcome == 1 ? forecast : HighFloat(1) - forecast;
  const HighFloat norm =
      sqrt(forecast * forecast + (HighFloat(1) - forecast) * (HighFloat(1) - forecast));
  return HighFloat(1) - hit / norm;
}

ExactRule brier_rule() { return ExactRule{"brier", true, &brier_score}; }

RealRule logarithmic_rule() { return RealRule{"log", false, &logarithmic_score}; }

RealRule spherical_rule() { return RealRule{"spherical", true, &spherical_score}; }

HighFloat extend_rule(const RealRule& rule, const HighFloat& p, const HighFloat& x) {
  HighFloat total(0);
  if (p > 0) total += p * rule.score(1, x);
  if (p < 1) total += (HighFloat(1) - p) * rule.score(0, x);
  return total;
}

template <class Rule>
PenaltyProfile<typename RuleTraits<Rule>::Value> penalty_profile(
    const Assessment& assessment, const Rule& rule, const AtomSet& atoms,
    std::span<const AtomMask> columns) {
  const std::vector<AtomMask> rows = assessment_row_masks(assessment, atoms);
  PenaltyProfile<typename RuleTraits<Rule>::Value> profile;
  profile.columns.assign(columns.begin(), columns.end());
  profile.values.reserve(columns.size());
  for (AtomMask column : columns) {
    typename RuleTraits<Rule>::Value total(0);
    for (std::size_t i = 0; i < rows.size(); ++i)
      total += rule.score(mask_indicator(rows[i], column),
                          RuleTraits<Rule>::forecast(assessment.values[i]));
    profile.values.push_back(std::move(total));
  }
  return profile;
}

template PenaltyProfile<Rational> penalty_profile(const Assessment&, const ExactRule&,
                                                  const AtomSet&, std::span<const AtomMask>);
template PenaltyProfile<HighFloat> penalty_profile(const Assessment&, const RealRule&,
                                                   const AtomSet&, std::span<const AtomMask>);

namespace {

std::vector<Rational> grid_values(const Rational& step) {
  if (step <= 0 || step > 1) throw std::invalid_argument("grid step must lie in (0,1]");
  std::vector<Rational> values;
  Rational v(0);
  while (v < 1) {
    values.push_back(v);
    v += step;
  }
  values.push_back(Rational(1));
  return values;
}

}  // namespace

template <class Rule>
std::optional<std::vector<Rational>> refute_by_grid(const Assessment& assessment,
                                                    const Rule& rule, const AtomSet& atoms,
                                                    std::span<const AtomMask> columns,
                                                    const Rational& step,
                                                    std::size_t max_points) {
  using Value = typename RuleTraits<Rule>::Value;
  const std::size_t n = assessment.size();
  const std::vector<AtomMask> rows = assessment_row_masks(assessment, atoms);
  const std::vector<Rational> values = grid_values(step);

  double points = 1;
  for (std::size_t i = 0; i < n; ++i) points *= static_cast<double>(values.size());
  if (points > static_cast<double>(max_points)) {
    std::ostringstream msg;
    msg << "grid of " << points << " candidates exceeds the cap of " << max_points;
    throw SizeLimitError(msg.str());
  }

  // Scores depend only on (outcome, grid value): two lookup tables.
  std::vector<Value> score0, score1;
  score0.reserve(values.size());
  score1.reserve(values.size());
  for (const auto& v : values) {
    score0.push_back(rule.score(0, RuleTraits<Rule>::forecast(v)));
    score1.push_back(rule.score(1, RuleTraits<Rule>::forecast(v)));
  }

  const PenaltyProfile<Value> base = penalty_profile(assessment, rule, atoms, columns);

  std::vector<std::size_t> digits(n, 0);
  while (true) {
    bool distinct = false;
    for (std::size_t i = 0; i < n; ++i)
      if (values[digits[i]] != assessment.values[i]) {
        distinct = true;
        break;
      }
    if (distinct || n == 0) {
      bool dominates_everywhere = n > 0;
      for (std::size_t c = 0; c < base.columns.size() && dominates_everywhere; ++c) {
        Value candidate(0);
        for (std::size_t i = 0; i < n; ++i)
          candidate += mask_indicator(rows[i], base.columns[c]) ? score1[digits[i]]
                                                                : score0[digits[i]];
        if (!(candidate < base.values[c])) dominates_everywhere = false;
      }
      if (dominates_everywhere) {
        std::vector<Rational> hit;
        hit.reserve(n);
        for (std::size_t i = 0; i < n; ++i) hit.push_back(values[digits[i]]);
        return hit;
      }
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < values.size()) break;
      digits[pos] = 0;
      if (pos == 0) return std::nullopt;
    }
    if (n == 0) return std::nullopt;
  }
}

template std::optional<std::vector<Rational>> refute_by_grid(const Assessment&,
                                                             const ExactRule&, const AtomSet&,
                                                             std::span<const AtomMask>,
                                                             const Rational&, std::size_t);
template std::optional<std::vector<Rational>> refute_by_grid(const Assessment&,
                                                             const RealRule&, const AtomSet&,
                                                             std::span<const AtomMask>,
                                                             const Rational&, std::size_t);

template <class Rule>
bool proper_on_grid(const Rule& rule, unsigned denominator) {
  using Value = typename RuleTraits<Rule>::Value;
  for (unsigned pi = 0; pi <= denominator; ++pi) {
    const Rational p(pi, denominator);
    std::vector<Value> expected;
    expected.reserve(denominator + 1);
    for (unsigned xi = 0; xi <= denominator; ++xi)
      expected.push_back(extend_rule(rule, p, Rational(xi, denominator)));
    const Value& at_p = expected[pi];
    for (unsigned xi = 0; xi <= denominator; ++xi)
      if (xi != pi && !(at_p < expected[xi])) return false;
  }
  return true;
}

template bool proper_on_grid(const ExactRule&, unsigned);
template bool proper_on_grid(const RealRule&, unsigned);

RuleRegistry RuleRegistry::standard() {
  RuleRegistry registry;
  registry.register_rule(brier_rule());
  registry.register_rule(logarithmic_rule());
  registry.register_rule(spherical_rule());
  return registry;
}

void RuleRegistry::register_rule(ExactRule rule) {
  if (!proper_on_grid(rule))
    throw std::invalid_argument("rule '" + rule.name + "' fails the properness grid check");
  std::string name = rule.name;
  rules_.insert_or_assign(std::move(name), AnyRule(std::move(rule)));
}

void RuleRegistry::register_rule(RealRule rule) {
  if (!proper_on_grid(rule))
    throw std::invalid_argument("rule '" + rule.name + "' fails the properness grid check");
  std::string name = rule.name;
  rules_.insert_or_assign(std::move(name), AnyRule(std::move(rule)));
}

const AnyRule* RuleRegistry::find(std::string_view name) const {
  auto it = rules_.find(name);
  return it == rules_.end() ? nullptr : &it->second;
}

std::vector<std::string> RuleRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(rules_.size());
  for (const auto& [name, rule] : rules_) out.push_back(name);
  return out;
}

}  // namespace coherent
