#include "coherent/coherence.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

namespace coherent {

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::Belief: return "belief";
    case Kind::Probability: return "probability";
    case Kind::Necessity: return "necessity";
  }
  return "?";
}

Assessment::Assessment(EventFamily family_, std::vector<Rational> values_, Kind kind_)
    : family(std::move(family_)), values(std::move(values_)), kind(kind_) {
  if (family.size() != values.size())
    throw std::invalid_argument("assessment needs exactly one value per event");
  for (const auto& v : values)
    if (v < 0 || v > 1)
      throw std::invalid_argument("assessed value " + format_rational(v) +
                                  " lies outside [0,1]");
}

namespace {

std::shared_ptr<const AtomSet> assessment_atoms(const Assessment& assessment) {
  if (assessment.family.size() == 0)
    return std::make_shared<const AtomSet>(AtomSet::trivial(assessment.family.universe()));
  return std::make_shared<const AtomSet>(AtomSet::compute(assessment.family));
}

std::vector<AtomMask> row_masks(const Assessment& assessment, const AtomSet& atoms) {
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

void enforce_atom_limit(const AtomSet& atoms, std::size_t limit) {
  if (atoms.count() > limit) {
    std::ostringstream msg;
    msg << "assessment generates 2^" << atoms.count() << " algebra elements (limit " << limit
        << " atoms)";
    throw SizeLimitError(msg.str());
  }
}

MassFunction witness_from_solution(std::shared_ptr<const AtomSet> atoms,
                                   std::span<const AtomMask> columns,
                                   const RationalVector& solution) {
  std::map<AtomMask, Rational> weights;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const Rational& w = solution(static_cast<Eigen::Index>(j));
    if (w > 0) weights[columns[j]] += w;
  }
  return MassFunction(std::move(atoms), std::move(weights));
}

DutchBook dutch_book_from_farkas(const RationalVector& farkas, const RationalVector& rhs) {
  DutchBook book;
  const std::size_t n = static_cast<std::size_t>(farkas.size()) - 1;
  book.stakes.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    book.stakes.push_back(farkas(static_cast<Eigen::Index>(i)));
  book.gain_bound = -farkas.dot(rhs);
  return book;
}

Verdict check_with_columns(const Assessment& assessment,
                           std::shared_ptr<const AtomSet> atoms,
                           std::span<const AtomMask> columns, Kind kind) {
  FeasibilityProblem problem = build_system(assessment, *atoms, columns);
  FeasibilityOutcome outcome = solve_feasibility(problem);

  Verdict verdict;
  verdict.kind = kind;
  if (const auto* feasible = std::get_if<FeasibleResult>(&outcome)) {
    verdict.coherent = true;
    verdict.witness = witness_from_solution(std::move(atoms), columns, feasible->solution);
  } else {
    verdict.coherent = false;
    verdict.dutch_book =
        dutch_book_from_farkas(std::get<InfeasibleResult>(outcome).farkas, problem.rhs);
  }
  return verdict;
}

}  // namespace

FeasibilityProblem build_system(const Assessment& assessment, const AtomSet& atoms,
                                std::span<const AtomMask> columns) {
  const AtomMask full = atoms.full_mask();
  for (AtomMask column : columns) {
    if (column == 0) throw std::invalid_argument("system columns must be non-empty events");
    if (column & ~full) throw std::invalid_argument("system column outside the algebra");
  }
  const std::vector<AtomMask> rows = row_masks(assessment, atoms);
  const std::size_t n = assessment.size();

  FeasibilityProblem problem;
  problem.lhs.resize(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(columns.size()));
  problem.rhs.resize(static_cast<Eigen::Index>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j)
      problem.lhs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Rational(mask_indicator(rows[i], columns[j]));
    problem.rhs(static_cast<Eigen::Index>(i)) = assessment.values[i];
  }
  for (std::size_t j = 0; j < columns.size(); ++j)
    problem.lhs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = Rational(1);
  problem.rhs(static_cast<Eigen::Index>(n)) = Rational(1);
  return problem;
}

FeasibilityProblem build_system(const Assessment& assessment, const AtomSet& atoms,
                                const std::vector<Event>& columns) {
  std::vector<AtomMask> masks;
  masks.reserve(columns.size());
  for (const auto& event : columns) {
    auto mask = atoms.mask_of(event);
    if (!mask)
      throw std::invalid_argument("system column " + event.to_string() +
                                  " is not a union of atoms");
    masks.push_back(*mask);
  }
  return build_system(assessment, atoms, masks);
}

Verdict check_belief(const Assessment& assessment, const CheckLimits& limits) {
  auto atoms = assessment_atoms(assessment);
  const std::vector<AtomMask> columns = enumerate_nonempty_events(*atoms, limits.atom_limit);
  return check_with_columns(assessment, std::move(atoms), columns, Kind::Belief);
}

Verdict check_probability(const Assessment& assessment, const CheckLimits& limits) {
  auto atoms = assessment_atoms(assessment);
  enforce_atom_limit(*atoms, limits.atom_limit);
  std::vector<AtomMask> columns;
  columns.reserve(atoms->count());
  for (std::size_t i = 0; i < atoms->count(); ++i) columns.push_back(AtomMask{1} << i);
  return check_with_columns(assessment, std::move(atoms), columns, Kind::Probability);
}

bool chain_prefeasible(const Assessment& assessment, const AtomSet& atoms, const Chain& chain) {
  const std::vector<AtomMask> rows = row_masks(assessment, atoms);
  const std::size_t m = chain.size();
  // Position of each assessed event along the chain: the largest k with
  // D_k inside the event; the induced cumulative sums must be monotone.
  std::vector<std::pair<std::size_t, Rational>> positions;
  positions.reserve(assessment.size() + 2);
  positions.emplace_back(0, Rational(0));
  positions.emplace_back(m, Rational(1));
  for (std::size_t i = 0; i < assessment.size(); ++i) {
    std::size_t depth = 0;
    for (std::size_t k = m; k > 0; --k) {
      if (mask_indicator(rows[i], chain.elements[k - 1])) {
        depth = k;
        break;
      }
    }
    positions.emplace_back(depth, assessment.values[i]);
  }
  std::sort(positions.begin(), positions.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
    if (positions[i].first == positions[i + 1].first) {
      if (positions[i].second != positions[i + 1].second) return false;
    } else if (positions[i].second > positions[i + 1].second) {
      return false;
    }
  }
  return true;
}

Verdict check_necessity(const Assessment& assessment, const CheckLimits& limits) {
  auto atoms = assessment_atoms(assessment);
  ChainEnumerator chains(*atoms, limits.chain_limit);

  while (auto chain = chains.next()) {
    if (!chain_prefeasible(assessment, *atoms, *chain)) continue;
    FeasibilityProblem problem = build_system(assessment, *atoms, chain->elements);
    FeasibilityOutcome outcome = solve_feasibility(problem);
    if (const auto* feasible = std::get_if<FeasibleResult>(&outcome)) {
      Verdict verdict;
      verdict.kind = Kind::Necessity;
      verdict.coherent = true;
      verdict.witness = witness_from_solution(atoms, chain->elements, feasible->solution);
      verdict.witness_chain = std::move(*chain);
      return verdict;
    }
  }

  Verdict verdict;
  verdict.kind = Kind::Necessity;
  verdict.coherent = false;
  verdict.chains_all_infeasible = true;
  if (atoms->count() <= limits.chain_certificate_limit) {
    ChainEnumerator all(*atoms, limits.chain_limit);
    while (auto chain = all.next()) {
      FeasibilityProblem problem = build_system(assessment, *atoms, chain->elements);
      FeasibilityOutcome outcome = solve_feasibility(problem);
      const auto& infeasible = std::get<InfeasibleResult>(outcome);
      ChainRefutation refutation;
      refutation.permutation_index = chain->permutation_index;
      refutation.permutation = chain->permutation;
      DutchBook book = dutch_book_from_farkas(infeasible.farkas, problem.rhs);
      refutation.stakes = std::move(book.stakes);
      refutation.gain_bound = std::move(book.gain_bound);
      verdict.chain_refutations.push_back(std::move(refutation));
    }
  } else {
    Verdict belief = check_belief(assessment, limits);
    if (!belief.coherent) verdict.dutch_book = std::move(belief.dutch_book);
  }
  return verdict;
}

Verdict check(const Assessment& assessment, const CheckLimits& limits) {
  switch (assessment.kind) {
    case Kind::Belief: return check_belief(assessment, limits);
    case Kind::Probability: return check_probability(assessment, limits);
    case Kind::Necessity: return check_necessity(assessment, limits);
  }
  throw std::logic_error("unknown assessment kind");
}

std::pair<Rational, Rational> extension_interval(const Assessment& assessment,
                                                 const Event& target,
                                                 const CheckLimits& limits) {
  Verdict base = check(assessment, limits);
  if (!base.coherent)
    throw IncoherentAssessmentError("extension requires a coherent " +
                                    std::string(kind_name(assessment.kind)) + " assessment");

  std::vector<Event> extended = assessment.family.events();
  extended.push_back(target);
  const AtomSet atoms = AtomSet::compute(EventFamily(assessment.family.universe(), extended));
  const AtomMask target_mask = *atoms.mask_of(target);

  const auto objective_for = [&](std::span<const AtomMask> columns) {
    RationalVector c(static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j)
      c(static_cast<Eigen::Index>(j)) = Rational(mask_indicator(target_mask, columns[j]));
    return c;
  };

  if (assessment.kind == Kind::Necessity) {
    ChainEnumerator chains(atoms, limits.chain_limit);
    std::optional<std::pair<Rational, Rational>> bounds;
    while (auto chain = chains.next()) {
      if (!chain_prefeasible(assessment, atoms, *chain)) continue;
      FeasibilityProblem problem = build_system(assessment, atoms, chain->elements);
      if (std::holds_alternative<InfeasibleResult>(solve_feasibility(problem))) continue;
      RationalVector objective = objective_for(chain->elements);
      Rational lo = optimize(problem, objective, Sense::Minimize).value;
      Rational hi = optimize(problem, objective, Sense::Maximize).value;
      if (!bounds) {
        bounds = {lo, hi};
      } else {
        bounds->first = std::min(bounds->first, lo);
        bounds->second = std::max(bounds->second, hi);
      }
    }
    if (!bounds) throw std::logic_error("coherent necessity assessment lost all chains");
    return *bounds;
  }

  std::vector<AtomMask> columns;
  if (assessment.kind == Kind::Belief) {
    columns = enumerate_nonempty_events(atoms, limits.atom_limit);
  } else {
    enforce_atom_limit(atoms, limits.atom_limit);
    for (std::size_t i = 0; i < atoms.count(); ++i) columns.push_back(AtomMask{1} << i);
  }
  FeasibilityProblem problem = build_system(assessment, atoms, columns);
  RationalVector objective = objective_for(columns);
  Rational lo = optimize(problem, objective, Sense::Minimize).value;
  Rational hi = optimize(problem, objective, Sense::Maximize).value;
  return {lo, hi};
}

Rational evaluate_gain(const Assessment& assessment, std::span<const Rational> stakes,
                       const Event& observed) {
  if (stakes.size() != assessment.size())
    throw std::invalid_argument("need exactly one stake per assessed event");
  if (observed.is_empty())
    throw std::invalid_argument("gain is undefined on the empty event");
  Rational gain = 0;
  for (std::size_t i = 0; i < assessment.size(); ++i)
    gain += stakes[i] * (Rational(generalized_indicator(assessment.family[i], observed)) -
                         assessment.values[i]);
  return gain;
}

}  // namespace coherent
