#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coherent/event_algebra.hpp"
#include "coherent/exact_lp.hpp"
#include "coherent/mobius.hpp"
#include "coherent/numeric.hpp"

namespace coherent {

enum class Kind { Belief, Probability, Necessity };

const char* kind_name(Kind kind);

/// A partial uncertainty assessment: one rational value in [0,1] per listed
/// event. Duplicate events and the empty event are legal rows; their
/// consistency is decided by the linear system, not by rejection.
struct Assessment {
  Assessment(EventFamily family_, std::vector<Rational> values_, Kind kind_);

  EventFamily family;
  std::vector<Rational> values;
  Kind kind;

  std::size_t size() const { return values.size(); }
};

/// Dutch book: stakes per assessed event whose combined gain is at most
/// `gain_bound` < 0 on every element of the relevant column family.
struct DutchBook {
  std::vector<Rational> stakes;
  Rational gain_bound;
};

/// Per-chain refutation for necessity verdicts: stakes with uniformly
/// negative gain over that chain's elements.
struct ChainRefutation {
  std::size_t permutation_index = 0;
  std::vector<std::size_t> permutation;
  std::vector<Rational> stakes;
  Rational gain_bound;
};

struct Verdict {
  Kind kind = Kind::Belief;
  bool coherent = false;
  /// Coherent: a mass whose induced measure reproduces every assessed value.
  /// The weights are the solution of the linear system, so they double as a
  /// probability distribution over the non-empty algebra elements; the
  /// measure-consistency reading of coherence needs no separate code path.
  std::optional<MassFunction> witness;
  /// Coherent necessity: the first feasible chain in permutation order.
  std::optional<Chain> witness_chain;
  /// Incoherent belief/probability verdicts always carry stakes. Incoherent
  /// necessity verdicts carry the belief-mode stakes when those exist.
  std::optional<DutchBook> dutch_book;
  /// Incoherent necessity with few atoms: one refutation per chain. With
  /// more atoms the factorial bundle is replaced by chains_all_infeasible.
  std::vector<ChainRefutation> chain_refutations;
  bool chains_all_infeasible = false;
};

struct CheckLimits {
  std::size_t atom_limit = kDefaultAtomLimit;
  std::size_t chain_limit = kDefaultChainLimit;
  /// Full per-chain refutation bundles are emitted up to this many atoms.
  std::size_t chain_certificate_limit = 5;
};

/// The linear system with one row per assessment entry (pessimistic
/// indicator against each column), a final all-ones row with right side 1,
/// and the assessed values as the right-hand side.
FeasibilityProblem build_system(const Assessment& assessment, const AtomSet& atoms,
                                std::span<const AtomMask> columns);
/// Column events must be non-empty unions of atoms.
FeasibilityProblem build_system(const Assessment& assessment, const AtomSet& atoms,
                                const std::vector<Event>& columns);

/// Columns: all non-empty elements of the generated algebra.
Verdict check_belief(const Assessment& assessment, const CheckLimits& limits = {});
/// Columns: the atoms only.
Verdict check_probability(const Assessment& assessment, const CheckLimits& limits = {});
/// Searches chains in lexicographic permutation order; the first feasible
/// chain wins. Incoherent verdicts carry per-chain refutations (small atom
/// counts) or the belief-mode stakes plus an all-chains-infeasible flag.
Verdict check_necessity(const Assessment& assessment, const CheckLimits& limits = {});
/// Dispatch on assessment.kind.
Verdict check(const Assessment& assessment, const CheckLimits& limits = {});

/// Raised by extension_interval on an incoherent input.
class IncoherentAssessmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tight bounds on the values the target event may coherently take when
/// added to the assessment, within the assessment's kind. Both endpoints
/// are attained. For necessity the bounds range over all feasible chains of
/// the refined atom set.
std::pair<Rational, Rational> extension_interval(const Assessment& assessment,
                                                 const Event& target,
                                                 const CheckLimits& limits = {});

/// Combined betting gain sum(stakes_i * (indicator(E_i, observed) - value_i)).
/// The observed event must be non-empty.
Rational evaluate_gain(const Assessment& assessment, std::span<const Rational> stakes,
                       const Event& observed);

/// Necessary-and-cheap chain filter: assessed values must be realizable as
/// cumulative sums along the chain. A false return implies the chain's
/// system is infeasible (property-tested against the unpruned search).
bool chain_prefeasible(const Assessment& assessment, const AtomSet& atoms, const Chain& chain);

}  // namespace coherent
