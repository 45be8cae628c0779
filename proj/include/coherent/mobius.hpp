#pragma once

#include <map>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "coherent/event_algebra.hpp"
#include "coherent/numeric.hpp"

namespace coherent {

/// Raised by mobius_inverse when an alternating sum comes out negative: the
/// input set function is not completely monotone.
class NotCompletelyMonotoneError : public std::runtime_error {
 public:
  NotCompletelyMonotoneError(Event event, Rational weight);
  const Event& event() const { return event_; }
  const Rational& weight() const { return weight_; }

 private:
  Event event_;
  Rational weight_;
};

/// Basic probability assignment: non-negative rational weights on non-empty
/// algebra elements, summing to exactly one. Zero weights are dropped, so
/// the stored keys are the focal elements.
class MassFunction {
 public:
  MassFunction(AtomSetPtr atoms, std::map<AtomMask, Rational> weights);

  const AtomSetPtr& atoms() const { return atoms_; }
  const std::map<AtomMask, Rational>& weights() const { return weights_; }
  Rational weight(AtomMask mask) const;

  bool operator==(const MassFunction& other) const { return weights_ == other.weights_; }

 private:
  AtomSetPtr atoms_;
  std::map<AtomMask, Rational> weights_;
};

/// A rational-valued function on the full finite algebra (all atom unions,
/// including the empty event). Mass-backed instances evaluate lazily by
/// focal subset sums; table-backed instances hold all 2^m values.
class SetFunction {
 public:
  static SetFunction from_mass(MassFunction mass);
  static SetFunction from_table(AtomSetPtr atoms, std::vector<Rational> values);

  const AtomSetPtr& atoms() const { return atoms_; }
  Rational value(AtomMask mask) const;
  /// Throws std::invalid_argument when the event is not an atom union.
  Rational value(const Event& event) const;
  /// All 2^m values indexed by mask. Materializes for mass-backed instances.
  std::vector<Rational> dense_values() const;
  const MassFunction* backing_mass() const;

 private:
  SetFunction(AtomSetPtr atoms, std::variant<MassFunction, std::vector<Rational>> data);

  AtomSetPtr atoms_;
  std::variant<MassFunction, std::vector<Rational>> data_;
};

/// Bel(A) = sum of mass over subsets of A, on the whole algebra.
SetFunction belief_from_mass(const MassFunction& mass);

/// Inverts a belief function given on the full algebra back to its mass.
/// Requires value(empty) = 0 and value(full) = 1; throws
/// NotCompletelyMonotoneError when some computed weight is negative.
MassFunction mobius_inverse(const SetFunction& bel);

/// The unanimity game u_B: 1 on supersets of B, 0 elsewhere. B must be a
/// non-empty union of atoms.
SetFunction vacuous_belief(AtomSetPtr atoms, const Event& on);

/// True iff every focal element is a single atom.
bool is_probability_mass(const MassFunction& mass);

/// True iff the focal elements are totally ordered by inclusion.
bool is_consonant_mass(const MassFunction& mass);

/// True iff the probability with the given atom weights dominates `bel` on
/// every algebra element. Weights must be non-negative and sum to one.
bool dominates(std::span<const Rational> atom_weights, const SetFunction& bel);

namespace detail {
/// Alternating-sum inverse, 3^m total work. Exposed for cross-checking.
std::vector<Rational> mobius_inverse_direct(std::span<const Rational> table, std::size_t m);
/// In-place subset-transform inverse, m*2^m work. Exposed for cross-checking.
std::vector<Rational> mobius_inverse_fast(std::span<const Rational> table, std::size_t m);
}  // namespace detail

}  // namespace coherent
