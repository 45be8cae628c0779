#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace coherent {

/// Thrown when an enumeration would exceed a configured size limit; the
/// message names the offending count (e.g. the 2^m it would take).
class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered set of distinct world labels. Order is fixed at construction and
/// drives every canonical enumeration downstream.
class Universe {
 public:
  explicit Universe(std::vector<std::string> labels);

  static std::shared_ptr<const Universe> make(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t world) const { return labels_.at(world); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using UniversePtr = std::shared_ptr<const Universe>;

/// A subset of worlds. Equality is extensional.
class Event {
 public:
  Event(UniversePtr universe, boost::dynamic_bitset<> members);

  static Event empty(UniversePtr universe);
  static Event full(UniversePtr universe);
  static Event of(UniversePtr universe, std::initializer_list<std::size_t> worlds);
  static Event of_worlds(UniversePtr universe, std::span<const std::size_t> worlds);
  /// Throws std::invalid_argument on a label missing from the universe.
  static Event of_labels(UniversePtr universe, std::span<const std::string> labels);

  const UniversePtr& universe() const { return universe_; }
  const boost::dynamic_bitset<>& members() const { return members_; }

  bool is_empty() const { return members_.none(); }
  bool is_full() const { return members_.all(); }
  std::size_t count() const { return members_.count(); }
  bool contains(std::size_t world) const { return members_.test(world); }
  bool subset_of(const Event& other) const { return members_.is_subset_of(other.members_); }

  Event intersect(const Event& other) const;
  Event unite(const Event& other) const;
  Event complement() const;

  bool operator==(const Event& other) const { return members_ == other.members_; }

  /// "{w1,w2}", labels in world order.
  std::string to_string() const;

 private:
  UniversePtr universe_;
  boost::dynamic_bitset<> members_;
};

/// Ordered list of events over one universe. Duplicates and the empty event
/// are permitted; algebra computations deduplicate, assessment rows do not.
class EventFamily {
 public:
  EventFamily(UniversePtr universe, std::vector<Event> events);

  const UniversePtr& universe() const { return universe_; }
  std::size_t size() const { return events_.size(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  const std::vector<Event>& events() const { return events_; }
  auto begin() const { return events_.begin(); }
  auto end() const { return events_.end(); }

  /// First-occurrence deduplication.
  std::vector<Event> unique_events() const;
  /// Provenance: input row i -> index into unique_events().
  std::vector<std::size_t> unique_index() const;

 private:
  UniversePtr universe_;
  std::vector<Event> events_;
};

/// An element of the generated algebra as a set of atom indices. Bit i set
/// means atom i is included; mask 0 is the empty event.
using AtomMask = std::uint64_t;

constexpr std::size_t kMaxAtoms = 63;
constexpr std::size_t kDefaultAtomLimit = 20;
constexpr std::size_t kDefaultChainLimit = 9;

/// 1 iff the algebra element `observed` is contained in `event`, both given
/// as atom masks. The pessimistic indicator on the generated algebra.
constexpr int mask_indicator(AtomMask event, AtomMask observed) {
  return (observed & ~event) == 0 ? 1 : 0;
}

/// Atoms of the algebra generated by an event family: the coarsest partition
/// of the universe under which every generating event is a union of cells.
/// Atom order follows the first world each atom contains.
class AtomSet {
 public:
  /// Throws std::invalid_argument on an empty family.
  static AtomSet compute(const EventFamily& family);
  /// The degenerate algebra {empty, full}: a single atom.
  static AtomSet trivial(UniversePtr universe);

  const UniversePtr& universe() const { return universe_; }
  std::size_t count() const { return atoms_.size(); }
  const Event& atom(std::size_t i) const { return atoms_.at(i); }
  const std::vector<Event>& atoms() const { return atoms_; }
  std::size_t atom_of_world(std::size_t world) const { return world_to_atom_.at(world); }

  AtomMask full_mask() const { return (AtomMask{1} << atoms_.size()) - 1; }

  /// Union of the indexed atoms as a world-level event.
  Event event_of(AtomMask mask) const;
  /// Atom mask of an algebra element; nullopt when the event is not a union
  /// of atoms.
  std::optional<AtomMask> mask_of(const Event& event) const;

 private:
  AtomSet(UniversePtr universe, std::vector<Event> atoms, std::vector<std::size_t> world_to_atom);

  UniversePtr universe_;
  std::vector<Event> atoms_;
  std::vector<std::size_t> world_to_atom_;
};

using AtomSetPtr = std::shared_ptr<const AtomSet>;

/// Wrapper matching the operation vocabulary: atoms of algebra(family).
AtomSet compute_atoms(const EventFamily& family);

/// Canonical order on algebra elements: by cardinality in atoms, ties by
/// lexicographic atom-index tuples.
bool canonical_mask_less(AtomMask a, AtomMask b);

/// All 2^m - 1 non-empty algebra elements in canonical order: by cardinality
/// in atoms, ties by lexicographic atom-index tuples. Singleton atoms come
/// first, in atom order; the full event comes last.
/// Throws SizeLimitError (naming 2^m) above `limit` atoms.
std::vector<AtomMask> enumerate_nonempty_events(const AtomSet& atoms,
                                                std::size_t limit = kDefaultAtomLimit);

/// Pessimistic indicator at world level: 1 iff observed is contained in
/// event. Throws std::invalid_argument on an empty observed event.
int generalized_indicator(const Event& event, const Event& observed);

/// A maximal strictly nested sequence D_1 < D_2 < ... < D_m of algebra
/// elements, D_k the union of the first k atoms of `permutation`, D_m full.
struct Chain {
  std::vector<std::size_t> permutation;
  std::vector<AtomMask> elements;
  std::size_t permutation_index = 0;

  std::size_t size() const { return elements.size(); }
  std::vector<Event> events(const AtomSet& atoms) const;
};

Chain chain_from_permutation(std::span<const std::size_t> permutation,
                             std::size_t permutation_index);
/// Decodes the permutation with the given lexicographic rank.
Chain chain_at(std::size_t atom_count, std::size_t permutation_index);
std::size_t chain_count(std::size_t atom_count);

/// Yields the m! chains in lexicographic permutation order. Stateless apart
/// from the current rank; any position is reproducible via chain_at.
class ChainEnumerator {
 public:
  /// Throws SizeLimitError above `limit` atoms.
  explicit ChainEnumerator(const AtomSet& atoms, std::size_t limit = kDefaultChainLimit);

  std::optional<Chain> next();
  std::size_t total() const { return total_; }

 private:
  std::size_t atom_count_;
  std::size_t total_;
  std::size_t rank_ = 0;
  std::vector<std::size_t> permutation_;
};

}  // namespace coherent
