#include "coherent/event_algebra.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace coherent {

Universe::Universe(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("universe must contain at least one world");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    auto [it, inserted] = index_.emplace(labels_[i], i);
    if (!inserted) throw std::invalid_argument("duplicate world label: " + labels_[i]);
  }
}

std::shared_ptr<const Universe> Universe::make(std::vector<std::string> labels) {
  return std::make_shared<const Universe>(std::move(labels));
}

std::optional<std::size_t> Universe::index_of(std::string_view label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Event::Event(UniversePtr universe, boost::dynamic_bitset<> members)
    : universe_(std::move(universe)), members_(std::move(members)) {
  if (!universe_) throw std::invalid_argument("event requires a universe");
  if (members_.size() != universe_->size())
    throw std::invalid_argument("event bitset size does not match universe");
}

Event Event::empty(UniversePtr universe) {
  auto n = universe->size();
  return Event(std::move(universe), boost::dynamic_bitset<>(n));
}

Event Event::full(UniversePtr universe) {
  auto n = universe->size();
  boost::dynamic_bitset<> bits(n);
  bits.set();
  return Event(std::move(universe), std::move(bits));
}

Event Event::of(UniversePtr universe, std::initializer_list<std::size_t> worlds) {
  std::vector<std::size_t> v(worlds);
  return of_worlds(std::move(universe), v);
}

Event Event::of_worlds(UniversePtr universe, std::span<const std::size_t> worlds) {
  boost::dynamic_bitset<> bits(universe->size());
  for (std::size_t w : worlds) {
    if (w >= universe->size()) throw std::invalid_argument("world index out of range");
    bits.set(w);
  }
  return Event(std::move(universe), std::move(bits));
}

Event Event::of_labels(UniversePtr universe, std::span<const std::string> labels) {
  boost::dynamic_bitset<> bits(universe->size());
  for (const auto& label : labels) {
    auto idx = universe->index_of(label);
    if (!idx) throw std::invalid_argument("unknown world label: " + label);
    bits.set(*idx);
  }
  return Event(std::move(universe), std::move(bits));
}

Event Event::intersect(const Event& other) const {
  return Event(universe_, members_ & other.members_);
}

Event Event::unite(const Event& other) const {
  return Event(universe_, members_ | other.members_);
}

Event Event::complement() const { return Event(universe_, ~members_); }

std::string Event::to_string() const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (std::size_t w = members_.find_first(); w != boost::dynamic_bitset<>::npos;
       w = members_.find_next(w)) {
    if (!first) out << ",";
    out << universe_->label(w);
    first = false;
  }
  out << "}";
  return out.str();
}

EventFamily::EventFamily(UniversePtr universe, std::vector<Event> events)
    : universe_(std::move(universe)), events_(std::move(events)) {
  for (const auto& e : events_)
    if (e.universe() != universe_)
      throw std::invalid_argument("all family events must share one universe");
}

std::vector<Event> EventFamily::unique_events() const {
  std::vector<Event> unique;
  for (const auto& e : events_)
    if (std::find(unique.begin(), unique.end(), e) == unique.end()) unique.push_back(e);
  return unique;
}

std::vector<std::size_t> EventFamily::unique_index() const {
  std::vector<Event> unique;
  std::vector<std::size_t> index;
  index.reserve(events_.size());
  for (const auto& e : events_) {
    auto it = std::find(unique.begin(), unique.end(), e);
    if (it == unique.end()) {
      unique.push_back(e);
      index.push_back(unique.size() - 1);
    } else {
      index.push_back(static_cast<std::size_t>(it - unique.begin()));
    }
  }
  return index;
}

AtomSet::AtomSet(UniversePtr universe, std::vector<Event> atoms,
                 std::vector<std::size_t> world_to_atom)
    : universe_(std::move(universe)),
      atoms_(std::move(atoms)),
      world_to_atom_(std::move(world_to_atom)) {}

AtomSet AtomSet::compute(const EventFamily& family) {
  if (family.size() == 0)
    throw std::invalid_argument("cannot compute atoms of an empty family");
  const UniversePtr& universe = family.universe();
  const std::size_t n = universe->size();

  // Worlds with identical membership signature across the family share an
  // atom; atom indices follow the first world of each signature.
  std::vector<boost::dynamic_bitset<>> signatures(
      n, boost::dynamic_bitset<>(family.size()));
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t w = 0; w < n; ++w)
      if (family[i].contains(w)) signatures[w].set(i);

  std::map<boost::dynamic_bitset<>, std::size_t> atom_of_signature;
  std::vector<boost::dynamic_bitset<>> atom_bits;
  std::vector<std::size_t> world_to_atom(n);
  for (std::size_t w = 0; w < n; ++w) {
    auto [it, inserted] = atom_of_signature.emplace(signatures[w], atom_bits.size());
    if (inserted) atom_bits.emplace_back(n);
    atom_bits[it->second].set(w);
    world_to_atom[w] = it->second;
  }

  std::vector<Event> atoms;
  atoms.reserve(atom_bits.size());
  for (auto& bits : atom_bits) atoms.emplace_back(universe, std::move(bits));
  return AtomSet(universe, std::move(atoms), std::move(world_to_atom));
}

AtomSet AtomSet::trivial(UniversePtr universe) {
  std::vector<std::size_t> world_to_atom(universe->size(), 0);
  std::vector<Event> atoms{Event::full(universe)};
  return AtomSet(std::move(universe), std::move(atoms), std::move(world_to_atom));
}

Event AtomSet::event_of(AtomMask mask) const {
  boost::dynamic_bitset<> bits(universe_->size());
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (mask & (AtomMask{1} << i)) bits |= atoms_[i].members();
  return Event(universe_, std::move(bits));
}

std::optional<AtomMask> AtomSet::mask_of(const Event& event) const {
  AtomMask mask = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].subset_of(event)) mask |= AtomMask{1} << i;
  if (!(event == event_of(mask))) return std::nullopt;
  return mask;
}

AtomSet compute_atoms(const EventFamily& family) { return AtomSet::compute(family); }

// Lexicographic order on ascending atom-index tuples: the lowest differing
// bit belongs to the earlier tuple.
bool canonical_mask_less(AtomMask a, AtomMask b) {
  const int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa < pb;
  if (a == b) return false;
  const AtomMask diff = a ^ b;
  const AtomMask low = diff & (~diff + 1);
  return (a & low) != 0;
}

std::vector<AtomMask> enumerate_nonempty_events(const AtomSet& atoms, std::size_t limit) {
  const std::size_t m = atoms.count();
  if (m > limit || m > kMaxAtoms) {
    std::ostringstream msg;
    msg << "enumerating the algebra would take 2^" << m << " = ";
    if (m <= kMaxAtoms)
      msg << (AtomMask{1} << m);
    else
      msg << "more than 2^63";
    msg << " elements (limit " << limit << " atoms)";
    throw SizeLimitError(msg.str());
  }
  std::vector<AtomMask> masks;
  masks.reserve((std::size_t{1} << m) - 1);
  for (AtomMask mask = 1; mask < (AtomMask{1} << m); ++mask) masks.push_back(mask);
  std::sort(masks.begin(), masks.end(), canonical_mask_less);
  return masks;
}

int generalized_indicator(const Event& event, const Event& observed) {
  if (observed.is_empty())
    throw std::invalid_argument("generalized indicator is undefined on the empty event");
  return observed.subset_of(event) ? 1 : 0;
}

std::vector<Event> Chain::events(const AtomSet& atoms) const {
  std::vector<Event> out;
  out.reserve(elements.size());
  for (AtomMask mask : elements) out.push_back(atoms.event_of(mask));
  return out;
}

Chain chain_from_permutation(std::span<const std::size_t> permutation,
                             std::size_t permutation_index) {
  Chain chain;
  chain.permutation.assign(permutation.begin(), permutation.end());
  chain.permutation_index = permutation_index;
  AtomMask acc = 0;
  chain.elements.reserve(permutation.size());
  for (std::size_t atom : permutation) {
    acc |= AtomMask{1} << atom;
    chain.elements.push_back(acc);
  }
  return chain;
}

std::size_t chain_count(std::size_t atom_count) {
  std::size_t total = 1;
  for (std::size_t k = 2; k <= atom_count; ++k) total *= k;
  return total;
}

Chain chain_at(std::size_t atom_count, std::size_t permutation_index) {
  // Factorial-base decode of the lexicographic rank.
  std::vector<std::size_t> pool(atom_count);
  for (std::size_t i = 0; i < atom_count; ++i) pool[i] = i;
  std::vector<std::size_t> perm;
  perm.reserve(atom_count);
  std::size_t rank = permutation_index;
  std::size_t radix = chain_count(atom_count);
  for (std::size_t k = atom_count; k > 0; --k) {
    radix /= k;
    const std::size_t pick = rank / radix;
    rank %= radix;
    perm.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return chain_from_permutation(perm, permutation_index);
}

ChainEnumerator::ChainEnumerator(const AtomSet& atoms, std::size_t limit)
    : atom_count_(atoms.count()), total_(0) {
  if (atom_count_ > limit) {
    std::ostringstream msg;
    msg << "enumerating chains would take " << atom_count_ << "! permutations (limit "
        << limit << " atoms)";
    throw SizeLimitError(msg.str());
  }
  total_ = chain_count(atom_count_);
  permutation_.resize(atom_count_);
  for (std::size_t i = 0; i < atom_count_; ++i) permutation_[i] = i;
}

std::optional<Chain> ChainEnumerator::next() {
  if (rank_ >= total_) return std::nullopt;
  Chain chain = chain_from_permutation(permutation_, rank_);
  ++rank_;
  std::next_permutation(permutation_.begin(), permutation_.end());
  return chain;
}

}  // namespace coherent
