#include "coherent/mobius.hpp"

#include <algorithm>
#include <bit>

namespace coherent {

NotCompletelyMonotoneError::NotCompletelyMonotoneError(Event event, Rational weight)
    : std::runtime_error("set function is not completely monotone: Mobius weight of " +
                         event.to_string() + " is " + format_rational(weight)),
      event_(std::move(event)),
      weight_(std::move(weight)) {}

MassFunction::MassFunction(AtomSetPtr atoms, std::map<AtomMask, Rational> weights)
    : atoms_(std::move(atoms)) {
  if (!atoms_) throw std::invalid_argument("mass function requires an atom set");
  const AtomMask full = atoms_->full_mask();
  Rational total = 0;
  for (auto& [mask, w] : weights) {
    if (mask == 0) throw std::invalid_argument("mass on the empty event is not allowed");
    if (mask & ~full) throw std::invalid_argument("mass keyed outside the algebra");
    if (w < 0)
      throw std::invalid_argument("negative mass " + format_rational(w) + " on " +
                                  atoms_->event_of(mask).to_string());
    total += w;
    if (w > 0) weights_.emplace(mask, w);
  }
  if (total != 1)
    throw std::invalid_argument("mass weights sum to " + format_rational(total) +
                                ", expected 1/1");
}

Rational MassFunction::weight(AtomMask mask) const {
  auto it = weights_.find(mask);
  return it == weights_.end() ? Rational(0) : it->second;
}

SetFunction::SetFunction(AtomSetPtr atoms,
                         std::variant<MassFunction, std::vector<Rational>> data)
    : atoms_(std::move(atoms)), data_(std::move(data)) {}

SetFunction SetFunction::from_mass(MassFunction mass) {
  AtomSetPtr atoms = mass.atoms();
  return SetFunction(std::move(atoms), std::move(mass));
}

SetFunction SetFunction::from_table(AtomSetPtr atoms, std::vector<Rational> values) {
  if (!atoms) throw std::invalid_argument("set function requires an atom set");
  if (values.size() != (std::size_t{1} << atoms->count()))
    throw std::invalid_argument("set function table must cover all 2^m events");
  return SetFunction(std::move(atoms), std::move(values));
}

Rational SetFunction::value(AtomMask mask) const {
  if (mask & ~atoms_->full_mask())
    throw std::invalid_argument("event mask outside the algebra");
  if (const auto* table = std::get_if<std::vector<Rational>>(&data_)) return (*table)[mask];
  const auto& mass = std::get<MassFunction>(data_);
  Rational total = 0;
  for (const auto& [focal, w] : mass.weights())
    if (mask_indicator(mask, focal)) total += w;
  return total;
}

Rational SetFunction::value(const Event& event) const {
  auto mask = atoms_->mask_of(event);
  if (!mask)
    throw std::invalid_argument("event " + event.to_string() +
                                " is not an element of the generated algebra");
  return value(*mask);
}

std::vector<Rational> SetFunction::dense_values() const {
  if (const auto* table = std::get_if<std::vector<Rational>>(&data_)) return *table;
  std::vector<Rational> values(std::size_t{1} << atoms_->count(), Rational(0));
  for (AtomMask mask = 0; mask < values.size(); ++mask) values[mask] = value(mask);
  return values;
}

const MassFunction* SetFunction::backing_mass() const {
  return std::get_if<MassFunction>(&data_);
}

SetFunction belief_from_mass(const MassFunction& mass) {
  return SetFunction::from_mass(mass);
}

namespace detail {

std::vector<Rational> mobius_inverse_direct(std::span<const Rational> table, std::size_t m) {
  std::vector<Rational> out(table.size());
  for (AtomMask set = 0; set < table.size(); ++set) {
    Rational acc = table[set];  // subset = set itself, sign +
    for (AtomMask sub = (set - 1) & set;; sub = (sub - 1) & set) {
      if (std::popcount(set ^ sub) % 2 == 1)
        acc -= table[sub];
      else
        acc += table[sub];
      if (sub == 0) break;
    }
    out[set] = std::move(acc);
  }
  (void)m;
  return out;
}

std::vector<Rational> mobius_inverse_fast(std::span<const Rational> table, std::size_t m) {
  std::vector<Rational> out(table.begin(), table.end());
  for (std::size_t bit = 0; bit < m; ++bit) {
    const AtomMask step = AtomMask{1} << bit;
    for (AtomMask set = 0; set < out.size(); ++set)
      if (set & step) out[set] -= out[set ^ step];
  }
  return out;
}

}  // namespace detail

MassFunction mobius_inverse(const SetFunction& bel) {
  const AtomSetPtr& atoms = bel.atoms();
  const std::size_t m = atoms->count();
  std::vector<Rational> table = bel.dense_values();
  if (table.front() != 0)
    throw std::invalid_argument("mobius_inverse requires value(empty) = 0");
  if (table.back() != 1)
    throw std::invalid_argument("mobius_inverse requires value(full) = 1");

  std::vector<Rational> raw = m > 12 ? detail::mobius_inverse_fast(table, m)
                                     : detail::mobius_inverse_direct(table, m);

  std::map<AtomMask, Rational> weights;
  for (AtomMask mask = 1; mask < raw.size(); ++mask) {
    if (raw[mask] < 0) throw NotCompletelyMonotoneError(atoms->event_of(mask), raw[mask]);
    if (raw[mask] > 0) weights.emplace(mask, raw[mask]);
  }
  return MassFunction(atoms, std::move(weights));
}

SetFunction vacuous_belief(AtomSetPtr atoms, const Event& on) {
  if (on.is_empty())
    throw std::invalid_argument("vacuous belief is undefined on the empty event");
  auto mask = atoms->mask_of(on);
  if (!mask)
    throw std::invalid_argument("vacuous belief target " + on.to_string() +
                                " is not an element of the algebra");
  std::map<AtomMask, Rational> weights{{*mask, Rational(1)}};
  return SetFunction::from_mass(MassFunction(std::move(atoms), std::move(weights)));
}

bool is_probability_mass(const MassFunction& mass) {
  return std::all_of(mass.weights().begin(), mass.weights().end(),
                     [](const auto& kv) { return std::popcount(kv.first) == 1; });
}

bool is_consonant_mass(const MassFunction& mass) {
  // Focal elements sorted by cardinality must form a single inclusion chain.
  std::vector<AtomMask> focal;
  focal.reserve(mass.weights().size());
  for (const auto& [mask, w] : mass.weights()) focal.push_back(mask);
  std::sort(focal.begin(), focal.end(), [](AtomMask a, AtomMask b) {
    return std::popcount(a) < std::popcount(b);
  });
  for (std::size_t i = 0; i + 1 < focal.size(); ++i)
    if (!mask_indicator(focal[i + 1], focal[i])) return false;
  return true;
}

bool dominates(std::span<const Rational> atom_weights, const SetFunction& bel) {
  const std::size_t m = bel.atoms()->count();
  if (atom_weights.size() != m)
    throw std::invalid_argument("atom weight count does not match the atom set");
  Rational total = 0;
  for (const auto& p : atom_weights) {
    if (p < 0) throw std::invalid_argument("atom weights must be non-negative");
    total += p;
  }
  if (total != 1) throw std::invalid_argument("atom weights must sum to 1");

  for (AtomMask mask = 1; mask < (AtomMask{1} << m); ++mask) {
    Rational p_sum = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (AtomMask{1} << i)) p_sum += atom_weights[i];
    if (p_sum < bel.value(mask)) return false;
  }
  return true;
}

}  // namespace coherent
