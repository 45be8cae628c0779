#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <random>

#include "coherent/coherence.hpp"
#include "test_support.hpp"

using namespace coherent;
using test_support::ExampleFamily;

namespace {

// Independent interval oracle: enumerate the basic feasible solutions of
// {x >= 0, Ax = b} and take objective extremes over them.
std::optional<std::pair<Rational, Rational>> vertex_interval(const FeasibilityProblem& p,
                                                             const RationalVector& c) {
  const Eigen::Index rows = p.lhs.rows(), cols = p.lhs.cols();
  RationalMatrix reduced(rows, cols + 1);
  reduced.leftCols(cols) = p.lhs;
  reduced.col(cols) = p.rhs;
  std::vector<Eigen::Index> pivot_rows;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < cols && row < rows; ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = row; i < rows; ++i)
      if (reduced(i, col) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    reduced.row(row).swap(reduced.row(pivot));
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == row || reduced(i, col) == 0) continue;
      Rational factor = reduced(i, col) / reduced(row, col);
      reduced.row(i) -= factor * reduced.row(row);
    }
    pivot_rows.push_back(row);
    ++row;
  }
  const std::size_t rank = pivot_rows.size();
  for (Eigen::Index i = static_cast<Eigen::Index>(rank); i < rows; ++i)
    if (reduced(i, cols) != 0) return std::nullopt;  // inconsistent system

  std::optional<std::pair<Rational, Rational>> bounds;
  std::vector<std::size_t> subset(rank);
  const std::size_t n = static_cast<std::size_t>(cols);
  // iterate all column subsets of size `rank`
  std::vector<std::size_t> idx(rank);
  for (std::size_t i = 0; i < rank; ++i) idx[i] = i;
  auto advance = [&]() -> bool {
    std::size_t k = rank;
    while (k > 0) {
      --k;
      if (idx[k] + (rank - k) < n) {
        ++idx[k];
        for (std::size_t j = k + 1; j < rank; ++j) idx[j] = idx[j - 1] + 1;
        return true;
      }
    }
    return false;
  };
  if (rank == 0) {
    RationalVector x = RationalVector::Zero(cols);
    if (((p.lhs * x) - p.rhs).isZero()) {
      Rational v = c.dot(x);
      bounds = {v, v};
    }
    return bounds;
  }
  do {
    RationalMatrix square(rank, rank);
    for (std::size_t r = 0; r < rank; ++r)
      for (std::size_t k = 0; k < rank; ++k)
        square(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
            p.lhs(pivot_rows.empty() ? 0 : static_cast<Eigen::Index>(r),
                  static_cast<Eigen::Index>(idx[k]));
    // solve square * xs = b over the independent rows by Gaussian elimination
    RationalMatrix work(rank, rank + 1);
    for (std::size_t r = 0; r < rank; ++r) {
      for (std::size_t k = 0; k < rank; ++k)
        work(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
            square(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
      work(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(rank)) =
          p.rhs(static_cast<Eigen::Index>(r));
    }
    bool singular = false;
    for (std::size_t col = 0; col < rank && !singular; ++col) {
      std::size_t pivot = col;
      while (pivot < rank && work(static_cast<Eigen::Index>(pivot),
                                  static_cast<Eigen::Index>(col)) == 0)
        ++pivot;
      if (pivot == rank) {
        singular = true;
        break;
      }
      work.row(static_cast<Eigen::Index>(col)).swap(work.row(static_cast<Eigen::Index>(pivot)));
      work.row(static_cast<Eigen::Index>(col)) /=
          work(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col));
      for (std::size_t i = 0; i < rank; ++i) {
        if (i == col) continue;
        Rational factor = work(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col));
        if (factor != 0)
          work.row(static_cast<Eigen::Index>(i)) -=
              factor * work.row(static_cast<Eigen::Index>(col));
      }
    }
    if (singular) continue;
    RationalVector x = RationalVector::Zero(cols);
    bool nonneg = true;
    for (std::size_t k = 0; k < rank; ++k) {
      Rational v = work(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(rank));
      if (v < 0) {
        nonneg = false;
        break;
      }
      x(static_cast<Eigen::Index>(idx[k])) = v;
    }
    if (!nonneg) continue;
    RationalVector residual = p.lhs * x - p.rhs;
    bool ok = true;
    for (Eigen::Index i = 0; i < residual.size(); ++i)
      if (residual(i) != 0) {
        ok = false;
        break;
      }
    if (!ok) continue;
    Rational v = c.dot(x);
    if (!bounds)
      bounds = {v, v};
    else {
      bounds->first = std::min(bounds->first, v);
      bounds->second = std::max(bounds->second, v);
    }
  } while (advance());
  (void)subset;
  return bounds;
}

// Gain of the verdict stakes on every element of the column family.
void check_dutch_book(const Assessment& assessment, const AtomSet& atoms,
                      std::span<const AtomMask> columns, const DutchBook& book) {
  REQUIRE(book.gain_bound < 0);
  for (AtomMask column : columns) {
    Rational gain =
        evaluate_gain(assessment, book.stakes, atoms.event_of(column));
    CHECK(gain <= book.gain_bound);
  }
}

void check_witness(const Assessment& assessment, const MassFunction& witness) {
  SetFunction bel = belief_from_mass(witness);
  for (std::size_t i = 0; i < assessment.size(); ++i) {
    auto mask = witness.atoms()->mask_of(assessment.family[i]);
    REQUIRE(mask.has_value());
    CHECK(bel.value(*mask) == assessment.values[i]);
  }
}

}  // namespace

TEST_CASE("build_system reproduces the seven-column indicator table") {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Belief, Rational(1, 4), Rational(1), Rational(1, 2));
  AtomSet atoms = AtomSet::compute(assessment.family);
  FeasibilityProblem p =
      build_system(assessment, atoms, enumerate_nonempty_events(atoms));
  REQUIRE(p.rows() == 4);
  REQUIRE(p.cols() == 7);
  const int expected[3][7] = {{1, 1, 0, 1, 0, 0, 0},
                              {0, 1, 1, 0, 0, 1, 0},
                              {0, 1, 0, 0, 0, 0, 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(p.lhs(i, j) == Rational(expected[i][j]));
  for (int j = 0; j < 7; ++j) CHECK(p.lhs(3, j) == Rational(1));
  CHECK(p.rhs(0) == Rational(1, 4));
  CHECK(p.rhs(1) == Rational(1));
  CHECK(p.rhs(2) == Rational(1, 2));
  CHECK(p.rhs(3) == Rational(1));
}

TEST_CASE("the single-event full assessment is a trivial feasible system") {
  auto u = test_support::labeled_universe(1);
  Assessment assessment(EventFamily(u, {Event::full(u)}), {Rational(1)}, Kind::Belief);
  Verdict verdict = check_belief(assessment);
  CHECK(verdict.coherent);
  REQUIRE(verdict.witness.has_value());
  check_witness(assessment, *verdict.witness);
}

TEST_CASE("atom columns reproduce the probability-mode system") {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Probability, Rational(1, 4), Rational(1), Rational(1, 2));
  AtomSet atoms = AtomSet::compute(assessment.family);
  std::vector<Event> columns;
  for (std::size_t i = 0; i < atoms.count(); ++i) columns.push_back(atoms.atom(i));
  FeasibilityProblem p = build_system(assessment, atoms, columns);
  REQUIRE(p.cols() == 3);
  const int expected[3][3] = {{1, 1, 0}, {0, 1, 1}, {0, 1, 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(p.lhs(i, j) == Rational(expected[i][j]));
}

TEST_CASE("build_system rejects columns outside the algebra") {
  ExampleFamily ex;
  EventFamily family(ex.universe, {ex.a});
  Assessment assessment(family, {Rational(1, 2)}, Kind::Belief);
  AtomSet atoms = AtomSet::compute(family);  // atoms {w1,w2}, {w3}
  std::vector<Event> columns{Event::of(ex.universe, {0})};
  CHECK_THROWS_AS(build_system(assessment, atoms, columns), std::invalid_argument);
}

TEST_CASE("the example assessment is incoherent in every mode") {
  ExampleFamily ex;
  for (Kind kind : {Kind::Belief, Kind::Probability, Kind::Necessity}) {
    Assessment assessment =
        ex.assessment(kind, Rational(1, 4), Rational(1), Rational(1, 2));
    Verdict verdict = check(assessment);
    CHECK(!verdict.coherent);
    CHECK(!verdict.witness.has_value());
  }
}

TEST_CASE("belief check: Dutch book stakes refute every column") {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Belief, Rational(1, 4), Rational(1), Rational(1, 2));
  Verdict verdict = check_belief(assessment);
  REQUIRE(!verdict.coherent);
  REQUIRE(verdict.dutch_book.has_value());
  AtomSet atoms = AtomSet::compute(assessment.family);
  check_dutch_book(assessment, atoms, enumerate_nonempty_events(atoms), *verdict.dutch_book);
}

TEST_CASE("belief check accepts the 3/10, 6/10, 2/10 assessment") {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Belief, Rational(3, 10), Rational(6, 10), Rational(2, 10));
  Verdict verdict = check_belief(assessment);
  REQUIRE(verdict.coherent);
  check_witness(assessment, *verdict.witness);

  // exhibited feasible mass: {w2} -> 1/5, A -> 1/10, {w3} -> 2/5, full -> 3/10
  auto atoms = std::make_shared<const AtomSet>(AtomSet::compute(assessment.family));
  MassFunction exhibited(atoms, {{*atoms->mask_of(ex.ab), Rational(1, 5)},
                                 {*atoms->mask_of(ex.a), Rational(1, 10)},
                                 {AtomMask{1} << 2, Rational(2, 5)},
                                 {atoms->full_mask(), Rational(3, 10)}});
  check_witness(assessment, exhibited);
}

TEST_CASE("probability check on the example variants") {
  ExampleFamily ex;
  Assessment incoherent =
      ex.assessment(Kind::Probability, Rational(1, 4), Rational(1), Rational(1, 2));
  CHECK(!check_probability(incoherent).coherent);

  auto u = test_support::labeled_universe(2);
  Assessment trivial(EventFamily(u, {Event::full(u)}), {Rational(1)}, Kind::Probability);
  CHECK(check_probability(trivial).coherent);

  Assessment corrected =
      ex.assessment(Kind::Probability, Rational(3, 8), Rational(1), Rational(3, 8));
  Verdict verdict = check_probability(corrected);
  REQUIRE(verdict.coherent);
  REQUIRE(verdict.witness.has_value());
  CHECK(is_probability_mass(*verdict.witness));
  check_witness(corrected, *verdict.witness);
  CHECK(verdict.witness->weight(AtomMask{1} << 0) == Rational(0));
  CHECK(verdict.witness->weight(AtomMask{1} << 1) == Rational(3, 8));
  CHECK(verdict.witness->weight(AtomMask{1} << 2) == Rational(5, 8));
}

TEST_CASE("necessity check finds the example witness chain") {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Necessity, Rational(3, 8), Rational(1), Rational(3, 8));
  Verdict verdict = check_necessity(assessment);
  REQUIRE(verdict.coherent);
  REQUIRE(verdict.witness_chain.has_value());
  CHECK(verdict.witness_chain->permutation == std::vector<std::size_t>{1, 2, 0});
  REQUIRE(verdict.witness.has_value());
  CHECK(is_consonant_mass(*verdict.witness));
  check_witness(assessment, *verdict.witness);
}

TEST_CASE("necessity check trivial and incoherent cases") {
  auto u = test_support::labeled_universe(2);
  Assessment trivial(EventFamily(u, {Event::full(u)}), {Rational(1)}, Kind::Necessity);
  CHECK(check_necessity(trivial).coherent);

  ExampleFamily ex;
  Assessment incoherent =
      ex.assessment(Kind::Necessity, Rational(1, 4), Rational(1), Rational(1, 2));
  Verdict verdict = check_necessity(incoherent);
  REQUIRE(!verdict.coherent);
  CHECK(verdict.chains_all_infeasible);
  // three atoms: per-chain certificates, one per permutation
  REQUIRE(verdict.chain_refutations.size() == 6);
  AtomSet atoms = AtomSet::compute(incoherent.family);
  for (const auto& refutation : verdict.chain_refutations) {
    REQUIRE(refutation.gain_bound < 0);
    Chain chain = chain_at(3, refutation.permutation_index);
    CHECK(chain.permutation == refutation.permutation);
    for (AtomMask element : chain.elements) {
      Rational gain =
          evaluate_gain(incoherent, refutation.stakes, atoms.event_of(element));
      CHECK(gain <= refutation.gain_bound);
    }
  }
}

TEST_CASE("values on the empty event fold into the system") {
  auto u = test_support::labeled_universe(2);
  Event none = Event::empty(u);
  Assessment zero(EventFamily(u, {none}), {Rational(0)}, Kind::Belief);
  CHECK(check_belief(zero).coherent);
  Assessment bad(EventFamily(u, {none}), {Rational(1, 3)}, Kind::Belief);
  Verdict verdict = check_belief(bad);
  CHECK(!verdict.coherent);
  REQUIRE(verdict.dutch_book.has_value());
}

TEST_CASE("duplicate events must agree to stay coherent") {
  ExampleFamily ex;
  EventFamily family(ex.universe, {ex.a, ex.a});
  Assessment consistent(family, {Rational(1, 3), Rational(1, 3)}, Kind::Belief);
  CHECK(check_belief(consistent).coherent);
  Assessment conflicting(family, {Rational(1, 3), Rational(1, 2)}, Kind::Belief);
  CHECK(!check_belief(conflicting).coherent);
}

TEST_CASE("gain evaluation matches the worked stakes") {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Belief, Rational(1, 4), Rational(1), Rational(1, 2));
  std::vector<Rational> stakes{Rational(-1), Rational(0), Rational(1)};
  CHECK(evaluate_gain(assessment, stakes, Event::of(ex.universe, {1})) == Rational(-1, 4));
  CHECK(evaluate_gain(assessment, stakes, Event::of(ex.universe, {0})) == Rational(-5, 4));
  CHECK(evaluate_gain(assessment, stakes, Event::of(ex.universe, {2})) == Rational(-1, 4));

  AtomSet atoms = AtomSet::compute(assessment.family);
  Rational max_gain;
  bool first = true;
  for (AtomMask column : enumerate_nonempty_events(atoms)) {
    Rational gain = evaluate_gain(assessment, stakes, atoms.event_of(column));
    CHECK(gain < 0);
    if (first || gain > max_gain) max_gain = gain;
    first = false;
  }
  CHECK(max_gain == Rational(-1, 4));

  std::vector<Rational> zero(3, Rational(0));
  CHECK(evaluate_gain(assessment, zero, Event::full(ex.universe)) == Rational(0));
  CHECK_THROWS_AS(evaluate_gain(assessment, stakes, Event::empty(ex.universe)),
                  std::invalid_argument);
}

TEST_CASE("extension interval: single certain event constrains a new target") {
  ExampleFamily ex;
  Assessment assessment(EventFamily(ex.universe, {ex.b}), {Rational(1)}, Kind::Belief);
  auto [lo, hi] = extension_interval(assessment, ex.a);
  CHECK(lo == Rational(0));
  CHECK(hi == Rational(1));

  // oracle: enumerate basic feasible solutions of the extended system
  std::vector<Event> extended{ex.b, ex.a};
  AtomSet atoms = AtomSet::compute(EventFamily(ex.universe, extended));
  auto columns = enumerate_nonempty_events(atoms);
  FeasibilityProblem p = build_system(assessment, atoms, columns);
  RationalVector c(static_cast<Eigen::Index>(columns.size()));
  AtomMask target = *atoms.mask_of(ex.a);
  for (std::size_t j = 0; j < columns.size(); ++j)
    c(static_cast<Eigen::Index>(j)) = Rational(mask_indicator(target, columns[j]));
  auto oracle = vertex_interval(p, c);
  REQUIRE(oracle.has_value());
  CHECK(oracle->first == lo);
  CHECK(oracle->second == hi);
}

TEST_CASE("extension interval degenerates on an already-assessed target") {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Belief, Rational(3, 10), Rational(6, 10), Rational(2, 10));
  auto [lo, hi] = extension_interval(assessment, ex.b);
  CHECK(lo == Rational(6, 10));
  CHECK(hi == Rational(6, 10));
}

TEST_CASE("extension interval of an empty assessment spans the unit interval") {
  auto u = test_support::labeled_universe(3);
  Assessment empty(EventFamily(u, {}), {}, Kind::Belief);
  auto [lo, hi] = extension_interval(empty, Event::of(u, {0}));
  CHECK(lo == Rational(0));
  CHECK(hi == Rational(1));
}

TEST_CASE("extension interval endpoints are attained and tight") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 25; ++trial) {
    auto universe = test_support::labeled_universe(3);
    auto atoms = test_support::powerset_atoms(universe);
    SetFunction bel = belief_from_mass(test_support::random_mass(atoms, rng));
    std::vector<Event> events;
    std::vector<Rational> values;
    for (int k = 0; k < 2; ++k) {
      Event e = test_support::random_nonempty_event(universe, rng);
      values.push_back(bel.value(e));
      events.push_back(std::move(e));
    }
    Assessment assessment(EventFamily(universe, events), values, Kind::Belief);
    Event target = test_support::random_nonempty_event(universe, rng);
    auto [lo, hi] = extension_interval(assessment, target);
    CHECK(lo <= hi);

    auto extended_with = [&](const Rational& v) {
      std::vector<Event> ext_events = events;
      ext_events.push_back(target);
      std::vector<Rational> ext_values = values;
      ext_values.push_back(v);
      return Assessment(EventFamily(universe, ext_events), ext_values, Kind::Belief);
    };
    CHECK(check_belief(extended_with(lo)).coherent);
    CHECK(check_belief(extended_with(hi)).coherent);
    const Rational epsilon(1, 1000);
    if (lo - epsilon >= 0) CHECK(!check_belief(extended_with(lo - epsilon)).coherent);
    if (hi + epsilon <= 1) CHECK(!check_belief(extended_with(hi + epsilon)).coherent);
  }
}

TEST_CASE("extension intervals in probability and necessity modes") {
  ExampleFamily ex;
  // probability mode: atoms of {B} are {w2,w3} and {w1}; P(B) = 3/5 pins the
  // complement, and a finer target splits B freely
  Assessment probability(EventFamily(ex.universe, {ex.b}), {Rational(3, 5)},
                         Kind::Probability);
  auto [plo, phi] = extension_interval(probability, Event::of(ex.universe, {1}));
  CHECK(plo == Rational(0));
  CHECK(phi == Rational(3, 5));

  // necessity mode: N(B) = 3/5 and the target {w2} ranges over [0, 3/5] via
  // chains that enter B at {w2}, and sticks at 0 on chains entering at {w3}
  Assessment necessity(EventFamily(ex.universe, {ex.b}), {Rational(3, 5)}, Kind::Necessity);
  auto [nlo, nhi] = extension_interval(necessity, Event::of(ex.universe, {1}));
  CHECK(nlo == Rational(0));
  CHECK(nhi == Rational(3, 5));

  // endpoints attained within the kind
  for (const Rational& v : {nlo, nhi}) {
    Assessment extended(EventFamily(ex.universe, {ex.b, Event::of(ex.universe, {1})}),
                        {Rational(3, 5), v}, Kind::Necessity);
    CHECK(check_necessity(extended).coherent);
  }

  // an already-assessed necessity target stays pinned
  Assessment pinned(EventFamily(ex.universe, {ex.b, ex.ab}),
                    {Rational(1), Rational(3, 8)}, Kind::Necessity);
  auto [qlo, qhi] = extension_interval(pinned, ex.ab);
  CHECK(qlo == Rational(3, 8));
  CHECK(qhi == Rational(3, 8));
}

TEST_CASE("extension rejects incoherent assessments") {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Belief, Rational(1, 4), Rational(1), Rational(1, 2));
  CHECK_THROWS_AS(extension_interval(assessment, ex.a), IncoherentAssessmentError);
}

TEST_CASE("duality: exactly one certificate type, both verified") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t worlds = 2 + trial % 3;
    auto universe = test_support::labeled_universe(worlds);
    std::vector<Event> events;
    std::vector<Rational> values;
    const std::size_t n = 1 + rng() % 4;
    for (std::size_t k = 0; k < n; ++k) {
      events.push_back(test_support::random_event(universe, rng));
      values.push_back(test_support::random_unit_rational(rng));
    }
    Assessment assessment(EventFamily(universe, events), values, Kind::Belief);
    Verdict verdict = check_belief(assessment);
    AtomSet atoms = assessment.family.size() ? AtomSet::compute(assessment.family)
                                             : AtomSet::trivial(universe);
    if (verdict.coherent) {
      REQUIRE(verdict.witness.has_value());
      REQUIRE(!verdict.dutch_book.has_value());
      check_witness(assessment, *verdict.witness);
    } else {
      REQUIRE(verdict.dutch_book.has_value());
      REQUIRE(!verdict.witness.has_value());
      check_dutch_book(assessment, atoms, enumerate_nonempty_events(atoms),
                       *verdict.dutch_book);
    }
  }
}

TEST_CASE("restrictions of coherent assessments stay coherent") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    auto universe = test_support::labeled_universe(3);
    auto atoms = test_support::powerset_atoms(universe);
    SetFunction bel = belief_from_mass(test_support::random_mass(atoms, rng));
    std::vector<Event> events;
    std::vector<Rational> values;
    for (int k = 0; k < 4; ++k) {
      Event e = test_support::random_nonempty_event(universe, rng);
      values.push_back(bel.value(e));
      events.push_back(std::move(e));
    }
    // drop a random row: the sub-assessment must remain coherent
    const std::size_t drop = rng() % events.size();
    events.erase(events.begin() + static_cast<std::ptrdiff_t>(drop));
    values.erase(values.begin() + static_cast<std::ptrdiff_t>(drop));
    Assessment assessment(EventFamily(universe, events), values, Kind::Belief);
    CHECK(check_belief(assessment).coherent);
  }
}

TEST_CASE("probability and necessity coherence imply belief coherence") {
  std::mt19937_64 rng(59);
  int p_coherent = 0, n_coherent = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto universe = test_support::labeled_universe(2 + trial % 3);
    std::vector<Event> events;
    std::vector<Rational> values;
    const std::size_t n = 1 + rng() % 3;
    for (std::size_t k = 0; k < n; ++k) {
      events.push_back(test_support::random_event(universe, rng));
      values.push_back(test_support::random_unit_rational(rng));
    }
    EventFamily family(universe, events);
    Verdict belief = check_belief(Assessment(family, values, Kind::Belief));
    Verdict probability = check_probability(Assessment(family, values, Kind::Probability));
    Verdict necessity = check_necessity(Assessment(family, values, Kind::Necessity));
    if (probability.coherent) {
      ++p_coherent;
      CHECK(belief.coherent);
    }
    if (necessity.coherent) {
      ++n_coherent;
      CHECK(belief.coherent);
    }
    if (!belief.coherent) {
      CHECK(!probability.coherent);
      CHECK(!necessity.coherent);
    }
  }
  CHECK(p_coherent > 0);
  CHECK(n_coherent > 0);
}

TEST_CASE("monotonicity violations are incoherent in every mode") {
  ExampleFamily ex;
  // ab is contained in a but gets the larger value
  for (Kind kind : {Kind::Belief, Kind::Probability, Kind::Necessity}) {
    Assessment assessment =
        ex.assessment(kind, Rational(1, 3), Rational(1, 2), Rational(2, 3));
    CHECK(!check(assessment).coherent);
  }
}

TEST_CASE("necessity witnesses satisfy the minitivity law") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    auto universe = test_support::labeled_universe(3);
    auto atoms = test_support::powerset_atoms(universe);
    SetFunction reference = belief_from_mass(test_support::random_consonant_mass(atoms, rng));
    std::vector<Event> events;
    std::vector<Rational> values;
    for (int k = 0; k < 3; ++k) {
      Event e = test_support::random_nonempty_event(universe, rng);
      values.push_back(reference.value(e));
      events.push_back(std::move(e));
    }
    Assessment assessment(EventFamily(universe, events), values, Kind::Necessity);
    Verdict verdict = check_necessity(assessment);
    REQUIRE(verdict.coherent);
    SetFunction witness_bel = belief_from_mass(*verdict.witness);
    const AtomMask full = verdict.witness->atoms()->full_mask();
    for (AtomMask e = 0; e <= full; ++e)
      for (AtomMask f = e; f <= full; ++f)
        CHECK(witness_bel.value(e & f) ==
              std::min(witness_bel.value(e), witness_bel.value(f)));
  }
}

TEST_CASE("chain pruning is sound against the unpruned search") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 80; ++trial) {
    auto universe = test_support::labeled_universe(2 + trial % 4);
    std::vector<Event> events;
    std::vector<Rational> values;
    const std::size_t n = 1 + rng() % 3;
    for (std::size_t k = 0; k < n; ++k) {
      events.push_back(test_support::random_event(universe, rng));
      values.push_back(test_support::random_unit_rational(rng));
    }
    Assessment assessment(EventFamily(universe, events), values, Kind::Necessity);
    AtomSet atoms = AtomSet::compute(assessment.family);
    ChainEnumerator chains(atoms);
    while (auto chain = chains.next()) {
      FeasibilityProblem p = build_system(assessment, atoms, chain->elements);
      const bool feasible = std::holds_alternative<FeasibleResult>(solve_feasibility(p));
      const bool pre = chain_prefeasible(assessment, atoms, *chain);
      CHECK(pre == feasible);  // the filter is exact, in particular sound
    }
  }
}
