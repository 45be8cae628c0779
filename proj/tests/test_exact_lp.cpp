#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "coherent/coherence.hpp"
#include "coherent/exact_lp.hpp"
#include "test_support.hpp"

using namespace coherent;
using test_support::ExampleFamily;

namespace {

FeasibilityProblem example_problem() {
  ExampleFamily ex;
  Assessment assessment =
      ex.assessment(Kind::Belief, Rational(1, 4), Rational(1), Rational(1, 2));
  AtomSet atoms = AtomSet::compute(assessment.family);
  return build_system(assessment, atoms, enumerate_nonempty_events(atoms));
}

FeasibilityProblem random_problem(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> entry(-2, 2);
  FeasibilityProblem p;
  p.lhs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  p.rhs.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j)
      p.lhs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Rational(entry(rng));
    p.rhs(static_cast<Eigen::Index>(i)) = Rational(entry(rng), 1 + int(rng() % 3));
  }
  return p;
}

}  // namespace

TEST_CASE("one-variable identity system is feasible") {
  FeasibilityProblem p;
  p.lhs = RationalMatrix::Constant(1, 1, Rational(1));
  p.rhs = RationalVector::Constant(1, Rational(1));
  auto outcome = solve_feasibility(p);
  auto* feasible = std::get_if<FeasibleResult>(&outcome);
  REQUIRE(feasible != nullptr);
  CHECK(feasible->solution(0) == Rational(1));
}

TEST_CASE("the example system is infeasible with a Dutch-book certificate") {
  FeasibilityProblem p = example_problem();
  REQUIRE(p.cols() == 7);
  REQUIRE(p.rows() == 4);
  auto outcome = solve_feasibility(p);
  auto* infeasible = std::get_if<InfeasibleResult>(&outcome);
  REQUIRE(infeasible != nullptr);

  // the induced stakes produce a uniformly negative gain over all columns
  const RationalVector& y = infeasible->farkas;
  const Rational bound = -y.dot(p.rhs);
  CHECK(bound < 0);
  for (Eigen::Index j = 0; j < p.lhs.cols(); ++j) {
    Rational gain = 0;
    for (Eigen::Index i = 0; i + 1 < p.lhs.rows(); ++i)
      gain += y(i) * (p.lhs(i, j) - p.rhs(i));
    CHECK(gain <= bound);
  }
}

TEST_CASE("systems built from masses are feasible and reproduce the rhs") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    auto universe = test_support::labeled_universe(3);
    auto atoms = test_support::powerset_atoms(universe);
    MassFunction mass = test_support::random_mass(atoms, rng);
    SetFunction bel = belief_from_mass(mass);

    std::vector<Event> events;
    std::vector<Rational> values;
    for (int k = 0; k < 3; ++k) {
      Event e = test_support::random_nonempty_event(universe, rng);
      values.push_back(bel.value(e));
      events.push_back(std::move(e));
    }
    Assessment assessment(EventFamily(universe, events), values, Kind::Belief);
    FeasibilityProblem p = build_system(assessment, *atoms, enumerate_nonempty_events(*atoms));
    auto outcome = solve_feasibility(p);
    auto* feasible = std::get_if<FeasibleResult>(&outcome);
    REQUIRE(feasible != nullptr);
    RationalVector reproduced = p.lhs * feasible->solution;
    for (Eigen::Index i = 0; i < p.rhs.size(); ++i) CHECK(reproduced(i) == p.rhs(i));
  }
}

TEST_CASE("random systems always produce a verified certificate") {
  // verify_certificate runs inside solve_feasibility; this exercises both
  // branches over many shapes, including degenerate and duplicated rows
  std::mt19937_64 rng(31);
  int feasible_count = 0, infeasible_count = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t rows = 1 + rng() % 4;
    std::size_t cols = 1 + rng() % 6;
    FeasibilityProblem p = random_problem(rng, rows, cols);
    if (trial % 3 == 0 && rows >= 2) {
      p.lhs.row(1) = p.lhs.row(0);  // duplicate row
      p.rhs(1) = p.rhs(0);
    }
    if (trial % 5 == 0) p.rhs(0) = 0;  // degenerate right side
    auto outcome = solve_feasibility(p);
    if (std::holds_alternative<FeasibleResult>(outcome))
      ++feasible_count;
    else
      ++infeasible_count;
  }
  CHECK(feasible_count > 0);
  CHECK(infeasible_count > 0);
}

TEST_CASE("determinism: identical problems give identical certificates") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    FeasibilityProblem p = random_problem(rng, 1 + rng() % 3, 1 + rng() % 5);
    auto first = solve_feasibility(p);
    auto second = solve_feasibility(p);
    REQUIRE(first.index() == second.index());
    if (auto* f = std::get_if<FeasibleResult>(&first))
      CHECK(f->solution == std::get<FeasibleResult>(second).solution);
    else
      CHECK(std::get<InfeasibleResult>(first).farkas ==
            std::get<InfeasibleResult>(second).farkas);
  }
}

TEST_CASE("optimize finds exact bounds over a simplex") {
  // min/max of x1 + 2 x3 over the probability simplex on three points
  FeasibilityProblem p;
  p.lhs = RationalMatrix::Constant(1, 3, Rational(1));
  p.rhs = RationalVector::Constant(1, Rational(1));
  RationalVector c(3);
  c << Rational(1), Rational(0), Rational(2);
  CHECK(optimize(p, c, Sense::Minimize).value == Rational(0));
  CHECK(optimize(p, c, Sense::Maximize).value == Rational(2));
}

TEST_CASE("optimize handles redundant rows") {
  FeasibilityProblem p;
  p.lhs.resize(3, 3);
  p.lhs << Rational(1), Rational(1), Rational(1),
           Rational(1), Rational(1), Rational(1),
           Rational(1), Rational(0), Rational(0);
  p.rhs.resize(3);
  p.rhs << Rational(1), Rational(1), Rational(1, 4);
  RationalVector c(3);
  c << Rational(0), Rational(1), Rational(3);
  auto lo = optimize(p, c, Sense::Minimize);
  auto hi = optimize(p, c, Sense::Maximize);
  CHECK(lo.value == Rational(3, 4));   // all remaining weight on x2
  CHECK(hi.value == Rational(9, 4));   // all remaining weight on x3
  RationalVector residual = p.lhs * lo.solution - p.rhs;
  for (Eigen::Index i = 0; i < residual.size(); ++i) CHECK(residual(i) == 0);
}

TEST_CASE("optimize rejects infeasible and unbounded problems") {
  FeasibilityProblem infeasible;
  infeasible.lhs = RationalMatrix::Constant(1, 1, Rational(0));
  infeasible.rhs = RationalVector::Constant(1, Rational(1));
  RationalVector c1(1);
  c1 << Rational(1);
  CHECK_THROWS_AS(optimize(infeasible, c1, Sense::Minimize), std::runtime_error);

  FeasibilityProblem unbounded;
  unbounded.lhs.resize(1, 2);
  unbounded.lhs << Rational(1), Rational(-1);
  unbounded.rhs = RationalVector::Constant(1, Rational(0));
  RationalVector c2(2);
  c2 << Rational(-1), Rational(0);
  CHECK_THROWS_AS(optimize(unbounded, c2, Sense::Minimize), std::runtime_error);
}

TEST_CASE("verify_certificate rejects corrupted certificates") {
  FeasibilityProblem p;
  p.lhs = RationalMatrix::Constant(1, 1, Rational(1));
  p.rhs = RationalVector::Constant(1, Rational(1));
  FeasibleResult bad{RationalVector::Constant(1, Rational(2))};
  CHECK_THROWS_AS(verify_certificate(p, FeasibilityOutcome(bad)), std::logic_error);
  InfeasibleResult bogus{RationalVector::Constant(1, Rational(1))};
  CHECK_THROWS_AS(verify_certificate(p, FeasibilityOutcome(bogus)), std::logic_error);
}
