#include "coherent/correction.hpp"

#include <algorithm>
#include <memory>

namespace coherent {

HighFloat CorrectionResult::divergence_value() const {
  if (const auto* exact_value = std::get_if<Rational>(&divergence))
    return to_highfloat(*exact_value);
  return std::get<HighFloat>(divergence);
}

namespace {

std::shared_ptr<const AtomSet> assessment_atoms(const Assessment& assessment) {
  if (assessment.family.size() == 0)
    return std::make_shared<const AtomSet>(AtomSet::trivial(assessment.family.universe()));
  return std::make_shared<const AtomSet>(AtomSet::compute(assessment.family));
}

// Indicator vertices e^j as columns: entry (i, j) = 1 iff column j is
// contained in assessed event i.
RationalMatrix vertex_matrix(const Assessment& assessment, const AtomSet& atoms,
                             std::span<const AtomMask> columns) {
  std::vector<AtomMask> rows;
  rows.reserve(assessment.size());
  for (const auto& event : assessment.family) rows.push_back(*atoms.mask_of(event));
  RationalMatrix v(assessment.size(), columns.size());
  for (std::size_t i = 0; i < assessment.size(); ++i)
    for (std::size_t j = 0; j < columns.size(); ++j)
      v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Rational(mask_indicator(rows[i], columns[j]));
  return v;
}

struct DedupVertices {
  RationalMatrix matrix;                    // distinct columns
  std::vector<std::size_t> representative;  // distinct index -> first original index
};

DedupVertices dedup_columns(const RationalMatrix& v) {
  DedupVertices out;
  std::map<std::vector<bool>, std::size_t> seen;
  std::vector<std::size_t> keep;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    std::vector<bool> key(static_cast<std::size_t>(v.rows()));
    for (Eigen::Index i = 0; i < v.rows(); ++i) key[static_cast<std::size_t>(i)] = v(i, j) != 0;
    if (seen.emplace(std::move(key), static_cast<std::size_t>(j)).second)
      keep.push_back(static_cast<std::size_t>(j));
  }
  out.matrix.resize(v.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    out.matrix.col(static_cast<Eigen::Index>(k)) = v.col(static_cast<Eigen::Index>(keep[k]));
  out.representative = std::move(keep);
  return out;
}

// ---------------------------------------------------------------------------
// Exact nearest point in the convex hull of the columns (squared Euclidean
// distance), by Wolfe's method: grow a corral, minimize over its affine
// hull, and walk back onto the simplex when weights go negative. All
// arithmetic is rational, so optimality tests are exact and the method
// terminates finitely.
// ---------------------------------------------------------------------------

struct AffineMinimizer {
  RationalVector point;
  std::vector<Rational> weights;
};

AffineMinimizer affine_minimizer(const RationalMatrix& v, const std::vector<std::size_t>& corral,
                                 const RationalVector& target) {
  const std::size_t k = corral.size();
  AffineMinimizer out;
  if (k == 1) {
    out.point = v.col(static_cast<Eigen::Index>(corral[0]));
    out.weights = {Rational(1)};
    return out;
  }
  const Eigen::Index base = static_cast<Eigen::Index>(corral[0]);
  RationalMatrix z(v.rows(), static_cast<Eigen::Index>(k - 1));
  for (std::size_t i = 1; i < k; ++i)
    z.col(static_cast<Eigen::Index>(i - 1)) =
        v.col(static_cast<Eigen::Index>(corral[i])) - v.col(base);
  RationalMatrix gram = z.transpose() * z;
  RationalVector rhs = z.transpose() * (target - v.col(base));

  // Solve gram * t = rhs; the system is always consistent, free variables
  // are pinned to zero so degenerate corrals stay deterministic.
  const Eigen::Index dim = gram.rows();
  RationalMatrix work(dim, dim + 1);
  work.leftCols(dim) = gram;
  work.col(dim) = rhs;
  std::vector<Eigen::Index> pivot_of_row;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < dim && row < dim; ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = row; i < dim; ++i)
      if (work(i, col) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    work.row(row).swap(work.row(pivot));
    work.row(row) /= work(row, col);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (i == row || work(i, col) == 0) continue;
      const Rational factor = work(i, col);
      work.row(i) -= factor * work.row(row);
    }
    pivot_of_row.push_back(col);
    ++row;
  }
  RationalVector t = RationalVector::Zero(dim);
  for (std::size_t r = 0; r < pivot_of_row.size(); ++r)
    t(pivot_of_row[r]) = work(static_cast<Eigen::Index>(r), dim);

  out.point = v.col(base) + z * t;
  out.weights.assign(k, Rational(0));
  Rational rest = 0;
  for (std::size_t i = 1; i < k; ++i) {
    out.weights[i] = t(static_cast<Eigen::Index>(i - 1));
    rest += out.weights[i];
  }
  out.weights[0] = Rational(1) - rest;
  return out;
}

struct HullProjection {
  RationalVector point;
  std::vector<Rational> weights;  // aligned with the vertex columns
};

HullProjection wolfe_nearest_point(const RationalMatrix& v, const RationalVector& target,
                                   std::size_t max_cycles) {
  const Eigen::Index n_cols = v.cols();
  if (n_cols == 0) throw std::invalid_argument("hull projection needs at least one vertex");

  // start from the vertex closest to the target
  Eigen::Index start = 0;
  Rational best_distance;
  for (Eigen::Index j = 0; j < n_cols; ++j) {
    const RationalVector diff = v.col(j) - target;
    const Rational dist = diff.dot(diff);
    if (j == 0 || dist < best_distance) {
      best_distance = dist;
      start = j;
    }
  }
  std::vector<std::size_t> corral{static_cast<std::size_t>(start)};
  std::vector<Rational> weights{Rational(1)};
  RationalVector x = v.col(start);
  Rational objective = best_distance;

  for (std::size_t cycle = 0; cycle < max_cycles; ++cycle) {
    const RationalVector gradient = x - target;
    Eigen::Index entering = -1;
    Rational entering_score;
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      const Rational score = gradient.dot(v.col(j));
      if (entering < 0 || score < entering_score) {
        entering_score = score;
        entering = j;
      }
    }
    if (entering_score >= gradient.dot(x)) {
      HullProjection out;
      out.point = std::move(x);
      out.weights.assign(static_cast<std::size_t>(n_cols), Rational(0));
      for (std::size_t i = 0; i < corral.size(); ++i) out.weights[corral[i]] = weights[i];
      return out;
    }
    corral.push_back(static_cast<std::size_t>(entering));
    weights.push_back(Rational(0));

    for (std::size_t minor = 0;; ++minor) {
      if (minor > max_cycles) throw std::logic_error("projection minor cycle did not settle");
      AffineMinimizer aff = affine_minimizer(v, corral, target);
      bool interior = true;
      for (const auto& a : aff.weights)
        if (a < 0) {
          interior = false;
          break;
        }
      if (interior) {
        x = std::move(aff.point);
        std::vector<std::size_t> kept;
        std::vector<Rational> kept_weights;
        for (std::size_t i = 0; i < corral.size(); ++i) {
          if (aff.weights[i] > 0) {
            kept.push_back(corral[i]);
            kept_weights.push_back(aff.weights[i]);
          }
        }
        corral = std::move(kept);
        weights = std::move(kept_weights);
        break;
      }
      // walk from the current weights toward the affine minimizer until the
      // first coordinate hits zero, then drop it
      Rational theta(1);
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (aff.weights[i] < 0) {
          const Rational limit = weights[i] / (weights[i] - aff.weights[i]);
          if (limit < theta) theta = limit;
        }
      }
      std::vector<std::size_t> kept;
      std::vector<Rational> kept_weights;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        const Rational blended = weights[i] + theta * (aff.weights[i] - weights[i]);
        if (blended > 0) {
          kept.push_back(corral[i]);
          kept_weights.push_back(blended);
        }
      }
      corral = std::move(kept);
      weights = std::move(kept_weights);
      x = RationalVector::Zero(v.rows());
      for (std::size_t i = 0; i < corral.size(); ++i)
        x += weights[i] * v.col(static_cast<Eigen::Index>(corral[i]));
    }
    const RationalVector diff = x - target;
    const Rational new_objective = diff.dot(diff);
    if (new_objective > objective)
      throw std::logic_error("projection objective increased");
    objective = new_objective;
  }
  throw std::logic_error("projection did not converge within the cycle budget");
}

// ---------------------------------------------------------------------------
// Away-step conditional gradient for a general bounded rule, over the hull
// weights, in high precision. The gradient of
//   f(u) = sum_i [ s(u_i, d_i) - s(u_i, u_i) ]
// is G'(d_i) - G'(u_i) with G'(x) = s(1,x) - s(0,x), by the envelope
// theorem, so only the two score curves are needed.
// ---------------------------------------------------------------------------

struct FwProjection {
  HighFloatVector point;
  std::vector<HighFloat> weights;
  HighFloat gap;
};

FwProjection conditional_gradient(const RealRule& rule, const RationalMatrix& v_rat,
                                  const std::vector<Rational>& target,
                                  const CorrectionOptions& options) {
  const Eigen::Index rows = v_rat.rows(), cols = v_rat.cols();
  HighFloatMatrix v(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) v(i, j) = to_highfloat(v_rat(i, j));

  std::vector<HighFloat> slope_at_target(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const HighFloat d = to_highfloat(target[static_cast<std::size_t>(i)]);
    slope_at_target[static_cast<std::size_t>(i)] = rule.score(1, d) - rule.score(0, d);
  }
  const auto gradient_at = [&](const HighFloatVector& u) {
    HighFloatVector g(rows);
    for (Eigen::Index i = 0; i < rows; ++i)
      g(i) = slope_at_target[static_cast<std::size_t>(i)] -
             (rule.score(1, u(i)) - rule.score(0, u(i)));
    return g;
  };

  std::vector<HighFloat> weights(static_cast<std::size_t>(cols), HighFloat(0));
  weights[0] = 1;
  HighFloatVector u = v.col(0);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const HighFloatVector g = gradient_at(u);

    Eigen::Index toward = 0, away = -1;
    HighFloat toward_score, away_score;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const HighFloat score = g.dot(v.col(j));
      if (j == 0 || score < toward_score) {
        toward_score = score;
        toward = j;
      }
      if (weights[static_cast<std::size_t>(j)] > 0 && (away < 0 || score > away_score)) {
        away_score = score;
        away = j;
      }
    }
    const HighFloat gap = g.dot(u) - toward_score;
    if (gap <= options.tolerance) return {std::move(u), std::move(weights), gap};

    HighFloatVector direction;
    HighFloat step_cap;
    bool away_step = false;
    const HighFloat toward_descent = toward_score - g.dot(u);
    const HighFloat away_descent = g.dot(u) - away_score;
    const HighFloat away_weight = weights[static_cast<std::size_t>(away)];
    if (away_descent < toward_descent && away_weight < 1) {
      direction = u - v.col(away);
      step_cap = away_weight / (HighFloat(1) - away_weight);
      away_step = true;
    } else {
      direction = v.col(toward) - u;
      step_cap = 1;
    }

    // exact-enough line search: bisect the monotone directional derivative
    const auto derivative = [&](const HighFloat& step) {
      return gradient_at(u + step * direction).dot(direction);
    };
    HighFloat step = step_cap;
    if (derivative(step_cap) > 0) {
      HighFloat lo = 0, hi = step_cap;
      for (int round = 0; round < 160; ++round) {
        const HighFloat mid = (lo + hi) / 2;
        (derivative(mid) <= 0 ? lo : hi) = mid;
      }
      step = lo;
    }
    if (away_step) {
      const HighFloat scale = HighFloat(1) + step;
      for (auto& w : weights) w *= scale;
      weights[static_cast<std::size_t>(away)] -= step;
      if (weights[static_cast<std::size_t>(away)] < 0)
        weights[static_cast<std::size_t>(away)] = 0;
    } else {
      const HighFloat keep = HighFloat(1) - step;
      for (auto& w : weights) w *= keep;
      weights[static_cast<std::size_t>(toward)] += step;
    }
    u = HighFloatVector::Zero(rows);
    for (Eigen::Index j = 0; j < cols; ++j)
      if (weights[static_cast<std::size_t>(j)] > 0)
        u += weights[static_cast<std::size_t>(j)] * v.col(j);
  }
  throw std::runtime_error("conditional gradient did not reach the requested tolerance");
}

// ---------------------------------------------------------------------------
// Weight reporting: lexicographically minimal basic solution of
// {w >= 0, [V;1] w = [point;1]} plus exact degeneracy detection.
// ---------------------------------------------------------------------------

FeasibilityProblem weight_system(const RationalMatrix& v, const std::vector<Rational>& point) {
  FeasibilityProblem problem;
  problem.lhs.resize(v.rows() + 1, v.cols());
  problem.lhs.topRows(v.rows()) = v;
  problem.lhs.row(v.rows()).setConstant(Rational(1));
  problem.rhs.resize(v.rows() + 1);
  for (Eigen::Index i = 0; i < v.rows(); ++i) problem.rhs(i) = point[static_cast<std::size_t>(i)];
  problem.rhs(v.rows()) = Rational(1);
  return problem;
}

struct WeightReport {
  std::vector<Rational> weights;
  bool degenerate = false;
};

WeightReport lex_min_weights(const RationalMatrix& v, const std::vector<Rational>& point) {
  const std::size_t n_cols = static_cast<std::size_t>(v.cols());
  FeasibilityProblem problem = weight_system(v, point);

  std::vector<bool> active(n_cols, true);
  std::vector<Rational> fixed(n_cols, Rational(0));
  RationalVector rhs = problem.rhs;

  const auto active_problem = [&](std::vector<std::size_t>& index_map) {
    index_map.clear();
    for (std::size_t j = 0; j < n_cols; ++j)
      if (active[j]) index_map.push_back(j);
    FeasibilityProblem sub;
    sub.lhs.resize(problem.lhs.rows(), static_cast<Eigen::Index>(index_map.size()));
    for (std::size_t k = 0; k < index_map.size(); ++k)
      sub.lhs.col(static_cast<Eigen::Index>(k)) =
          problem.lhs.col(static_cast<Eigen::Index>(index_map[k]));
    sub.rhs = rhs;
    return sub;
  };

  std::vector<std::size_t> index_map;
  FeasibilityProblem sub = active_problem(index_map);
  auto outcome = solve_feasibility(sub);
  const auto* feasible = std::get_if<FeasibleResult>(&outcome);
  if (!feasible) throw std::logic_error("corrected point fell outside its own hull");
  std::vector<Rational> current(n_cols, Rational(0));
  for (std::size_t k = 0; k < index_map.size(); ++k)
    current[index_map[k]] = feasible->solution(static_cast<Eigen::Index>(k));

  for (std::size_t j = 0; j < n_cols; ++j) {
    if (current[j] == 0) {
      // zero is feasible here, and no smaller value exists
      active[j] = false;
      continue;
    }
    sub = active_problem(index_map);
    RationalVector objective = RationalVector::Zero(static_cast<Eigen::Index>(index_map.size()));
    for (std::size_t k = 0; k < index_map.size(); ++k)
      if (index_map[k] == j) objective(static_cast<Eigen::Index>(k)) = 1;
    OptimizeResult best = optimize(sub, objective, Sense::Minimize);
    for (std::size_t k = 0; k < index_map.size(); ++k)
      current[index_map[k]] = best.solution(static_cast<Eigen::Index>(k));
    fixed[j] = best.value;
    active[j] = false;
    if (best.value != 0) rhs -= best.value * problem.lhs.col(static_cast<Eigen::Index>(j));
  }

  WeightReport report;
  report.weights = std::move(fixed);

  // Degenerate iff another weight vector realizes the same point: either the
  // support columns are linearly dependent, or some off-support column can
  // enter with compensation.
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < n_cols; ++j)
    if (report.weights[j] > 0) support.push_back(j);

  {  // rank of the support columns of [V;1]
    RationalMatrix cols(problem.lhs.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k)
      cols.col(static_cast<Eigen::Index>(k)) =
          problem.lhs.col(static_cast<Eigen::Index>(support[k]));
    Eigen::Index rank = 0;
    RationalMatrix work = cols;
    std::vector<bool> used(static_cast<std::size_t>(work.rows()), false);
    for (Eigen::Index c = 0; c < work.cols(); ++c) {
      Eigen::Index pivot = -1;
      for (Eigen::Index r = 0; r < work.rows(); ++r)
        if (!used[static_cast<std::size_t>(r)] && work(r, c) != 0) {
          pivot = r;
          break;
        }
      if (pivot < 0) continue;
      used[static_cast<std::size_t>(pivot)] = true;
      ++rank;
      for (Eigen::Index r = 0; r < work.rows(); ++r) {
        if (r == pivot || work(r, c) == 0) continue;
        const Rational factor = work(r, c) / work(pivot, c);
        work.row(r) -= factor * work.row(pivot);
      }
    }
    if (rank < static_cast<Eigen::Index>(support.size())) {
      report.degenerate = true;
      return report;
    }
  }

  if (support.size() < n_cols) {
    // maximize total off-support growth of a direction z with [V;1] z = 0;
    // variables: z+ for every column, z- for support columns, one slack.
    const std::size_t rows = static_cast<std::size_t>(problem.lhs.rows());
    const std::size_t vars = n_cols + support.size() + 1;
    FeasibilityProblem direction;
    direction.lhs = RationalMatrix::Zero(static_cast<Eigen::Index>(rows + 1),
                                         static_cast<Eigen::Index>(vars));
    direction.rhs = RationalVector::Zero(static_cast<Eigen::Index>(rows + 1));
    for (std::size_t j = 0; j < n_cols; ++j)
      direction.lhs.col(static_cast<Eigen::Index>(j)).head(static_cast<Eigen::Index>(rows)) =
          problem.lhs.col(static_cast<Eigen::Index>(j));
    for (std::size_t k = 0; k < support.size(); ++k)
      direction.lhs.col(static_cast<Eigen::Index>(n_cols + k))
          .head(static_cast<Eigen::Index>(rows)) =
          -problem.lhs.col(static_cast<Eigen::Index>(support[k]));
    for (std::size_t c = 0; c < vars; ++c)
      direction.lhs(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(c)) = 1;
    direction.rhs(static_cast<Eigen::Index>(rows)) = 1;

    RationalVector objective = RationalVector::Zero(static_cast<Eigen::Index>(vars));
    for (std::size_t j = 0; j < n_cols; ++j)
      if (report.weights[j] == 0) objective(static_cast<Eigen::Index>(j)) = 1;
    if (optimize(direction, objective, Sense::Maximize).value > 0) report.degenerate = true;
  }
  return report;
}

// ---------------------------------------------------------------------------

struct HullOutcome {
  std::vector<Rational> corrected;
  std::variant<Rational, HighFloat> divergence;
  bool exact = true;
  bool coherent = false;
};

bool rule_is_brier(const AnyRule& rule) {
  const auto* exact_rule = std::get_if<ExactRule>(&rule);
  return exact_rule && exact_rule->name == "brier";
}

const std::string& rule_name(const AnyRule& rule) {
  if (const auto* exact_rule = std::get_if<ExactRule>(&rule)) return exact_rule->name;
  return std::get<RealRule>(rule).name;
}

void require_bounded(const AnyRule& rule) {
  const bool bounded = std::visit([](const auto& r) { return r.bounded; }, rule);
  if (!bounded)
    throw std::invalid_argument("correction requires a bounded proper scoring rule; '" +
                                rule_name(rule) + "' is unbounded");
  if (!std::holds_alternative<RealRule>(rule) && !rule_is_brier(rule))
    throw std::invalid_argument(
        "exact corrections are implemented for the Brier rule; register '" +
        rule_name(rule) + "' as a high-precision rule instead");
}

HighFloat divergence_real(const RealRule& rule, std::span<const Rational> u,
                          std::span<const Rational> d) {
  return bregman_divergence(rule, u, d);
}

// Projection of the assessment vector onto the hull of the given vertex
// columns, dispatching between the exact and the iterative path.
HullOutcome project_hull(const Assessment& assessment, const RationalMatrix& vertices,
                         const AnyRule& rule, const CorrectionOptions& options) {
  HullOutcome out;
  const std::vector<Rational>& d = assessment.values;

  FeasibilityProblem membership = weight_system(vertices, d);
  if (std::holds_alternative<FeasibleResult>(solve_feasibility(membership))) {
    out.corrected = d;
    out.divergence = Rational(0);
    out.exact = true;
    out.coherent = true;
    return out;
  }

  DedupVertices dedup = dedup_columns(vertices);
  if (rule_is_brier(rule)) {
    RationalVector target(static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) target(static_cast<Eigen::Index>(i)) = d[i];
    HullProjection projection =
        wolfe_nearest_point(dedup.matrix, target, options.max_iterations);
    out.corrected.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      out.corrected[i] = projection.point(static_cast<Eigen::Index>(i));
    const RationalVector diff = projection.point - target;
    out.divergence = diff.dot(diff);
    out.exact = true;
    return out;
  }

  const RealRule& real_rule = std::get<RealRule>(rule);
  FwProjection fw = conditional_gradient(real_rule, dedup.matrix, d, options);
  // Snap the weights to a decimal lattice well below the stopping tolerance
  // and renormalize exactly: the reported point then lies in the hull
  // exactly, at distance O(tolerance) from the true projection, with
  // denominators a reader can take in.
  const Rational lattice(1000000000000LL);
  std::vector<Rational> snapped(fw.weights.size(), Rational(0));
  Rational total(0);
  for (std::size_t k = 0; k < fw.weights.size(); ++k) {
    if (fw.weights[k] <= 0) continue;
    Rational scaled = to_rational(fw.weights[k]) * lattice;
    Rational rounded(numerator(scaled) / denominator(scaled));
    if (rounded == 0) continue;
    snapped[k] = rounded / lattice;
    total += snapped[k];
  }
  if (total == 0) throw std::logic_error("conditional gradient produced an empty weight set");
  RationalVector point = RationalVector::Zero(static_cast<Eigen::Index>(d.size()));
  for (std::size_t k = 0; k < snapped.size(); ++k) {
    if (snapped[k] == 0) continue;
    snapped[k] /= total;
    point += snapped[k] * dedup.matrix.col(static_cast<Eigen::Index>(k));
  }
  out.corrected.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    out.corrected[i] = point(static_cast<Eigen::Index>(i));
  out.divergence = divergence_real(real_rule, out.corrected, d);
  out.exact = false;
  return out;
}

// d_s(e^j, x) + d_s(x, d) <= d_s(e^j, d) for every vertex column e^j.
void assert_pythagorean(const Assessment& assessment, const RationalMatrix& vertices,
                        const AnyRule& rule, const HullOutcome& outcome,
                        const CorrectionOptions& options) {
  const std::vector<Rational>& d = assessment.values;
  std::vector<Rational> vertex(d.size());
  for (Eigen::Index j = 0; j < vertices.cols(); ++j) {
    for (std::size_t i = 0; i < d.size(); ++i)
      vertex[i] = vertices(static_cast<Eigen::Index>(i), j);
    if (outcome.exact) {
      const ExactRule brier = brier_rule();
      const Rational left = bregman_divergence(brier, vertex, outcome.corrected) +
                            std::get<Rational>(outcome.divergence);
      const Rational right = bregman_divergence(brier, vertex, d);
      if (left > right)
        throw std::logic_error("projection violates the Pythagorean inequality");
    } else {
      const RealRule& real_rule = std::get<RealRule>(rule);
      const HighFloat left = bregman_divergence(real_rule, vertex, outcome.corrected) +
                             std::get<HighFloat>(outcome.divergence);
      const HighFloat right = bregman_divergence(real_rule, vertex, d);
      if (left > right + 10 * options.tolerance)
        throw std::logic_error("projection violates the Pythagorean inequality");
    }
  }
}

CorrectionResult assemble(const Assessment& assessment, std::span<const AtomMask> columns,
                          const RationalMatrix& vertices, const AnyRule& rule,
                          HullOutcome outcome, const CorrectionOptions& options, Kind mode) {
  assert_pythagorean(assessment, vertices, rule, outcome, options);
  WeightReport weights = lex_min_weights(vertices, outcome.corrected);

  CorrectionResult result;
  result.mode = mode;
  result.rule_name = rule_name(rule);
  result.exact = outcome.exact;
  result.corrected = std::move(outcome.corrected);
  result.divergence = std::move(outcome.divergence);
  result.weight_degenerate = weights.degenerate;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (weights.weights[j] > 0) result.hull_weights[columns[j]] += weights.weights[j];
  return result;
}

std::vector<AtomMask> atom_columns(const AtomSet& atoms) {
  std::vector<AtomMask> columns;
  columns.reserve(atoms.count());
  for (std::size_t i = 0; i < atoms.count(); ++i) columns.push_back(AtomMask{1} << i);
  return columns;
}

}  // namespace

HullPoint nearest_hull_point(const RationalMatrix& vertices,
                             const std::vector<Rational>& target) {
  if (static_cast<std::size_t>(vertices.rows()) != target.size())
    throw std::invalid_argument("target length does not match vertex dimension");
  RationalVector t(static_cast<Eigen::Index>(target.size()));
  for (std::size_t i = 0; i < target.size(); ++i) t(static_cast<Eigen::Index>(i)) = target[i];
  DedupVertices dedup = dedup_columns(vertices);
  HullProjection projection = wolfe_nearest_point(dedup.matrix, t, 100000);
  HullPoint out;
  out.point.resize(target.size());
  for (std::size_t i = 0; i < target.size(); ++i)
    out.point[i] = projection.point(static_cast<Eigen::Index>(i));
  out.weights.assign(static_cast<std::size_t>(vertices.cols()), Rational(0));
  for (std::size_t k = 0; k < dedup.representative.size(); ++k)
    out.weights[dedup.representative[k]] = projection.weights[k];
  return out;
}

CorrectionResult correct_belief(const Assessment& assessment, const AnyRule& rule,
                                const CorrectionOptions& options) {
  require_bounded(rule);
  auto atoms = assessment_atoms(assessment);
  const std::vector<AtomMask> columns =
      enumerate_nonempty_events(*atoms, options.limits.atom_limit);
  const RationalMatrix vertices = vertex_matrix(assessment, *atoms, columns);
  HullOutcome outcome = project_hull(assessment, vertices, rule, options);
  return assemble(assessment, columns, vertices, rule, std::move(outcome), options,
                  Kind::Belief);
}

CorrectionResult correct_probability(const Assessment& assessment, const AnyRule& rule,
                                     const CorrectionOptions& options) {
  require_bounded(rule);
  auto atoms = assessment_atoms(assessment);
  const std::vector<AtomMask> columns = atom_columns(*atoms);
  const RationalMatrix vertices = vertex_matrix(assessment, *atoms, columns);
  HullOutcome outcome = project_hull(assessment, vertices, rule, options);
  return assemble(assessment, columns, vertices, rule, std::move(outcome), options,
                  Kind::Probability);
}

CorrectionResult correct_necessity(const Assessment& assessment, const AnyRule& rule,
                                   const CorrectionOptions& options) {
  require_bounded(rule);
  auto atoms = assessment_atoms(assessment);

  struct Candidate {
    Chain chain;
    RationalMatrix vertices;
    HullOutcome outcome;
  };
  std::optional<Candidate> best;

  ChainEnumerator chains(*atoms, options.limits.chain_limit);
  while (auto chain = chains.next()) {
    RationalMatrix vertices = vertex_matrix(assessment, *atoms, chain->elements);
    HullOutcome outcome = project_hull(assessment, vertices, rule, options);
    const bool better = [&]() {
      if (!best) return true;
      if (best->outcome.coherent) return false;  // an earlier feasible chain already won
      if (outcome.coherent) return true;
      // both chains miss the point: strictly smaller divergence wins, ties
      // keep the earlier permutation
      if (outcome.exact && best->outcome.exact)
        return std::get<Rational>(outcome.divergence) <
               std::get<Rational>(best->outcome.divergence);
      return std::get<HighFloat>(outcome.divergence) <
             std::get<HighFloat>(best->outcome.divergence);
    }();
    if (better) best = Candidate{std::move(*chain), std::move(vertices), std::move(outcome)};
    if (best->outcome.coherent) break;  // identity projection, first chain wins
  }
  if (!best) throw std::logic_error("chain enumeration produced no candidates");

  CorrectionResult result = assemble(assessment, best->chain.elements, best->vertices, rule,
                                     std::move(best->outcome), options, Kind::Necessity);
  result.chain = std::move(best->chain);
  return result;
}

CorrectionResult correct(const Assessment& assessment, const AnyRule& rule,
                         const CorrectionOptions& options) {
  switch (assessment.kind) {
    case Kind::Belief: return correct_belief(assessment, rule, options);
    case Kind::Probability: return correct_probability(assessment, rule, options);
    case Kind::Necessity: return correct_necessity(assessment, rule, options);
  }
  throw std::logic_error("unknown assessment kind");
}

}  // namespace coherent
