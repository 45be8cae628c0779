#include "coherent/exact_lp.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace coherent {

namespace {

constexpr std::size_t kNoVariable = std::numeric_limits<std::size_t>::max();

// Two-phase primal simplex with an explicit exact basis inverse and Bland's
// anti-cycling rule. Structural variables are 0..cols-1, the artificial for
// row i is cols+i. Artificials never re-enter once they leave the basis.
class Simplex {
 public:
  explicit Simplex(const FeasibilityProblem& problem)
      : rows_(problem.rows()), cols_(problem.cols()), lhs_(problem.lhs), rhs_(problem.rhs) {
    if (static_cast<std::size_t>(problem.rhs.size()) != rows_)
      throw std::invalid_argument("right-hand side length does not match row count");
    flipped_.assign(rows_, false);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (rhs_(static_cast<Eigen::Index>(i)) < 0) {
        lhs_.row(static_cast<Eigen::Index>(i)) *= Rational(-1);
        rhs_(static_cast<Eigen::Index>(i)) *= Rational(-1);
        flipped_[i] = true;
      }
    }
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) basis_[i] = cols_ + i;
    structural_basic_.assign(cols_, false);
    binv_ = RationalMatrix::Identity(static_cast<Eigen::Index>(rows_),
                                     static_cast<Eigen::Index>(rows_));
    basic_values_ = rhs_;
  }

  // Returns true when a feasible basis was reached; otherwise farkas() holds
  // a certificate for the original (unflipped) problem.
  bool run_phase_one() {
    while (true) {
      const RowVector<Rational> duals = phase_one_duals();
      std::size_t entering = kNoVariable;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (is_basic(j)) continue;
        // reduced cost of a zero-cost structural column: -duals * A_j
        if (duals.dot(lhs_.col(static_cast<Eigen::Index>(j))) > 0) {
          entering = j;
          break;
        }
      }
      if (entering == kNoVariable) {
        Rational objective = 0;
        for (std::size_t i = 0; i < rows_; ++i)
          if (basis_[i] >= cols_) objective += basic_values_(static_cast<Eigen::Index>(i));
        if (objective == 0) return true;
        farkas_.resize(static_cast<Eigen::Index>(rows_));
        for (std::size_t i = 0; i < rows_; ++i)
          farkas_(static_cast<Eigen::Index>(i)) =
              flipped_[i] ? Rational(-duals(static_cast<Eigen::Index>(i)))
                          : duals(static_cast<Eigen::Index>(i));
        return false;
      }
      pivot_in(entering);
    }
  }

  const RationalVector& farkas() const { return farkas_; }

  RationalVector structural_solution() const {
    RationalVector x = RationalVector::Zero(static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] < cols_)
        x(static_cast<Eigen::Index>(basis_[i])) = basic_values_(static_cast<Eigen::Index>(i));
    return x;
  }

  // Pivots artificials out of the basis; rows whose artificial cannot be
  // replaced are linearly dependent and get removed.
  void eliminate_artificials() {
    std::vector<std::size_t> redundant;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) continue;
      std::size_t replacement = kNoVariable;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (is_basic(j)) continue;
        if (binv_.row(static_cast<Eigen::Index>(i))
                .dot(lhs_.col(static_cast<Eigen::Index>(j))) != 0) {
          replacement = j;
          break;
        }
      }
      if (replacement == kNoVariable) {
        redundant.push_back(i);
      } else {
        RationalVector direction = binv_ * lhs_.col(static_cast<Eigen::Index>(replacement));
        apply_pivot(i, replacement, direction);
      }
    }
    if (!redundant.empty()) drop_rows(redundant);
  }

  // Minimizes objective over the current feasible basis. Requires all basic
  // variables structural (run eliminate_artificials first).
  void run_phase_two(const RationalVector& objective) {
    while (true) {
      RowVector<Rational> duals = RowVector<Rational>::Zero(static_cast<Eigen::Index>(rows_));
      for (std::size_t i = 0; i < rows_; ++i)
        duals += objective(static_cast<Eigen::Index>(basis_[i])) *
                 binv_.row(static_cast<Eigen::Index>(i));
      std::size_t entering = kNoVariable;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (is_basic(j)) continue;
        if (objective(static_cast<Eigen::Index>(j)) -
                duals.dot(lhs_.col(static_cast<Eigen::Index>(j))) < 0) {
          entering = j;
          break;
        }
      }
      if (entering == kNoVariable) return;
      pivot_in(entering);
    }
  }

 private:
  bool is_basic(std::size_t variable) const { return structural_basic_[variable]; }

  RowVector<Rational> phase_one_duals() const {
    RowVector<Rational> duals = RowVector<Rational>::Zero(static_cast<Eigen::Index>(rows_));
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] >= cols_) duals += binv_.row(static_cast<Eigen::Index>(i));
    return duals;
  }

  void pivot_in(std::size_t entering) {
    const RationalVector direction = binv_ * lhs_.col(static_cast<Eigen::Index>(entering));
    std::size_t leaving_row = kNoVariable;
    Rational best_ratio = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const Rational& d = direction(static_cast<Eigen::Index>(i));
      if (d <= 0) continue;
      Rational ratio = basic_values_(static_cast<Eigen::Index>(i)) / d;
      if (leaving_row == kNoVariable || ratio < best_ratio ||
          (ratio == best_ratio && basis_[i] < basis_[leaving_row])) {
        leaving_row = i;
        best_ratio = ratio;
      }
    }
    if (leaving_row == kNoVariable)
      throw std::runtime_error("objective unbounded over the feasible set");
    apply_pivot(leaving_row, entering, direction);
  }

  void apply_pivot(std::size_t row, std::size_t entering, const RationalVector& direction) {
    const Rational pivot = direction(static_cast<Eigen::Index>(row));
    binv_.row(static_cast<Eigen::Index>(row)) /= pivot;
    basic_values_(static_cast<Eigen::Index>(row)) /= pivot;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const Rational& factor = direction(static_cast<Eigen::Index>(i));
      if (factor == 0) continue;
      binv_.row(static_cast<Eigen::Index>(i)) -=
          factor * binv_.row(static_cast<Eigen::Index>(row));
      basic_values_(static_cast<Eigen::Index>(i)) -=
          factor * basic_values_(static_cast<Eigen::Index>(row));
    }
    if (basis_[row] < cols_) structural_basic_[basis_[row]] = false;
    basis_[row] = entering;
    structural_basic_[entering] = true;
  }

  void drop_rows(const std::vector<std::size_t>& redundant) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < rows_; ++i)
      if (std::find(redundant.begin(), redundant.end(), i) == redundant.end())
        keep.push_back(i);

    const std::size_t new_rows = keep.size();
    RationalMatrix lhs(new_rows, cols_);
    RationalVector rhs(new_rows);
    std::vector<std::size_t> basis(new_rows);
    for (std::size_t i = 0; i < new_rows; ++i) {
      lhs.row(static_cast<Eigen::Index>(i)) = lhs_.row(static_cast<Eigen::Index>(keep[i]));
      rhs(static_cast<Eigen::Index>(i)) = rhs_(static_cast<Eigen::Index>(keep[i]));
      basis[i] = basis_[keep[i]];
    }
    lhs_ = std::move(lhs);
    rhs_ = std::move(rhs);
    basis_ = std::move(basis);
    rows_ = new_rows;
    flipped_.assign(rows_, false);  // flips already applied to lhs_/rhs_

    // Basis columns over the kept rows stay invertible; rebuild the inverse.
    RationalMatrix basis_matrix(new_rows, new_rows);
    for (std::size_t k = 0; k < new_rows; ++k)
      basis_matrix.col(static_cast<Eigen::Index>(k)) =
          lhs_.col(static_cast<Eigen::Index>(basis_[k]));
    binv_ = invert(basis_matrix);
    basic_values_ = binv_ * rhs_;
  }

  static RationalMatrix invert(const RationalMatrix& matrix) {
    const Eigen::Index n = matrix.rows();
    RationalMatrix work = matrix;
    RationalMatrix inverse = RationalMatrix::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
      Eigen::Index pivot_row = -1;
      for (Eigen::Index i = col; i < n; ++i)
        if (work(i, col) != 0) {
          pivot_row = i;
          break;
        }
      if (pivot_row < 0) throw std::logic_error("basis matrix is singular");
      work.row(col).swap(work.row(pivot_row));
      inverse.row(col).swap(inverse.row(pivot_row));
      const Rational pivot = work(col, col);
      work.row(col) /= pivot;
      inverse.row(col) /= pivot;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i == col || work(i, col) == 0) continue;
        const Rational factor = work(i, col);
        work.row(i) -= factor * work.row(col);
        inverse.row(i) -= factor * inverse.row(col);
      }
    }
    return inverse;
  }

  std::size_t rows_;
  std::size_t cols_;
  RationalMatrix lhs_;
  RationalVector rhs_;
  std::vector<bool> flipped_;
  std::vector<char> structural_basic_;
  std::vector<std::size_t> basis_;
  RationalMatrix binv_;
  RationalVector basic_values_;
  RationalVector farkas_;
};

}  // namespace

FeasibilityOutcome solve_feasibility(const FeasibilityProblem& problem) {
  Simplex simplex(problem);
  FeasibilityOutcome outcome = simplex.run_phase_one()
                                   ? FeasibilityOutcome(FeasibleResult{simplex.structural_solution()})
                                   : FeasibilityOutcome(InfeasibleResult{simplex.farkas()});
  verify_certificate(problem, outcome);
  return outcome;
}

OptimizeResult optimize(const FeasibilityProblem& problem, const RationalVector& objective,
                        Sense sense) {
  if (static_cast<std::size_t>(objective.size()) != problem.cols())
    throw std::invalid_argument("objective length does not match column count");
  Simplex simplex(problem);
  if (!simplex.run_phase_one())
    throw std::runtime_error("cannot optimize over an infeasible system");
  simplex.eliminate_artificials();
  RationalVector costs = objective;
  if (sense == Sense::Maximize) costs *= Rational(-1);
  simplex.run_phase_two(costs);
  RationalVector solution = simplex.structural_solution();
  verify_certificate(problem, FeasibilityOutcome(FeasibleResult{solution}));
  return OptimizeResult{objective.dot(solution), std::move(solution)};
}

void verify_certificate(const FeasibilityProblem& problem, const FeasibilityOutcome& outcome) {
  if (const auto* feasible = std::get_if<FeasibleResult>(&outcome)) {
    const RationalVector& x = feasible->solution;
    if (static_cast<std::size_t>(x.size()) != problem.cols())
      throw std::logic_error("witness length does not match column count");
    for (Eigen::Index j = 0; j < x.size(); ++j)
      if (x(j) < 0) throw std::logic_error("witness has a negative component");
    RationalVector residual = problem.lhs * x - problem.rhs;
    for (Eigen::Index i = 0; i < residual.size(); ++i)
      if (residual(i) != 0) throw std::logic_error("witness residual is non-zero");
    return;
  }
  const auto& farkas = std::get<InfeasibleResult>(outcome).farkas;
  if (static_cast<std::size_t>(farkas.size()) != problem.rows())
    throw std::logic_error("Farkas vector length does not match row count");
  for (Eigen::Index j = 0; j < problem.lhs.cols(); ++j)
    if (farkas.dot(problem.lhs.col(j)) > 0)
      throw std::logic_error("Farkas vector fails y*A <= 0");
  if (farkas.dot(problem.rhs) <= 0) throw std::logic_error("Farkas vector fails y*b > 0");
}

}  // namespace coherent
