#include "sdr/lp.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sdr::lp {

void LpProblem::validate() const {
  if (a.rows() != rhs.size() || a.cols() != c.size()) {
    throw ShapeError("inconsistent LP dimensions: A is " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + ", c has " + std::to_string(c.size()) +
                     ", rhs has " + std::to_string(rhs.size()));
  }
  if (!c.allFinite() || !a.allFinite() || !rhs.allFinite()) {
    throw ShapeError("LP data contains non-finite entries");
  }
}

namespace {

// Dense tableau state for the two-phase method. Columns are laid out as
// [structural | surplus | artificial]; rows carry the equality system with
// nonnegative right-hand sides.
class Simplex {
 public:
  Simplex(const LpProblem& p, const SolverOptions& opt) : prob_(p), opt_(opt) {
    n_ = p.numVars();
    m_ = p.numConstraints();
    maxIters_ = opt.maxIters > 0 ? opt.maxIters : static_cast<int>(50 * (n_ + m_));
    build();
  }

  LpSolution run() {
    if (numArtificial_ > 0) {
      phase1();
      if (infeasible_) {
        LpSolution s;
        s.status = LpStatus::infeasible;
        s.x = Eigen::VectorXd::Zero(n_);
        s.iterations = iterations_;
        return s;
      }
    }
    return phase2();
  }

 private:
  void build() {
    // Normalize row signs so every right-hand side is nonnegative. A row
    // a.x >= b with b < 0 becomes -a.x + s = -b (slack coefficient +1 and a
    // ready-made basis column); otherwise a.x - s = b needs either a unit
    // structural column or an artificial.
    Eigen::MatrixXd eq(m_, n_ + m_);
    Eigen::VectorXd beq(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = prob_.rhs(i) < 0.0 ? -1.0 : 1.0;
      eq.row(i).head(n_) = sign * prob_.a.row(i);
      eq.row(i).segment(n_, m_).setZero();
      eq(i, n_ + i) = -sign;
      beq(i) = sign * prob_.rhs(i);
    }

    basis_.assign(static_cast<std::size_t>(m_), -1);
    std::vector<Eigen::Index> rowOfUnitCol(static_cast<std::size_t>(n_ + m_), -1);
    for (Eigen::Index j = 0; j < n_ + m_; ++j) {
      Eigen::Index row = -1;
      bool unit = true;
      for (Eigen::Index i = 0; i < m_ && unit; ++i) {
        const double v = eq(i, j);
        if (v == 0.0) continue;
        if (row != -1 || std::abs(v - 1.0) > 0.0) {
          unit = false;
        } else {
          row = i;
        }
      }
      if (unit && row != -1) rowOfUnitCol[static_cast<std::size_t>(j)] = row;
    }
    std::vector<bool> rowCovered(static_cast<std::size_t>(m_), false);
    for (Eigen::Index j = 0; j < n_ + m_; ++j) {
      const Eigen::Index row = rowOfUnitCol[static_cast<std::size_t>(j)];
      if (row >= 0 && !rowCovered[static_cast<std::size_t>(row)]) {
        rowCovered[static_cast<std::size_t>(row)] = true;
        basis_[static_cast<std::size_t>(row)] = j;
      }
    }
    numArtificial_ = 0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!rowCovered[static_cast<std::size_t>(i)]) ++numArtificial_;
    }

    total_ = n_ + m_ + numArtificial_;
    tab_.resize(m_, total_ + 1);
    tab_.leftCols(n_ + m_) = eq;
    tab_.middleCols(n_ + m_, numArtificial_).setZero();
    tab_.col(total_) = beq;
    Eigen::Index nextArt = n_ + m_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!rowCovered[static_cast<std::size_t>(i)]) {
        tab_(i, nextArt) = 1.0;
        basis_[static_cast<std::size_t>(i)] = nextArt;
        ++nextArt;
      }
    }

    rowActive_.assign(static_cast<std::size_t>(m_), true);
    excluded_.assign(static_cast<std::size_t>(total_), false);

    cost_.setZero(total_);
    cost_.head(n_) = prob_.c;
    costRow_ = buildReducedCosts(cost_);
  }

  // Reduced cost row (size total_+1, last entry = -objective) for cost c.
  Eigen::RowVectorXd buildReducedCosts(const Eigen::VectorXd& c) const {
    Eigen::RowVectorXd row(total_ + 1);
    row.head(total_) = c.transpose();
    row(total_) = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = c(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) row -= cb * tab_.row(i);
    }
    return row;
  }

  void pivot(Eigen::Index r, Eigen::Index s, Eigen::RowVectorXd& activeCostRow, Eigen::RowVectorXd* otherCostRow) {
    const double piv = tab_(r, s);
    tab_.row(r) /= piv;
    const Eigen::RowVectorXd prow = tab_.row(r);
    Eigen::VectorXd factor = tab_.col(s);
    factor(r) = 0.0;
    tab_.noalias() -= factor * prow;
    tab_.col(s).setZero();
    tab_(r, s) = 1.0;
    if (activeCostRow(s) != 0.0) activeCostRow -= activeCostRow(s) * prow;
    if (otherCostRow && (*otherCostRow)(s) != 0.0) *otherCostRow -= (*otherCostRow)(s) * prow;
    basis_[static_cast<std::size_t>(r)] = s;
  }

  // Returns the entering column, or -1 at optimality.
  Eigen::Index chooseEntering(const Eigen::RowVectorXd& costRow, bool bland) const {
    Eigen::Index best = -1;
    double bestVal = -opt_.pivotTol;
    for (Eigen::Index j = 0; j < total_; ++j) {
      if (excluded_[static_cast<std::size_t>(j)]) continue;
      const double rc = costRow(j);
      if (rc < bestVal) {
        if (bland) return j;
        bestVal = rc;
        best = j;
      } else if (bland && rc < -opt_.pivotTol) {
        return j;
      }
    }
    return best;
  }

  // Ratio test; returns the leaving row or -1 when the column is unbounded.
  Eigen::Index chooseLeaving(Eigen::Index s) const {
    Eigen::Index row = -1;
    double bestRatio = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!rowActive_[static_cast<std::size_t>(i)]) continue;
      const double a = tab_(i, s);
      if (a <= opt_.pivotTol) continue;
      const double ratio = tab_(i, total_) / a;
      if (row == -1 || ratio < bestRatio - 1e-12 ||
          (ratio <= bestRatio + 1e-12 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(row)])) {
        row = i;
        bestRatio = ratio;
      }
    }
    return row;
  }

  // Minimizes costRow until optimal/unbounded/iteration cap. Returns -1 on
  // optimality, otherwise the unbounded entering column.
  Eigen::Index iterate(Eigen::RowVectorXd& costRow, Eigen::RowVectorXd* otherCostRow) {
    bool bland = opt_.rule == PivotRule::blandOnly;
    int stall = 0;
    while (true) {
      const Eigen::Index s = chooseEntering(costRow, bland);
      if (s < 0) return -1;
      const Eigen::Index r = chooseLeaving(s);
      if (r < 0) return s;
      if (++iterations_ > maxIters_) {
        throw LpIterationError("simplex iteration cap (" + std::to_string(maxIters_) + ") exceeded",
                               extractPrimal(), prob_.c.dot(extractPrimal()), iterations_);
      }
      const bool degenerate = tab_(r, total_) <= 1e-12;
      const Eigen::Index leaving = basis_[static_cast<std::size_t>(r)];
      pivot(r, s, costRow, otherCostRow);
      if (leaving >= n_ + m_) excluded_[static_cast<std::size_t>(leaving)] = true;
      if (opt_.rule == PivotRule::dantzigThenBland) {
        if (degenerate) {
          if (++stall >= opt_.stallLimit) bland = true;
        } else {
          stall = 0;
          bland = false;
        }
      }
    }
  }

  void phase1() {
    Eigen::VectorXd phaseCost = Eigen::VectorXd::Zero(total_);
    phaseCost.tail(numArtificial_).setOnes();
    Eigen::RowVectorXd phaseRow = buildReducedCosts(phaseCost);
    const Eigen::Index unb = iterate(phaseRow, &costRow_);
    // A phase-1 problem is bounded below by zero, so unb < 0 always holds;
    // keep the check as a numerics guard.
    if (unb >= 0) throw Error("phase 1 reported an unbounded direction");
    const double artSum = -phaseRow(total_);
    if (artSum > opt_.feasTol) {
      infeasible_ = true;
      return;
    }
    // Drive remaining artificials out of the basis; rows where no pivot
    // exists are linearly dependent and get deactivated.
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_ + m_) continue;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n_ + m_; ++j) {
        if (!excluded_[static_cast<std::size_t>(j)] && std::abs(tab_(i, j)) > opt_.pivotTol) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) {
        pivot(i, enter, costRow_, nullptr);
      } else {
        rowActive_[static_cast<std::size_t>(i)] = false;
      }
    }
    for (Eigen::Index j = n_ + m_; j < total_; ++j) excluded_[static_cast<std::size_t>(j)] = true;
  }

  LpSolution phase2() {
    const Eigen::Index unb = iterate(costRow_, nullptr);
    LpSolution sol;
    sol.iterations = iterations_;
    sol.x = extractPrimal();
    if (unb >= 0) {
      sol.status = LpStatus::unbounded;
      sol.objective = prob_.c.dot(sol.x);
      sol.ray = extractRay(unb);
      return sol;
    }
    sol.status = LpStatus::optimal;
    sol.objective = prob_.c.dot(sol.x);
    verify(sol);
    return sol;
  }

  Eigen::VectorXd extractPrimal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) x(j) = tab_(i, total_);
    }
    return x;
  }

  Eigen::VectorXd extractRay(Eigen::Index s) const {
    Eigen::VectorXd ray = Eigen::VectorXd::Zero(n_);
    if (s < n_) ray(s) = 1.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!rowActive_[static_cast<std::size_t>(i)]) continue;
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) ray(j) = -tab_(i, s);
    }
    // Components are >= -pivotTol by the unboundedness test; clamp roundoff.
    return ray.cwiseMax(0.0);
  }

  void verify(const LpSolution& sol) const {
    if ((sol.x.array() < -1e-9).any()) {
      throw Error("simplex produced a solution with negative components");
    }
    const Eigen::VectorXd resid = prob_.a * sol.x - prob_.rhs;
    if ((resid.array() < -opt_.feasTol).any()) {
      throw Error("simplex produced an infeasible solution (worst residual " +
                  std::to_string(resid.minCoeff()) + ")");
    }
  }

  const LpProblem& prob_;
  SolverOptions opt_;
  Eigen::Index n_ = 0, m_ = 0, total_ = 0, numArtificial_ = 0;
  int maxIters_ = 0;
  int iterations_ = 0;
  Eigen::MatrixXd tab_;
  Eigen::VectorXd cost_;
  Eigen::RowVectorXd costRow_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> rowActive_;
  std::vector<bool> excluded_;
  bool infeasible_ = false;
};

}  // namespace

LpSolution solveLp(const LpProblem& problem, const SolverOptions& options) {
  problem.validate();
  if (problem.numConstraints() == 0) {
    // No rows: x = 0 is optimal unless some cost is negative.
    LpSolution sol;
    sol.x = Eigen::VectorXd::Zero(problem.numVars());
    for (Eigen::Index j = 0; j < problem.numVars(); ++j) {
      if (problem.c(j) < -options.pivotTol) {
        sol.status = LpStatus::unbounded;
        sol.ray = Eigen::VectorXd::Zero(problem.numVars());
        sol.ray(j) = 1.0;
        return sol;
      }
    }
    sol.status = LpStatus::optimal;
    return sol;
  }
  Simplex simplex(problem, options);
  return simplex.run();
}

Eigen::VectorXd VariableMap::reconstruct(const Eigen::Ref<const Eigen::VectorXd>& canonical) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    double v = canonical(e.col);
    if (e.negCol >= 0) v -= canonical(e.negCol);
    x(static_cast<Eigen::Index>(k)) = v + e.shift;
  }
  return x;
}

std::pair<LpProblem, VariableMap> canonicalize(const RawLp& raw) {
  const Eigen::Index n = raw.c.size();
  if (raw.a.cols() != n || static_cast<Eigen::Index>(raw.lower.size()) != n || raw.a.rows() != raw.rhs.size()) {
    throw ShapeError("inconsistent RawLp dimensions");
  }
  VariableMap map;
  map.entries.resize(static_cast<std::size_t>(n));
  Eigen::Index cols = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    auto& e = map.entries[static_cast<std::size_t>(j)];
    e.col = cols++;
    if (raw.lower[static_cast<std::size_t>(j)] == RawLp::kFree) {
      e.negCol = cols++;
    } else {
      e.shift = raw.lower[static_cast<std::size_t>(j)];
    }
  }

  LpProblem p;
  p.c.setZero(cols);
  p.a.setZero(raw.a.rows(), cols);
  p.rhs = raw.rhs;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& e = map.entries[static_cast<std::size_t>(j)];
    p.c(e.col) = raw.c(j);
    p.a.col(e.col) = raw.a.col(j);
    if (e.negCol >= 0) {
      p.c(e.negCol) = -raw.c(j);
      p.a.col(e.negCol) = -raw.a.col(j);
    }
    if (e.shift != 0.0) {
      p.rhs -= raw.a.col(j) * e.shift;
      map.objectiveOffset += raw.c(j) * e.shift;
    }
  }
  return {std::move(p), std::move(map)};
}

void dumpProblem(const LpProblem& problem, std::ostream& os) {
  char buf[32];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "lp " << problem.numConstraints() << " " << problem.numVars() << "\n";
  os << "min";
  for (Eigen::Index j = 0; j < problem.numVars(); ++j) os << " " << fmt(problem.c(j));
  os << "\n";
  for (Eigen::Index i = 0; i < problem.numConstraints(); ++i) {
    os << "row";
    for (Eigen::Index j = 0; j < problem.numVars(); ++j) os << " " << fmt(problem.a(i, j));
    os << " >= " << fmt(problem.rhs(i)) << "\n";
  }
}

}  // namespace sdr::lp
