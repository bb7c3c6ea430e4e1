#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "sdr/errors.hpp"

namespace sdr::lp {

/// Linear program in the solver's canonical form:
///   minimize c.x  subject to  A x >= rhs,  x >= 0.
/// Free variables and shifted lower bounds are eliminated by canonicalize()
/// before this type is built; conversion to equality form with surplus
/// variables happens inside the solver.
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a;
  Eigen::VectorXd rhs;

  Eigen::Index numVars() const { return c.size(); }
  Eigen::Index numConstraints() const { return rhs.size(); }
  void validate() const;
};

enum class LpStatus { optimal, unbounded, infeasible };

struct LpSolution {
  Eigen::VectorXd x;        ///< primal point (basic feasible optimum when optimal)
  double objective = 0.0;
  LpStatus status = LpStatus::optimal;
  int iterations = 0;
  Eigen::VectorXd ray;      ///< certificate direction when unbounded: c.ray < 0, A ray >= 0, ray >= 0
};

enum class PivotRule {
  dantzigThenBland,  ///< most negative reduced cost, Bland after a degenerate stall
  blandOnly,
};

struct SolverOptions {
  double pivotTol = 1e-9;  ///< reduced-cost / pivot-element threshold
  double feasTol = 1e-7;   ///< final feasibility verification
  int maxIters = 0;        ///< 0 = 50 * (vars + constraints)
  PivotRule rule = PivotRule::dantzigThenBland;
  int stallLimit = 20;     ///< degenerate pivots tolerated before switching to Bland
};

/// Thrown when the iteration cap is exceeded; carries the best feasible
/// point reached so far.
struct LpIterationError : Error {
  LpIterationError(const std::string& msg, Eigen::VectorXd best, double bestObjective, int iters)
      : Error(msg), best(std::move(best)), bestObjective(bestObjective), iterations(iters) {}
  Eigen::VectorXd best;
  double bestObjective;
  int iterations;
};

/// Two-phase dense primal simplex.
LpSolution solveLp(const LpProblem& problem, const SolverOptions& options = {});

/// Inequality system over variables with general lower bounds:
///   minimize c.x  subject to  A x >= rhs,  x_j >= lower_j
/// where lower_j = -inf marks a free variable.
struct RawLp {
  Eigen::VectorXd c;
  Eigen::MatrixXd a;
  Eigen::VectorXd rhs;
  std::vector<double> lower;  ///< one entry per variable; -inf = free

  static constexpr double kFree = -std::numeric_limits<double>::infinity();
};

/// Mapping from canonical back to original coordinates. Shifted variables
/// record their offset; free variables record the positive/negative column
/// pair.
struct VariableMap {
  struct Entry {
    Eigen::Index col = -1;
    Eigen::Index negCol = -1;  ///< valid only for split free variables
    double shift = 0.0;
  };
  std::vector<Entry> entries;
  double objectiveOffset = 0.0;  ///< constant picked up by the shifts

  Eigen::VectorXd reconstruct(const Eigen::Ref<const Eigen::VectorXd>& canonical) const;
};

/// Rewrites a RawLp over nonnegative variables: x_j = z_j + lower_j for
/// finite bounds, x_j = p_j - n_j for free variables.
std::pair<LpProblem, VariableMap> canonicalize(const RawLp& raw);

/// Plain-text dump (one constraint per line) for external cross-checking;
/// format documented in the README.
void dumpProblem(const LpProblem& problem, std::ostream& os);

}  // namespace sdr::lp
