#pragma once

#include <Eigen/Core>

namespace pingtsvm {

/// Dense convex quadratic program in standard inequality form:
///
///   minimise    0.5 x' P x + q' x
///   subject to  G x <= h
///
/// P must be symmetric (within round-off) and positive semidefinite; the
/// solver does not verify semidefiniteness, it simply fails to certify
/// optimality when the assumption is violated. G may have zero rows, which
/// makes the problem unconstrained.
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
};

enum class QpStatus { Optimal, MaxIterations, Infeasible };

const char* qp_status_name(QpStatus status);

struct QpSettings {
  double tol_feas = 1e-8;   // max allowed violation of G x <= h
  double tol_stat = 1e-6;   // max allowed |P x + q + G' lambda| entry
  double tol_comp = 1e-6;   // max allowed |lambda_i (G x - h)_i|
  int max_iter = 200000;
  double ridge = 0.0;       // added to the P diagonal before solving
};

/// Solution report. `status == Optimal` is a certificate: the three residual
/// fields have been measured at (x, multipliers) and sit within the
/// corresponding tolerances. Any other status leaves the best iterate found
/// together with its residuals.
struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;      // one nonnegative entry per constraint
  double objective = 0.0;           // 0.5 x' P x + q' x at the returned x
  QpStatus status = QpStatus::MaxIterations;
  double primal_residual = 0.0;
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
  int iterations = 0;
};

/// Primal-dual interior-point solve (Mehrotra predictor-corrector on the
/// slack form G x + s = h, s >= 0). Fully deterministic: fixed starting
/// point derived from x = 0, no randomised pivoting, so equal inputs produce
/// bitwise-equal outputs.
///
/// Throws std::invalid_argument when the problem shapes are inconsistent,
/// entries are non-finite, or P is not symmetric within 1e-12 relative.
QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings = {});

}  // namespace pingtsvm
