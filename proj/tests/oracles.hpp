#pragma once

// Independent reference implementations the tests check the library
// against. Nothing in here reuses the library's assembly or accounting
// code paths: kernels are evaluated from their formulas, objectives are
// summed term by term, and small QPs are minimised by exhaustive
// active-set search. Agreement between the two routes is what the tests
// assert.

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "pingtsvm/dataset.hpp"
#include "pingtsvm/pin_gtsvm.hpp"
#include "pingtsvm/qp.hpp"

namespace oracle {

/// KKT residuals of a candidate primal-dual pair, recomputed from the raw
/// problem data (the solver's own residual fields are not trusted here).
struct KktResiduals {
  double primal = 0.0;           // max(0, max_i (G x - h)_i)
  double stationarity = 0.0;     // |P x + q + G' lambda|_inf
  double complementarity = 0.0;  // max_i |lambda_i (G x - h)_i|
  double min_multiplier = 0.0;   // most negative lambda entry (>= 0 is clean)
};

KktResiduals kkt_residuals(const pingtsvm::QpProblem& qp,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lambda);

/// True when the pair certifies optimality at the given tolerances with
/// nonnegative multipliers.
bool kkt_clean(const KktResiduals& r, double tol_feas = 1e-8,
               double tol_stat = 1e-6, double tol_comp = 1e-6);

/// Global minimum of a strictly convex inequality QP by brute force: every
/// subset of constraints is treated as active, the equality-constrained
/// system is solved exactly, and candidates are kept when primal feasible
/// with nonnegative multipliers. Requires at most ~16 constraints.
double enumerate_qp_optimum(const pingtsvm::QpProblem& qp);

/// Random strictly convex QP with a guaranteed strictly feasible point
/// (h = G x0 + s0 with s0 > 0), for solver stress tests.
pingtsvm::QpProblem make_random_qp(int n, int m, std::mt19937_64& rng);

/// Pinball objective of one surface evaluated from raw coefficients:
///   0.5 |K(own, D) u + b|^2 + 0.5 ridge_eff (|u|^2 + b^2)
///     + c * sum_i pinball(r_i)
/// with every kernel value, residual and loss computed from scratch.
double pin_objective(const pingtsvm::FeatureDataset& ds,
                     pingtsvm::Surface surface, const Eigen::VectorXd& u,
                     double b, const pingtsvm::PinGtsvmParams& params);

/// Minimum of the linear-kernel surface objective over the weight-space
/// grid w in [-3, 3]^2, b in [-3, 3], step 0.05. A grid point (w, b)
/// stands for the minimum-norm coefficients u with D'u = w (squared norm
/// w' (D'D)^{-1} w), so every grid point is attainable by an actual
/// coefficient vector and a correctly trained objective must come out at
/// or below this minimum, up to solver slack. Two-dimensional data only.
double grid_primal_minimum(const pingtsvm::FeatureDataset& ds,
                           pingtsvm::Surface surface,
                           const pingtsvm::PinGtsvmParams& params);

/// Classical linear twin SVM (hinge loss) built from scratch in weight
/// space: per surface, minimise
///   0.5 |A w + b|^2 + 0.5 ridge_eff (|w|^2 + b^2) + c sum xi
///   s.t. -(B w + b) >= 1 - xi, xi >= 0
/// (classes swapped for the second surface). Each solve is KKT-checked.
struct TwsvmModel {
  Eigen::VectorXd w1, w2;
  double b1 = 0.0, b2 = 0.0;
  double norm1 = 1.0, norm2 = 1.0;
};

TwsvmModel twsvm_train(const pingtsvm::FeatureDataset& ds, double c1,
                       double c2, double ridge);

Eigen::VectorXi twsvm_predict(const TwsvmModel& model,
                              const Eigen::MatrixXd& X);

}  // namespace oracle
