#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "pingtsvm/dataset.hpp"
#include "pingtsvm/kernel.hpp"
#include "pingtsvm/qp.hpp"

namespace pingtsvm {

class ModelIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a surface's QP fails to certify; the message names the
/// surface so grid searches can report which half of the training broke.
class TrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Asymmetric pinball loss on the margin residual s:
///   loss = (1 - tau) * s   for s >= 0   (margin violation)
///   loss = -tau * s        for s <  0   (overshoot past the margin)
/// equivalently max((1 - tau) * s, -tau * s). tau must lie in [0, 1]; tau 0
/// recovers the hinge loss, tau 1 keeps only the overshoot branch.
double pinball_loss(double s, double tau);

/// Which of the two nonparallel surfaces is meant. Positive is the surface
/// fitted to class +1 (class -1 pushed to f <= -1); Negative mirrors it.
enum class Surface { Positive, Negative };

struct PinGtsvmParams {
  double c1 = 1.0;    // penalty on class -1 residuals around surface 1
  double c2 = 1.0;    // penalty on class +1 residuals around surface 2
  double tau1 = 0.5;
  double tau2 = 0.5;
  KernelSpec kernel;
  /// Tikhonov term on the (u, b) block, scaled at assembly time by the mean
  /// diagonal of the fit Hessian so it tracks the problem's magnitude.
  double ridge = 1e-8;
};

void validate(const PinGtsvmParams& params);

/// Two kernel-expansion surfaces f_k(x) = K(x, D) u_k + b_k over the joint
/// support matrix D (class +1 rows first, then class -1 rows, both in
/// training order). `normX` caches sqrt(u' K(D,D) u + 1e-12) for the
/// normalised point-to-surface distances used at prediction time.
struct PinGtsvmModel {
  Eigen::MatrixXd support;  // m x d
  Eigen::VectorXd u1, u2;   // m kernel coefficients each
  double b1 = 0.0, b2 = 0.0;
  double norm1 = 1.0, norm2 = 1.0;
  PinGtsvmParams params;
  std::string positive_token = "+1";
  std::string negative_token = "-1";
  std::optional<Standardizer> scaler;  // applied to inputs when present

  Eigen::Index dim() const { return support.cols(); }
};

/// Builds the epigraph QP for one surface. Variables are v = (u, b, xi)
/// with one slack per opposite-class row; each slack carries the two
/// inequalities xi >= (1 - tau) r and xi >= -tau r that make xi equal the
/// pinball loss of its residual at the optimum. The quadratic block over
/// (u, b) is M'M + ridge_eff I where M = [K(own class, D) | 1].
QpProblem assemble_primal(Surface surface, const FeatureDataset& ds,
                          const PinGtsvmParams& params);

/// The effective Tikhonov weight assemble_primal puts on the (u, b) block:
/// params.ridge times the mean diagonal of M'M.
double effective_ridge(Surface surface, const FeatureDataset& ds,
                       const PinGtsvmParams& params);

/// Solves both surface QPs. Pure function of its arguments; training twice
/// yields bitwise-identical models. Throws TrainError when a QP does not
/// certify, naming the surface.
PinGtsvmModel train(const FeatureDataset& ds, const PinGtsvmParams& params,
                    const QpSettings& qp = {});

struct DecisionValues {
  double f1 = 0.0, f2 = 0.0;  // raw surface responses
  double d1 = 0.0, d2 = 0.0;  // |f_k| / norm_k
};

DecisionValues decision_values(const PinGtsvmModel& model,
                               const Eigen::VectorXd& x);

/// Nearest-surface rule: +1 iff d1 <= d2 (ties go to +1).
int predict(const PinGtsvmModel& model, const Eigen::VectorXd& x);
Eigen::VectorXi predict(const PinGtsvmModel& model, const Eigen::MatrixXd& X);

/// Value of the trained surface's unconstrained objective
///   0.5 |M (u; b)|^2 + ridge_eff/2 |(u; b)|^2 + c * sum pinball(r_i)
/// recomputed from the model coefficients and the training set. Matches the
/// QP objective at the trained point up to the solver's convergence slack.
double empirical_objective(const PinGtsvmModel& model, Surface surface,
                           const FeatureDataset& ds,
                           const PinGtsvmParams& params);

/// Plain-text model format, versioned ("pingtsvm/1"), with lossless float
/// encoding and a trailing whole-payload checksum. load(save(m)) predicts
/// bitwise-identically to m.
void save_model(const PinGtsvmModel& model, const std::string& path);
PinGtsvmModel load_model(const std::string& path);

}  // namespace pingtsvm
