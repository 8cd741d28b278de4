#include "pingtsvm/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pingtsvm {

namespace {

// Both kernel_value and gram funnel through these helpers so that looped and
// matrix evaluations are the same floating-point operation sequence.
inline double dot_rows(const Eigen::MatrixXd& X, Eigen::Index i,
                       const Eigen::MatrixXd& Y, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < X.cols(); ++k) acc += X(i, k) * Y(j, k);
  return acc;
}

inline double sqdist_rows(const Eigen::MatrixXd& X, Eigen::Index i,
                          const Eigen::MatrixXd& Y, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < X.cols(); ++k) {
    const double diff = X(i, k) - Y(j, k);
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

void validate(const KernelSpec& spec) {
  if (spec.kind == KernelKind::Gaussian) {
    if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma))
      throw std::invalid_argument("gaussian kernel requires sigma > 0, got " +
                                  std::to_string(spec.sigma));
  }
}

const char* kernel_name(KernelKind kind) {
  return kind == KernelKind::Linear ? "linear" : "gaussian";
}

KernelKind kernel_kind_from_name(const std::string& name) {
  if (name == "linear") return KernelKind::Linear;
  if (name == "gaussian") return KernelKind::Gaussian;
  throw std::invalid_argument("unknown kernel '" + name +
                              "' (expected linear or gaussian)");
}

double kernel_value(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const KernelSpec& spec) {
  validate(spec);
  if (x.size() == 0 || x.size() != y.size())
    throw std::invalid_argument("kernel_value: vectors must share a nonzero length");
  if (!x.allFinite() || !y.allFinite())
    throw std::invalid_argument("kernel_value: non-finite input");
  const Eigen::MatrixXd xr = x.transpose();
  const Eigen::MatrixXd yr = y.transpose();
  if (spec.kind == KernelKind::Linear) return dot_rows(xr, 0, yr, 0);
  return std::exp(-sqdist_rows(xr, 0, yr, 0) / (2.0 * spec.sigma * spec.sigma));
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                     const KernelSpec& spec) {
  validate(spec);
  if (X.cols() == 0 || X.cols() != Y.cols())
    throw std::invalid_argument("gram: matrices must share a nonzero column count");
  if (!X.allFinite() || !Y.allFinite())
    throw std::invalid_argument("gram: non-finite input");
  Eigen::MatrixXd K(X.rows(), Y.rows());
  if (spec.kind == KernelKind::Linear) {
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      for (Eigen::Index j = 0; j < Y.rows(); ++j) K(i, j) = dot_rows(X, i, Y, j);
  } else {
    const double denom = 2.0 * spec.sigma * spec.sigma;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      for (Eigen::Index j = 0; j < Y.rows(); ++j)
        K(i, j) = std::exp(-sqdist_rows(X, i, Y, j) / denom);
  }
  return K;
}

}  // namespace pingtsvm
