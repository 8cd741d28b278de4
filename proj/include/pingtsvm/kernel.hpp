#pragma once

#include <Eigen/Core>

namespace pingtsvm {

enum class KernelKind { Linear, Gaussian };

/// Kernel description shared by training, prediction and model files.
///
/// For the Gaussian kernel, `sigma` is the width in
///   k(x, y) = exp(-|x - y|^2 / (2 sigma^2)).
/// Tools that prefer the inverse convention mu = 1 / (2 sigma^2) convert at
/// the flag-parsing boundary; the library always stores the width.
struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  double sigma = 1.0;
};

/// Throws std::invalid_argument unless the settings are usable (Gaussian
/// requires a finite, strictly positive sigma).
void validate(const KernelSpec& spec);

const char* kernel_name(KernelKind kind);

/// Parses "linear" / "gaussian"; throws std::invalid_argument otherwise.
KernelKind kernel_kind_from_name(const std::string& name);

/// Single kernel evaluation. Vectors must have equal, nonzero length and
/// finite entries.
double kernel_value(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const KernelSpec& spec);

/// Dense kernel matrix between the rows of X (n x d) and Y (p x d):
/// gram(X, Y)(i, j) = k(X.row(i), Y.row(j)).
///
/// Entries are accumulated in the same order as kernel_value, so the two
/// agree bitwise and gram(X, Y) equals gram(Y, X) transposed exactly.
Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                     const KernelSpec& spec);

}  // namespace pingtsvm
