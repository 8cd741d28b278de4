#pragma once

#include <optional>

#include <Eigen/Core>

namespace pingtsvm {

/// Binary confusion counts with respect to a chosen positive label.
struct ConfusionMatrix {
  long long tp = 0;
  long long fp = 0;
  long long tn = 0;
  long long fn = 0;

  long long total() const { return tp + fp + tn + fn; }
};

/// Tallies prediction against truth. Both vectors hold +1/-1, must be equal
/// nonzero length; `positive` selects which of the two labels counts as the
/// positive class (+1 by default).
ConfusionMatrix confusion(const Eigen::VectorXi& truth,
                          const Eigen::VectorXi& predicted, int positive = 1);

/// Classification metrics. Every defined value is a single division of
/// exact integer counts (F1 as 2 TP / (2 TP + FP + FN)), so equal rationals
/// compare equal as doubles; a zero denominator leaves the field empty.
struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> specificity;
};

MetricsReport report(const ConfusionMatrix& cm);

}  // namespace pingtsvm
