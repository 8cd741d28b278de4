#include "pingtsvm/metrics.hpp"

#include <stdexcept>

namespace pingtsvm {

namespace {

std::optional<double> ratio(long long num, long long den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix confusion(const Eigen::VectorXi& truth,
                          const Eigen::VectorXi& predicted, int positive) {
  if (truth.size() == 0 || truth.size() != predicted.size())
    throw std::invalid_argument("confusion: label vectors must share a nonzero length");
  if (positive != 1 && positive != -1)
    throw std::invalid_argument("confusion: positive must be +1 or -1");
  ConfusionMatrix cm;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (truth(i) != 1 && truth(i) != -1)
      throw std::invalid_argument("confusion: truth labels must be +1 or -1");
    if (predicted(i) != 1 && predicted(i) != -1)
      throw std::invalid_argument("confusion: predicted labels must be +1 or -1");
    const bool actual_pos = truth(i) == positive;
    const bool pred_pos = predicted(i) == positive;
    if (actual_pos && pred_pos) ++cm.tp;
    else if (!actual_pos && pred_pos) ++cm.fp;
    else if (!actual_pos && !pred_pos) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

MetricsReport report(const ConfusionMatrix& cm) {
  if (cm.tp < 0 || cm.fp < 0 || cm.tn < 0 || cm.fn < 0)
    throw std::invalid_argument("report: negative confusion counts");
  if (cm.total() == 0)
    throw std::invalid_argument("report: empty confusion matrix");
  MetricsReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  return r;
}

}  // namespace pingtsvm
