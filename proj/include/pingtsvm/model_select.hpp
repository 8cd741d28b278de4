#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pingtsvm/dataset.hpp"
#include "pingtsvm/pin_gtsvm.hpp"

namespace pingtsvm {

/// Hyperparameter grid. Defaults follow the usual twin-SVM sweep: penalties
/// over powers of two 2^-5..2^5, Gaussian widths over 2^-10..2^10, tau over
/// {0.5, 0.8, 1}. With tie_c (the default) one c value drives both
/// surfaces; untying crosses c1 with c2. tau1 and tau2 are always tied.
struct GridSpec {
  KernelKind kernel = KernelKind::Linear;
  std::vector<double> c_values;
  std::vector<double> sigma_values;  // ignored for the linear kernel
  std::vector<double> tau_values;
  bool tie_c = true;
  double ridge = 1e-8;

  static GridSpec defaults(KernelKind kernel);
};

/// Enumerates the concrete parameter tuples of a grid, in grid order
/// (c outermost, then sigma, then tau).
std::vector<PinGtsvmParams> enumerate_grid(const GridSpec& grid);

struct CvResult {
  PinGtsvmParams params;
  std::vector<double> fold_accuracies;  // NaN for folds that failed
  double mean_accuracy = 0.0;           // NaN when any fold failed
  double std_accuracy = 0.0;            // population deviation over folds
  double wall_seconds = 0.0;
  bool failed = false;
  std::string failure_reason;
  int grid_index = 0;
};

/// Stratified k-fold cross-validation accuracy of one parameter tuple.
/// Folds are drawn once from (labels, k, seed), so every tuple evaluated
/// with the same arguments sees identical folds. A fold whose training
/// throws is recorded as failed instead of aborting the sweep.
CvResult cross_validate(const FeatureDataset& ds, const PinGtsvmParams& params,
                        int k, std::uint64_t seed);

/// Evaluates every tuple of the grid and returns results ranked by mean
/// accuracy, ties broken by smaller c1 + c2, then smaller sigma, then grid
/// order; failed tuples sort last. The ranking is a deterministic total
/// order, so reruns reproduce the table exactly.
std::vector<CvResult> grid_search(const FeatureDataset& ds, const GridSpec& grid,
                                  int k, std::uint64_t seed);

}  // namespace pingtsvm
