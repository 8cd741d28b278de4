#include "pingtsvm/model_select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace pingtsvm {

namespace {

std::vector<double> pow2_range(int lo, int hi) {
  std::vector<double> out;
  for (int e = lo; e <= hi; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

double holdout_accuracy(const PinGtsvmModel& model, const FeatureDataset& ds) {
  const Eigen::VectorXi predicted = predict(model, ds.features);
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    if (predicted(i) == ds.labels(i)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ds.rows());
}

}  // namespace

GridSpec GridSpec::defaults(KernelKind kernel) {
  GridSpec g;
  g.kernel = kernel;
  g.c_values = pow2_range(-5, 5);
  g.sigma_values = pow2_range(-10, 10);
  g.tau_values = {0.5, 0.8, 1.0};
  return g;
}

std::vector<PinGtsvmParams> enumerate_grid(const GridSpec& grid) {
  if (grid.c_values.empty() || grid.tau_values.empty())
    throw std::invalid_argument("grid needs at least one c and one tau value");
  const bool gaussian = grid.kernel == KernelKind::Gaussian;
  if (gaussian && grid.sigma_values.empty())
    throw std::invalid_argument("gaussian grid needs at least one sigma value");
  const std::vector<double> sigmas = gaussian ? grid.sigma_values
                                              : std::vector<double>{1.0};

  std::vector<PinGtsvmParams> out;
  for (const double c1 : grid.c_values) {
    const std::vector<double> c2s =
        grid.tie_c ? std::vector<double>{c1} : grid.c_values;
    for (const double c2 : c2s) {
      for (const double sigma : sigmas) {
        for (const double tau : grid.tau_values) {
          PinGtsvmParams p;
          p.c1 = c1;
          p.c2 = c2;
          p.tau1 = tau;
          p.tau2 = tau;
          p.kernel.kind = grid.kernel;
          p.kernel.sigma = sigma;
          p.ridge = grid.ridge;
          validate(p);
          out.push_back(p);
        }
      }
    }
  }
  return out;
}

CvResult cross_validate(const FeatureDataset& ds, const PinGtsvmParams& params,
                        int k, std::uint64_t seed) {
  validate(params);
  const auto start = std::chrono::steady_clock::now();
  const auto folds = kfold_indices(ds.labels, k, seed);

  CvResult result;
  result.params = params;
  result.fold_accuracies.reserve(folds.size());
  for (const auto& fold : folds) {
    const FeatureDataset train_part = subset(ds, fold.train);
    const FeatureDataset val_part = subset(ds, fold.validation);
    try {
      const PinGtsvmModel model = train(train_part, params);
      result.fold_accuracies.push_back(holdout_accuracy(model, val_part));
    } catch (const std::exception& e) {
      result.fold_accuracies.push_back(std::numeric_limits<double>::quiet_NaN());
      result.failed = true;
      if (result.failure_reason.empty()) result.failure_reason = e.what();
    }
  }

  if (result.failed) {
    result.mean_accuracy = std::numeric_limits<double>::quiet_NaN();
    result.std_accuracy = std::numeric_limits<double>::quiet_NaN();
  } else {
    double sum = 0.0;
    for (const double a : result.fold_accuracies) sum += a;
    result.mean_accuracy = sum / static_cast<double>(result.fold_accuracies.size());
    double var = 0.0;
    for (const double a : result.fold_accuracies) {
      const double diff = a - result.mean_accuracy;
      var += diff * diff;
    }
    result.std_accuracy =
        std::sqrt(var / static_cast<double>(result.fold_accuracies.size()));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

std::vector<CvResult> grid_search(const FeatureDataset& ds, const GridSpec& grid,
                                  int k, std::uint64_t seed) {
  const auto tuples = enumerate_grid(grid);
  std::vector<CvResult> results;
  results.reserve(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    CvResult r = cross_validate(ds, tuples[i], k, seed);
    r.grid_index = static_cast<int>(i);
    results.push_back(std::move(r));
  }

  std::sort(results.begin(), results.end(),
            [](const CvResult& a, const CvResult& b) {
              if (a.failed != b.failed) return b.failed;
              if (!a.failed) {
                if (a.mean_accuracy != b.mean_accuracy)
                  return a.mean_accuracy > b.mean_accuracy;
                const double ca = a.params.c1 + a.params.c2;
                const double cb = b.params.c1 + b.params.c2;
                if (ca != cb) return ca < cb;
                if (a.params.kernel.sigma != b.params.kernel.sigma)
                  return a.params.kernel.sigma < b.params.kernel.sigma;
              }
              return a.grid_index < b.grid_index;
            });
  return results;
}

}  // namespace pingtsvm
