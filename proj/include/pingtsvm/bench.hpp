#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pingtsvm/dataset.hpp"
#include "pingtsvm/model_select.hpp"
#include "pingtsvm/table.hpp"

namespace pingtsvm {

enum class BenchScenario { TauSweep, KernelCompare, NoiseResilience };

BenchScenario bench_scenario_from_name(const std::string& name);
const char* bench_scenario_name(BenchScenario scenario);

/// Where a scenario's data comes from: a named generator (fresh draw per
/// seed) or CSV files (fixed data; per-seed variation then comes from the
/// split and noise seeds). With `train_csv` alone the file is re-split per
/// seed; adding `test_csv` pins the split.
struct BenchData {
  std::string generator = "crossplanes";  // blobs | crossplanes | moons
  int n_per_class = 60;
  int dim = 2;              // blobs only
  double separation = 6.0;  // blobs only
  double noise = 0.08;      // generator jitter width
  std::string train_csv;
  std::string test_csv;
};

struct BenchSpec {
  BenchScenario scenario = BenchScenario::TauSweep;
  BenchData data;
  std::vector<std::uint64_t> seeds;  // defaults to 1..20
  double test_fraction = 0.3;

  /// tau-sweep: label-noise rate applied to the training side.
  double label_noise_rate = 0.1;
  /// tau-sweep: the sweep values; noise-resilience compares tau 0 vs 0.5.
  std::vector<double> taus{0.0, 0.5, 0.8, 1.0};
  /// noise-resilience: training-label corruption rates.
  std::vector<double> noise_rates{0.0, 0.05, 0.1, 0.2};

  /// Search grid used to fix (c, sigma) before sweeping (and, for
  /// kernel-compare, the per-kernel search space).
  KernelKind kernel = KernelKind::Gaussian;
  std::vector<double> c_grid{0.1, 1.0, 10.0};
  std::vector<double> sigma_grid{0.25, 0.5, 1.0};
  int folds = 5;
};

/// Scenario defaults: tau-sweep and noise-resilience run on noisy
/// crossplanes with a Gaussian kernel (the geometry the sweep is about),
/// kernel-compare on two-moons where the kernels genuinely differ.
BenchSpec default_bench_spec(BenchScenario scenario);

/// Trains at every tau in spec.taus with (c, sigma) fixed by a preliminary
/// grid search at tau 0.5, one fresh dataset + split per seed, label noise
/// applied to the training side only. Rows: tau, mean/std of the held-out
/// accuracy over seeds, seed and failure counts.
Table run_tau_sweep(const BenchSpec& spec);

/// Grid-searches each kernel on the first seed's training split and reports
/// the winning tuple's cross-validation and held-out accuracy per kernel.
Table run_kernel_compare(const BenchSpec& spec);

/// Sweeps training-label corruption rates against tau in {0, 0.5} with
/// fixed (c, sigma); reports per-cell means/stds plus, on each tau 0.5 row,
/// the paired mean difference against tau 0 and a win/tie/loss sign summary
/// over seeds. Rate-0 rows are exactly the clean-training results.
Table run_noise_resilience(const BenchSpec& spec);

Table run_scenario(const BenchSpec& spec);

}  // namespace pingtsvm
