// pingtsvm: command-line front end for the Pin-GTSVM toolkit.
//
// Subcommands: synth, train, predict, evaluate, gridsearch, bench.
// Global flags: --seed (default 42), --format {table, csv, jsonl}, --quiet.
// Exit codes: 0 success, 1 runtime or data failure, 2 usage error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "pingtsvm/bench.hpp"
#include "pingtsvm/dataset.hpp"
#include "pingtsvm/kernel.hpp"
#include "pingtsvm/metrics.hpp"
#include "pingtsvm/model_select.hpp"
#include "pingtsvm/pin_gtsvm.hpp"
#include "pingtsvm/table.hpp"

namespace {

using namespace pingtsvm;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOpts {
  std::uint64_t seed = 42;
  std::string format = "table";
  bool quiet = false;
};

struct SynthOpts {
  std::string generator;
  int n = 50;
  int dim = 2;
  double separation = 6.0;
  double noise = 0.1;
  double label_noise = 0.0;
  double feature_noise = 0.0;
  std::string out;
};

struct TrainOpts {
  std::string train_path;
  std::string kernel = "linear";
  double sigma = 1.0;
  std::string sigma_convention = "width";
  double c1 = 1.0;
  double c2 = -1.0;  // < 0 means "follow c1"
  double tau = 0.5;
  double ridge = 1e-8;
  std::string model_out;
  std::string positive_label;
  bool standardize = false;
  std::vector<std::string> label_overrides;
};

struct PredictOpts {
  std::string model_path;
  std::string data_path;
  std::string out;
  std::vector<std::string> label_overrides;
};

struct EvaluateOpts {
  std::string model_path;
  std::string data_path;
  std::string positive_label;
  std::vector<std::string> label_overrides;
};

struct GridSearchOpts {
  std::string train_path;
  std::string kernel = "linear";
  std::string sigma_convention = "width";
  int folds = 5;
  bool untie_c = false;
  std::vector<double> c_grid;
  std::vector<double> sigma_grid;
  std::vector<double> tau_grid;
  double ridge = 1e-8;
  std::string positive_label;
  std::vector<std::string> label_overrides;
};

struct BenchOpts {
  std::string scenario;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::string generator;
  int n = 0;
  int dim = 0;
  double separation = 0.0;
  double noise = -1.0;
  std::string train_csv;
  std::string test_csv;
  double test_fraction = -1.0;
  double label_noise = -1.0;
  std::vector<double> taus;
  std::vector<double> noise_rates;
  std::string kernel;
  std::string sigma_convention = "width";
  std::vector<double> c_grid;
  std::vector<double> sigma_grid;
  int folds = 0;
};

/// Writes rendered output to --out when given, otherwise to stdout.
void emit(const Table& table, const GlobalOpts& g, const std::string& out_path,
          const std::string& trailer = "") {
  const std::string body = render(table, output_format_from_name(g.format));
  if (out_path.empty()) {
    std::cout << body << trailer;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
  out << body << trailer;
  if (!out) throw std::runtime_error("failed writing output file '" + out_path + "'");
  if (!g.quiet && g.format == "table")
    std::cout << "wrote " << out_path << '\n';
}

/// Converts a flag-level Gaussian width to the internal one. Under the
/// "inverse" convention the flag value g means exp(-g |x - y|^2), so the
/// equivalent width is 1 / sqrt(2 g).
double sigma_from_flag(double value, const std::string& convention) {
  if (convention == "width") return value;
  if (value <= 0.0)
    throw UsageError("inverse-convention sigma values must be positive");
  return 1.0 / std::sqrt(2.0 * value);
}

std::vector<double> sigmas_from_flags(const std::vector<double>& values,
                                      const std::string& convention) {
  std::vector<double> widths;
  widths.reserve(values.size());
  for (const double v : values) widths.push_back(sigma_from_flag(v, convention));
  return widths;
}

/// Label-map defaults plus any --label TOKEN=+1 / TOKEN=-1 overrides.
LabelMap build_label_map(const std::vector<std::string>& overrides) {
  LabelMap map = LabelMap::defaults();
  for (const std::string& spec : overrides) {
    const auto eq = spec.rfind('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("--label expects TOKEN=+1 or TOKEN=-1, got '" + spec + "'");
    const std::string token = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    int label = 0;
    if (value == "+1" || value == "1") label = 1;
    else if (value == "-1") label = -1;
    else
      throw UsageError("--label value must be +1 or -1, got '" + value + "'");
    bool replaced = false;
    for (auto& entry : map.entries)
      if (entry.first == token) {
        entry.second = label;
        replaced = true;
      }
    if (!replaced) map.entries.emplace_back(token, label);
  }
  return map;
}

/// Extends a map with a model's stored vocabulary so prediction inputs
/// written with those tokens parse without extra flags.
LabelMap with_model_tokens(LabelMap map, const PinGtsvmModel& model) {
  for (const auto& [token, label] :
       {std::pair{model.positive_token, 1}, std::pair{model.negative_token, -1}})
    if (map.lookup(token) == 0) map.entries.emplace_back(token, label);
  return map;
}

KernelSpec build_kernel(const std::string& name, double sigma,
                        const std::string& convention) {
  KernelSpec spec;
  spec.kind = kernel_kind_from_name(name);
  if (spec.kind == KernelKind::Gaussian)
    spec.sigma = sigma_from_flag(sigma, convention);
  return spec;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

int run_synth(const SynthOpts& o, const GlobalOpts& g) {
  FeatureDataset ds = [&] {
    if (o.generator == "blobs")
      return make_blobs(o.n, o.dim, o.separation, o.noise, g.seed);
    if (o.generator == "crossplanes") return make_crossplanes(o.n, o.noise, g.seed);
    return make_two_moons(o.n, o.noise, g.seed);
  }();
  if (o.label_noise > 0.0) ds = inject_label_noise(ds, o.label_noise, g.seed + 1);
  if (o.feature_noise > 0.0)
    ds = inject_feature_noise(ds, o.feature_noise, g.seed + 2);
  save_csv(ds, o.out);
  if (!g.quiet && g.format == "table")
    std::cout << "wrote " << ds.rows() << " rows (" << ds.cols()
              << " features) to " << o.out << '\n';
  return kExitOk;
}

int run_train(const TrainOpts& o, const GlobalOpts& g) {
  PinGtsvmParams params;
  params.c1 = o.c1;
  params.c2 = o.c2 < 0.0 ? o.c1 : o.c2;
  params.tau1 = params.tau2 = o.tau;
  params.ridge = o.ridge;
  try {
    params.kernel = build_kernel(o.kernel, o.sigma, o.sigma_convention);
    validate(params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const LabelMap map = build_label_map(o.label_overrides);
  ObservedTokens observed;
  FeatureDataset ds = load_csv(o.train_path, map, &observed);

  std::string positive_token = observed.positive;
  std::string negative_token = observed.negative;
  if (!o.positive_label.empty()) {
    const int side = map.lookup(o.positive_label);
    if (side == 0)
      throw UsageError("--positive-label '" + o.positive_label +
                       "' is not in the label map");
    positive_token = o.positive_label;
    if (side < 0) {
      ds.labels = -ds.labels;
      negative_token = observed.positive;
    }
  }

  std::optional<Standardizer> scaler;
  if (o.standardize) {
    scaler = fit_standardizer(ds);
    ds = apply_standardizer(*scaler, ds);
  }

  const auto start = std::chrono::steady_clock::now();
  PinGtsvmModel model = train(ds, params);
  const double wall = elapsed_seconds(start);
  model.positive_token = positive_token;
  model.negative_token = negative_token;
  model.scaler = scaler;
  save_model(model, o.model_out);

  if (g.format == "table") {
    if (!g.quiet) {
      std::printf("trained on %lld rows (%lld features), kernel %s\n",
                  static_cast<long long>(ds.rows()),
                  static_cast<long long>(ds.cols()), kernel_name(params.kernel.kind));
      std::printf("training wall time: %.3f s\n", wall);
      std::cout << "model written to " << o.model_out << '\n';
    }
    return kExitOk;
  }
  Table table;
  table.columns = {"model", "rows", "features", "kernel",
                   "sigma", "c1",   "c2",       "tau",
                   "wall_seconds"};
  table.add_row({Cell{o.model_out}, Cell{static_cast<long long>(ds.rows())},
                 Cell{static_cast<long long>(ds.cols())},
                 Cell{std::string(kernel_name(params.kernel.kind))},
                 params.kernel.kind == KernelKind::Gaussian
                     ? Cell{params.kernel.sigma}
                     : Cell{std::monostate{}},
                 Cell{params.c1}, Cell{params.c2}, Cell{params.tau1}, Cell{wall}});
  if (!g.quiet) std::cout << render(table, output_format_from_name(g.format));
  return kExitOk;
}

int run_predict(const PredictOpts& o, const GlobalOpts& g) {
  const PinGtsvmModel model = load_model(o.model_path);
  const LabelMap map = with_model_tokens(build_label_map(o.label_overrides), model);
  const FeatureDataset ds = load_csv(o.data_path, map);
  if (ds.cols() != model.dim())
    throw std::runtime_error("data has " + std::to_string(ds.cols()) +
                             " features but the model expects " +
                             std::to_string(model.dim()));

  const Eigen::VectorXi labels = predict(model, ds.features);
  std::string body;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    body += labels(i) > 0 ? model.positive_token : model.negative_token;
    body += '\n';
  }
  if (o.out.empty()) {
    std::cout << body;
    return kExitOk;
  }
  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot open output file '" + o.out + "'");
  out << body;
  if (!out) throw std::runtime_error("failed writing output file '" + o.out + "'");
  if (!g.quiet && g.format == "table")
    std::cout << "wrote " << labels.size() << " predictions to " << o.out << '\n';
  return kExitOk;
}

int run_evaluate(const EvaluateOpts& o, const GlobalOpts& g) {
  const PinGtsvmModel model = load_model(o.model_path);
  const LabelMap map = with_model_tokens(build_label_map(o.label_overrides), model);
  const FeatureDataset ds = load_csv(o.data_path, map);
  if (ds.cols() != model.dim())
    throw std::runtime_error("data has " + std::to_string(ds.cols()) +
                             " features but the model expects " +
                             std::to_string(model.dim()));

  int positive = 1;
  if (!o.positive_label.empty()) {
    positive = map.lookup(o.positive_label);
    if (positive == 0)
      throw UsageError("--positive-label '" + o.positive_label +
                       "' is not in the label map");
  }

  const Eigen::VectorXi predicted = predict(model, ds.features);
  const ConfusionMatrix cm = confusion(ds.labels, predicted, positive);
  const MetricsReport rep = report(cm);

  const auto metric_cell = [](const std::optional<double>& v) {
    return v ? Cell{*v} : Cell{std::monostate{}};
  };
  Table table;
  table.columns = {"metric", "value"};
  table.add_row({Cell{std::string("tp")}, Cell{cm.tp}});
  table.add_row({Cell{std::string("fp")}, Cell{cm.fp}});
  table.add_row({Cell{std::string("tn")}, Cell{cm.tn}});
  table.add_row({Cell{std::string("fn")}, Cell{cm.fn}});
  table.add_row({Cell{std::string("accuracy")}, metric_cell(rep.accuracy)});
  table.add_row({Cell{std::string("precision")}, metric_cell(rep.precision)});
  table.add_row({Cell{std::string("recall")}, metric_cell(rep.recall)});
  table.add_row({Cell{std::string("f1")}, metric_cell(rep.f1)});
  table.add_row({Cell{std::string("specificity")}, metric_cell(rep.specificity)});
  emit(table, g, "");
  return kExitOk;
}

int run_gridsearch(const GridSearchOpts& o, const GlobalOpts& g) {
  GridSpec grid;
  try {
    grid = GridSpec::defaults(kernel_kind_from_name(o.kernel));
    if (!o.c_grid.empty()) grid.c_values = o.c_grid;
    if (!o.sigma_grid.empty())
      grid.sigma_values = sigmas_from_flags(o.sigma_grid, o.sigma_convention);
    if (!o.tau_grid.empty()) grid.tau_values = o.tau_grid;
    grid.tie_c = !o.untie_c;
    grid.ridge = o.ridge;
    for (const PinGtsvmParams& params : enumerate_grid(grid)) validate(params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const LabelMap map = build_label_map(o.label_overrides);
  FeatureDataset ds = load_csv(o.train_path, map);
  if (!o.positive_label.empty()) {
    const int side = map.lookup(o.positive_label);
    if (side == 0)
      throw UsageError("--positive-label '" + o.positive_label +
                       "' is not in the label map");
    if (side < 0) ds.labels = -ds.labels;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::vector<CvResult> ranked = grid_search(ds, grid, o.folds, g.seed);
  const double wall = elapsed_seconds(start);

  const bool gaussian = grid.kernel == KernelKind::Gaussian;
  Table table;
  table.columns = {"rank", "c1",  "c2",           "sigma",       "tau",
                   "mean_accuracy", "std_accuracy", "failed"};
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const CvResult& r = ranked[i];
    table.add_row({Cell{static_cast<long long>(i + 1)}, Cell{r.params.c1},
                   Cell{r.params.c2},
                   gaussian ? Cell{r.params.kernel.sigma} : Cell{std::monostate{}},
                   Cell{r.params.tau1},
                   r.failed ? Cell{std::monostate{}} : Cell{r.mean_accuracy},
                   r.failed ? Cell{std::monostate{}} : Cell{r.std_accuracy},
                   Cell{static_cast<long long>(r.failed ? 1 : 0)}});
  }

  const CvResult& best = ranked.front();
  std::string trailer;
  if (g.format == "jsonl") {
    trailer = "{\"record\":\"best\",\"kernel\":\"";
    trailer += kernel_name(grid.kernel);
    trailer += "\",\"c1\":" + format_double(best.params.c1);
    trailer += ",\"c2\":" + format_double(best.params.c2);
    trailer += ",\"sigma\":";
    trailer += gaussian ? format_double(best.params.kernel.sigma) : "null";
    trailer += ",\"tau\":" + format_double(best.params.tau1) + "}\n";
  } else {
    trailer = std::string("# best: kernel=") + kernel_name(grid.kernel);
    trailer += " c1=" + format_double(best.params.c1);
    trailer += " c2=" + format_double(best.params.c2);
    if (gaussian) trailer += " sigma=" + format_double(best.params.kernel.sigma);
    trailer += " tau=" + format_double(best.params.tau1) + "\n";
  }
  emit(table, g, "", trailer);
  if (!g.quiet && g.format == "table")
    std::fprintf(stderr, "grid search wall time: %.3f s\n", wall);
  return kExitOk;
}

int run_bench(const BenchOpts& o, const GlobalOpts& g) {
  BenchSpec spec;
  try {
    spec = default_bench_spec(bench_scenario_from_name(o.scenario));
    if (!o.seeds.empty()) spec.seeds = o.seeds;
    if (!o.generator.empty()) spec.data.generator = o.generator;
    if (o.n > 0) spec.data.n_per_class = o.n;
    if (o.dim > 0) spec.data.dim = o.dim;
    if (o.separation > 0.0) spec.data.separation = o.separation;
    if (o.noise >= 0.0) spec.data.noise = o.noise;
    spec.data.train_csv = o.train_csv;
    spec.data.test_csv = o.test_csv;
    if (o.test_fraction >= 0.0) spec.test_fraction = o.test_fraction;
    if (o.label_noise >= 0.0) spec.label_noise_rate = o.label_noise;
    if (!o.taus.empty()) spec.taus = o.taus;
    if (!o.noise_rates.empty()) spec.noise_rates = o.noise_rates;
    if (!o.kernel.empty()) spec.kernel = kernel_kind_from_name(o.kernel);
    if (!o.c_grid.empty()) spec.c_grid = o.c_grid;
    if (!o.sigma_grid.empty())
      spec.sigma_grid = sigmas_from_flags(o.sigma_grid, o.sigma_convention);
    if (o.folds > 0) spec.folds = o.folds;
    for (const double tau : spec.taus)
      if (!(tau >= 0.0 && tau <= 1.0))
        throw std::invalid_argument("--taus values must lie in [0, 1]");
    for (const double rate : spec.noise_rates)
      if (!(rate >= 0.0 && rate <= 1.0))
        throw std::invalid_argument("--noise-rates values must lie in [0, 1]");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const Table table = run_scenario(spec);
  emit(table, g, o.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pin-GTSVM: twin support vector machine with pinball loss"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Seed for every random choice")
      ->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "jsonl"}))
      ->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress informational output");

  SynthOpts synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic dataset CSV");
  synth_cmd->fallthrough();
  synth_cmd->add_option("generator", synth.generator, "blobs, crossplanes or moons")
      ->required()
      ->check(CLI::IsMember({"blobs", "crossplanes", "moons"}));
  synth_cmd->add_option("--n", synth.n, "Points per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--dim", synth.dim, "Dimensions (blobs only)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--separation", synth.separation, "Center gap (blobs only)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Gaussian jitter width")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd
      ->add_option("--label-noise", synth.label_noise,
                   "Fraction of labels to flip after generation")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth_cmd
      ->add_option("--feature-noise", synth.feature_noise,
                   "Feature perturbation scale after generation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Destination CSV path")->required();

  TrainOpts tr;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a Pin-GTSVM model");
  train_cmd->fallthrough();
  train_cmd->add_option("--train", tr.train_path, "Training dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--kernel", tr.kernel, "Kernel kind")
      ->check(CLI::IsMember({"linear", "gaussian"}))
      ->capture_default_str();
  train_cmd->add_option("--sigma", tr.sigma, "Gaussian kernel width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd
      ->add_option("--sigma-convention", tr.sigma_convention,
                   "Reading of sigma flags: width s in exp(-|x-y|^2 / (2 s^2)),"
                   " or inverse g in exp(-g |x-y|^2)")
      ->check(CLI::IsMember({"width", "inverse"}))
      ->capture_default_str();
  train_cmd->add_option("--c1", tr.c1, "Penalty for surface 1 residuals")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--c2", tr.c2, "Penalty for surface 2 (default: c1)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--tau", tr.tau, "Pinball asymmetry, both surfaces")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  train_cmd->add_option("--ridge", tr.ridge, "Tikhonov weight on (u, b)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--model-out", tr.model_out, "Model file destination")
      ->required();
  train_cmd->add_option("--positive-label", tr.positive_label,
                        "Label token treated as the positive class");
  train_cmd->add_flag("--standardize", tr.standardize,
                      "Standardize features; the transform is stored in the model");
  train_cmd->add_option("--label", tr.label_overrides,
                        "Extra label-map entry TOKEN=+1 or TOKEN=-1 (repeatable)");

  PredictOpts pr;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Predict labels with a trained model");
  predict_cmd->fallthrough();
  predict_cmd->add_option("--model", pr.model_path, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", pr.data_path, "Dataset CSV to label")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", pr.out, "Destination path (default stdout)");
  predict_cmd->add_option("--label", pr.label_overrides,
                          "Extra label-map entry TOKEN=+1 or TOKEN=-1 (repeatable)");

  EvaluateOpts ev;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Score a model on a labelled dataset");
  evaluate_cmd->fallthrough();
  evaluate_cmd->add_option("--model", ev.model_path, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--data", ev.data_path, "Labelled dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--positive-label", ev.positive_label,
                           "Label token scored as positive (default +1 class)");
  evaluate_cmd->add_option("--label", ev.label_overrides,
                           "Extra label-map entry TOKEN=+1 or TOKEN=-1 (repeatable)");

  GridSearchOpts gs;
  CLI::App* grid_cmd = app.add_subcommand(
      "gridsearch", "Cross-validated hyperparameter sweep");
  grid_cmd->fallthrough();
  grid_cmd->add_option("--train", gs.train_path, "Training dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  grid_cmd->add_option("--kernel", gs.kernel, "Kernel kind")
      ->check(CLI::IsMember({"linear", "gaussian"}))
      ->capture_default_str();
  grid_cmd
      ->add_option("--sigma-convention", gs.sigma_convention,
                   "Reading of --sigma-grid values (width or inverse)")
      ->check(CLI::IsMember({"width", "inverse"}))
      ->capture_default_str();
  grid_cmd->add_option("--folds", gs.folds, "Cross-validation folds")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  grid_cmd->add_flag("--untie-c", gs.untie_c, "Search c1 and c2 independently");
  grid_cmd->add_option("--c-grid", gs.c_grid, "Penalty values")->delimiter(',');
  grid_cmd->add_option("--sigma-grid", gs.sigma_grid, "Gaussian widths")
      ->delimiter(',');
  grid_cmd->add_option("--tau-grid", gs.tau_grid, "Pinball asymmetries")
      ->delimiter(',');
  grid_cmd->add_option("--ridge", gs.ridge, "Tikhonov weight on (u, b)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  grid_cmd->add_option("--positive-label", gs.positive_label,
                       "Label token treated as the positive class");
  grid_cmd->add_option("--label", gs.label_overrides,
                       "Extra label-map entry TOKEN=+1 or TOKEN=-1 (repeatable)");

  BenchOpts be;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run a scripted experiment");
  bench_cmd->fallthrough();
  bench_cmd
      ->add_option("--scenario", be.scenario,
                   "tau-sweep, kernel-compare or noise-resilience")
      ->required()
      ->check(CLI::IsMember({"tau-sweep", "kernel-compare", "noise-resilience"}));
  bench_cmd->add_option("--seeds", be.seeds, "Seed list override")->delimiter(',');
  bench_cmd->add_option("--out", be.out, "Write the table here instead of stdout");
  bench_cmd->add_option("--generator", be.generator, "Dataset generator override")
      ->check(CLI::IsMember({"blobs", "crossplanes", "moons"}));
  bench_cmd->add_option("--n", be.n, "Points per class")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dim", be.dim, "Dimensions (blobs only)")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--separation", be.separation, "Center gap (blobs only)")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--noise", be.noise, "Generator jitter width")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--train-csv", be.train_csv, "Use this CSV instead")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--test-csv", be.test_csv, "Companion test CSV")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--test-fraction", be.test_fraction, "Held-out fraction")
      ->check(CLI::Range(0.0, 1.0));
  bench_cmd
      ->add_option("--label-noise", be.label_noise,
                   "Training-label flip rate (tau-sweep)")
      ->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--taus", be.taus, "Sweep values (tau-sweep)")
      ->delimiter(',');
  bench_cmd->add_option("--noise-rates", be.noise_rates,
                        "Corruption rates (noise-resilience)")
      ->delimiter(',');
  bench_cmd->add_option("--kernel", be.kernel, "Kernel for the scenario grid")
      ->check(CLI::IsMember({"linear", "gaussian"}));
  bench_cmd
      ->add_option("--sigma-convention", be.sigma_convention,
                   "Reading of --sigma-grid values (width or inverse)")
      ->check(CLI::IsMember({"width", "inverse"}))
      ->capture_default_str();
  bench_cmd->add_option("--c-grid", be.c_grid, "Penalty values")->delimiter(',');
  bench_cmd->add_option("--sigma-grid", be.sigma_grid, "Gaussian widths")
      ->delimiter(',');
  bench_cmd->add_option("--folds", be.folds, "Cross-validation folds")
      ->check(CLI::Range(2, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth, g);
    if (train_cmd->parsed()) return run_train(tr, g);
    if (predict_cmd->parsed()) return run_predict(pr, g);
    if (evaluate_cmd->parsed()) return run_evaluate(ev, g);
    if (grid_cmd->parsed()) return run_gridsearch(gs, g);
    if (bench_cmd->parsed()) return run_bench(be, g);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
