#include "pingtsvm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace pingtsvm {

namespace {

constexpr double kScaleFloor = 1e-12;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_feature(const std::string& field, int line_no, int field_no) {
  const std::string t = trim(field);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw CsvError("csv line " + std::to_string(line_no) + ", field " +
                   std::to_string(field_no) + ": not a number: '" + field + "'");
  if (!std::isfinite(value))
    throw CsvError("csv line " + std::to_string(line_no) + ", field " +
                   std::to_string(field_no) + ": non-finite feature value");
  return value;
}

std::string encode_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<int> shuffled_class_rows(const Eigen::VectorXi& labels, int label,
                                     std::mt19937_64& rng) {
  std::vector<int> rows;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels(i) == label) rows.push_back(static_cast<int>(i));
  std::shuffle(rows.begin(), rows.end(), rng);
  return rows;
}

}  // namespace

Eigen::Index FeatureDataset::count_label(int label) const {
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels(i) == label) ++n;
  return n;
}

FeatureDataset make_dataset(Eigen::MatrixXd features, Eigen::VectorXi labels) {
  if (features.rows() < 1 || features.cols() < 1)
    throw std::invalid_argument("dataset requires at least one row and one feature");
  if (features.rows() != labels.size())
    throw std::invalid_argument("dataset row count does not match label count");
  if (!features.allFinite())
    throw std::invalid_argument("dataset features must be finite");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels(i) != 1 && labels(i) != -1)
      throw std::invalid_argument("dataset labels must be +1 or -1");
  return FeatureDataset{std::move(features), std::move(labels)};
}

LabelMap LabelMap::defaults() {
  return LabelMap{{{"busy", 1}, {"1", 1}, {"+1", 1}, {"free", -1}, {"-1", -1}}};
}

int LabelMap::lookup(const std::string& token) const {
  for (const auto& [tok, lab] : entries)
    if (tok == token) return lab;
  return 0;
}

FeatureDataset load_csv(const std::string& path, const LabelMap& map,
                        ObservedTokens* observed) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  bool saw_pos = false, saw_neg = false;
  ObservedTokens tokens;
  Eigen::Index d = -1;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 2)
      throw CsvError("csv line " + std::to_string(line_no) +
                     ": expected at least one feature and a label");
    if (d < 0) d = static_cast<Eigen::Index>(fields.size()) - 1;
    if (static_cast<Eigen::Index>(fields.size()) != d + 1)
      throw CsvError("csv line " + std::to_string(line_no) + ": expected " +
                     std::to_string(d + 1) + " fields, found " +
                     std::to_string(fields.size()));

    std::vector<double> row(d);
    for (Eigen::Index j = 0; j < d; ++j)
      row[j] = parse_feature(fields[j], line_no, static_cast<int>(j) + 1);

    const std::string token = trim(fields.back());
    const int label = map.lookup(token);
    if (label == 0)
      throw CsvError("csv line " + std::to_string(line_no) +
                     ": unknown label token '" + token + "'");
    if (label > 0 && !saw_pos) { tokens.positive = token; saw_pos = true; }
    if (label < 0 && !saw_neg) { tokens.negative = token; saw_neg = true; }

    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty()) throw CsvError("'" + path + "' holds no data rows");

  Eigen::MatrixXd features(static_cast<Eigen::Index>(rows.size()), d);
  Eigen::VectorXi lab(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    lab(static_cast<Eigen::Index>(i)) = labels[i];
  }
  if (observed) *observed = tokens;
  return make_dataset(std::move(features), std::move(lab));
}

void save_csv(const FeatureDataset& ds, const std::string& path,
              const std::string& positive_token,
              const std::string& negative_token) {
  if (ds.rows() < 1 || ds.cols() < 1)
    throw std::invalid_argument("save_csv: dataset must hold at least one row and feature");
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write '" + path + "'");
  out << "# pingtsvm dataset: rows=" << ds.rows() << " features=" << ds.cols()
      << "\n";
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.cols(); ++j)
      out << encode_double(ds.features(i, j)) << ',';
    out << (ds.labels(i) > 0 ? positive_token : negative_token) << '\n';
  }
  if (!out) throw CsvError("write to '" + path + "' failed");
}

std::pair<FeatureDataset, FeatureDataset> stratified_split(
    const FeatureDataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must lie strictly inside (0, 1)");

  std::mt19937_64 rng(seed);
  std::vector<char> is_test(static_cast<std::size_t>(ds.rows()), 0);
  for (int label : {1, -1}) {
    auto rows = shuffled_class_rows(ds.labels, label, rng);
    const auto n_class = rows.size();
    const auto n_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_class) * test_fraction + 0.5));
    if (n_test == 0 || n_test >= n_class)
      throw std::invalid_argument(
          std::string("stratified_split leaves class ") +
          (label > 0 ? "+1" : "-1") + " with an empty side");
    for (std::size_t i = 0; i < n_test; ++i) is_test[static_cast<std::size_t>(rows[i])] = 1;
  }

  std::vector<int> train_rows, test_rows;
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    (is_test[static_cast<std::size_t>(i)] ? test_rows : train_rows)
        .push_back(static_cast<int>(i));
  return {subset(ds, train_rows), subset(ds, test_rows)};
}

std::vector<FoldIndices> kfold_indices(const Eigen::VectorXi& labels, int k,
                                       std::uint64_t seed) {
  const auto n = labels.size();
  if (k < 2) throw std::invalid_argument("kfold requires k >= 2");
  std::mt19937_64 rng(seed);

  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  // Extra (n_class mod k) members rotate across folds so total fold sizes
  // stay within one of each other even after several classes are dealt.
  int extra_offset = 0;
  for (int label : {1, -1}) {
    auto rows = shuffled_class_rows(labels, label, rng);
    const int n_class = static_cast<int>(rows.size());
    if (n_class < k)
      throw std::invalid_argument(std::string("class ") +
                                  (label > 0 ? "+1" : "-1") + " has " +
                                  std::to_string(n_class) +
                                  " rows, fewer than k=" + std::to_string(k));
    const int base = n_class / k;
    const int rem = n_class % k;
    std::size_t next = 0;
    for (int f = 0; f < k; ++f) {
      int take = base;
      if (((f - extra_offset) % k + k) % k < rem) ++take;
      for (int t = 0; t < take; ++t)
        folds[static_cast<std::size_t>(f)].push_back(rows[next++]);
    }
    extra_offset = (extra_offset + rem) % k;
  }

  std::vector<FoldIndices> out(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    auto& val = folds[static_cast<std::size_t>(f)];
    std::sort(val.begin(), val.end());
    std::vector<char> in_val(static_cast<std::size_t>(n), 0);
    for (int r : val) in_val[static_cast<std::size_t>(r)] = 1;
    auto& fold = out[static_cast<std::size_t>(f)];
    fold.validation = val;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!in_val[static_cast<std::size_t>(i)]) fold.train.push_back(static_cast<int>(i));
  }
  return out;
}

FeatureDataset subset(const FeatureDataset& ds, const std::vector<int>& rows) {
  if (rows.empty()) throw std::invalid_argument("subset: empty row selection");
  Eigen::MatrixXd f(static_cast<Eigen::Index>(rows.size()), ds.cols());
  Eigen::VectorXi l(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    f.row(static_cast<Eigen::Index>(i)) = ds.features.row(rows[i]);
    l(static_cast<Eigen::Index>(i)) = ds.labels(rows[i]);
  }
  return make_dataset(std::move(f), std::move(l));
}

FeatureDataset make_blobs(int n_per_class, int d, double separation,
                          double sigma, std::uint64_t seed) {
  if (n_per_class < 1 || d < 1)
    throw std::invalid_argument("make_blobs: n_per_class and d must be >= 1");
  if (!(separation >= 0.0) || !(sigma >= 0.0))
    throw std::invalid_argument("make_blobs: separation and sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Eigen::Index n = 2 * static_cast<Eigen::Index>(n_per_class);
  Eigen::MatrixXd features(n, d);
  Eigen::VectorXi labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool positive = i < n_per_class;
    labels(i) = positive ? 1 : -1;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double centre = (j == 0) ? (positive ? separation / 2.0 : -separation / 2.0) : 0.0;
      features(i, j) = centre + sigma * gauss(rng);
    }
  }
  return make_dataset(std::move(features), std::move(labels));
}

FeatureDataset make_crossplanes(int n_per_class, double noise,
                                std::uint64_t seed) {
  if (n_per_class < 1) throw std::invalid_argument("make_crossplanes: n_per_class must be >= 1");
  if (!(noise >= 0.0)) throw std::invalid_argument("make_crossplanes: noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Eigen::Index n = 2 * static_cast<Eigen::Index>(n_per_class);
  Eigen::MatrixXd features(n, 2);
  Eigen::VectorXi labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool positive = i < n_per_class;
    const double t = unit(rng);
    features(i, 0) = t + noise * gauss(rng);
    features(i, 1) = (positive ? t : -t) + noise * gauss(rng);
    labels(i) = positive ? 1 : -1;
  }
  return make_dataset(std::move(features), std::move(labels));
}

FeatureDataset make_two_moons(int n_per_class, double noise,
                              std::uint64_t seed) {
  if (n_per_class < 1) throw std::invalid_argument("make_two_moons: n_per_class must be >= 1");
  if (!(noise >= 0.0)) throw std::invalid_argument("make_two_moons: noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Eigen::Index n = 2 * static_cast<Eigen::Index>(n_per_class);
  Eigen::MatrixXd features(n, 2);
  Eigen::VectorXi labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool positive = i < n_per_class;
    const double t = angle(rng);
    double x = std::cos(t);
    double y = std::sin(t);
    if (!positive) {
      x = 1.0 - x;
      y = 0.5 - y;
    }
    features(i, 0) = x + noise * gauss(rng);
    features(i, 1) = y + noise * gauss(rng);
    labels(i) = positive ? 1 : -1;
  }
  return make_dataset(std::move(features), std::move(labels));
}

FeatureDataset inject_label_noise(const FeatureDataset& ds, double rate,
                                  std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("label noise rate must lie in [0, 1]");
  const auto n_flip = static_cast<std::size_t>(
      std::floor(rate * static_cast<double>(ds.rows())));

  std::vector<int> order(static_cast<std::size_t>(ds.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  FeatureDataset out = ds;
  for (std::size_t i = 0; i < n_flip; ++i) out.labels(order[i]) *= -1;
  return out;
}

FeatureDataset inject_feature_noise(const FeatureDataset& ds, double sigma,
                                    std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("feature noise sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FeatureDataset out = ds;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out.features(i, j) += sigma * gauss(rng);
  return out;
}

Standardizer fit_standardizer(const FeatureDataset& ds) {
  const double n = static_cast<double>(ds.rows());
  Standardizer st;
  st.mean = ds.features.colwise().sum() / n;
  st.scale.resize(ds.cols());
  for (Eigen::Index j = 0; j < ds.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
      const double diff = ds.features(i, j) - st.mean(j);
      acc += diff * diff;
    }
    st.scale(j) = std::max(std::sqrt(acc / n), kScaleFloor);
  }
  return st;
}

FeatureDataset apply_standardizer(const Standardizer& st,
                                  const FeatureDataset& ds) {
  if (st.mean.size() != ds.cols())
    throw std::invalid_argument("standardizer dimension does not match dataset");
  FeatureDataset out = ds;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out.features(i, j) = (out.features(i, j) - st.mean(j)) / st.scale(j);
  return out;
}

Eigen::VectorXd apply_standardizer(const Standardizer& st,
                                   const Eigen::VectorXd& x) {
  if (st.mean.size() != x.size())
    throw std::invalid_argument("standardizer dimension does not match point");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    out(j) = (x(j) - st.mean(j)) / st.scale(j);
  return out;
}

FeatureDataset unapply_standardizer(const Standardizer& st,
                                    const FeatureDataset& ds) {
  if (st.mean.size() != ds.cols())
    throw std::invalid_argument("standardizer dimension does not match dataset");
  FeatureDataset out = ds;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out.features(i, j) = out.features(i, j) * st.scale(j) + st.mean(j);
  return out;
}

}  // namespace pingtsvm
