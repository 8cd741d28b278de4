#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace pingtsvm {

/// Raised by CSV parsing with the offending 1-based line (and field) number
/// already baked into the message.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fully materialised binary-labelled dataset.
///
/// Invariants (enforced by make_dataset and every producer in this module):
/// rows >= 1, columns >= 1, all features finite, every label is +1 or -1.
struct FeatureDataset {
  Eigen::MatrixXd features;  // n x d, row per point
  Eigen::VectorXi labels;    // n entries of +1 / -1

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }
  Eigen::Index count_label(int label) const;
};

/// Validates the invariants above and returns the assembled dataset.
FeatureDataset make_dataset(Eigen::MatrixXd features, Eigen::VectorXi labels);

/// Ordered token -> {+1, -1} table used when reading labelled CSV files.
/// Lookup is exact (after surrounding-whitespace trimming done by the
/// parser); unknown tokens are an error at the call site.
struct LabelMap {
  std::vector<std::pair<std::string, int>> entries;

  /// busy/1/+1 -> +1 and free/-1 -> -1.
  static LabelMap defaults();
  /// Returns +1/-1, or 0 when the token is unknown.
  int lookup(const std::string& token) const;
};

/// Tokens observed (first occurrence per class) while loading a CSV; useful
/// for echoing the caller's vocabulary back out in predictions.
struct ObservedTokens {
  std::string positive = "+1";
  std::string negative = "-1";
};

/// Reads a dataset file: '#'-prefixed comment lines and blank lines are
/// skipped, every data row holds d feature fields followed by one label
/// token, comma separated, no quoting. Malformed rows raise CsvError naming
/// the physical line (and field) that failed.
FeatureDataset load_csv(const std::string& path, const LabelMap& map,
                        ObservedTokens* observed = nullptr);

/// Writes the mirror-image format of load_csv. Feature values are encoded
/// losslessly, so load_csv(save_csv(ds)) reproduces ds bit for bit.
void save_csv(const FeatureDataset& ds, const std::string& path,
              const std::string& positive_token = "+1",
              const std::string& negative_token = "-1");

/// Seeded stratified holdout split. Per class, round(count * test_fraction)
/// rows (round half up) go to the test side; original row order is kept
/// within each side. Throws if any class ends up with an empty train or
/// test portion.
std::pair<FeatureDataset, FeatureDataset> stratified_split(
    const FeatureDataset& ds, double test_fraction, std::uint64_t seed);

struct FoldIndices {
  std::vector<int> train;
  std::vector<int> validation;
};

/// Seeded stratified k-fold partition of row indices 0..n-1. Validation
/// sets are disjoint, cover every row, differ in size by at most one, and
/// hold each class's floor/ceil proportional share.
std::vector<FoldIndices> kfold_indices(const Eigen::VectorXi& labels, int k,
                                       std::uint64_t seed);

FeatureDataset subset(const FeatureDataset& ds, const std::vector<int>& rows);

/// Two Gaussian blobs in d dimensions, n_per_class points each, class +1
/// centred at (+separation/2, 0, ...) and class -1 mirrored, iid N(0,
/// sigma^2) jitter per coordinate. Class +1 rows come first.
FeatureDataset make_blobs(int n_per_class, int d, double separation,
                          double sigma, std::uint64_t seed);

/// The crossing-lines geometry: class +1 along y = x (x uniform in [-1,1]),
/// class -1 along y = -x, Gaussian jitter of the given width on both
/// coordinates.
FeatureDataset make_crossplanes(int n_per_class, double noise,
                                std::uint64_t seed);

/// Interleaved half-circles: class +1 on the unit upper half-circle at the
/// origin, class -1 on the lower half-circle shifted to (1, 0.5), plus
/// Gaussian jitter.
FeatureDataset make_two_moons(int n_per_class, double noise,
                              std::uint64_t seed);

/// Flips exactly floor(rate * n) labels, chosen by a seeded shuffle.
/// rate must lie in [0, 1]; rate 1 negates every label.
FeatureDataset inject_label_noise(const FeatureDataset& ds, double rate,
                                  std::uint64_t seed);

/// Adds iid N(0, sigma^2) to every feature entry.
FeatureDataset inject_feature_noise(const FeatureDataset& ds, double sigma,
                                    std::uint64_t seed);

/// Column affine transform x -> (x - mean) / scale fitted on training data;
/// scale is the per-column population standard deviation floored at 1e-12,
/// so constant columns map to zero instead of dividing by zero.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
};

Standardizer fit_standardizer(const FeatureDataset& ds);
FeatureDataset apply_standardizer(const Standardizer& st,
                                  const FeatureDataset& ds);
Eigen::VectorXd apply_standardizer(const Standardizer& st,
                                   const Eigen::VectorXd& x);
/// Inverse transform; apply then unapply recovers inputs within round-off.
FeatureDataset unapply_standardizer(const Standardizer& st,
                                    const FeatureDataset& ds);

}  // namespace pingtsvm
