#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "pingtsvm/metrics.hpp"

using namespace pingtsvm;

namespace {

Eigen::VectorXi labels(std::initializer_list<int> values) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (int x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("confusion tallies every quadrant") {
  const Eigen::VectorXi truth = labels({1, 1, 1, -1, -1, -1, 1, -1});
  const Eigen::VectorXi pred = labels({1, 1, -1, -1, -1, 1, 1, 1});

  const ConfusionMatrix cm = confusion(truth, pred);
  CHECK(cm.tp == 3);
  CHECK(cm.fn == 1);
  CHECK(cm.tn == 2);
  CHECK(cm.fp == 2);
  CHECK(cm.total() == 8);

  SUBCASE("choosing -1 as positive swaps the quadrants") {
    const ConfusionMatrix sw = confusion(truth, pred, -1);
    CHECK(sw.tp == cm.tn);
    CHECK(sw.tn == cm.tp);
    CHECK(sw.fp == cm.fn);
    CHECK(sw.fn == cm.fp);
  }
}

TEST_CASE("report on counts 3,1,2,4 gives exact rationals") {
  ConfusionMatrix cm;
  cm.tp = 3;
  cm.fp = 1;
  cm.fn = 2;
  cm.tn = 4;

  const MetricsReport r = report(cm);
  REQUIRE(r.precision.has_value());
  REQUIRE(r.recall.has_value());
  REQUIRE(r.f1.has_value());
  REQUIRE(r.specificity.has_value());
  REQUIRE(r.accuracy.has_value());

  // Each value is one exact integer division, so the comparisons below are
  // bitwise, not approximate.
  CHECK(*r.precision == 0.75);
  CHECK(*r.recall == 0.6);
  CHECK(*r.f1 == 2.0 / 3.0);
  CHECK(*r.specificity == 0.8);
  CHECK(*r.accuracy == 0.7);
}

TEST_CASE("zero denominators leave fields empty") {
  SUBCASE("no predicted positives: precision undefined") {
    ConfusionMatrix cm;
    cm.tn = 5;
    cm.fn = 2;
    const MetricsReport r = report(cm);
    CHECK(!r.precision.has_value());
    REQUIRE(r.f1.has_value());  // denominator 2tp + fp + fn = 2, so f1 = 0
    CHECK(*r.f1 == 0.0);
    CHECK(r.recall.has_value());
    CHECK(*r.recall == 0.0);
    CHECK(*r.specificity == 1.0);
  }
  SUBCASE("no actual positives: recall undefined") {
    ConfusionMatrix cm;
    cm.tn = 4;
    cm.fp = 1;
    const MetricsReport r = report(cm);
    CHECK(!r.recall.has_value());
    CHECK(r.precision.has_value());
    CHECK(*r.precision == 0.0);
  }
  SUBCASE("tp, fp and fn all zero: f1 undefined") {
    ConfusionMatrix cm;
    cm.tn = 3;
    const MetricsReport r = report(cm);
    CHECK(!r.f1.has_value());
    CHECK(!r.precision.has_value());
    CHECK(!r.recall.has_value());
    CHECK(*r.accuracy == 1.0);
  }
  SUBCASE("no actual negatives: specificity undefined") {
    ConfusionMatrix cm;
    cm.tp = 2;
    cm.fn = 1;
    const MetricsReport r = report(cm);
    CHECK(!r.specificity.has_value());
  }
}

TEST_CASE("f1 corner case with fp and fn but zero tp") {
  ConfusionMatrix cm;
  cm.fp = 3;
  cm.fn = 2;
  cm.tn = 1;
  const MetricsReport r = report(cm);
  REQUIRE(r.f1.has_value());
  CHECK(*r.f1 == 0.0);
  CHECK(*r.precision == 0.0);
  CHECK(*r.recall == 0.0);
}

TEST_CASE("perfect classifier") {
  const Eigen::VectorXi truth = labels({1, -1, 1, -1, -1});
  const MetricsReport r = report(confusion(truth, truth));
  CHECK(*r.accuracy == 1.0);
  CHECK(*r.precision == 1.0);
  CHECK(*r.recall == 1.0);
  CHECK(*r.f1 == 1.0);
  CHECK(*r.specificity == 1.0);
}

TEST_CASE("f1 lies between precision and recall") {
  std::mt19937_64 rng(41);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXi truth(30), pred(30);
    for (int i = 0; i < 30; ++i) {
      truth(i) = coin(rng) ? 1 : -1;
      pred(i) = coin(rng) ? 1 : -1;
    }
    const MetricsReport r = report(confusion(truth, pred));
    if (!r.precision || !r.recall || !r.f1) continue;
    const double lo = std::min(*r.precision, *r.recall);
    const double hi = std::max(*r.precision, *r.recall);
    CHECK(*r.f1 >= lo - 1e-15);
    CHECK(*r.f1 <= hi + 1e-15);
  }
}

TEST_CASE("accuracy is invariant under the positive-label choice") {
  std::mt19937_64 rng(9);
  std::bernoulli_distribution coin(0.4);
  Eigen::VectorXi truth(50), pred(50);
  for (int i = 0; i < 50; ++i) {
    truth(i) = coin(rng) ? 1 : -1;
    pred(i) = coin(rng) ? 1 : -1;
  }
  const MetricsReport a = report(confusion(truth, pred, 1));
  const MetricsReport b = report(confusion(truth, pred, -1));
  CHECK(*a.accuracy == *b.accuracy);
  // Precision w.r.t. one class is the negative predictive value of the
  // other; recall and specificity trade places.
  CHECK(*a.recall == *b.specificity);
  CHECK(*a.specificity == *b.recall);
}

TEST_CASE("confusion input validation") {
  const Eigen::VectorXi good = labels({1, -1});
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(confusion(good, labels({1})), std::invalid_argument);
  }
  SUBCASE("empty vectors") {
    Eigen::VectorXi empty(0);
    CHECK_THROWS_AS(confusion(empty, empty), std::invalid_argument);
  }
  SUBCASE("labels outside +1/-1") {
    CHECK_THROWS_AS(confusion(labels({1, 0}), good), std::invalid_argument);
    CHECK_THROWS_AS(confusion(good, labels({2, -1})), std::invalid_argument);
  }
  SUBCASE("positive selector outside +1/-1") {
    CHECK_THROWS_AS(confusion(good, good, 0), std::invalid_argument);
  }
  SUBCASE("report rejects empty and negative counts") {
    CHECK_THROWS_AS(report(ConfusionMatrix{}), std::invalid_argument);
    ConfusionMatrix bad;
    bad.tp = -1;
    bad.tn = 2;
    CHECK_THROWS_AS(report(bad), std::invalid_argument);
  }
}
