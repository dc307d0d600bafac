#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "features.hpp"
#include "rng.hpp"

#include <cmath>

using namespace awekit;

namespace {

// Minimal log with given duration; F_t rises to the rupture value at t_upset
// when given.
RunLog make_log(double duration_s, double t_upset = -1) {
  RunLog log;
  log.columns = runlog_columns();
  log.f_s = 10.0;
  log.run_id = "run_test";
  int n = static_cast<int>(duration_s * 10) + 1;
  int tcol = log.column_index("t");
  int fcol = log.column_index("F_t");
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(log.columns.size(), 0.0);
    double t = i * 0.1;
    row[tcol] = t;
    row[fcol] = 1000.0 + 5.0 * std::sin(0.7 * t);
    log.append_row(row);
    if (t_upset >= 0 && std::abs(t - t_upset) < 1e-9) break;
  }
  if (t_upset >= 0) {
    log.outcome = RunOutcome::Rupture;
    log.add_event(t_upset, "rupture");
  }
  return log;
}

SegmentationConfig seg_config(double stride_s = 1.0) {
  SegmentationConfig c;
  c.window_s = 5.0;
  c.stride_s = stride_s;
  c.reaction_s = 0.2;
  c.f_s = 10.0;
  c.signals = {"F_t", "alpha"};
  return c;
}

}  // namespace

TEST_CASE("segmentation of a nominal run") {
  RunLog log = make_log(20.0);
  auto segs = segment_and_label(log, seg_config());
  CHECK(segs.size() == 16);
  for (const auto& s : segs) {
    CHECK(s.label == 1);
    CHECK(s.values.rows() == 51);
    CHECK(s.values.cols() == 2);
  }
  // Windows slide back from the final sample.
  CHECK(segs.front().end_time == doctest::Approx(20.0));
  CHECK(segs.back().end_time == doctest::Approx(5.0));
}

TEST_CASE("segmentation of an upset run anchors on the reaction-shifted window") {
  RunLog log = make_log(30.0, 12.0);
  SegmentationStats stats;
  auto segs = segment_and_label(log, seg_config(), &stats);
  REQUIRE(!segs.empty());
  CHECK(stats.upset_segments == 1);
  CHECK(segs.front().label == -1);
  CHECK(segs.front().end_time == doctest::Approx(11.8));
  for (std::size_t i = 1; i < segs.size(); ++i) CHECK(segs[i].label == 1);
  // Exactly one upset window per upset run.
  int n_upset = 0;
  for (const auto& s : segs) n_upset += s.label == -1 ? 1 : 0;
  CHECK(n_upset == 1);
}

TEST_CASE("upset too early for a full window yields a diagnostic") {
  RunLog log = make_log(30.0, 4.0);
  SegmentationStats stats;
  auto segs = segment_and_label(log, seg_config(), &stats);
  CHECK(segs.empty());
  CHECK(stats.upset_window_missing);
}

TEST_CASE("log shorter than the window yields nothing") {
  RunLog log = make_log(3.0);
  CHECK(segment_and_label(log, seg_config()).empty());
}

TEST_CASE("per-signal features") {
  SUBCASE("constant signal") {
    std::vector<double> x(40, 3.5);
    auto f = signal_features(x, 10.0);
    const auto& names = per_signal_feature_names();
    auto get = [&](const std::string& n) {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return f[i];
      throw std::runtime_error("missing " + n);
    };
    CHECK(get("mean") == doctest::Approx(3.5));
    CHECK(get("median") == doctest::Approx(3.5));
    CHECK(get("variance") == doctest::Approx(0.0));
    CHECK(get("crest_factor") == doctest::Approx(1.0));
    CHECK(get("max_slope") == doctest::Approx(0.0));
    CHECK(get("skewness") == 0.0);
    CHECK(get("kurtosis") == 0.0);
    CHECK(get("trev_tau1.0") == 0.0);
  }

  SUBCASE("ramp slope and cumulative sum range") {
    std::vector<double> x(10);
    for (int i = 0; i < 10; ++i) x[i] = 0.1 * i;  // 1/s ramp at 10 Hz
    auto f = signal_features(x, 10.0);
    const auto& names = per_signal_feature_names();
    auto get = [&](const std::string& n) {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return f[i];
      throw std::runtime_error("missing " + n);
    };
    CHECK(get("max_slope") == doctest::Approx(1.0));
    CHECK(get("cumsum_range") == doctest::Approx(4.5));
    CHECK(get("peak_to_peak") == doctest::Approx(0.9));
  }

  SUBCASE("2 Hz tone amplitude recovered above 1 Hz") {
    std::vector<double> x(100);
    for (int i = 0; i < 100; ++i) x[i] = 3.0 * std::sin(2 * kPi * 2.0 * (i / 10.0));
    auto f = signal_features(x, 10.0);
    const auto& names = per_signal_feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == "spec_max_amp_above_1hz")
        CHECK(f[i] == doctest::Approx(3.0).epsilon(0.05));
      if (names[i] == "spec_max_amp") CHECK(f[i] == doctest::Approx(3.0).epsilon(0.05));
    }
  }
}

TEST_CASE("time reversal asymmetry statistic") {
  SUBCASE("ramp gives exactly one") {
    std::vector<double> x(200);
    for (int i = 0; i < 200; ++i) x[i] = 0.25 * i;
    CHECK(time_reversal_stat(x, 1.0, 10.0) == 1.0);
    CHECK(time_reversal_stat(x, 0.5, 10.0) == 1.0);
  }

  SUBCASE("odd symmetry under sign flip") {
    Rng rng(8);
    std::vector<double> x(500), nx(500);
    double acc = 0;
    for (int i = 0; i < 500; ++i) {
      acc += rng.normal() + 0.05 * std::sin(i * 0.3) * rng.uniform();
      x[i] = acc;
      nx[i] = -acc;
    }
    double p = time_reversal_stat(x, 1.0, 10.0);
    CHECK(time_reversal_stat(nx, 1.0, 10.0) == doctest::Approx(-p).epsilon(1e-12));
  }

  SUBCASE("iid Gaussian series is nearly symmetric") {
    Rng rng(15);
    std::vector<double> x(10000);
    for (auto& v : x) v = rng.normal();
    CHECK(std::abs(time_reversal_stat(x, 1.0, 10.0)) < 0.05);
  }

  SUBCASE("preconditions") {
    std::vector<double> x(20, 1.0);
    CHECK_THROWS(time_reversal_stat(x, 0.33, 10.0));   // not a multiple of 1/f_s
    std::vector<double> tiny(5, 1.0);
    CHECK_THROWS(time_reversal_stat(tiny, 1.0, 10.0));  // too short
  }
}

TEST_CASE("feature schema and dataset round trip") {
  SegmentationConfig cfg = seg_config();
  RunLog log = make_log(20.0);
  auto segs = segment_and_label(log, cfg);
  FeatureDataset ds = build_dataset(segs, cfg);
  CHECK(ds.feature_names.size() == 2 * per_signal_feature_names().size());
  CHECK(ds.X.rows() == 16);
  CHECK(ds.feature_names[0] == "F_t.mean");

  std::string path = "/tmp/awekit_test_features.csv";
  write_features_csv(path, ds);
  FeatureDataset back = read_features_csv(path);
  CHECK(back.feature_names == ds.feature_names);
  REQUIRE(back.X.rows() == ds.X.rows());
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    CHECK(back.y[i] == ds.y[i]);
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j) CHECK(back.X(i, j) == ds.X(i, j));
  }
}
