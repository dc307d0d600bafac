#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "losseval.hpp"
#include "rng.hpp"

#include <cmath>

using namespace awekit;

namespace {

LossModelParams table_values() {
  LossModelParams p;
  p.p_em_kw = 0.4;
  p.p_pc_kw = 3.9;
  p.t_pc_min = 2.5;
  p.p_f = 2e-7;
  p.e_misc_kwh = 0;
  return p;
}

}  // namespace

TEST_CASE("false negative rate") {
  CHECK(fn_rate(0, 100, 2e-7) == 0.0);
  CHECK(fn_rate(1, 99, 2e-7) == doctest::Approx(2e-9));
  // No predictor: every upset is missed.
  CHECK(fn_rate(100, 0, 2e-7) == doctest::Approx(2e-7));
  CHECK_THROWS(fn_rate(0, 0, 2e-7));
}

TEST_CASE("false positive probability for fixed thresholds") {
  std::vector<double> maxima(1000);
  for (int i = 0; i < 1000; ++i) maxima[i] = i + 0.5;  // uniform on (0, 1000)

  SUBCASE("formula") {
    // F(q*) = 0.99 at q* = 990.
    FpEstimate e = fp_prob_threshold(maxima, 990.0, 0.002);
    CHECK(e.prob == doctest::Approx(0.008).epsilon(1e-9));
    CHECK_FALSE(e.conservative_warning);
  }
  SUBCASE("clamped at zero when the CDF saturates") {
    FpEstimate e = fp_prob_threshold(maxima, 2000.0, 0.002);
    CHECK(e.prob == 0.0);
  }
  SUBCASE("0.99-quantile threshold with negligible p_f") {
    FpEstimate e = fp_prob_threshold(maxima, 990.0, 0.0);
    CHECK(e.prob == doctest::Approx(0.01).epsilon(1e-9));
  }
  SUBCASE("threshold below the median warns") {
    FpEstimate e = fp_prob_threshold(maxima, 100.0, 0.0);
    CHECK(e.conservative_warning);
  }
  SUBCASE("needs aubstantial sample") {
    std::vector<double> tiny(10, 1.0);
    CHECK_THROWS(fp_prob_threshold(tiny, 0.5, 0.0));
  }
}

TEST_CASE("loss rate reproduces the reference arithmetic") {
  SUBCASE("no predictor at one week of downtime") {
    LossModelParams p = table_values();
    p.fn_conditional = 1.0;  // every upset missed
    p.fp_per_cycle = 0.0;
    p.downtime_min = 7 * 24 * 60;  // 10080
    // n_pc = 5e6, n_mpc = 4032.
    double expected = 4032.0 / (5e6 + 4032.0);
    CHECK(loss_rate(p) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(loss_rate(p) == doctest::Approx(8.06e-4).epsilon(1e-3));
  }

  SUBCASE("zero-FN threshold limit") {
    LossModelParams p = table_values();
    p.fn_conditional = 0.0;
    p.fp_per_cycle = 0.0048;
    p.downtime_min = 10080;
    CHECK(loss_rate(p) == doctest::Approx(0.0048 * 0.4 / 3.9).epsilon(1e-12));
    CHECK(loss_rate(p) == doctest::Approx(4.92e-4).epsilon(1e-3));
  }

  SUBCASE("no errors, no loss") {
    LossModelParams p = table_values();
    p.fn_conditional = 0.0;
    p.fp_per_cycle = 0.0;
    CHECK(loss_rate(p) == 0.0);
  }

  SUBCASE("monotone in every degradation direction") {
    LossModelParams base = table_values();
    base.fn_conditional = 0.3;
    base.fp_per_cycle = 0.001;
    base.downtime_min = 5000;
    base.e_misc_kwh = 1.0;
    double l0 = loss_rate(base);
    for (int k = 0; k < 4; ++k) {
      LossModelParams p = base;
      if (k == 0) p.fp_per_cycle *= 1.5;
      if (k == 1) p.fn_conditional *= 1.5;
      if (k == 2) p.downtime_min *= 1.5;
      if (k == 3) p.e_misc_kwh *= 1.5;
      CHECK(loss_rate(p) >= l0 - 1e-15);
    }
  }

  SUBCASE("unit conversions round trip") {
    // E_pc in kWh from kW and minutes: 3.9 kW * 2.5 min = 0.1625 kWh.
    LossModelParams p = table_values();
    p.fn_conditional = 1.0;
    p.fp_per_cycle = 0;
    p.downtime_min = 0;
    p.e_misc_kwh = 0.1625;  // exactly one cycle of energy
    // loss = (0 + 0 + E_misc/E_pc) / n_pc = 1 / 5e6.
    CHECK(loss_rate(p) == doctest::Approx(1.0 / 5e6).epsilon(1e-9));
  }
}

TEST_CASE("predictor ranking") {
  std::vector<PredictorEntry> entries;
  PredictorEntry none{"no_predictor", table_values()};
  none.params.fn_conditional = 1.0;
  none.params.fp_per_cycle = 0.0;
  PredictorEntry t8{"threshold_8pct", table_values()};
  t8.params.fn_conditional = 0.0;
  t8.params.fp_per_cycle = 0.0048;
  PredictorEntry svm{"svm", table_values()};
  svm.params.fn_conditional = 0.0079;
  svm.params.fp_per_cycle = 0.0;

  SUBCASE("single predictor ranks first") {
    LossTable t = rank_predictors({none}, {10080});
    CHECK(t.ranking[0][0] == 0);
  }

  SUBCASE("identical predictors tie by name") {
    PredictorEntry a = t8, b = t8;
    a.name = "zeta";
    b.name = "alpha";
    LossTable t = rank_predictors({a, b}, {10080});
    CHECK(t.names[t.ranking[0][0]] == "alpha");
  }

  SUBCASE("zero-FN predictors are downtime independent") {
    LossTable t = rank_predictors({none, t8, svm}, {60, 1440, 10080, 43200});
    for (std::size_t d = 1; d < t.downtime_min.size(); ++d)
      CHECK(t.loss[1][d] == doctest::Approx(t.loss[1][0]).epsilon(1e-12));
    // The no-predictor baseline grows with downtime.
    CHECK(t.loss[0][3] > t.loss[0][0]);
  }

  SUBCASE("csv contains one row per predictor and a ranking block") {
    LossTable t = rank_predictors({none, t8}, {60, 10080});
    std::string csv = loss_table_csv(t);
    CHECK(csv.find("no_predictor") != std::string::npos);
    CHECK(csv.find("rank_at_60") != std::string::npos);
  }
}
