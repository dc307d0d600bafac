#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subsim.hpp"

#include <algorithm>
#include <cmath>

using namespace awekit;

namespace {

// Standard normal CDF.
double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Simulator first_coordinate() {
  return [](const VecX& theta) { return SubsimEval{theta[0], true}; };
}

Simulator normalized_sum(int d) {
  return [d](const VecX& theta) {
    return SubsimEval{theta.sum() / std::sqrt(static_cast<double>(d)), true};
  };
}

}  // namespace

TEST_CASE("direct Monte Carlo level") {
  SUBCASE("tail fraction matches the normal quantile") {
    auto samples = direct_mc_level(first_coordinate(), 10000, 1, 123);
    int count = 0;
    for (const auto& s : samples)
      if (s.g > 1.2816) ++count;
    double frac = count / 10000.0;
    CHECK(frac == doctest::Approx(0.10).epsilon(0.2));
    CHECK(std::abs(frac - 0.10) < 0.02);
  }

  SUBCASE("fixed seed reproduces the sample set") {
    auto a = direct_mc_level(first_coordinate(), 500, 4, 7);
    auto b = direct_mc_level(first_coordinate(), 500, 4, 7);
    for (int i = 0; i < 500; ++i) {
      CHECK(a[i].g == b[i].g);
      CHECK((a[i].theta - b[i].theta).norm() == 0.0);
    }
  }
}

TEST_CASE("intermediate threshold from descending order statistics") {
  SUBCASE("n_s=10, p_s=0.1") {
    std::vector<double> g = {9, 7, 5, 4, 3, 2, 1, 0, -1, -2};
    CHECK(intermediate_threshold(g, 10, 0.1) == doctest::Approx(8.0));
  }
  SUBCASE("n_s=5, p_s=0.2") {
    std::vector<double> g = {4, 2, 1, 0, -1};
    CHECK(intermediate_threshold(g, 5, 0.2) == doctest::Approx(3.0));
  }
  SUBCASE("all-equal limit values are degenerate") {
    std::vector<double> g(10, 1.0);
    CHECK_THROWS(intermediate_threshold(g, 10, 0.1));
  }
}

TEST_CASE("estimator arithmetic") {
  CHECK(subsim_estimate(1, 37, 1000, 0.1) == doctest::Approx(0.037));
  CHECK(subsim_estimate(3, 200, 1000, 0.1) == doctest::Approx(2e-3));
}

TEST_CASE("modified Metropolis chain") {
  double threshold = 0.0;
  MembershipTest membership = [&](const VecX& theta) {
    MembershipResult m;
    m.g = theta[0];
    m.valid = true;
    m.in_domain = theta[0] >= threshold;
    return m;
  };

  SUBCASE("rejected candidates repeat the previous state") {
    // Membership never holds for negative proposals; the chain must stay put
    // whenever it proposes one.
    SubsimSample seed;
    seed.theta = VecX::Constant(1, 0.05);
    seed.g = 0.05;
    ChainResult r = metropolis_chain(seed, 200, 1.0, membership, 99);
    REQUIRE(r.states.size() == 200);
    for (const auto& s : r.states) CHECK(s.g >= 0.0);
    CHECK(r.accepted < r.proposed);
  }

  SUBCASE("chain distribution matches the truncated normal") {
    SubsimSample seed;
    seed.theta = VecX::Constant(1, 0.5);
    seed.g = 0.5;
    ChainResult r = metropolis_chain(seed, 100000, 1.0, membership, 4242);
    std::vector<double> xs;
    xs.reserve(r.states.size());
    for (const auto& s : r.states) xs.push_back(s.theta[0]);
    std::sort(xs.begin(), xs.end());
    double ks = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double cdf = (phi_cdf(xs[i]) - 0.5) / 0.5;  // truncated to x >= 0
      double e_hi = (i + 1.0) / xs.size();
      double e_lo = i / static_cast<double>(xs.size());
      ks = std::max(ks, std::max(std::abs(cdf - e_hi), std::abs(cdf - e_lo)));
    }
    CHECK(ks < 0.05);
  }
}

TEST_CASE("adaptive proposal update") {
  SubsimParams p;
  CHECK(adaptive_proposal_update(0.44, 0.7, 1, p) == doctest::Approx(0.7));
  CHECK(adaptive_proposal_update(0.0, 0.7, 1, p) < 0.7);
  CHECK(adaptive_proposal_update(0.9, 0.7, 1, p) > 0.7);
  CHECK(adaptive_proposal_update(0.0, 0.0011, 5, p) >= p.scale_min);
  CHECK(adaptive_proposal_update(1.0, 0.9, 1, p) <= p.scale_max);
}

TEST_CASE("subset simulation on the linear benchmark") {
  const int d = 100;

  SUBCASE("moderate probability reduces to one direct level") {
    SubsimRunConfig cfg;
    cfg.params.n_samples = 2000;
    cfg.params.p0 = 0.1;
    cfg.dim = d;
    cfg.g_star = 1.0364;  // p = 0.15, safely above the level probability
    cfg.master_seed = 5;
    SubsetSimResult res = run_subset_simulation(normalized_sum(d), cfg);
    CHECK(res.m_s == 1);
    CHECK(res.converged);
    CHECK(res.p_f == doctest::Approx(0.15).epsilon(0.2));
  }

  SUBCASE("agrees with direct Monte Carlo at p = 0.10") {
    const int n_mc = 10000;
    SubsimRunConfig cfg;
    cfg.params.n_samples = n_mc;
    cfg.params.p0 = 0.1;
    cfg.dim = d;
    cfg.g_star = 1.2816;
    cfg.master_seed = 29;
    SubsetSimResult ss = run_subset_simulation(normalized_sum(d), cfg);

    auto mc = direct_mc_level(normalized_sum(d), n_mc, d, 12345);
    int n_fail = 0;
    for (const auto& s : mc)
      if (s.g >= cfg.g_star) ++n_fail;
    double p_mc = static_cast<double>(n_fail) / n_mc;
    double se_mc = std::sqrt(p_mc * (1 - p_mc) / n_mc);
    double se_ss = std::sqrt(ss.p_f * (1 - ss.p_f) / n_mc);  // at least MC-sized
    double se = std::sqrt(se_mc * se_mc + se_ss * se_ss);
    CHECK(std::abs(ss.p_f - p_mc) < 3 * se);
  }

  SUBCASE("rare tail within a factor of three of the analytic value") {
    SubsimRunConfig cfg;
    cfg.params.n_samples = 1000;
    cfg.params.p0 = 0.1;
    cfg.params.max_levels = 12;
    cfg.dim = d;
    cfg.g_star = 3.0;
    cfg.master_seed = 17;
    SubsetSimResult res = run_subset_simulation(normalized_sum(d), cfg);
    double exact = phi_cdf(-3.0);  // 1.35e-3
    CHECK(res.converged);
    CHECK(res.p_f / exact > 1.0 / 3.0);
    CHECK(res.p_f / exact < 3.0);
  }

  SUBCASE("levels are strictly ordered and samples respect their level") {
    SubsimRunConfig cfg;
    cfg.params.n_samples = 500;
    cfg.params.p0 = 0.1;
    cfg.params.max_levels = 10;
    cfg.dim = d;
    cfg.g_star = 2.5;
    cfg.master_seed = 3;
    SubsetSimResult res = run_subset_simulation(normalized_sum(d), cfg);
    REQUIRE(res.levels.size() >= 2);
    for (std::size_t i = 1; i < res.levels.size(); ++i)
      CHECK(res.levels[i].threshold > res.levels[i - 1].threshold);
    // Every sample of level i+1 lies in the domain defined at level i.
    for (std::size_t lvl = 1; lvl < res.level_g.size(); ++lvl) {
      double t = res.levels[lvl - 1].threshold;
      double tol = 0;
      for (double g : res.level_g[lvl]) CHECK(g >= t - tol);
    }
    // Acceptance rates stay in a sane band under adaptation.
    for (std::size_t i = 1; i < res.levels.size(); ++i) {
      CHECK(res.levels[i].accept_rate > 0.2);
      CHECK(res.levels[i].accept_rate < 0.7);
    }
  }

  SUBCASE("determinism in the master seed") {
    SubsimRunConfig cfg;
    cfg.params.n_samples = 300;
    cfg.params.p0 = 0.1;
    cfg.dim = 10;
    cfg.g_star = 2.0;
    cfg.master_seed = 77;
    SubsetSimResult a = run_subset_simulation(normalized_sum(10), cfg);
    SubsetSimResult b = run_subset_simulation(normalized_sum(10), cfg);
    CHECK(a.p_f == b.p_f);
    CHECK(a.m_s == b.m_s);
    REQUIRE(a.failures.size() == b.failures.size());
    for (std::size_t i = 0; i < a.failures.size(); ++i)
      CHECK((a.failures[i].theta - b.failures[i].theta).norm() == 0.0);
  }

  SUBCASE("failure archive holds only failure-domain samples") {
    SubsimRunConfig cfg;
    cfg.params.n_samples = 500;
    cfg.params.p0 = 0.1;
    cfg.dim = d;
    cfg.g_star = 2.5;
    cfg.master_seed = 3;
    SubsetSimResult res = run_subset_simulation(normalized_sum(d), cfg);
    CHECK(res.failures.size() >= static_cast<std::size_t>(res.n_f));
    for (const auto& f : res.failures) CHECK(f.g >= cfg.g_star);
  }
}

TEST_CASE("resume reproduces the uninterrupted run") {
  const int d = 50;
  SubsimRunConfig cfg;
  cfg.params.n_samples = 400;
  cfg.params.p0 = 0.1;
  cfg.params.max_levels = 10;
  cfg.dim = d;
  cfg.g_star = 2.2;
  cfg.master_seed = 21;

  SubsetSimResult full = run_subset_simulation(normalized_sum(d), cfg);
  REQUIRE(full.m_s >= 2);

  // Capture the state after level 0 and resume from it.
  SubsimCheckpoint cp;
  bool captured = false;
  run_subset_simulation(normalized_sum(d), cfg,
                        [&](int level, const std::vector<SubsimSample>& samples,
                            double scale, const SubsetSimResult& partial) {
                          if (level == 0 && !captured) {
                            cp.next_level = 1;
                            cp.scale = scale;
                            cp.samples = samples;
                            cp.partial = partial;
                            captured = true;
                          }
                        });
  REQUIRE(captured);
  SubsetSimResult resumed = resume_subset_simulation(normalized_sum(d), cfg, cp);
  CHECK(resumed.p_f == full.p_f);
  CHECK(resumed.m_s == full.m_s);
  CHECK(resumed.n_f == full.n_f);
  REQUIRE(resumed.levels.size() == full.levels.size());
  for (std::size_t i = 0; i < full.levels.size(); ++i) {
    CHECK(resumed.levels[i].threshold == full.levels[i].threshold);
    CHECK(resumed.levels[i].accept_rate == full.levels[i].accept_rate);
  }
  REQUIRE(resumed.failures.size() == full.failures.size());
  for (std::size_t i = 0; i < full.failures.size(); ++i)
    CHECK((resumed.failures[i].theta - full.failures[i].theta).norm() == 0.0);
}
