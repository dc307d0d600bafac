#include "subsim.hpp"

#include "rng.hpp"
#include "workpool.hpp"

#include <algorithm>
#include <cmath>

namespace awekit {

std::vector<SubsimSample> direct_mc_level(const Simulator& simulate, int n_samples,
                                          int dim, std::uint64_t master_seed,
                                          int workers) {
  auto make = [&](std::size_t i) -> SubsimSample {
    SubsimSample s;
    Rng rng(derive_seed(master_seed, 0, i));
    s.theta.resize(dim);
    for (int k = 0; k < dim; ++k) s.theta[k] = rng.normal();
    SubsimEval e = simulate(s.theta);
    s.g = e.g;
    s.valid = e.valid;
    return s;
  };
  return parallel_map<SubsimSample>(n_samples, make, workers);
}

double intermediate_threshold(const std::vector<double>& g_sorted_desc, int n_s,
                              double p_s) {
  int k = static_cast<int>(n_s * p_s + 0.5);
  if (static_cast<int>(g_sorted_desc.size()) < k + 1)
    throw std::runtime_error("intermediate_threshold: not enough samples");
  if (g_sorted_desc[0] == g_sorted_desc[k])
    throw std::runtime_error(
        "intermediate_threshold: degenerate level, tied limit values");
  return 0.5 * (g_sorted_desc[k - 1] + g_sorted_desc[k]);
}

double subsim_estimate(int m_s, int n_f, int n_s, double p_s) {
  if (m_s < 1 || n_s < 1) throw std::invalid_argument("subsim_estimate: bad level/sample counts");
  return std::pow(p_s, m_s - 1) * static_cast<double>(n_f) / n_s;
}

ChainResult metropolis_chain(const SubsimSample& seed, int steps, double scale,
                             const MembershipTest& membership,
                             std::uint64_t chain_seed) {
  ChainResult out;
  out.states.reserve(steps);
  Rng rng(chain_seed);
  const int d = static_cast<int>(seed.theta.size());
  VecX current = seed.theta;
  double g_current = seed.g;
  VecX candidate(d);

  for (int step = 0; step < steps; ++step) {
    bool moved = false;
    for (int k = 0; k < d; ++k) {
      double prop = current[k] + scale * rng.normal();
      // Ratio of standard normal densities.
      double alpha = std::exp(0.5 * (current[k] * current[k] - prop * prop));
      double u = rng.uniform();
      if (alpha > 1.0 || u < alpha) {
        candidate[k] = prop;
        moved = true;
      } else {
        candidate[k] = current[k];
      }
    }
    ++out.proposed;
    if (moved) {
      MembershipResult m = membership(candidate);
      ++out.sim_calls;
      if (!m.valid) ++out.invalid;
      if (m.valid && m.in_domain) {
        current = candidate;
        g_current = m.g;
        ++out.accepted;
      }
    }
    SubsimSample s;
    s.theta = current;
    s.g = g_current;
    s.valid = true;
    out.states.push_back(std::move(s));
  }
  return out;
}

double adaptive_proposal_update(double accept_rate, double scale, int batch_index,
                                const SubsimParams& params) {
  if (batch_index < 1) batch_index = 1;
  double next = scale * std::exp((accept_rate - params.accept_target) /
                                 std::sqrt(static_cast<double>(batch_index)));
  return clamp(next, params.scale_min, params.scale_max);
}

namespace {

struct LevelOutcome {
  bool terminated = false;
  double threshold = 0;
};

// Shared level bookkeeping: count failures, archive them, decide termination
// or compute the next threshold.
LevelOutcome process_level(const std::vector<SubsimSample>& samples, int level,
                           const SubsimRunConfig& cfg, double accept_rate,
                           double scale, SubsetSimResult& res) {
  const int n_s = cfg.params.n_samples;
  const int n_seed = cfg.params.seeds_per_level();

  LevelSummary summary;
  summary.accept_rate = accept_rate;
  summary.scale = scale;

  std::vector<double> g_values;
  g_values.reserve(samples.size());
  for (const auto& s : samples) {
    g_values.push_back(s.g);
    if (!s.valid) {
      ++summary.n_invalid;
      ++res.invalid_total;
    }
    if (s.g >= cfg.g_star) {
      ++summary.n_failure;
      FailureSample f;
      f.theta = s.theta;
      f.g = s.g;
      f.level = level;
      f.valid = s.valid;
      res.failures.push_back(std::move(f));
    }
  }
  res.level_g.push_back(g_values);

  int n_f = summary.n_failure;
  int n_f_valid = 0;
  for (const auto& s : samples)
    if (s.valid && s.g >= cfg.g_star) ++n_f_valid;

  LevelOutcome out;
  std::vector<double> sorted = g_values;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  bool enough_failures = n_f > n_seed;
  double threshold = 0;
  bool threshold_done = false;
  if (!enough_failures) {
    try {
      threshold = intermediate_threshold(sorted, n_s, cfg.params.p0);
    } catch (const std::exception& e) {
      res.degenerate = true;
      res.note = e.what();
      out.terminated = true;
    }
    if (!out.terminated && threshold >= cfg.g_star) {
      threshold_done = true;  // the domain beyond T is already the failure set
    }
  }

  if (enough_failures || threshold_done || out.terminated) {
    summary.threshold = cfg.g_star;
    res.levels.push_back(summary);
    res.m_s = level + 1;
    res.n_f = n_f;
    res.p_f = subsim_estimate(res.m_s, n_f, n_s, cfg.params.p0);
    res.p_f_valid = subsim_estimate(res.m_s, n_f_valid, n_s, cfg.params.p0);
    res.converged = !res.degenerate;
    out.terminated = true;
    return out;
  }

  summary.threshold = threshold;
  res.levels.push_back(summary);
  out.threshold = threshold;
  return out;
}

SubsetSimResult run_core(const Simulator& simulate, const SubsimRunConfig& cfg,
                         int start_level, double start_scale,
                         std::vector<SubsimSample> samples, SubsetSimResult res,
                         const LevelCallback& on_level) {
  cfg.params.validate();
  if (cfg.dim <= 0) throw ConfigError("subsim: dimension must be > 0");
  const int n_s = cfg.params.n_samples;
  const int n_seed = cfg.params.seeds_per_level();
  const int chain_len = static_cast<int>(std::lround(1.0 / cfg.params.p0)) - 1;

  double scale = start_scale;

  for (int level = start_level; level < cfg.params.max_levels; ++level) {
    double accept_rate = 0;
    if (level == 0) {
      samples = direct_mc_level(simulate, n_s, cfg.dim, cfg.master_seed, cfg.workers);
      res.sim_calls += n_s;
    } else {
      // Seeds: the n_seed samples with the highest limit values (stable).
      std::vector<int> order(samples.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return samples[a].g > samples[b].g;
      });
      double threshold = res.levels.back().threshold;

      std::vector<SubsimSample> seeds(n_seed);
      for (int c = 0; c < n_seed; ++c) seeds[c] = samples[order[c]];

      MembershipTest membership = [&](const VecX& theta) {
        SubsimEval e = simulate(theta);
        MembershipResult m;
        m.g = e.g;
        m.valid = e.valid;
        m.in_domain = e.valid && e.g >= threshold;
        return m;
      };

      auto run_chain = [&](std::size_t c) -> ChainResult {
        return metropolis_chain(seeds[c], chain_len, scale, membership,
                                derive_seed(cfg.master_seed, level, c));
      };
      std::vector<ChainResult> chains =
          parallel_map<ChainResult>(n_seed, run_chain, cfg.workers);

      samples.clear();
      samples.reserve(n_s);
      int accepted = 0, proposed = 0;
      for (int c = 0; c < n_seed; ++c) {
        samples.push_back(seeds[c]);
        for (auto& s : chains[c].states) samples.push_back(std::move(s));
        accepted += chains[c].accepted;
        proposed += chains[c].proposed;
        res.sim_calls += chains[c].sim_calls;
      }
      for (const auto& ch : chains) res.invalid_total += ch.invalid;
      accept_rate = proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;
      scale = adaptive_proposal_update(accept_rate, scale, level, cfg.params);
    }

    LevelOutcome lo = process_level(samples, level, cfg, accept_rate, scale, res);
    if (on_level) on_level(level, samples, scale, res);
    if (lo.terminated) return res;
  }

  // Level budget exhausted.
  res.m_s = cfg.params.max_levels;
  res.n_f = res.levels.empty() ? 0 : res.levels.back().n_failure;
  res.p_f = subsim_estimate(res.m_s, res.n_f, n_s, cfg.params.p0);
  res.p_f_valid = res.p_f;
  res.converged = false;
  res.note = "max_levels reached before the failure domain was populated";
  return res;
}

}  // namespace

SubsetSimResult run_subset_simulation(const Simulator& simulate,
                                      const SubsimRunConfig& cfg,
                                      const LevelCallback& on_level) {
  return run_core(simulate, cfg, 0, cfg.params.proposal_scale, {}, {}, on_level);
}

SubsetSimResult resume_subset_simulation(const Simulator& simulate,
                                         const SubsimRunConfig& cfg,
                                         const SubsimCheckpoint& checkpoint,
                                         const LevelCallback& on_level) {
  if (checkpoint.next_level == 0)
    return run_subset_simulation(simulate, cfg, on_level);
  return run_core(simulate, cfg, checkpoint.next_level, checkpoint.scale,
                  checkpoint.samples, checkpoint.partial, on_level);
}

}  // namespace awekit
