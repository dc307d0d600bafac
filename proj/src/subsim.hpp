#pragma once

#include "common.hpp"
#include "config.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace awekit {

struct SubsimEval {
  double g = 0;
  bool valid = true;
};

// theta -> limit value. Invalid evaluations carry a g assigned by the
// simulator's own policy (the closed loop maps them above g_star).
using Simulator = std::function<SubsimEval(const VecX&)>;

struct SubsimSample {
  VecX theta;
  double g = 0;
  bool valid = true;
};

struct LevelSummary {
  double threshold = 0;     // toward the next level; g_star on the last
  double accept_rate = 0;   // chain candidate acceptance (levels > 0)
  double scale = 0;         // proposal scale used
  int n_failure = 0;        // samples with g >= g_star in this level
  int n_invalid = 0;
};

struct FailureSample {
  VecX theta;
  double g = 0;
  int level = 0;
  bool valid = true;
};

struct SubsetSimResult {
  std::vector<LevelSummary> levels;
  std::vector<std::vector<double>> level_g;  // limit values per level
  std::vector<FailureSample> failures;       // every sample with g >= g_star
  int m_s = 0;
  int n_f = 0;
  double p_f = 0;
  double p_f_valid = 0;  // counting only valid runs as failures
  int invalid_total = 0;
  std::uint64_t sim_calls = 0;
  bool converged = false;
  bool degenerate = false;
  std::string note;
};

// n_samples iid standard-normal draws evaluated through the simulator,
// reproducible from the master seed and independent of scheduling.
std::vector<SubsimSample> direct_mc_level(const Simulator& simulate, int n_samples,
                                          int dim, std::uint64_t master_seed,
                                          int workers = 0);

// Average of the (n_s*p_s)-th and (n_s*p_s+1)-th largest limit values.
// Throws on a degenerate (fully tied) seed set.
double intermediate_threshold(const std::vector<double>& g_sorted_desc, int n_s,
                              double p_s);

// Failure probability estimate p_s^(m_s-1) * n_f / n_s.
double subsim_estimate(int m_s, int n_f, int n_s, double p_s);

struct MembershipResult {
  double g = 0;
  bool in_domain = false;
  bool valid = true;
};
using MembershipTest = std::function<MembershipResult(const VecX&)>;

struct ChainResult {
  std::vector<SubsimSample> states;  // `steps` entries, seed not included
  int accepted = 0;      // candidates that entered the domain
  int proposed = 0;      // chain steps
  int invalid = 0;       // simulator failures encountered
  std::uint64_t sim_calls = 0;
};

// Coordinate-wise modified Metropolis chain within an intermediate failure
// domain. The seed must satisfy the membership test.
ChainResult metropolis_chain(const SubsimSample& seed, int steps, double scale,
                             const MembershipTest& membership,
                             std::uint64_t chain_seed);

// Multiplicative update steering the acceptance rate toward the target;
// batch_index counts updates from 1.
double adaptive_proposal_update(double accept_rate, double scale, int batch_index,
                                const SubsimParams& params);

struct SubsimRunConfig {
  SubsimParams params;
  int dim = 0;
  double g_star = 0;
  std::uint64_t master_seed = 1;
  int workers = 0;
};

// Level-complete callback with everything a checkpoint needs: the index of
// the finished level, its full sample set, the adapted proposal scale and the
// accumulated result so far.
using LevelCallback =
    std::function<void(int level, const std::vector<SubsimSample>&, double scale,
                       const SubsetSimResult& partial)>;

SubsetSimResult run_subset_simulation(const Simulator& simulate,
                                      const SubsimRunConfig& cfg,
                                      const LevelCallback& on_level = nullptr);

// Restart from a persisted level: `samples` is the full sample set of level
// `next_level - 1`, scale the adapted proposal scale, `partial` the result
// accumulated over the completed levels. Produces the identical result an
// uninterrupted run would.
struct SubsimCheckpoint {
  int next_level = 0;
  double scale = 0;
  std::vector<SubsimSample> samples;
  SubsetSimResult partial;
};

SubsetSimResult resume_subset_simulation(const Simulator& simulate,
                                         const SubsimRunConfig& cfg,
                                         const SubsimCheckpoint& checkpoint,
                                         const LevelCallback& on_level = nullptr);

}  // namespace awekit
