#pragma once

#include "config.hpp"
#include "features.hpp"
#include "losseval.hpp"
#include "subsim.hpp"

#include <optional>
#include <string>
#include <vector>

namespace awekit {

// Small filesystem helpers shared by the CLI.
void ensure_dir(const std::string& path);
bool file_exists(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------
// Subset-simulation artifacts
// ---------------------------------------------------------------------------
//
// Layout under <campaign>/subsim/<tag>/:
//   result.json      summary (levels, p_f, counts)
//   level_g.json     limit values per level
//   failures.csv     every failure sample: level,g,valid,theta...
//   checkpoint_<k>.json / checkpoint_<k>_samples.csv   per-level restart state

void save_subsim_result(const std::string& dir, const SubsetSimResult& res,
                        const std::string& config_hash, std::uint64_t master_seed);
SubsetSimResult load_subsim_result(const std::string& dir);
std::vector<FailureSample> load_subsim_failures(const std::string& dir);
// Limit values of the direct Monte Carlo level (level 0).
std::vector<double> load_subsim_level0_g(const std::string& dir);

void save_subsim_checkpoint(const std::string& dir, int completed_level,
                            const std::vector<SubsimSample>& samples, double scale,
                            const SubsetSimResult& partial);
int latest_subsim_checkpoint(const std::string& dir);  // -1 when none
SubsimCheckpoint load_subsim_checkpoint(const std::string& dir, int completed_level);

// ---------------------------------------------------------------------------
// Stage cache
// ---------------------------------------------------------------------------

// Content-addressed stage skipping: a stage directory carries a manifest with
// the key of the inputs that produced it.
bool stage_cache_hit(const std::string& stage_dir, const std::string& key);
void stage_cache_store(const std::string& stage_dir, const std::string& key);

// ---------------------------------------------------------------------------
// Synthetic dataset (pipeline self-test mode)
// ---------------------------------------------------------------------------

struct SyntheticSpec {
  int n_majority = 600;
  int n_minority = 30;     // before oversampling
  int informative = 2;
  int noise = 20;
  double separation = 2.2; // class-mean offset per informative feature
  std::uint64_t seed = 7;
};

// Two Gaussian classes; the informative features carry the class offset, the
// noise features are iid standard normal in both classes. Labels use -1 for
// the minority class. Informative features occupy the first schema slots.
FeatureDataset synthetic_dataset(const SyntheticSpec& spec);

}  // namespace awekit
