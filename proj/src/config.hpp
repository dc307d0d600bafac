#pragma once

#include "common.hpp"
#include "guidance.hpp"
#include "plant.hpp"
#include "windfield.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace awekit {

struct SimParams {
  double t_sim = 300.0;   // s
  double f_int = 200.0;   // Hz, integrator
  double f_s = 10.0;      // Hz, controller / logging / noise

  int steps_per_tick() const { return static_cast<int>(f_int / f_s + 0.5); }
  void validate() const;
};

struct LimitParams {
  std::string name = "tether_force_max";
  double g_star = 2000.0;        // N
  double invalid_penalty = 500.0;

  void validate() const;
};

struct SubsimParams {
  int n_samples = 1000;
  double p0 = 0.1;
  int max_levels = 10;
  double proposal_scale = 1.0;
  double accept_target = 0.44;
  double scale_min = 1e-3;
  double scale_max = 1.0;

  int seeds_per_level() const { return static_cast<int>(n_samples * p0 + 0.5); }
  void validate() const;
};

struct SegmentationParams {
  double window_s = 5.0;
  double stride_s = 0.5;
  double reaction_s = 0.2;
  std::vector<std::string> signals = {"v_w_x_W", "v_w_y_W", "v_w_z_W",
                                      "a_z_tau", "F_t", "alpha", "e_p"};

  void validate() const;
};

struct TrainingParams {
  int smote_k = 5;
  double smote_ratio = 1.0;      // minority : majority after oversampling
  int folds = 10;
  std::vector<double> sigma2_rel = {0.5, 1.0, 2.0};  // times feature count
  std::vector<double> c_grid = {10.0};
  double kkt_tol = 1e-3;
  int max_iterations = 2000000;
  double holdout_fraction = 0.3;
  double stop_rel_improvement = 1e-4;

  void validate() const;
};

struct LossParams {
  double p_em_kw = 0.4;
  double p_pc_kw = 3.9;
  double t_pc_min = 2.5;
  double e_misc_kwh = 0.0;
  std::vector<double> downtime_min_grid = {60, 1440, 10080, 43200};

  void validate() const;
};

struct CampaignConfig {
  int schema_version = 1;
  std::uint64_t seed = 1;
  std::string output_dir = "campaign";
  int simulate_runs = 100;

  SimParams sim;
  ShearProfile shear;
  DrydenParams dryden;
  PlantParams plant;
  GuidanceConfig guidance;
  LimitParams limit;
  SubsimParams subsim;
  SegmentationParams segmentation;
  TrainingParams training;
  LossParams loss;

  void validate() const;

  nlohmann::json to_json() const;
  static CampaignConfig from_json(const nlohmann::json& j);
  static CampaignConfig load_file(const std::string& path);
  void save_file(const std::string& path) const;

  // Canonical serialized form; the hash of it is embedded in every artifact.
  std::string canonical() const;
  std::string hash() const;
};

}  // namespace awekit
