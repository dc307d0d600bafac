#pragma once

#include <string>
#include <vector>

namespace awekit {

struct LossModelParams {
  double p_f = 0;              // per-cycle upset probability
  double fn_conditional = 1.0; // Pr(y_hat = 1 | y = -1)
  double fp_per_cycle = 0;     // Pr(y_hat = -1, y = 1)
  double p_em_kw = 0.4;        // emergency-maneuver power loss
  double p_pc_kw = 3.9;        // average pumping-cycle power
  double t_pc_min = 2.5;       // average cycle duration
  double downtime_min = 10080; // non-operational time after a missed upset
  double e_misc_kwh = 0;       // additional per-upset losses
};

// Poisson rate of missed upsets per cycle: (n_FN / (n_FN + n_TP)) * p_f.
// The replay counts must come from a subset-simulation run independent of
// the one used for training.
double fn_rate(long n_fn, long n_tp, double p_f);

struct FpEstimate {
  double prob = 0;
  bool conservative_warning = false;  // threshold below the sample median
};

// False-positive probability per cycle for a fixed threshold, from the
// empirical CDF of per-run maximum limit values: 1 - F(q*) - p_f, clamped
// at 0.
FpEstimate fp_prob_threshold(const std::vector<double>& max_g_values, double q_star,
                             double p_f);

// Normalized expected energy loss per pumping cycle. A vanishing
// false-negative rate maps to the analytic large-horizon limit
// fp_per_cycle * P_em / P_pc.
double loss_rate(const LossModelParams& params);

struct PredictorEntry {
  std::string name;
  LossModelParams params;  // downtime_min ignored; taken from the grid
};

struct LossTable {
  std::vector<double> downtime_min;
  std::vector<std::string> names;                 // entry order
  std::vector<std::vector<double>> loss;          // [entry][downtime]
  std::vector<std::vector<int>> ranking;          // [downtime] -> entry indices, best first
};

// Loss rate per predictor per downtime value, ranked ascending at each
// downtime (stable tie-break by name).
LossTable rank_predictors(const std::vector<PredictorEntry>& entries,
                          const std::vector<double>& downtime_min_grid);

std::string loss_table_csv(const LossTable& table);

}  // namespace awekit
