#include "losseval.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace awekit {

double fn_rate(long n_fn, long n_tp, double p_f) {
  if (n_fn < 0 || n_tp < 0) throw std::invalid_argument("fn_rate: negative counts");
  if (n_fn + n_tp == 0) throw std::invalid_argument("fn_rate: empty replay set");
  if (!(p_f >= 0 && p_f <= 1)) throw std::invalid_argument("fn_rate: p_f out of [0,1]");
  return static_cast<double>(n_fn) / static_cast<double>(n_fn + n_tp) * p_f;
}

FpEstimate fp_prob_threshold(const std::vector<double>& max_g_values, double q_star,
                             double p_f) {
  if (max_g_values.size() < 1000)
    throw std::invalid_argument("fp_prob_threshold: need >= 1000 samples");
  std::vector<double> sorted = max_g_values;
  std::sort(sorted.begin(), sorted.end());

  FpEstimate out;
  double median = sorted[sorted.size() / 2];
  out.conservative_warning = q_star < median;

  // Empirical CDF at q*.
  auto it = std::upper_bound(sorted.begin(), sorted.end(), q_star);
  double F = static_cast<double>(it - sorted.begin()) / sorted.size();
  out.prob = std::max(0.0, 1.0 - F - p_f);
  return out;
}

double loss_rate(const LossModelParams& p) {
  if (!(std::isfinite(p.p_f) && std::isfinite(p.fn_conditional) &&
        std::isfinite(p.fp_per_cycle) && std::isfinite(p.downtime_min)))
    throw std::invalid_argument("loss_rate: non-finite inputs");
  if (p.fn_conditional < 0 || p.fp_per_cycle < 0 || p.p_f < 0)
    throw std::invalid_argument("loss_rate: negative probabilities");

  double e_pc_kwh = p.p_pc_kw * p.t_pc_min / 60.0;
  double lambda_fn = p.fn_conditional * p.p_f;
  double n_mpc = p.downtime_min / p.t_pc_min;
  if (lambda_fn <= 0) {
    // Limit of infinitely many cycles between missed upsets.
    return p.fp_per_cycle * p.p_em_kw / p.p_pc_kw;
  }
  double n_pc = 1.0 / lambda_fn;
  double n_fp = p.fp_per_cycle * n_pc;
  return (n_fp * p.p_em_kw / p.p_pc_kw + n_mpc + p.e_misc_kwh / e_pc_kwh) /
         (n_pc + n_mpc);
}

LossTable rank_predictors(const std::vector<PredictorEntry>& entries,
                          const std::vector<double>& downtime_min_grid) {
  LossTable table;
  table.downtime_min = downtime_min_grid;
  for (const auto& e : entries) table.names.push_back(e.name);
  table.loss.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (double dt : downtime_min_grid) {
      LossModelParams p = entries[i].params;
      p.downtime_min = dt;
      table.loss[i].push_back(loss_rate(p));
    }
  }
  table.ranking.resize(downtime_min_grid.size());
  for (std::size_t d = 0; d < downtime_min_grid.size(); ++d) {
    std::vector<int> order(entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (table.loss[a][d] != table.loss[b][d]) return table.loss[a][d] < table.loss[b][d];
      return table.names[a] < table.names[b];
    });
    table.ranking[d] = order;
  }
  return table;
}

std::string loss_table_csv(const LossTable& table) {
  std::string out = "predictor";
  for (double dt : table.downtime_min) out += ",downtime_min_" + format_double(dt);
  out += "\n";
  for (std::size_t i = 0; i < table.names.size(); ++i) {
    out += table.names[i];
    for (std::size_t d = 0; d < table.downtime_min.size(); ++d)
      out += "," + format_double(table.loss[i][d]);
    out += "\n";
  }
  out += "\n# ranking (best first)\n";
  for (std::size_t d = 0; d < table.downtime_min.size(); ++d) {
    out += "rank_at_" + format_double(table.downtime_min[d]);
    for (int idx : table.ranking[d]) out += "," + table.names[idx];
    out += "\n";
  }
  return out;
}

}  // namespace awekit
