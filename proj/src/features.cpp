#include "features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace awekit {

SegmentationConfig SegmentationConfig::from_params(const SegmentationParams& p,
                                                   double f_s) {
  SegmentationConfig c;
  c.window_s = p.window_s;
  c.stride_s = p.stride_s;
  c.reaction_s = p.reaction_s;
  c.signals = p.signals;
  c.f_s = f_s;
  return c;
}

void SegmentationConfig::validate() const {
  if (!(window_s > 0 && stride_s > 0 && stride_s <= window_s && reaction_s >= 0))
    throw ConfigError("segmentation: invalid window/stride/reaction");
  if (!(f_s > 0)) throw ConfigError("segmentation: f_s must be > 0");
  if (signals.empty()) throw ConfigError("segmentation: no signals");
}

std::vector<SignalSegment> segment_and_label(const RunLog& log,
                                             const SegmentationConfig& cfg,
                                             SegmentationStats* stats) {
  cfg.validate();
  SegmentationStats local;
  std::vector<SignalSegment> out;
  const int W = cfg.window_samples();
  const int stride = cfg.stride_samples();
  const int n = static_cast<int>(log.rows());
  if (n < W) {
    if (log.outcome == RunOutcome::Rupture) local.upset_window_missing = true;
    if (stats) *stats = local;
    return out;
  }

  std::vector<int> sig_cols;
  for (const auto& name : cfg.signals) {
    int c = log.column_index(name);
    if (c < 0) throw std::runtime_error("segment_and_label: missing signal " + name);
    sig_cols.push_back(c);
  }
  const int t_col = log.column_index("t");

  auto make_segment = [&](int end_idx, int label) {
    SignalSegment seg;
    seg.values.resize(W, static_cast<Eigen::Index>(sig_cols.size()));
    for (int r = 0; r < W; ++r)
      for (std::size_t c = 0; c < sig_cols.size(); ++c)
        seg.values(r, static_cast<Eigen::Index>(c)) =
            log.at(end_idx - W + 1 + r, sig_cols[c]);
    seg.label = label;
    seg.run_id = log.run_id;
    seg.end_time = log.at(end_idx, t_col);
    return seg;
  };

  bool upset_run = log.outcome == RunOutcome::Rupture;
  int first_end = n - 1;
  int first_label = 1;
  if (upset_run) {
    // Anchor on the first upset sample, shifted back by the reaction time.
    double t_upset = log.first_event_time("rupture");
    int upset_idx = n - 1;
    for (int r = 0; r < n; ++r) {
      if (log.at(r, t_col) >= t_upset - 1e-9) {
        upset_idx = r;
        break;
      }
    }
    first_end = upset_idx - cfg.reaction_samples();
    first_label = -1;
    if (first_end - W + 1 < 0) {
      local.upset_window_missing = true;
      if (stats) *stats = local;
      return out;
    }
  }

  for (int end = first_end, label = first_label; end - W + 1 >= 0;
       end -= stride, label = 1) {
    out.push_back(make_segment(end, label));
    if (label == -1)
      ++local.upset_segments;
    else
      ++local.nominal_segments;
  }
  if (stats) *stats = local;
  return out;
}

double time_reversal_stat(const std::vector<double>& x, double tau_s, double f_s) {
  int lag = static_cast<int>(std::lround(tau_s * f_s));
  if (lag < 1) throw std::invalid_argument("time_reversal_stat: tau below sample period");
  if (std::abs(tau_s * f_s - lag) > 1e-9)
    throw std::invalid_argument("time_reversal_stat: tau not a multiple of 1/f_s");
  int n = static_cast<int>(x.size());
  if (n <= lag + 1) throw std::invalid_argument("time_reversal_stat: signal too short");

  double first = x[lag] - x[0];
  bool constant_increment = true;
  double m2 = 0, m3 = 0;
  int count = 0;
  for (int t = lag; t < n; ++t) {
    double d = x[t] - x[t - lag];
    if (d != first) constant_increment = false;
    m2 += d * d;
    m3 += d * d * d;
    ++count;
  }
  if (constant_increment) return first > 0 ? 1.0 : (first < 0 ? -1.0 : 0.0);
  m2 /= count;
  m3 /= count;
  if (m2 <= 1e-24) return 0.0;
  double s = std::sqrt(m2);
  return m3 / (s * s * s);
}

const std::vector<std::string>& per_signal_feature_names() {
  static const std::vector<std::string> names = {
      "mean",        "median",      "rms",          "variance",
      "max",         "min",         "peak_to_peak", "skewness",
      "kurtosis",    "crest_factor", "mad",          "cumsum_range",
      "trev_tau0.5", "trev_tau1.0", "max_slope",    "spec_median_amp",
      "spec_max_amp", "spec_max_amp_above_1hz"};
  return names;
}

std::vector<std::string> feature_schema(const std::vector<std::string>& signals) {
  std::vector<std::string> out;
  for (const auto& s : signals)
    for (const auto& f : per_signal_feature_names()) out.push_back(s + "." + f);
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// One-sided amplitude spectrum of the mean-removed window (plain DFT; windows
// are short).
std::vector<double> amplitude_spectrum(const std::vector<double>& x) {
  int n = static_cast<int>(x.size());
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  int half = n / 2;
  std::vector<double> amps;
  amps.reserve(half);
  for (int k = 1; k <= half; ++k) {
    double re = 0, im = 0;
    for (int t = 0; t < n; ++t) {
      double ang = -2.0 * kPi * k * t / n;
      double v = x[t] - mean;
      re += v * std::cos(ang);
      im += v * std::sin(ang);
    }
    amps.push_back(2.0 * std::hypot(re, im) / n);
  }
  return amps;
}

}  // namespace

std::vector<double> signal_features(const std::vector<double>& x, double f_s) {
  const int n = static_cast<int>(x.size());
  if (n < 8) throw std::invalid_argument("signal_features: need >= 8 samples");

  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;

  double m2 = 0, m3 = 0, m4 = 0, sumsq = 0, maxv = x[0], minv = x[0], maxabs = 0;
  for (double v : x) {
    double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    sumsq += v * v;
    maxv = std::max(maxv, v);
    minv = std::min(minv, v);
    maxabs = std::max(maxabs, std::abs(v));
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  double rms = std::sqrt(sumsq / n);
  double variance = m2;
  double skewness = m2 > 1e-24 ? m3 / std::pow(m2, 1.5) : 0.0;
  double kurtosis = m2 > 1e-24 ? m4 / (m2 * m2) : 0.0;
  double crest = (maxabs < 1e-12 && rms < 1e-12)
                     ? 1.0
                     : maxabs / std::max(rms, 1e-12);

  double med = median_of(x);
  std::vector<double> absdev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) absdev[i] = std::abs(x[i] - med);
  double mad = median_of(absdev);

  double csum = 0, cmax = -std::numeric_limits<double>::infinity(),
         cmin = std::numeric_limits<double>::infinity();
  for (double v : x) {
    csum += v;
    cmax = std::max(cmax, csum);
    cmin = std::min(cmin, csum);
  }
  double cumsum_range = cmax - cmin;

  double max_slope = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) max_slope = std::max(max_slope, (x[i] - x[i - 1]) * f_s);

  auto trev_or_zero = [&](double tau) {
    int lag = static_cast<int>(std::lround(tau * f_s));
    return n > lag + 1 ? time_reversal_stat(x, tau, f_s) : 0.0;
  };
  double trev05 = trev_or_zero(0.5);
  double trev10 = trev_or_zero(1.0);

  std::vector<double> amps = amplitude_spectrum(x);
  double spec_median = amps.empty() ? 0.0 : median_of(amps);
  double spec_max = 0.0;
  for (double a : amps) spec_max = std::max(spec_max, a);
  double spec_max_above = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    double freq = (k + 1) * f_s / n;
    if (freq > 1.0) spec_max_above = std::max(spec_max_above, amps[k]);
  }

  return {mean,     med,      rms,          variance,    maxv,     minv,
          maxv - minv, skewness, kurtosis,  crest,       mad,      cumsum_range,
          trev05,   trev10,   max_slope,    spec_median, spec_max, spec_max_above};
}

VecX extract_features(const SignalSegment& segment, double f_s) {
  const Eigen::Index n_sig = segment.values.cols();
  const std::size_t per = per_signal_feature_names().size();
  VecX out(static_cast<Eigen::Index>(per) * n_sig);
  std::vector<double> x(segment.values.rows());
  for (Eigen::Index c = 0; c < n_sig; ++c) {
    for (Eigen::Index r = 0; r < segment.values.rows(); ++r) x[r] = segment.values(r, c);
    std::vector<double> f = signal_features(x, f_s);
    for (std::size_t i = 0; i < per; ++i)
      out[c * static_cast<Eigen::Index>(per) + static_cast<Eigen::Index>(i)] = f[i];
  }
  return out;
}

void FeatureDataset::validate() const {
  if (X.rows() != static_cast<Eigen::Index>(y.size()))
    throw std::runtime_error("feature dataset: label count mismatch");
  if (X.cols() != static_cast<Eigen::Index>(feature_names.size()))
    throw std::runtime_error("feature dataset: feature name count mismatch");
  if (!provenance.empty() && provenance.size() != y.size())
    throw std::runtime_error("feature dataset: provenance count mismatch");
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      if (!std::isfinite(X(i, j)))
        throw std::runtime_error("feature dataset: non-finite entry");
}

FeatureDataset build_dataset(const std::vector<SignalSegment>& segments,
                             const SegmentationConfig& cfg) {
  FeatureDataset ds;
  ds.feature_names = feature_schema(cfg.signals);
  ds.X.resize(static_cast<Eigen::Index>(segments.size()),
              static_cast<Eigen::Index>(ds.feature_names.size()));
  ds.y.resize(segments.size());
  ds.provenance.assign(segments.size(), "real");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    ds.X.row(static_cast<Eigen::Index>(i)) = extract_features(segments[i], cfg.f_s);
    ds.y[i] = segments[i].label;
  }
  ds.validate();
  return ds;
}

void write_features_csv(const std::string& path, const FeatureDataset& ds) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "# schema=" << ds.schema_version << "\n";
  f << "label,provenance";
  for (const auto& name : ds.feature_names) f << "," << name;
  f << "\n";
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    f << ds.y[i] << "," << (ds.provenance.empty() ? "real" : ds.provenance[i]);
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j)
      f << "," << format_double(ds.X(i, j));
    f << "\n";
  }
}

FeatureDataset read_features_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  FeatureDataset ds;
  std::string line;
  if (!std::getline(f, line) || line.rfind("# schema=", 0) != 0)
    throw std::runtime_error(path + ": missing schema line");
  ds.schema_version = line.substr(9);
  if (!std::getline(f, line)) throw std::runtime_error(path + ": missing header");
  {
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');  // label
    std::getline(ss, tok, ',');  // provenance
    while (std::getline(ss, tok, ',')) ds.feature_names.push_back(tok);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    ds.y.push_back(std::stoi(tok));
    std::getline(ss, tok, ',');
    ds.provenance.push_back(tok);
    std::vector<double> row;
    while (std::getline(ss, tok, ',')) row.push_back(std::strtod(tok.c_str(), nullptr));
    if (row.size() != ds.feature_names.size())
      throw std::runtime_error(path + ": row width mismatch");
    rows.push_back(std::move(row));
  }
  ds.X.resize(static_cast<Eigen::Index>(rows.size()),
              static_cast<Eigen::Index>(ds.feature_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  ds.validate();
  return ds;
}

}  // namespace awekit
