#include "svm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace awekit {

using nlohmann::json;

Standardizer Standardizer::fit(const MatX& X) {
  Standardizer s;
  const Eigen::Index n = X.rows(), d = X.cols();
  s.mean = X.colwise().mean();
  s.scale.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double var = (X.col(j).array() - s.mean[j]).square().sum() / std::max<Eigen::Index>(n, 1);
    s.scale[j] = std::max(std::sqrt(var), 1e-12);
  }
  return s;
}

VecX Standardizer::apply(const VecX& x) const {
  return (x - mean).cwiseQuotient(scale);
}

MatX Standardizer::apply(const MatX& X) const {
  MatX out = X;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

double SvmModel::decision_standardized(const VecX& phi) const {
  double f = bias;
  for (Eigen::Index j = 0; j < support_vectors.rows(); ++j) {
    double d2 = (phi - support_vectors.row(j).transpose()).squaredNorm();
    f += alpha[j] * labels[j] * std::exp(-d2 / sigma2);
  }
  return f;
}

double SvmModel::decision_selected(const VecX& phi_raw) const {
  return decision_standardized(standardizer.apply(phi_raw));
}

double SvmModel::decision_full(const VecX& full_raw) const {
  VecX sel(static_cast<Eigen::Index>(feature_indices.size()));
  for (std::size_t i = 0; i < feature_indices.size(); ++i) {
    int idx = feature_indices[i];
    if (idx < 0 || idx >= full_raw.size())
      throw std::runtime_error("svm: feature vector does not match the model schema");
    sel[static_cast<Eigen::Index>(i)] = full_raw[idx];
  }
  return decision_selected(sel);
}

std::string SvmModel::serialize() const {
  json j;
  j["schema"] = schema_version;
  j["sigma2"] = sigma2;
  j["C"] = C;
  j["bias"] = bias;
  j["feature_indices"] = feature_indices;
  j["source_tag"] = source_tag;
  j["feature_names"] = feature_names;
  j["labels"] = labels;
  std::vector<double> a(alpha.data(), alpha.data() + alpha.size());
  j["alpha"] = a;
  std::vector<double> mean(standardizer.mean.data(),
                           standardizer.mean.data() + standardizer.mean.size());
  std::vector<double> scale(standardizer.scale.data(),
                            standardizer.scale.data() + standardizer.scale.size());
  j["standardize_mean"] = mean;
  j["standardize_scale"] = scale;
  std::vector<std::vector<double>> sv(support_vectors.rows());
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    sv[i].resize(support_vectors.cols());
    for (Eigen::Index c = 0; c < support_vectors.cols(); ++c)
      sv[i][c] = support_vectors(i, c);
  }
  j["support_vectors"] = sv;
  return j.dump();
}

SvmModel SvmModel::deserialize(const std::string& text) {
  json j = json::parse(text);
  SvmModel m;
  m.schema_version = j.value("schema", "svm1");
  m.source_tag = j.value("source_tag", "");
  if (m.schema_version != "svm1")
    throw std::runtime_error("svm model: unsupported schema " + m.schema_version);
  m.sigma2 = j.at("sigma2").get<double>();
  m.C = j.value("C", 10.0);
  m.bias = j.at("bias").get<double>();
  j.at("feature_indices").get_to(m.feature_indices);
  j.at("feature_names").get_to(m.feature_names);
  j.at("labels").get_to(m.labels);
  std::vector<double> a = j.at("alpha").get<std::vector<double>>();
  m.alpha = Eigen::Map<VecX>(a.data(), static_cast<Eigen::Index>(a.size()));
  std::vector<double> mean = j.at("standardize_mean").get<std::vector<double>>();
  std::vector<double> scale = j.at("standardize_scale").get<std::vector<double>>();
  m.standardizer.mean = Eigen::Map<VecX>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  m.standardizer.scale =
      Eigen::Map<VecX>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  auto sv = j.at("support_vectors").get<std::vector<std::vector<double>>>();
  Eigen::Index rows = static_cast<Eigen::Index>(sv.size());
  Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(sv[0].size())
                               : static_cast<Eigen::Index>(m.feature_indices.size());
  m.support_vectors.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m.support_vectors(i, c) = sv[i][c];
  return m;
}

void SvmModel::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << serialize() << "\n";
}

SvmModel SvmModel::read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

namespace {

// Lazily computed kernel rows; datasets here are small enough to keep every
// touched row.
class KernelCache {
 public:
  KernelCache(const MatX& X, double sigma2) : X_(X), sigma2_(sigma2) {
    rows_.resize(X.rows());
  }
  const VecX& row(Eigen::Index i) {
    if (!rows_[i]) {
      auto r = std::make_unique<VecX>(X_.rows());
      for (Eigen::Index j = 0; j < X_.rows(); ++j)
        (*r)[j] = std::exp(-(X_.row(i) - X_.row(j)).squaredNorm() / sigma2_);
      rows_[i] = std::move(r);
    }
    return *rows_[i];
  }

 private:
  const MatX& X_;
  double sigma2_;
  std::vector<std::unique_ptr<VecX>> rows_;
};

}  // namespace

SvmModel train_svm(const MatX& X, const std::vector<int>& y,
                   const SvmTrainConfig& cfg) {
  const Eigen::Index n = X.rows();
  if (n < 2) throw std::invalid_argument("train_svm: need at least two samples");
  if (static_cast<Eigen::Index>(y.size()) != n)
    throw std::invalid_argument("train_svm: label count mismatch");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw std::invalid_argument("train_svm: labels must be +-1");
  }
  if (!has_pos || !has_neg)
    throw std::invalid_argument("train_svm: both classes must be present");
  if (!(cfg.sigma2 > 0 && cfg.C > 0))
    throw std::invalid_argument("train_svm: sigma2 and C must be > 0");

  KernelCache K(X, cfg.sigma2);
  VecX alpha = VecX::Zero(n);
  // grad of the dual objective 0.5 a'Qa - e'a, Q_ij = y_i y_j K_ij.
  VecX grad = VecX::Constant(n, -1.0);
  const double C = cfg.C;

  long it = 0;
  double m_up = 0, m_low = 0;
  for (;; ++it) {
    if (it >= cfg.max_iterations)
      throw NumericalError(
          "train_svm: no convergence after " + std::to_string(it) +
          " iterations (violation " + std::to_string(m_up - m_low) + ")");

    // Maximal violating pair over G_i = -y_i grad_i.
    int i_up = -1, i_low = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
      double Gk = -y[k] * grad[k];
      bool up = (y[k] == 1 && alpha[k] < C) || (y[k] == -1 && alpha[k] > 0);
      bool low = (y[k] == -1 && alpha[k] < C) || (y[k] == 1 && alpha[k] > 0);
      if (up && Gk > m_up) {
        m_up = Gk;
        i_up = static_cast<int>(k);
      }
      if (low && Gk < m_low) {
        m_low = Gk;
        i_low = static_cast<int>(k);
      }
    }
    if (i_up < 0 || i_low < 0 || m_up - m_low <= cfg.kkt_tol) break;

    const int i = i_up, j = i_low;
    const VecX& Ki = K.row(i);
    const VecX& Kj = K.row(j);
    double curv = std::max(Ki[i] + Kj[j] - 2.0 * Ki[j], 1e-12);
    // Step t moves alpha_i by t*y_i and alpha_j by -t*y_j, preserving the
    // equality constraint.
    double t = (m_up - m_low) / curv;
    double t_lo, t_hi;
    if (y[i] == 1) {
      t_lo = -alpha[i];
      t_hi = C - alpha[i];
    } else {
      t_lo = alpha[i] - C;
      t_hi = alpha[i];
    }
    if (y[j] == 1) {
      t_lo = std::max(t_lo, alpha[j] - C);
      t_hi = std::min(t_hi, alpha[j]);
    } else {
      t_lo = std::max(t_lo, -alpha[j]);
      t_hi = std::min(t_hi, C - alpha[j]);
    }
    t = clamp(t, t_lo, t_hi);
    if (t == 0.0) break;  // numerically stuck at a box corner

    alpha[i] += t * y[i];
    alpha[j] -= t * y[j];
    for (Eigen::Index k = 0; k < n; ++k) grad[k] += y[k] * t * (Ki[k] - Kj[k]);
  }

  double bias = 0.5 * (m_up + m_low);

  SvmModel model;
  model.sigma2 = cfg.sigma2;
  model.C = cfg.C;
  model.bias = bias;
  std::vector<Eigen::Index> sv;
  for (Eigen::Index k = 0; k < n; ++k)
    if (alpha[k] > 0) sv.push_back(k);
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
  model.alpha.resize(static_cast<Eigen::Index>(sv.size()));
  model.labels.resize(sv.size());
  for (std::size_t k = 0; k < sv.size(); ++k) {
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = X.row(sv[k]);
    model.alpha[static_cast<Eigen::Index>(k)] = alpha[sv[k]];
    model.labels[k] = y[sv[k]];
  }
  // Identity transform by default; pipeline callers overwrite it.
  model.standardizer.mean = VecX::Zero(X.cols());
  model.standardizer.scale = VecX::Ones(X.cols());
  return model;
}

double svm_kkt_violation(const MatX& X, const std::vector<int>& y,
                         const SvmModel& model, double C) {
  const Eigen::Index n = X.rows();
  double m_up = -std::numeric_limits<double>::infinity();
  double m_low = std::numeric_limits<double>::infinity();
  // Reconstruct alpha on the training set: zero except at support vectors.
  for (Eigen::Index k = 0; k < n; ++k) {
    double f = model.decision_standardized(X.row(k).transpose()) - model.bias;
    double grad = y[k] * f - 1.0;
    double a = 0;
    for (Eigen::Index s = 0; s < model.support_vectors.rows(); ++s) {
      if ((model.support_vectors.row(s) - X.row(k)).squaredNorm() < 1e-24 &&
          model.labels[s] == y[k]) {
        a = model.alpha[s];
        break;
      }
    }
    double G = -y[k] * grad;
    bool up = (y[k] == 1 && a < C) || (y[k] == -1 && a > 0);
    bool low = (y[k] == -1 && a < C) || (y[k] == 1 && a > 0);
    if (up) m_up = std::max(m_up, G);
    if (low) m_low = std::min(m_low, G);
  }
  return m_up - m_low;
}

}  // namespace awekit
