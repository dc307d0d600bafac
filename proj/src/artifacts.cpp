#include "artifacts.hpp"

#include "rng.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace awekit {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const std::string& path) { fs::create_directories(path); }

bool file_exists(const std::string& path) { return fs::exists(path); }

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

// ---------------------------------------------------------------------------
// Subset-simulation artifacts
// ---------------------------------------------------------------------------

namespace {

json result_to_json(const SubsetSimResult& res) {
  json j;
  j["m_s"] = res.m_s;
  j["n_f"] = res.n_f;
  j["p_f"] = res.p_f;
  j["p_f_valid"] = res.p_f_valid;
  j["invalid_total"] = res.invalid_total;
  j["sim_calls"] = res.sim_calls;
  j["converged"] = res.converged;
  j["degenerate"] = res.degenerate;
  j["note"] = res.note;
  json levels = json::array();
  for (const auto& l : res.levels) {
    levels.push_back({{"threshold", l.threshold},
                      {"accept_rate", l.accept_rate},
                      {"scale", l.scale},
                      {"n_failure", l.n_failure},
                      {"n_invalid", l.n_invalid}});
  }
  j["levels"] = levels;
  return j;
}

SubsetSimResult result_from_json(const json& j) {
  SubsetSimResult res;
  res.m_s = j.value("m_s", 0);
  res.n_f = j.value("n_f", 0);
  res.p_f = j.value("p_f", 0.0);
  res.p_f_valid = j.value("p_f_valid", 0.0);
  res.invalid_total = j.value("invalid_total", 0);
  res.sim_calls = j.value("sim_calls", 0ULL);
  res.converged = j.value("converged", false);
  res.degenerate = j.value("degenerate", false);
  res.note = j.value("note", "");
  for (const auto& l : j.at("levels")) {
    LevelSummary s;
    s.threshold = l.value("threshold", 0.0);
    s.accept_rate = l.value("accept_rate", 0.0);
    s.scale = l.value("scale", 0.0);
    s.n_failure = l.value("n_failure", 0);
    s.n_invalid = l.value("n_invalid", 0);
    res.levels.push_back(s);
  }
  return res;
}

std::string failures_to_csv(const std::vector<FailureSample>& failures) {
  std::string out = "level,g,valid,theta...\n";
  for (const auto& f : failures) {
    out += std::to_string(f.level);
    out += ",";
    out += format_double(f.g);
    out += ",";
    out += f.valid ? "1" : "0";
    for (Eigen::Index k = 0; k < f.theta.size(); ++k) {
      out += ",";
      out += format_double(f.theta[k]);
    }
    out += "\n";
  }
  return out;
}

std::vector<FailureSample> failures_from_csv(const std::string& text) {
  std::vector<FailureSample> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    FailureSample f;
    std::size_t pos = 0;
    auto next = [&]() {
      std::size_t comma = line.find(',', pos);
      std::string tok = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      pos = comma == std::string::npos ? line.size() + 1 : comma + 1;
      return tok;
    };
    f.level = std::stoi(next());
    f.g = std::strtod(next().c_str(), nullptr);
    f.valid = next() == "1";
    std::vector<double> theta;
    while (pos <= line.size()) theta.push_back(std::strtod(next().c_str(), nullptr));
    f.theta = Eigen::Map<VecX>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    out.push_back(std::move(f));
  }
  return out;
}

std::string samples_to_csv(const std::vector<SubsimSample>& samples) {
  std::string out = "g,valid,theta...\n";
  for (const auto& s : samples) {
    out += format_double(s.g);
    out += ",";
    out += s.valid ? "1" : "0";
    for (Eigen::Index k = 0; k < s.theta.size(); ++k) {
      out += ",";
      out += format_double(s.theta[k]);
    }
    out += "\n";
  }
  return out;
}

std::vector<SubsimSample> samples_from_csv(const std::string& text) {
  std::vector<SubsimSample> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SubsimSample s;
    std::size_t pos = 0;
    auto next = [&]() {
      std::size_t comma = line.find(',', pos);
      std::string tok = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      pos = comma == std::string::npos ? line.size() + 1 : comma + 1;
      return tok;
    };
    s.g = std::strtod(next().c_str(), nullptr);
    s.valid = next() == "1";
    std::vector<double> theta;
    while (pos <= line.size()) theta.push_back(std::strtod(next().c_str(), nullptr));
    s.theta = Eigen::Map<VecX>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

void save_subsim_result(const std::string& dir, const SubsetSimResult& res,
                        const std::string& config_hash, std::uint64_t master_seed) {
  ensure_dir(dir);
  json j = result_to_json(res);
  j["config_hash"] = config_hash;
  j["master_seed"] = master_seed;
  write_text_file(dir + "/result.json", j.dump(2) + "\n");

  json lg = json::array();
  for (const auto& level : res.level_g) lg.push_back(level);
  write_text_file(dir + "/level_g.json", json({{"level_g", lg}}).dump() + "\n");

  write_text_file(dir + "/failures.csv", failures_to_csv(res.failures));
}

SubsetSimResult load_subsim_result(const std::string& dir) {
  SubsetSimResult res = result_from_json(json::parse(read_text_file(dir + "/result.json")));
  if (file_exists(dir + "/level_g.json")) {
    json lg = json::parse(read_text_file(dir + "/level_g.json"));
    for (const auto& level : lg.at("level_g"))
      res.level_g.push_back(level.get<std::vector<double>>());
  }
  if (file_exists(dir + "/failures.csv"))
    res.failures = failures_from_csv(read_text_file(dir + "/failures.csv"));
  return res;
}

std::vector<FailureSample> load_subsim_failures(const std::string& dir) {
  return failures_from_csv(read_text_file(dir + "/failures.csv"));
}

std::vector<double> load_subsim_level0_g(const std::string& dir) {
  json lg = json::parse(read_text_file(dir + "/level_g.json"));
  const auto& arr = lg.at("level_g");
  if (arr.empty()) throw std::runtime_error(dir + ": no levels recorded");
  return arr[0].get<std::vector<double>>();
}

void save_subsim_checkpoint(const std::string& dir, int completed_level,
                            const std::vector<SubsimSample>& samples, double scale,
                            const SubsetSimResult& partial) {
  ensure_dir(dir);
  std::string base = dir + "/checkpoint_" + std::to_string(completed_level);
  json j;
  j["completed_level"] = completed_level;
  j["scale"] = scale;
  j["partial"] = result_to_json(partial);
  json lg = json::array();
  for (const auto& level : partial.level_g) lg.push_back(level);
  j["level_g"] = lg;
  write_text_file(base + ".json", j.dump() + "\n");
  write_text_file(base + "_samples.csv", samples_to_csv(samples));
  write_text_file(base + "_failures.csv", failures_to_csv(partial.failures));
}

int latest_subsim_checkpoint(const std::string& dir) {
  int best = -1;
  if (!fs::exists(dir)) return best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("checkpoint_", 0) == 0 && name.size() > 16 &&
        name.substr(name.size() - 5) == ".json") {
      int level = std::atoi(name.substr(11, name.size() - 16).c_str());
      best = std::max(best, level);
    }
  }
  return best;
}

SubsimCheckpoint load_subsim_checkpoint(const std::string& dir, int completed_level) {
  std::string base = dir + "/checkpoint_" + std::to_string(completed_level);
  json j = json::parse(read_text_file(base + ".json"));
  SubsimCheckpoint cp;
  cp.next_level = j.at("completed_level").get<int>() + 1;
  cp.scale = j.at("scale").get<double>();
  cp.partial = result_from_json(j.at("partial"));
  for (const auto& level : j.at("level_g"))
    cp.partial.level_g.push_back(level.get<std::vector<double>>());
  cp.partial.failures = failures_from_csv(read_text_file(base + "_failures.csv"));
  cp.samples = samples_from_csv(read_text_file(base + "_samples.csv"));
  return cp;
}

// ---------------------------------------------------------------------------
// Stage cache
// ---------------------------------------------------------------------------

bool stage_cache_hit(const std::string& stage_dir, const std::string& key) {
  std::string manifest = stage_dir + "/manifest.json";
  if (!file_exists(manifest)) return false;
  try {
    json j = json::parse(read_text_file(manifest));
    return j.value("key", "") == key;
  } catch (...) {
    return false;
  }
}

void stage_cache_store(const std::string& stage_dir, const std::string& key) {
  ensure_dir(stage_dir);
  write_text_file(stage_dir + "/manifest.json", json({{"key", key}}).dump() + "\n");
}

// ---------------------------------------------------------------------------
// Synthetic dataset
// ---------------------------------------------------------------------------

FeatureDataset synthetic_dataset(const SyntheticSpec& spec) {
  FeatureDataset ds;
  const int d = spec.informative + spec.noise;
  for (int i = 0; i < spec.informative; ++i)
    ds.feature_names.push_back("informative_" + std::to_string(i));
  for (int i = 0; i < spec.noise; ++i)
    ds.feature_names.push_back("noise_" + std::to_string(i));

  const int n = spec.n_majority + spec.n_minority;
  ds.X.resize(n, d);
  ds.y.resize(n);
  ds.provenance.assign(n, "real");
  Rng rng(spec.seed);
  for (int i = 0; i < n; ++i) {
    bool minority = i >= spec.n_majority;
    ds.y[i] = minority ? -1 : 1;
    double offset = minority ? spec.separation : 0.0;
    for (int j = 0; j < d; ++j) {
      double base = rng.normal();
      ds.X(i, j) = j < spec.informative ? base + offset : base;
    }
  }
  ds.validate();
  return ds;
}

}  // namespace awekit
