#include "runlog.hpp"

#include "common.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace awekit {

using nlohmann::json;

const char* outcome_name(RunOutcome o) {
  switch (o) {
    case RunOutcome::Completed: return "completed";
    case RunOutcome::Rupture: return "rupture";
    case RunOutcome::Invalid: return "invalid";
  }
  return "?";
}

RunOutcome outcome_from_name(const std::string& s) {
  if (s == "completed") return RunOutcome::Completed;
  if (s == "rupture") return RunOutcome::Rupture;
  if (s == "invalid") return RunOutcome::Invalid;
  throw std::runtime_error("unknown outcome: " + s);
}

const std::vector<std::string>& runlog_columns() {
  static const std::vector<std::string> cols = {
      "t",          "mode",        "v_w_x_W",    "v_w_y_W",   "v_w_z_W",
      "a_z_tau",    "F_t",         "alpha",      "e_p",       "beta",
      "v_a",        "p_n",         "p_e",        "p_d",       "v_n",
      "v_e",        "v_d",         "aileron_deg", "elevator_deg", "rudder_deg",
      "winch_v",    "winch_accel", "F_t_ground", "F_t_set",   "l_tether",
      "s_star",     "phi_r_deg",   "mu_deg",     "power_w",   "y_hat"};
  return cols;
}

int RunLog::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> RunLog::series(const std::string& name) const {
  int c = column_index(name);
  if (c < 0) throw std::runtime_error("runlog: no column '" + name + "'");
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

double RunLog::duration() const {
  if (rows() == 0) return 0;
  int c = column_index("t");
  return at(rows() - 1, c) - at(0, c);
}

void RunLog::append_row(const std::vector<double>& row) {
  if (row.size() != columns.size())
    throw std::runtime_error("runlog: row width mismatch");
  data.insert(data.end(), row.begin(), row.end());
}

void RunLog::add_event(double t, const std::string& type, const std::string& detail) {
  events.push_back({t, type, detail});
}

bool RunLog::has_event(const std::string& type) const {
  for (const auto& e : events)
    if (e.type == type) return true;
  return false;
}

double RunLog::first_event_time(const std::string& type) const {
  for (const auto& e : events)
    if (e.type == type) return e.t;
  return std::nan("");
}

std::string RunLog::serialize() const {
  json header;
  header["schema"] = "runlog1";
  header["config_hash"] = config_hash;
  header["run_id"] = run_id;
  header["f_s_hz"] = f_s;
  header["outcome"] = outcome_name(outcome);
  header["columns"] = columns;
  header["rows"] = rows();

  std::string out = header.dump();
  out += "\n";
  const std::size_t w = columns.size();
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (c) out += ",";
      out += format_double(data[r * w + c]);
    }
    out += "\n";
  }
  return out;
}

RunLog RunLog::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("runlog: empty input");
  json header = json::parse(line);
  RunLog log;
  log.config_hash = header.value("config_hash", "");
  log.run_id = header.value("run_id", "");
  log.f_s = header.value("f_s_hz", 10.0);
  log.outcome = outcome_from_name(header.value("outcome", "completed"));
  header.at("columns").get_to(log.columns);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(log.columns.size());
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                    : comma - pos);
      row.push_back(std::strtod(tok.c_str(), nullptr));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    log.append_row(row);
  }
  return log;
}

void RunLog::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << serialize();
}

RunLog RunLog::read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

std::string RunLog::serialize_events() const {
  std::string out;
  for (const auto& e : events) {
    json j;
    j["t"] = e.t;
    j["type"] = e.type;
    if (!e.detail.empty()) j["detail"] = e.detail;
    out += j.dump();
    out += "\n";
  }
  return out;
}

}  // namespace awekit
