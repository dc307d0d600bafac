#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace awekit {

enum class RunOutcome { Completed, Rupture, Invalid };

const char* outcome_name(RunOutcome o);
RunOutcome outcome_from_name(const std::string& s);

struct RunEvent {
  double t = 0;
  std::string type;
  std::string detail;
};

// Time-sampled record of one pumping cycle at the controller rate, plus the
// event stream and terminal outcome.
struct RunLog {
  std::vector<std::string> columns;
  std::vector<double> data;  // row-major, stride = columns.size()
  std::vector<RunEvent> events;
  RunOutcome outcome = RunOutcome::Completed;
  double f_s = 10.0;
  std::string config_hash;
  std::string run_id;

  std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
  int column_index(const std::string& name) const;  // -1 if absent
  double at(std::size_t row, int col) const { return data[row * columns.size() + col]; }
  std::vector<double> series(const std::string& name) const;
  double duration() const;

  void append_row(const std::vector<double>& row);
  void add_event(double t, const std::string& type, const std::string& detail = "");
  bool has_event(const std::string& type) const;
  double first_event_time(const std::string& type) const;  // NaN if absent

  // Header line (JSON) followed by one CSV row per sample.
  std::string serialize() const;
  static RunLog deserialize(const std::string& text);
  void write_file(const std::string& path) const;
  static RunLog read_file(const std::string& path);

  // Events as JSON lines, one per event.
  std::string serialize_events() const;
};

// Column names logged by the closed loop, in order.
const std::vector<std::string>& runlog_columns();

}  // namespace awekit
