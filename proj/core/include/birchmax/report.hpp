#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "birchmax/errors.hpp"

namespace birchmax::report {

// Flat key=value configuration. Defaults are fixed here; a config file and
// then CLI overrides may replace values. Unknown keys are rejected so typos
// fail loudly. The resolved table is echoed into every output artifact.
class ExperimentConfig {
 public:
  static ExperimentConfig defaults();

  void load_file(const std::string& path);           // '#' comments, key = value
  void set(const std::string& key, const std::string& value);

  const std::string& str(const std::string& key) const;
  long long i64(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  double real(const std::string& key) const;
  std::vector<long long> i64_list(const std::string& key) const;  // comma separated

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Number formatting used by every artifact: 12 significant digits.
std::string format_real(double v);
std::string format_int(long long v);

enum class CellType { Integer, Real, Text };

struct Column {
  std::string name;
  CellType type = CellType::Real;
};

// One rectangular result table plus named summary scalars; cells are stored
// preformatted so CSV and JSON emit byte-identical numerics.
struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<std::string>& cells);
};

struct Report {
  std::string preset;
  std::map<std::string, std::string> config_echo;
  Table table;
  std::vector<std::pair<std::string, std::string>> summary;  // formatted values
  std::vector<std::string> summary_types;                    // "int"/"real"/"text", aligned
  bool pass = true;
  std::vector<std::string> failures;

  void add_summary_real(const std::string& key, double v);
  void add_summary_int(const std::string& key, long long v);
  void add_summary_text(const std::string& key, const std::string& v);
  void fail(const std::string& reason);
};

void write_csv(const Report& report, const std::string& path);
void write_json(const Report& report, const std::string& path);

struct PresetOutcome {
  Report report;
  std::string csv_path;
  std::string json_path;
};

const std::vector<std::string>& preset_names();

// Runs one named preset and writes <out_dir>/<preset>.csv and .json.
// Throws UnknownPreset / ConfigInvalid / module errors.
PresetOutcome run_preset(const std::string& name, const ExperimentConfig& config,
                         const std::string& out_dir);

// Exit-code mapping shared by the CLI: 0 pass, 2 invariant violation,
// 3 budget, 4 config/io.
int exit_code_for(const Error& e);

}  // namespace birchmax::report
