#include "birchmax/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace birchmax::report {

namespace {

const std::map<std::string, std::string>& default_entries() {
  static const std::map<std::string, std::string> defaults = {
      {"form", "x1^2+x2^2+x3^2-x4^2-x5^2"},
      {"form2", "x1*x2"},
      {"seed", "20240817"},
      {"budget_point_visits", "1000000000"},
      {"budget_sum_terms", "100000000"},
      {"budget_quad_cells", "250000000"},
      // count
      {"radii", "8,16,32,64"},
      {"count_slope_min", "2.7"},
      {"count_slope_max", "3.3"},
      {"count_ratio_max", "16"},
      {"count_ratio_kmax", "5"},
      // expsum decay
      {"primes_max", "200"},
      {"expsum_slope_min", "-2.7"},
      {"expsum_slope_max", "-2.3"},
      {"expsum_coord_samples", "2"},
      {"expsum_control", "1"},
      {"gauss_slope_min", "-0.55"},
      {"gauss_slope_max", "-0.45"},
      // structural vanishing sweep
      {"lcm_max", "60"},
      {"lemma2_samples", "200"},
      {"lemma2_tol", "1e-10"},
      // divisor regrouping identity
      {"lemma4_q_max", "30"},
      {"lemma4_trials", "5"},
      {"lemma4_tol", "1e-8"},
      // normalized solution counts
      {"q_max", "200"},
      {"lemma14_ratio_max", "4.0"},
      {"mult_check_max", "60"},
      // multiplier approximation
      {"mult_radii", "8,16,32,64"},
      {"grid_points", "500"},
      {"l_max", "3"},
      {"series_q_max", "64"},
      {"dsig_tol", "2e-3"},
      {"mult_zero_tol", "0.1"},
      {"mult_final_ratio", "0.5"},
      // decomposition identity
      {"decomp_j_list", "1,2"},
      {"decomp_samples", "20"},
      {"decomp_radius", "16"},
      {"decomp_tol", "1e-8"},
      // oscillatory decay
      {"osc_magnitudes", "4,8,16,32"},
      {"osc_h", "0.05"},
      {"osc_tol", "1e-4"},
      {"osc_slope_max", "-1.3"},
      // point-mass experiment
      {"ionescu_k_max", "6"},
      {"ionescu_l1_floor", "0.5"},
      {"ionescu_l15_cap", "0.1"},
      // windowed maximal lower bounds
      {"partial_n0_list", "4,16"},
      {"partial_trials", "3"},
      {"partial_p", "2"},
  };
  return defaults;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.kv_ = default_entries();
  return cfg;
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      std::size_t e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid("missing '=' at " + path + ":" + std::to_string(lineno));
    set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (default_entries().find(key) == default_entries().end())
    throw ConfigInvalid("unknown config key '" + key + "'");
  kv_[key] = value;
}

const std::string& ExperimentConfig::str(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigInvalid("missing config key '" + key + "'");
  return it->second;
}

long long ExperimentConfig::i64(const std::string& key) const {
  const std::string& s = str(key);
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigInvalid("config key '" + key + "' is not an integer: " + s);
  }
}

std::uint64_t ExperimentConfig::u64(const std::string& key) const {
  long long v = i64(key);
  if (v < 0) throw ConfigInvalid("config key '" + key + "' must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

double ExperimentConfig::real(const std::string& key) const {
  const std::string& s = str(key);
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigInvalid("config key '" + key + "' is not a number: " + s);
  }
}

std::vector<long long> ExperimentConfig::i64_list(const std::string& key) const {
  const std::string& s = str(key);
  std::vector<long long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ConfigInvalid("config key '" + key + "' has a bad list entry: " + item);
    }
  }
  if (out.empty()) throw ConfigInvalid("config key '" + key + "' is an empty list");
  return out;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_int(long long v) { return std::to_string(v); }

void Table::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns.size()) throw IoError("row arity does not match the header");
  rows.push_back(cells);
}

void Report::add_summary_real(const std::string& key, double v) {
  summary.emplace_back(key, format_real(v));
  summary_types.push_back("real");
}

void Report::add_summary_int(const std::string& key, long long v) {
  summary.emplace_back(key, format_int(v));
  summary_types.push_back("int");
}

void Report::add_summary_text(const std::string& key, const std::string& v) {
  summary.emplace_back(key, v);
  summary_types.push_back("text");
}

void Report::fail(const std::string& reason) {
  pass = false;
  failures.push_back(reason);
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// numeric cells are emitted raw; text cells quoted
std::string json_cell(const std::string& value, CellType type) {
  if (type == CellType::Text) return "\"" + json_escape(value) + "\"";
  if (value == "nan" || value == "inf" || value == "-inf") return "\"" + value + "\"";
  return value;
}

}  // namespace

void write_csv(const Report& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  out << "# preset = " << report.preset << "\n";
  for (const auto& [k, v] : report.config_echo) out << "# config." << k << " = " << v << "\n";
  for (std::size_t i = 0; i < report.table.columns.size(); ++i) {
    if (i) out << ",";
    out << report.table.columns[i].name;
  }
  out << "\n";
  for (const auto& row : report.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << row[i];
    }
    out << "\n";
  }
  for (std::size_t i = 0; i < report.summary.size(); ++i)
    out << "# summary." << report.summary[i].first << " = " << report.summary[i].second << "\n";
  out << "# pass = " << (report.pass ? "true" : "false") << "\n";
  for (const auto& f : report.failures) out << "# failure = " << f << "\n";
  if (!out.good()) throw IoError("write failure on " + path);
}

void write_json(const Report& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  out << "{\n  \"preset\": \"" << json_escape(report.preset) << "\",\n";
  out << "  \"config\": {";
  bool first = true;
  for (const auto& [k, v] : report.config_echo) {
    out << (first ? "\n" : ",\n") << "    \"" << json_escape(k) << "\": \"" << json_escape(v)
        << "\"";
    first = false;
  }
  out << "\n  },\n";
  out << "  \"summary\": {";
  first = true;
  for (std::size_t i = 0; i < report.summary.size(); ++i) {
    CellType t = report.summary_types[i] == "text"
                     ? CellType::Text
                     : (report.summary_types[i] == "int" ? CellType::Integer : CellType::Real);
    out << (first ? "\n" : ",\n") << "    \"" << json_escape(report.summary[i].first)
        << "\": " << json_cell(report.summary[i].second, t);
    first = false;
  }
  out << "\n  },\n";
  out << "  \"rows\": [";
  for (std::size_t r = 0; r < report.table.rows.size(); ++r) {
    out << (r == 0 ? "\n" : ",\n") << "    {";
    for (std::size_t c = 0; c < report.table.columns.size(); ++c) {
      out << (c == 0 ? "" : ", ") << "\"" << json_escape(report.table.columns[c].name)
          << "\": " << json_cell(report.table.rows[r][c], report.table.columns[c].type);
    }
    out << "}";
  }
  out << (report.table.rows.empty() ? "],\n" : "\n  ],\n");
  out << "  \"pass\": " << (report.pass ? "true" : "false") << ",\n";
  out << "  \"failures\": [";
  for (std::size_t i = 0; i < report.failures.size(); ++i)
    out << (i == 0 ? "\n" : ",\n") << "    \"" << json_escape(report.failures[i]) << "\"";
  out << (report.failures.empty() ? "]" : "\n  ]") << "\n}\n";
  if (!out.good()) throw IoError("write failure on " + path);
}

int exit_code_for(const Error& e) {
  const std::string& code = e.code();
  if (code == "BudgetExceeded") return 3;
  if (code == "ConfigInvalid" || code == "UnknownPreset" || code == "IoError" ||
      code == "SyntaxError" || code == "NotHomogeneous" || code == "DegreeTooLow" ||
      code == "DimensionMismatch")
    return 4;
  return 2;
}

}  // namespace birchmax::report
