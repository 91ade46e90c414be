#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "afg/convergence.hpp"
#include "afg/metricspace.hpp"

namespace afg {

// ----------------------------------------------------------------
// Key-value configuration: "key = value" lines, '#' starts a comment.
// ----------------------------------------------------------------

enum class ValueType { Real, Integer, Text, RealList, Boolean, Scalar };

struct KeySpec {
  std::string key;
  ValueType type = ValueType::Real;
  std::string fallback;  // empty means no default
  std::string help;
};

class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::string& path);

  /// "key=value" override.
  void assign(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  /// Rejects unknown keys and values that do not parse as their declared type.
  void check(const std::vector<KeySpec>& schema) const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Getters fall back to the schema default passed to bind().
  void bind(const std::vector<KeySpec>& schema);
  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  bool present(const std::string& key) const;  // set explicitly or by default

 private:
  const std::string* lookup(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> defaults_;
};

double parse_real(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);
/// Exact parse of "p/q", an integer, or a finite decimal such as "-1.25".
Rational parse_rational(const std::string& text, const std::string& what);
std::vector<double> parse_real_list(const std::string& text, const std::string& what);

// ----------------------------------------------------------------
// Files
// ----------------------------------------------------------------

void ensure_directory(const std::string& dir);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
std::string join_path(const std::string& dir, const std::string& name);

/// Comma-separated values with fixed 12-significant-digit floats.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  CsvTable& add(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string cell(double v);
std::string cell(bool v);
std::string cell(std::size_t v);
std::string cell(int v);

// ----------------------------------------------------------------
// Metric spaces
//   line 1: point count N
//   line 2: N labels separated by whitespace
//   N - 1 lines: row i holds d(i, j) for j > i
// Entries are decimals, or p/q in exact mode.
// ----------------------------------------------------------------

template <typename S>
FiniteMetricSpace<S> read_metric_space(std::istream& in, const std::string& source);
template <typename S>
FiniteMetricSpace<S> load_metric_space(const std::string& path);
template <typename S>
std::string metric_space_text(const FiniteMetricSpace<S>& m);
/// epsilon, t-levels, then the full matrix over Z with labels "label@level".
template <typename S>
std::string glued_space_text(const GluedSpace<S>& z);

// ----------------------------------------------------------------
// Reports
// ----------------------------------------------------------------

std::string report_csv(const ConvergenceReport& r);
std::string trends_csv(const ConvergenceReport& r);
std::string pointed_csv(const PointedReport& r);
std::string report_records(const ConvergenceReport& r);
std::string pointed_records(const PointedReport& r);
/// One "x,y" file per column, x the schedule parameter. Returns the file names written.
std::vector<std::string> write_series(const ConvergenceReport& r, const std::string& dir);
std::vector<std::string> report_columns();

}  // namespace afg
