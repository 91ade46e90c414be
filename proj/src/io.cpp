#include "afg/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace afg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parses_as(ValueType t, const std::string& v) {
  try {
    switch (t) {
      case ValueType::Real: parse_real(v, ""); return true;
      case ValueType::Integer: parse_integer(v, ""); return true;
      case ValueType::RealList: parse_real_list(v, ""); return true;
      case ValueType::Boolean: return v == "true" || v == "false" || v == "1" || v == "0";
      case ValueType::Scalar: parse_rational(v, ""); return true;
      case ValueType::Text: return true;
    }
  } catch (const ValidationError&) {
    if (t == ValueType::Scalar) {
      try {
        parse_real(v, "");
        return true;
      } catch (const ValidationError&) {
      }
    }
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- config

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError(source + ":" + std::to_string(lineno) + ": empty key");
    if (c.values_.count(key)) throw ValidationError(source + ":" + std::to_string(lineno) + ": duplicate key " + key);
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return parse(in, path);
}

void Config::assign(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw ValidationError("override must look like key=value: " + assignment);
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::check(const std::vector<KeySpec>& schema) const {
  std::map<std::string, const KeySpec*> known;
  for (const KeySpec& k : schema) known[k.key] = &k;
  std::string unknown;
  for (const auto& [key, value] : values_) {
    auto it = known.find(key);
    if (it == known.end()) {
      unknown += (unknown.empty() ? "" : ", ") + key;
      continue;
    }
    if (!parses_as(it->second->type, value))
      throw ValidationError("key " + key + " has a malformed value '" + value + "'");
  }
  if (!unknown.empty()) throw ValidationError("unknown configuration keys: " + unknown);
}

void Config::bind(const std::vector<KeySpec>& schema) {
  for (const KeySpec& k : schema)
    if (!k.fallback.empty()) defaults_[k.key] = k.fallback;
}

const std::string* Config::lookup(const std::string& key) const {
  auto it = values_.find(key);
  if (it != values_.end()) return &it->second;
  auto d = defaults_.find(key);
  if (d != defaults_.end()) return &d->second;
  return nullptr;
}

bool Config::present(const std::string& key) const { return lookup(key) != nullptr; }

std::string Config::text(const std::string& key) const {
  const std::string* v = lookup(key);
  if (!v) throw ValidationError("missing required key " + key);
  return *v;
}

double Config::real(const std::string& key) const { return parse_real(text(key), key); }
int Config::integer(const std::string& key) const { return static_cast<int>(parse_integer(text(key), key)); }
bool Config::boolean(const std::string& key) const {
  const std::string v = text(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError("key " + key + " must be true or false");
}
std::vector<double> Config::reals(const std::string& key) const { return parse_real_list(text(key), key); }

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw ValidationError("expected a finite number for " + what + ", got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw ValidationError("expected an integer for " + what + ", got '" + text + "'");
  return v;
}

Rational parse_rational(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  if (slash != std::string::npos) {
    const long long p = parse_integer(t.substr(0, slash), what);
    const long long q = parse_integer(t.substr(slash + 1), what);
    if (q == 0) throw ValidationError("zero denominator in " + what);
    return Rational(p, q);
  }
  std::size_t i = 0;
  bool neg = false;
  if (i < t.size() && (t[i] == '-' || t[i] == '+')) neg = t[i++] == '-';
  long long num = 0, den = 1;
  bool digits = false, dot = false;
  for (; i < t.size(); ++i) {
    const char c = t[i];
    if (c == '.' && !dot) {
      dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw ValidationError("expected an exact decimal or p/q for " + what + ", got '" + text + "'");
    digits = true;
    if (num > 99999999999999999LL / 10 || (dot && den > 99999999999999999LL / 10))
      throw ValidationError("too many digits for exact arithmetic in " + what);
    num = num * 10 + (c - '0');
    if (dot) den *= 10;
  }
  if (!digits) throw ValidationError("expected an exact decimal or p/q for " + what + ", got '" + text + "'");
  return Rational(neg ? -num : num, den);
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) out.push_back(parse_real(item, what));
  if (out.empty()) throw ValidationError("empty list for " + what);
  return out;
}

// ---------------------------------------------------------------- files

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("write to " + path + " failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::add(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw ValidationError("CSV row width does not match the header");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += v[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string cell(double v) { return format_scalar(v); }
std::string cell(bool v) { return v ? "1" : "0"; }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(int v) { return std::to_string(v); }

// ---------------------------------------------------------------- metric spaces

namespace {

template <typename S>
S parse_entry(const std::string& tok, const std::string& what);
template <>
double parse_entry<double>(const std::string& tok, const std::string& what) {
  const auto slash = tok.find('/');
  if (slash != std::string::npos) return to_double(parse_rational(tok, what));
  return parse_real(tok, what);
}
template <>
Rational parse_entry<Rational>(const std::string& tok, const std::string& what) {
  return parse_rational(tok, what);
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream s(line);
  std::string t;
  while (s >> t) out.push_back(t);
  return out;
}

}  // namespace

template <typename S>
FiniteMetricSpace<S> read_metric_space(std::istream& in, const std::string& source) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.size() < 2) throw ValidationError(source + ": metric file needs a count and a label line");
  const long long n = parse_integer(lines[0], source + " point count");
  if (n < 1 || n > 100000) throw ValidationError(source + ": point count out of range");
  std::vector<std::string> labels = tokens(lines[1]);
  if (static_cast<long long>(labels.size()) != n) throw ValidationError(source + ": label count does not match");
  if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size())
    throw ValidationError(source + ": duplicate labels");
  if (static_cast<long long>(lines.size()) != 2 + n - 1)
    throw ValidationError(source + ": expected " + std::to_string(n - 1) + " matrix rows");
  const std::size_t N = static_cast<std::size_t>(n);
  std::vector<S> d(N * N, S(0));
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const auto row = tokens(lines[2 + i]);
    if (row.size() != N - 1 - i)
      throw ValidationError(source + ": row " + std::to_string(i) + " must hold " + std::to_string(N - 1 - i) + " entries");
    for (std::size_t j = i + 1; j < N; ++j) d[i * N + j] = d[j * N + i] = parse_entry<S>(row[j - i - 1], source);
  }
  return FiniteMetricSpace<S>::validate(std::move(labels), std::move(d));
}

template <typename S>
FiniteMetricSpace<S> load_metric_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metric space " + path);
  return read_metric_space<S>(in, path);
}

template <typename S>
std::string metric_space_text(const FiniteMetricSpace<S>& m) {
  std::string out = std::to_string(m.size()) + "\n";
  for (std::size_t i = 0; i < m.size(); ++i) out += (i ? " " : "") + m.labels()[i];
  out += "\n";
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) out += (j > i + 1 ? " " : "") + format_scalar(m(i, j));
    out += "\n";
  }
  return out;
}

template <typename S>
std::string glued_space_text(const GluedSpace<S>& z) {
  std::string out = "epsilon " + format_scalar(z.epsilon()) + "\n";
  out += "levels " + std::to_string(z.levels().size());
  for (const S& t : z.levels()) out += " " + format_scalar(t);
  out += "\n";
  out += std::to_string(z.size()) + "\n";
  const auto& labels = z.bottom_metric().labels();
  for (std::size_t p = 0; p < z.size(); ++p)
    out += (p ? " " : "") + labels[z.point_of(p)] + "@" + std::to_string(z.level_of(p));
  out += "\n";
  const auto m = z.matrix();
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < z.size(); ++j) out += (j ? " " : "") + format_scalar(m[i * z.size() + j]);
    out += "\n";
  }
  return out;
}

template FiniteMetricSpace<double> read_metric_space<double>(std::istream&, const std::string&);
template FiniteMetricSpace<Rational> read_metric_space<Rational>(std::istream&, const std::string&);
template FiniteMetricSpace<double> load_metric_space<double>(const std::string&);
template FiniteMetricSpace<Rational> load_metric_space<Rational>(const std::string&);
template std::string metric_space_text<double>(const FiniteMetricSpace<double>&);
template std::string metric_space_text<Rational>(const FiniteMetricSpace<Rational>&);
template std::string glued_space_text<double>(const GluedSpace<double>&);
template std::string glued_space_text<Rational>(const GluedSpace<Rational>&);

// ---------------------------------------------------------------- reports

namespace {

struct Column {
  const char* name;
  std::string (*get)(const MemberRecord&);
};

#define AFG_COL(field) \
  Column { #field, [](const MemberRecord& m) { return cell(m.field); } }

const std::vector<Column>& columns() {
  static const std::vector<Column> c = {
      AFG_COL(index),          AFG_COL(parameter),        AFG_COL(mass),
      AFG_COL(h0),             AFG_COL(h0_flagged),       AFG_COL(slab_height),
      AFG_COL(volume),         AFG_COL(euclidean_volume), AFG_COL(volume_deviation),
      AFG_COL(depth),          AFG_COL(epsilon),          AFG_COL(lambda),
      AFG_COL(gh_bound),       AFG_COL(flat_bound),       AFG_COL(diameter),
      AFG_COL(diameter_bound), AFG_COL(ratio_min),        AFG_COL(ratio_max),
      AFG_COL(lipschitz_bound), AFG_COL(ratios_within),   AFG_COL(penrose_margin),
      AFG_COL(min_mean_curvature), AFG_COL(max_gradient), AFG_COL(pointed_volume),
      AFG_COL(pointed_deficit), AFG_COL(boundary_points)};
  return c;
}

#undef AFG_COL

}  // namespace

std::vector<std::string> report_columns() {
  std::vector<std::string> out;
  for (const Column& c : columns()) out.push_back(c.name);
  return out;
}

std::string report_csv(const ConvergenceReport& r) {
  CsvTable t(report_columns());
  for (const MemberRecord& m : r.rows) {
    std::vector<std::string> row;
    for (const Column& c : columns()) row.push_back(c.get(m));
    t.add(std::move(row));
  }
  return t.str();
}

std::string trends_csv(const ConvergenceReport& r) {
  CsvTable t({"column", "rule", "passed", "value", "detail"});
  for (const TrendVerdict& v : r.trends) {
    std::string detail = v.detail;
    for (char& ch : detail)
      if (ch == ',' || ch == '\n') ch = ';';
    t.add({v.column, v.rule, cell(v.passed), cell(v.value), detail});
  }
  return t.str();
}

std::string pointed_csv(const PointedReport& r) {
  CsvTable t({"index", "parameter", "radius", "volume", "euclidean", "deficit", "included", "max_reach"});
  for (const PointedRow& p : r.rows)
    t.add({cell(p.index), cell(p.parameter), cell(p.radius), cell(p.volume), cell(p.euclidean), cell(p.deficit),
           cell(p.included), cell(p.max_reach)});
  return t.str();
}

std::string report_records(const ConvergenceReport& r) {
  nlohmann::ordered_json j;
  j["family"] = family_kind_name(r.spec.kind);
  j["n"] = r.spec.n;
  j["schedule"] = r.spec.schedule;
  j["r0"] = r.spec.params.r0;
  j["gamma"] = r.spec.params.gamma;
  j["D"] = r.spec.params.depth;
  j["alpha"] = r.spec.params.alpha;
  j["radius"] = r.spec.radius;
  j["grid_spacing"] = r.spec.grid.spacing;
  j["grid_outer_radius"] = r.spec.grid.outer_radius;
  j["outward_minimizing"] = "assumed";
  auto& rows = j["members"] = nlohmann::ordered_json::array();
  for (const MemberRecord& m : r.rows) {
    nlohmann::ordered_json row;
    for (const Column& c : columns()) row[c.name] = c.get(m);
    rows.push_back(row);
  }
  auto& trends = j["trends"] = nlohmann::ordered_json::array();
  for (const TrendVerdict& v : r.trends)
    trends.push_back({{"column", v.column}, {"rule", v.rule}, {"passed", v.passed}, {"value", cell(v.value)},
                      {"detail", v.detail}});
  j["passed"] = r.all_passed();
  return j.dump(2) + "\n";
}

std::string pointed_records(const PointedReport& r) {
  nlohmann::ordered_json j;
  j["point"] = r.choice == PointChoice::Sigma ? "sigma" : "well_bottom";
  j["converging"] = r.converging;
  j["verdict"] = r.verdict;
  auto& rows = j["members"] = nlohmann::ordered_json::array();
  for (const PointedRow& p : r.rows)
    rows.push_back({{"index", p.index}, {"parameter", cell(p.parameter)}, {"radius", cell(p.radius)},
                    {"volume", cell(p.volume)}, {"euclidean", cell(p.euclidean)}, {"deficit", cell(p.deficit)},
                    {"included", p.included}, {"max_reach", cell(p.max_reach)}});
  return j.dump(2) + "\n";
}

std::vector<std::string> write_series(const ConvergenceReport& r, const std::string& dir) {
  ensure_directory(dir);
  std::vector<std::string> names;
  for (const Column& c : columns()) {
    const std::string name = c.name;
    if (name == "index" || name == "parameter") continue;
    CsvTable t({"x", "y"});
    for (const MemberRecord& m : r.rows) t.add({cell(m.parameter), c.get(m)});
    const std::string file = "series_" + name + ".csv";
    write_file(join_path(dir, file), t.str());
    names.push_back(file);
  }
  return names;
}

}  // namespace afg
