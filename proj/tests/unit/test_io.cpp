#include <cstdio>
#include <filesystem>
#include <sstream>

#include "afg/io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace afg;

namespace {

std::vector<KeySpec> schema() {
  return {{"n", ValueType::Integer, "3", ""},
          {"h", ValueType::Real, "0.2", ""},
          {"name", ValueType::Text, "", ""},
          {"radii", ValueType::RealList, "1,2", ""},
          {"exact", ValueType::Boolean, "false", ""},
          {"eps", ValueType::Scalar, "", ""}};
}

Config parse_text(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

std::string temp_dir() {
  const auto p = std::filesystem::temp_directory_path() / "afg_test_io";
  std::filesystem::remove_all(p);
  return p.string();
}

}  // namespace

TEST_CASE("config parsing, overrides and defaults") {
  Config c = parse_text("# comment\nn = 4\n\nname = run one  # trailing\nradii = 20, 40,80\n");
  c.assign("h=0.1");
  c.check(schema());
  c.bind(schema());
  CHECK(c.integer("n") == 4);
  CHECK(c.real("h") == 0.1);
  CHECK(c.text("name") == "run one");
  CHECK(c.reals("radii") == std::vector<double>{20, 40, 80});
  CHECK_FALSE(c.boolean("exact"));
  CHECK_FALSE(c.present("eps"));
  CHECK_THROWS_AS(c.real("eps"), ValidationError);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_text("n = 1\nn = 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_text("just words\n"), ValidationError);
  CHECK_THROWS_AS(parse_text("n = 3\nbogus = 1\n").check(schema()), ValidationError);
  CHECK_THROWS_AS(parse_text("n = 3.5\n").check(schema()), ValidationError);
  CHECK_THROWS_AS(parse_text("h = abc\n").check(schema()), ValidationError);
  CHECK_THROWS_AS(parse_text("exact = maybe\n").check(schema()), ValidationError);
  CHECK_THROWS_AS(parse_text("eps = 1/0\n").check(schema()), ValidationError);
  Config c;
  CHECK_THROWS_AS(c.assign("no equals sign"), ValidationError);
  CHECK_THROWS_AS(Config::load("/nonexistent/afg.conf"), IoError);
}

TEST_CASE("exact scalar parsing") {
  CHECK(parse_rational("3/4", "x") == Rational(3, 4));
  CHECK(parse_rational("-1.25", "x") == Rational(-5, 4));
  CHECK(parse_rational("7", "x") == Rational(7));
  CHECK(parse_rational("0.1", "x") == Rational(1, 10));
  CHECK_THROWS_AS(parse_rational("1e-3", "x"), ValidationError);
  CHECK_THROWS_AS(parse_rational("2/", "x"), ValidationError);
  CHECK(parse_integer("-12", "x") == -12);
  CHECK_THROWS_AS(parse_real("nan", "x"), ValidationError);
  CHECK(parse_real_list("1, 2.5 ,3", "x") == std::vector<double>{1, 2.5, 3});
}

TEST_CASE("metric files round trip in both arithmetics") {
  const std::string text = "3\na b c\n1/2 1\n3/4\n";
  std::istringstream in(text);
  const auto exact = read_metric_space<Rational>(in, "inline");
  CHECK(exact(0, 1) == Rational(1, 2));
  CHECK(exact(2, 1) == Rational(3, 4));
  CHECK(metric_space_text(exact) == text);
  std::istringstream again(text);
  const auto approx = read_metric_space<double>(again, "inline");
  CHECK(approx(1, 2) == 0.75);

  std::istringstream bad("3\na b c\n1 5\n1\n");
  CHECK_THROWS_AS(read_metric_space<Rational>(bad, "bad"), ValidationError);
  std::istringstream short_file("3\na b c\n1 1\n");
  CHECK_THROWS_AS(read_metric_space<Rational>(short_file, "short"), ValidationError);
}

TEST_CASE("glued space text lists levels and labels") {
  auto a = FiniteMetricSpace<Rational>::validate({"p", "q"}, {0, 1, 1, 0});
  auto b = FiniteMetricSpace<Rational>::validate({"p", "q"}, {0, 2, 2, 0});
  const std::string s = glued_space_text(glue(a, b, 3));
  CHECK(s.rfind("epsilon 1\nlevels 3 -1 0 1\n6\np@0 q@0 p@1 q@1 p@2 q@2\n", 0) == 0);
}

TEST_CASE("csv tables and files") {
  CsvTable t({"x", "flag", "count"});
  t.add({cell(0.1), cell(true), cell(std::size_t{3})});
  t.add({cell(1.0 / 3.0), cell(false), cell(-2)});
  CHECK(t.str() == "x,flag,count\n0.1,1,3\n0.333333333333,0,-2\n");
  CHECK_THROWS_AS(t.add({"1"}), ValidationError);

  const std::string dir = temp_dir();
  ensure_directory(join_path(dir, "nested"));
  const std::string path = join_path(join_path(dir, "nested"), "t.csv");
  write_file(path, t.str());
  CHECK(read_file(path) == t.str());
  CHECK_THROWS_AS(read_file(join_path(dir, "absent.csv")), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("report serialization") {
  ConvergenceReport r;
  r.spec.schedule = {0.5, 0.25};
  for (std::size_t j = 0; j < 2; ++j) {
    MemberRecord row;
    row.index = j;
    row.parameter = r.spec.schedule[j];
    row.epsilon = 0.1 / (j + 1);
    r.rows.push_back(row);
  }
  r.trends.push_back({"epsilon", "monotone", true, 0.5, "ratio 0.5, steps ok"});
  const std::string csv = report_csv(r);
  const auto columns = report_columns();
  std::string header;
  for (std::size_t i = 0; i < columns.size(); ++i) header += (i ? "," : "") + columns[i];
  CHECK(csv.rfind(header + "\n", 0) == 0);
  CHECK(columns.front() == "index");
  CHECK(trends_csv(r).find("ratio 0.5; steps ok") != std::string::npos);

  const auto records = nlohmann::json::parse(report_records(r));
  REQUIRE(records["members"].is_array());
  CHECK(records["members"].size() == 2);
  CHECK(records["members"][1]["epsilon"] == "0.05");
  CHECK(records["family"] == "schwarzschild");
  CHECK(records["trends"][0]["passed"] == true);

  const std::string dir = temp_dir();
  const auto files = write_series(r, dir);
  CHECK(files.size() == columns.size() - 2);
  CHECK(read_file(join_path(dir, "series_epsilon.csv")) == "x,y\n0.5,0.1\n0.25,0.05\n");
  std::filesystem::remove_all(dir);
}
