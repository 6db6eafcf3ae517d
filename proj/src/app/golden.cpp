#include "kgfock/app/golden.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "kgfock/app/runner.hpp"

namespace kgfock::app {

using nlohmann::json;

std::vector<GoldenEntry> parse_suite(const json& document) {
  if (!document.is_object() || !document.contains("values")) throw ConfigError("golden suite must be an object with a values list");
  const json& values = document.at("values");
  if (!values.is_array()) throw ConfigError("golden suite values must be a list");
  if (values.empty()) throw GoldenMissingError("golden suite is empty");
  std::vector<GoldenEntry> out;
  for (const auto& v : values) {
    GoldenEntry e;
    try {
      e.name = v.at("name").get<std::string>();
      e.subcommand = v.at("subcommand").get<std::string>();
      e.config = v.value("config", json::object());
      e.pointer = v.at("pointer").get<std::string>();
      e.expected = read_number(v.at("expected"));
      e.abs_tol = v.value("abs_tol", 0.0);
      e.rel_tol = v.value("rel_tol", 0.0);
    } catch (const json::exception& ex) {
      throw ConfigError(std::string("malformed golden entry: ") + ex.what());
    }
    if (e.abs_tol < 0.0 || e.rel_tol < 0.0 || (e.abs_tol == 0.0 && e.rel_tol == 0.0)) {
      throw ConfigError("golden entry " + e.name + " needs a positive abs_tol or rel_tol");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<GoldenEntry> load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GoldenMissingError("golden file not found: " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("golden file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_suite(document);
}

std::vector<GoldenOutcome> check_suite(const std::vector<GoldenEntry>& entries) {
  std::map<std::string, json> cache;
  std::vector<GoldenOutcome> out;
  for (const auto& e : entries) {
    GoldenOutcome o;
    o.name = e.name;
    o.expected = e.expected;
    o.tolerance = std::max(e.abs_tol, e.rel_tol * std::abs(e.expected));
    try {
      const std::string key = e.subcommand + "\n" + e.config.dump();
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, execute(e.subcommand, parse_config(e.config)).report).first;
      o.actual = read_number(it->second.at(json::json_pointer(e.pointer)));
      o.pass = (std::isinf(o.expected) && o.actual == o.expected) || std::abs(o.actual - o.expected) <= o.tolerance;
    } catch (const std::exception& ex) {
      o.actual = std::nan("");
      o.error = ex.what();
      o.pass = false;
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::string format_table(const std::vector<GoldenOutcome>& outcomes) {
  std::string text;
  char line[512];
  std::snprintf(line, sizeof line, "%-40s %24s %24s %10s  %s\n", "name", "expected", "actual", "tolerance", "result");
  text += line;
  for (const auto& o : outcomes) {
    std::snprintf(line, sizeof line, "%-40s %24.16g %24.16g %10.2e  %s\n", o.name.c_str(), o.expected, o.actual, o.tolerance,
                  o.pass ? "PASS" : "FAIL");
    text += line;
    if (!o.error.empty()) text += "    error: " + o.error + "\n";
  }
  return text;
}

int golden_check(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  try {
    const auto outcomes = check_suite(load_suite(path));
    out << format_table(outcomes);
    std::size_t failed = 0;
    for (const auto& o : outcomes) failed += !o.pass;
    out << outcomes.size() - failed << "/" << outcomes.size() << " golden values match\n";
    return failed ? kCheckFailed : kOk;
  } catch (const std::exception& e) {
    err << "kgfock golden-check: " << e.what() << "\n";
    return exit_code_for(std::current_exception());
  }
}

}  // namespace kgfock::app
