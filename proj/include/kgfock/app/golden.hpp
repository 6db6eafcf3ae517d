#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgfock/errors.hpp"

namespace kgfock::app {

class GoldenMissingError : public Error {
 public:
  using Error::Error;
};

// One pinned value: the quantity at `pointer` inside the report of `subcommand` run on `config`.
struct GoldenEntry {
  std::string name;
  std::string subcommand;
  nlohmann::json config;
  std::string pointer;
  double expected = 0.0;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
};

struct GoldenOutcome {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;
};

std::vector<GoldenEntry> parse_suite(const nlohmann::json& document);
std::vector<GoldenEntry> load_suite(const std::filesystem::path& path);
std::vector<GoldenOutcome> check_suite(const std::vector<GoldenEntry>& entries);
std::string format_table(const std::vector<GoldenOutcome>& outcomes);
// Exit 0 when all pass, 1 on a mismatch, 5 for a missing or empty suite, 2 for a malformed one.
int golden_check(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

}  // namespace kgfock::app
