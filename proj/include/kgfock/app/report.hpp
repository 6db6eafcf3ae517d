#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace kgfock::app {

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct RunRecord {
  std::string subcommand;
  std::string config_hash;
  std::string created;  // UTC, excluded from determinism comparisons
  std::string version;
  nlohmann::json config;
  nlohmann::json report;
  nlohmann::json quantities;  // report key -> what it measures
  std::vector<CsvTable> traces;

  nlohmann::json to_json() const;
};

// Finite doubles as numbers, +-inf as "inf"/"-inf", NaN as null.
nlohmann::json number(double x);
double read_number(const nlohmann::json& value);

std::string csv_text(const CsvTable& table);
std::string utc_timestamp();

// Write to a sibling temporary file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);
// <dir>/<subcommand>.json plus <dir>/<subcommand>-<trace>.csv; returns the written paths.
std::vector<std::filesystem::path> write_record(const std::filesystem::path& directory, const RunRecord& record);

}  // namespace kgfock::app
