#include "kgfock/app/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "kgfock/errors.hpp"

namespace kgfock::app {

nlohmann::json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double read_number(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ParameterError("not a numeric report value: " + value.dump());
}

nlohmann::json RunRecord::to_json() const {
  return {{"subcommand", subcommand}, {"config_hash", config_hash}, {"created", created}, {"version", version},
          {"config", config},         {"report", report},           {"quantities", quantities}};
}

std::string csv_text(const CsvTable& table) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t k = 0; k < table.header.size(); ++k) out << (k ? "," : "") << table.header[k];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      if (std::isnan(row[k])) {
        out << "nan";
      } else if (std::isinf(row[k])) {
        out << (row[k] > 0 ? "inf" : "-inf");
      } else {
        out << row[k];
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ResourceError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ResourceError("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

std::vector<std::filesystem::path> write_record(const std::filesystem::path& directory, const RunRecord& record) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw ResourceError("cannot create output directory " + directory.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto json_path = directory / (record.subcommand + ".json");
  write_atomic(json_path, record.to_json().dump(2) + "\n");
  written.push_back(json_path);
  for (const auto& table : record.traces) {
    const auto csv_path = directory / (record.subcommand + "-" + table.name + ".csv");
    write_atomic(csv_path, csv_text(table));
    written.push_back(csv_path);
  }
  return written;
}

}  // namespace kgfock::app
