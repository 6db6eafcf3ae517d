#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgfock/eigensolver.hpp"
#include "kgfock/errors.hpp"
#include "kgfock/hamiltonian.hpp"
#include "kgfock/lattice.hpp"

namespace kgfock::app {

class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

struct LevelSpec {
  Rational v;
  double kappa = 0.0;
};

struct PotentialSpec {
  std::string kind = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
};

struct ExperimentConfig {
  Rational v = make_rational(1);
  double kappa = 4.0;
  double mass = 1.0;
  int n_max = 3;
  std::size_t max_dimension = kDefaultMaxDimension;
  std::vector<LevelSpec> refinement_levels;

  PotentialSpec potential;
  PotentialSpec cutoff;
  std::vector<Monomial> polynomial{{4, 0, 1.0}, {0, 4, 1.0}};
  double lambda = 0.3;
  bool override_stability = false;

  EigenSolverOptions solver;

  int quantize_points = 128;
  double quantize_length = 32.0;

  int report_depth = 4;
  int search_depth = 16;
  std::optional<double> beta;

  std::vector<double> probe_times{0.0, 4.0, 8.0, 16.0, 32.0};
  double probe_center = 2.2;
  double probe_width = 0.6;

  std::string output_directory = "kgfock-out";
  std::uint64_t seed = 0;
};

// Strict parse: unknown keys, wrong types and non-positive physical parameters raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::filesystem::path& path);

// Fully resolved config with defaults filled in, keys sorted.
nlohmann::json canonical_json(const ExperimentConfig& config);
// SHA-256 of the canonical physics config (the output section is excluded).
std::string config_hash(const ExperimentConfig& config);
std::string sha256_hex(const std::string& data);

MomentumLattice config_lattice(const ExperimentConfig& config);
MomentumLattice level_lattice(const ExperimentConfig& config, const LevelSpec& level);
Potential config_potential(const ExperimentConfig& config);
InteractionSpec config_interaction(const ExperimentConfig& config);

}  // namespace kgfock::app
