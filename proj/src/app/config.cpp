#include "kgfock/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <openssl/evp.h>

namespace kgfock::app {

namespace {

using nlohmann::json;

// Object view that remembers which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where(key) + " must be finite");
    return x;
  }
  double positive(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(where(key) + " must be positive");
    return x;
  }
  long long integer(const std::string& key, long long fallback, long long min_value) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    const long long x = v.get<long long>();
    if (x < min_value) throw ConfigError(where(key) + " must be at least " + std::to_string(min_value));
    return x;
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }
  Rational rational(const std::string& key, Rational fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    try {
      if (v.is_number_integer()) return make_rational(v.get<long long>());
      if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const ParameterError& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
    throw ConfigError(where(key) + " must be a positive integer or a \"p/q\" string");
  }
  std::optional<Section> child(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Section(at(key), where(key));
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown key " + where(item.key()));
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

PotentialSpec parse_potential(Section s, PotentialSpec fallback) {
  PotentialSpec p;
  p.kind = s.string("kind", fallback.kind);
  if (p.kind != "zero" && p.kind != "gaussian" && p.kind != "lorentzian") {
    throw ConfigError(s.where("kind") + " must be one of zero, gaussian, lorentzian");
  }
  p.amplitude = s.number("amplitude", fallback.amplitude);
  p.width = s.positive("width", fallback.width);
  s.finish();
  return p;
}

LevelSpec parse_level(const json& node, const std::string& path) {
  Section s(node, path);
  LevelSpec level;
  level.v = s.rational("v", make_rational(1));
  if (!s.has("kappa")) throw ConfigError(path + ".kappa is required");
  level.kappa = s.positive("kappa", 1.0);
  s.finish();
  return level;
}

json potential_json(const PotentialSpec& p) { return {{"kind", p.kind}, {"amplitude", p.amplitude}, {"width", p.width}}; }

}  // namespace

ExperimentConfig parse_config(const json& document) {
  ExperimentConfig c;
  Section root(document, "");

  if (auto s = root.child("lattice")) {
    c.v = s->rational("v", c.v);
    c.kappa = s->positive("kappa", c.kappa);
    c.mass = s->positive("mass", c.mass);
    c.n_max = static_cast<int>(s->integer("n_max", c.n_max, 0));
    c.max_dimension = static_cast<std::size_t>(s->integer("max_dimension", static_cast<long long>(c.max_dimension), 1));
    if (s->has("refinement_levels")) {
      const json& levels = s->at("refinement_levels");
      if (!levels.is_array()) throw ConfigError("lattice.refinement_levels must be a list");
      for (std::size_t k = 0; k < levels.size(); ++k) {
        c.refinement_levels.push_back(parse_level(levels[k], "lattice.refinement_levels[" + std::to_string(k) + "]"));
      }
    }
    s->finish();
  }
  if (auto s = root.child("potential")) c.potential = parse_potential(*s, c.potential);
  if (auto s = root.child("cutoff")) c.cutoff = parse_potential(*s, c.cutoff);
  if (auto s = root.child("polynomial")) {
    if (s->has("coeffs")) {
      const json& coeffs = s->at("coeffs");
      if (!coeffs.is_array() || coeffs.empty()) throw ConfigError("polynomial.coeffs must be a nonempty list of [alpha1, alpha2, a]");
      c.polynomial.clear();
      for (const auto& term : coeffs) {
        if (!term.is_array() || term.size() != 3 || !term[0].is_number_integer() || !term[1].is_number_integer() || !term[2].is_number()) {
          throw ConfigError("polynomial.coeffs entries must be [alpha1, alpha2, a] with integer exponents");
        }
        const Monomial m{term[0].get<int>(), term[1].get<int>(), term[2].get<double>()};
        if (m.alpha1 < 0 || m.alpha2 < 0) throw ConfigError("polynomial exponents must be nonnegative");
        if (!std::isfinite(m.coefficient)) throw ConfigError("polynomial coefficients must be finite");
        c.polynomial.push_back(m);
      }
    }
    s->finish();
  }
  if (auto s = root.child("coupling")) {
    c.lambda = s->number("lambda", c.lambda);
    s->finish();
  }
  c.override_stability = root.boolean("override_stability", c.override_stability);
  if (auto s = root.child("solver")) {
    c.solver.dense_limit = static_cast<std::size_t>(s->integer("dense_limit", static_cast<long long>(c.solver.dense_limit), 1));
    c.solver.block_size = static_cast<int>(s->integer("block_size", c.solver.block_size, 1));
    c.solver.max_basis = static_cast<int>(s->integer("max_basis", c.solver.max_basis, 8));
    c.solver.max_restarts = static_cast<int>(s->integer("max_restarts", c.solver.max_restarts, 1));
    c.solver.tolerance = s->positive("tolerance", c.solver.tolerance);
    c.solver.residual_contract = s->positive("residual_contract", c.solver.residual_contract);
    s->finish();
  }
  if (auto s = root.child("quantize")) {
    c.quantize_points = static_cast<int>(s->integer("points", c.quantize_points, 2));
    if (c.quantize_points % 2 != 0) throw ConfigError("quantize.points must be even");
    c.quantize_length = s->positive("length", c.quantize_length);
    s->finish();
  }
  if (auto s = root.child("spectrum")) {
    c.report_depth = static_cast<int>(s->integer("report_depth", c.report_depth, 1));
    c.search_depth = static_cast<int>(s->integer("search_depth", c.search_depth, 1));
    if (s->has("beta")) c.beta = s->positive("beta", 1.0);
    s->finish();
  }
  if (auto s = root.child("probe")) {
    if (s->has("times")) {
      const json& times = s->at("times");
      if (!times.is_array() || times.empty()) throw ConfigError("probe.times must be a nonempty list");
      c.probe_times.clear();
      for (const auto& t : times) {
        if (!t.is_number() || !std::isfinite(t.get<double>())) throw ConfigError("probe.times entries must be finite numbers");
        c.probe_times.push_back(t.get<double>());
      }
    }
    c.probe_center = s->number("envelope_center", c.probe_center);
    c.probe_width = s->positive("envelope_width", c.probe_width);
    s->finish();
  }
  if (auto s = root.child("output")) {
    c.output_directory = s->string("directory", c.output_directory);
    if (c.output_directory.empty()) throw ConfigError("output.directory must not be empty");
    s->finish();
  }
  c.seed = static_cast<std::uint64_t>(root.integer("seed", 0, 0));
  root.finish();

  // Lattice sanity is checked here so that validate catches it.
  try {
    config_lattice(c);
    for (const auto& level : c.refinement_levels) level_lattice(c, level);
    make_interaction_spec(c.polynomial, make_potential(c.cutoff.kind, c.cutoff.amplitude, c.cutoff.width));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(document);
}

json canonical_json(const ExperimentConfig& c) {
  json levels = json::array();
  for (const auto& l : c.refinement_levels) levels.push_back({{"v", l.v.str()}, {"kappa", l.kappa}});
  json coeffs = json::array();
  for (const auto& m : c.polynomial) coeffs.push_back({m.alpha1, m.alpha2, m.coefficient});
  json doc = {
      {"lattice",
       {{"v", c.v.str()}, {"kappa", c.kappa}, {"mass", c.mass}, {"n_max", c.n_max}, {"max_dimension", c.max_dimension},
        {"refinement_levels", levels}}},
      {"potential", potential_json(c.potential)},
      {"cutoff", potential_json(c.cutoff)},
      {"polynomial", {{"coeffs", coeffs}}},
      {"coupling", {{"lambda", c.lambda}}},
      {"override_stability", c.override_stability},
      {"solver",
       {{"dense_limit", c.solver.dense_limit}, {"block_size", c.solver.block_size}, {"max_basis", c.solver.max_basis},
        {"max_restarts", c.solver.max_restarts}, {"tolerance", c.solver.tolerance}, {"residual_contract", c.solver.residual_contract}}},
      {"quantize", {{"points", c.quantize_points}, {"length", c.quantize_length}}},
      {"spectrum", {{"report_depth", c.report_depth}, {"search_depth", c.search_depth}, {"beta", c.beta ? json(*c.beta) : json(nullptr)}}},
      {"probe", {{"times", c.probe_times}, {"envelope_center", c.probe_center}, {"envelope_width", c.probe_width}}},
      {"output", {{"directory", c.output_directory}}},
      {"seed", c.seed},
  };
  return doc;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  json doc = canonical_json(config);
  doc.erase("output");
  return sha256_hex(doc.dump());
}

MomentumLattice config_lattice(const ExperimentConfig& config) { return build_lattice(config.v, config.kappa, config.mass); }

MomentumLattice level_lattice(const ExperimentConfig& config, const LevelSpec& level) {
  return build_lattice(level.v, level.kappa, config.mass);
}

Potential config_potential(const ExperimentConfig& config) {
  return make_potential(config.potential.kind, config.potential.amplitude, config.potential.width);
}

InteractionSpec config_interaction(const ExperimentConfig& config) {
  return make_interaction_spec(config.polynomial, make_potential(config.cutoff.kind, config.cutoff.amplitude, config.cutoff.width));
}

}  // namespace kgfock::app
