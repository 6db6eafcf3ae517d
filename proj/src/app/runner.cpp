#include "kgfock/app/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "kgfock/app/golden.hpp"
#include "kgfock/quantization.hpp"
#include "kgfock/spectral.hpp"

#ifndef KGFOCK_VERSION
#define KGFOCK_VERSION "0.0.0"
#endif

namespace kgfock::app {

namespace {

using nlohmann::json;

json lattice_json(const MomentumLattice& l) {
  return {{"v", l.v().str()}, {"kappa", l.kappa()}, {"mass", l.mass()}, {"modes", l.size()}};
}

json values_json(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

HamiltonianBundle bundle_on(const ExperimentConfig& c, const MomentumLattice& lattice) {
  const auto basis = enumerate_basis(lattice, c.n_max, c.max_dimension);
  return assemble(config_interaction(c), config_potential(c), c.lambda, basis, AssemblyOptions{c.override_stability});
}

json bundle_metadata(const HamiltonianBundle& b) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index k = 0; k < b.H.matrix.rows(); ++k) {
    const double d = b.H.matrix.coeff(k, k).real();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {{"dimension", b.basis->dimension()}, {"nnz", b.H.matrix.nonZeros()}, {"min_diagonal", lo}, {"max_diagonal", hi},
          {"lambda_quant", number(b.coupling.lambda_quant)}};
}

std::vector<MomentumLattice> refinement(const ExperimentConfig& c, std::size_t minimum, const std::string& who) {
  std::vector<MomentumLattice> out;
  for (const auto& level : c.refinement_levels) out.push_back(level_lattice(c, level));
  if (out.empty()) out.push_back(config_lattice(c));
  if (out.size() < minimum) {
    throw ParameterError(who + " needs at least " + std::to_string(minimum) + " entries in lattice.refinement_levels");
  }
  for (std::size_t k = 0; k + 1 < out.size(); ++k) make_nested_pair(out[k], out[k + 1]);
  return out;
}

RunRecord run_lambda_quant(const ExperimentConfig& c) {
  RunRecord r;
  const Potential v = config_potential(c);
  const MomentumLattice lattice = config_lattice(c);
  const CouplingReport cr = lambda_quant(v, lattice);
  r.report = {{"c0", cr.c0},
              {"c1", cr.c1},
              {"lambda_quant", number(cr.lambda_quant)},
              {"lattice", lattice_json(lattice)},
              {"lambda", c.lambda},
              {"min_eig_omega", omega_block(c.lambda, v, lattice).min_eigenvalue()}};
  r.quantities = {{"c0", "norm of the symmetrized eps^{-1} M, bound on the dGamma-type charge term"},
                  {"c1", "twice the Frobenius norm of the pair kernel R"},
                  {"lambda_quant", "coupling threshold 1 / (c0 + c1 / m)"},
                  {"min_eig_omega", "lowest eigenvalue of the block one-particle energy at lambda"}};
  if (!c.refinement_levels.empty()) {
    CsvTable t{"levels", {"v", "kappa", "modes", "c0", "c1", "lambda_quant"}, {}};
    json levels = json::array();
    for (const auto& level : c.refinement_levels) {
      const MomentumLattice l = level_lattice(c, level);
      const CouplingReport lr = lambda_quant(v, l);
      t.rows.push_back({l.v().value(), l.kappa(), static_cast<double>(l.size()), lr.c0, lr.c1, lr.lambda_quant});
      levels.push_back({{"lattice", lattice_json(l)}, {"c0", lr.c0}, {"c1", lr.c1}, {"lambda_quant", number(lr.lambda_quant)}});
    }
    r.report["levels"] = levels;
    r.traces.push_back(std::move(t));
  }
  return r;
}

RunRecord run_quantize(const ExperimentConfig& c) {
  RunRecord r;
  const auto grid = make_phase_space_grid(c.quantize_points, c.quantize_length, c.mass, config_potential(c));
  const QuantizationReport q = quantize(grid);
  r.report = {{"delta", q.delta},
              {"min_spec_hV", q.min_spec_hV},
              {"j_square_residual", q.j_square_residual},
              {"reconstruction_residual", q.reconstruction_residual},
              {"free_check_error", q.free_check_error},
              {"antisymmetry_residual", q.antisymmetry_residual},
              {"grid", {{"points", grid.points}, {"dx", grid.dx}, {"x0", grid.x0}}}};
  r.quantities = {{"delta", "relative form bound of the potential cross term against the free energy"},
                  {"min_spec_hV", "smallest eigenvalue of the positive part h_V of the generator"},
                  {"j_square_residual", "max |j^2 + 1|"},
                  {"reconstruction_residual", "||j h_V - a|| / ||a||"},
                  {"free_check_error", "max deviation of spec(h_0) from sqrt(k^2 + m^2)"},
                  {"antisymmetry_residual", "relative failure of a to be antisymmetric in the energy metric"}};
  return r;
}

RunRecord run_spectrum(const ExperimentConfig& c) {
  RunRecord r;
  const HamiltonianBundle b = bundle_on(c, config_lattice(c));
  const int count = static_cast<int>(std::min<std::size_t>(b.basis->dimension(), static_cast<std::size_t>(c.report_depth + 1)));
  const EigenPairs pairs = lowest_eigenpairs(b.H.matrix, count, c.solver);
  std::vector<double> values(pairs.values.data(), pairs.values.data() + pairs.values.size());
  std::vector<double> residuals(pairs.residuals.data(), pairs.residuals.data() + pairs.residuals.size());
  r.report = {{"e0", values.front()},
              {"eigenvalues", values_json(values)},
              {"gap", count > 1 ? values[1] - values[0] : 0.0},
              {"residuals", values_json(residuals)},
              {"lattice", lattice_json(b.basis->lattice())},
              {"n_max", c.n_max},
              {"lambda", c.lambda},
              {"bundle", bundle_metadata(b)},
              {"dense_solver", pairs.dense}};
  r.quantities = {{"e0", "lowest eigenvalue of the truncated Hamiltonian"},
                  {"eigenvalues", "lowest eigenvalues, ascending"},
                  {"gap", "E1 - E0"},
                  {"residuals", "||H psi - E psi|| per eigenpair"}};
  CsvTable t{"eigenvalues", {"level", "energy", "residual"}, {}};
  for (int k = 0; k < count; ++k) t.rows.push_back({static_cast<double>(k), values[static_cast<std::size_t>(k)], residuals[static_cast<std::size_t>(k)]});
  r.traces.push_back(std::move(t));
  return r;
}

RunRecord run_hvz(const ExperimentConfig& c) {
  RunRecord r;
  json levels = json::array();
  CsvTable t{"levels", {"v", "kappa", "modes", "dimension", "e0", "onset", "deviation"}, {}};
  std::vector<double> deviations;
  for (const auto& lattice : refinement(c, 1, "hvz")) {
    const HamiltonianBundle b = bundle_on(c, lattice);
    const SpectralReport s = hvz_gap_probe(b, c.report_depth, c.solver, c.search_depth);
    const double deviation = std::abs(s.hvz_onset_estimate - (s.e0 + s.mass));
    deviations.push_back(deviation);
    levels.push_back({{"lattice", lattice_json(lattice)},
                      {"dimension", b.basis->dimension()},
                      {"e0", s.e0},
                      {"eigenvalues", values_json(s.eigenvalues)},
                      {"gap", s.gap},
                      {"hvz_onset_estimate", number(s.hvz_onset_estimate)},
                      {"onset_level", s.onset_level},
                      {"one_particle_weights", values_json(s.one_particle_weights)},
                      {"deviation", number(deviation)},
                      {"residuals", values_json(s.residuals)}});
    t.rows.push_back({lattice.v().value(), lattice.kappa(), static_cast<double>(lattice.size()),
                      static_cast<double>(b.basis->dimension()), s.e0, s.hvz_onset_estimate, deviation});
  }
  bool decreasing = true;
  for (std::size_t k = 0; k + 1 < deviations.size(); ++k) decreasing = decreasing && deviations[k + 1] < deviations[k];
  r.report = {{"levels", levels},
              {"deviation_decreasing", decreasing},
              {"final_deviation", number(deviations.back())},
              {"final_within_tenth_mass", deviations.back() <= 0.1 * c.mass},
              {"n_max", c.n_max},
              {"lambda", c.lambda}};
  r.quantities = {{"hvz_onset_estimate", "lowest excited level dominated by a*_s psi0"},
                  {"deviation", "|onset - (E0 + m)|"},
                  {"one_particle_weights", "weight of each level in span{a*_s psi0}"}};
  r.traces.push_back(std::move(t));
  return r;
}

RunRecord run_convergence(const ExperimentConfig& c) {
  RunRecord r;
  std::vector<HamiltonianBundle> bundles;
  for (const auto& lattice : refinement(c, 2, "convergence")) bundles.push_back(bundle_on(c, lattice));
  const double beta = c.beta ? *c.beta : default_shift(bundles.front(), c.solver);
  const ConvergenceTrace trace = resolvent_convergence(bundles, beta, c.solver);
  json levels = json::array();
  CsvTable t{"levels", {"v", "kappa", "modes", "dimension", "e0", "number_resolvent_norm"}, {}};
  for (std::size_t k = 0; k < trace.levels.size(); ++k) {
    const auto& l = trace.levels[k];
    levels.push_back({{"v", bundles[k].basis->lattice().v().str()}, {"kappa", l.kappa}, {"modes", l.modes}, {"dimension", l.dimension},
                      {"e0", trace.e0_trace[k]}, {"number_resolvent_norm", trace.number_resolvent_norms[k]}});
    t.rows.push_back({l.v, l.kappa, static_cast<double>(l.modes), static_cast<double>(l.dimension), trace.e0_trace[k],
                      trace.number_resolvent_norms[k]});
  }
  CsvTable g{"gaps", {"pair", "resolvent_gap"}, {}};
  bool decreasing = true;
  for (std::size_t k = 0; k < trace.resolvent_gaps.size(); ++k) {
    g.rows.push_back({static_cast<double>(k), trace.resolvent_gaps[k]});
    if (k > 0) decreasing = decreasing && trace.resolvent_gaps[k] < trace.resolvent_gaps[k - 1];
  }
  const auto [lo, hi] = std::minmax_element(trace.number_resolvent_norms.begin(), trace.number_resolvent_norms.end());
  r.report = {{"beta", beta},
              {"levels", levels},
              {"resolvent_gaps", values_json(trace.resolvent_gaps)},
              {"gaps_decreasing", decreasing},
              {"number_resolvent_spread", (*hi - *lo) / *lo},
              {"n_max", c.n_max},
              {"lambda", c.lambda}};
  r.quantities = {{"resolvent_gaps", "||(H_k + beta)^{-1} - compressed (H_{k+1} + beta)^{-1}|| for adjacent levels"},
                  {"number_resolvent_norm", "||N (H + beta)^{-1}|| per level"},
                  {"number_resolvent_spread", "(max - min) / min of the number-resolvent norms"}};
  r.traces.push_back(std::move(t));
  r.traces.push_back(std::move(g));
  return r;
}

RunRecord run_probe(const ExperimentConfig& c) {
  RunRecord r;
  const HamiltonianBundle b = bundle_on(c, config_lattice(c));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(omega_block(c.lambda, b.potential, b.basis->lattice()).assembled());
  CVector f = CVector::Zero(static_cast<Eigen::Index>(b.basis->slots()));
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double z = (es.eigenvalues()(k) - c.probe_center) / c.probe_width;
    f += std::exp(-z * z) * es.eigenvectors().col(k);
  }
  if (f.norm() < 1e-12) throw ParameterError("probe envelope has no weight on the one-particle spectrum");
  f.normalize();
  const GroundState gs = ground_state(b.H, c.solver);
  const ProbeResult p = heisenberg_probe(b, f, c.probe_times, gs.vector);

  json re = json::array(), im = json::array(), trusted = json::array();
  CsvTable t{"trace", {"t", "re", "im", "trusted"}, {}};
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    re.push_back(p.values[k].real());
    im.push_back(p.values[k].imag());
    trusted.push_back(static_cast<bool>(p.trusted[k]));
    t.rows.push_back({p.times[k], p.values[k].real(), p.values[k].imag(), p.trusted[k] ? 1.0 : 0.0});
  }
  bool decreasing = true;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.cauchy_differences.size(); ++k) {
    if (p.times[k] <= 0.0 || !p.trusted[k + 1]) continue;
    decreasing = decreasing && p.cauchy_differences[k] < previous;
    previous = p.cauchy_differences[k];
  }
  r.report = {{"times", p.times},
              {"re", re},
              {"im", im},
              {"cauchy_differences", values_json(p.cauchy_differences)},
              {"trusted", trusted},
              {"recurrence_time", number(p.recurrence_time)},
              {"cauchy_decreasing", decreasing},
              {"e0", gs.energy},
              {"lattice", lattice_json(b.basis->lattice())},
              {"n_max", c.n_max},
              {"lambda", c.lambda}};
  r.quantities = {{"re", "Re <psi0| e^{itH} phi(F_t) e^{-itH} |psi0>, F_t = e^{-it omega} F"},
                  {"cauchy_differences", "|value(t_{k+1}) - value(t_k)|"},
                  {"recurrence_time", "2 pi / smallest level spacing of omega in the support of F"},
                  {"cauchy_decreasing", "differences between positive trusted times decrease"}};
  r.traces.push_back(std::move(t));
  return r;
}

RunRecord run_validate(const ExperimentConfig& c) {
  RunRecord r;
  r.report = {{"valid", true}, {"modes", config_lattice(c).size()}};
  return r;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"lambda-quant", "quantize", "spectrum", "hvz", "convergence", "probe-scattering", "validate"};
  return names;
}

RunRecord execute(const std::string& subcommand, const ExperimentConfig& config) {
  RunRecord r;
  if (subcommand == "lambda-quant") r = run_lambda_quant(config);
  else if (subcommand == "quantize") r = run_quantize(config);
  else if (subcommand == "spectrum") r = run_spectrum(config);
  else if (subcommand == "hvz") r = run_hvz(config);
  else if (subcommand == "convergence") r = run_convergence(config);
  else if (subcommand == "probe-scattering") r = run_probe(config);
  else if (subcommand == "validate") r = run_validate(config);
  else throw ParameterError("unknown subcommand " + subcommand);
  r.subcommand = subcommand;
  r.config = canonical_json(config);
  r.config_hash = config_hash(config);
  r.version = KGFOCK_VERSION;
  r.created = utc_timestamp();
  return r;
}

int exit_code_for(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const StabilityError&) {
    return kStability;
  } catch (const UnstableConfigurationError&) {
    return kStability;
  } catch (const SolverError&) {
    return kSolver;
  } catch (const IllConditionedError&) {
    return kSolver;
  } catch (const GoldenMissingError&) {
    return kMissingGolden;
  } catch (...) {
    return kValidation;
  }
}

int run_command(const std::string& subcommand, const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig config = load_config(config_path);
    if (const char* dir = std::getenv("KGFOCK_OUTPUT_DIR"); dir && *dir) config.output_directory = dir;
    if (const char* threads = std::getenv("KGFOCK_THREADS"); threads && *threads) {
      const int n = std::atoi(threads);
      if (n < 1) throw ConfigError("KGFOCK_THREADS must be a positive integer");
      Eigen::setNbThreads(n);
    }
    const RunRecord record = execute(subcommand, config);
    if (record.report.contains("bundle")) err << "bundle " << record.report["bundle"].dump() << "\n";
    if (subcommand == "validate") {
      out << "config ok " << record.config_hash << "\n";
      return kOk;
    }
    for (const auto& path : write_record(config.output_directory, record)) out << "wrote " << path.string() << "\n";
    out << record.report.dump(2) << "\n";
    return kOk;
  } catch (const std::exception& e) {
    const int code = exit_code_for(std::current_exception());
    err << "kgfock " << subcommand << ": " << e.what() << "\n";
    return code;
  }
}

}  // namespace kgfock::app
