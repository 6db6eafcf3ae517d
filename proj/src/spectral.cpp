#include "kgfock/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "kgfock/errors.hpp"
#include "kgfock/linalg.hpp"

namespace kgfock {

namespace {

bool is_diagonal(const SparseMatrix& h) {
  for (Eigen::Index r = 0; r < h.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(h, r); it; ++it) {
      if (it.row() != it.col() && it.value() != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

GroundState ground_state(const FockOperator& h, const EigenSolverOptions& options) {
  const EigenPairs pairs = lowest_eigenpairs(h.matrix, 1, options);
  return GroundState{pairs.values(0), pairs.vectors.col(0), pairs.residuals(0)};
}

SpectralReport hvz_gap_probe(const HamiltonianBundle& bundle, int report_depth, const EigenSolverOptions& options,
                             int search_depth) {
  if (report_depth < 1) throw ParameterError("report_depth must be at least 1");
  const auto& basis = bundle.basis;
  const int count = static_cast<int>(std::min<std::size_t>(basis->dimension(), static_cast<std::size_t>(std::max(report_depth + 1, search_depth))));
  const EigenPairs pairs = lowest_eigenpairs(bundle.H.matrix, count, options);

  SpectralReport report;
  report.mass = basis->lattice().mass();
  report.e0 = pairs.values(0);
  for (int k = 0; k < std::min(count, report_depth + 1); ++k) {
    report.eigenvalues.push_back(pairs.values(k));
    report.residuals.push_back(pairs.residuals(k));
  }
  report.gap = count > 1 ? pairs.values(1) - pairs.values(0) : 0.0;

  // Orthonormal basis of span{a*_s psi0}.
  const CVector psi0 = pairs.vectors.col(0);
  const auto slots = static_cast<Eigen::Index>(basis->slots());
  CMatrix raised(psi0.size(), slots);
  for (Eigen::Index s = 0; s < slots; ++s) {
    CVector f = CVector::Zero(slots);
    f(s) = 1.0;
    raised.col(s) = creation_field(basis, f).matrix * psi0;
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(raised);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const CMatrix q = CMatrix(qr.householderQ()).leftCols(rank);

  report.hvz_onset_estimate = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < count; ++k) {
    const double w = k == 0 ? 0.0 : (q.adjoint() * pairs.vectors.col(k)).squaredNorm();
    report.one_particle_weights.push_back(w);
    if (k > 0 && report.onset_level < 0 && w > 0.5) {
      report.onset_level = k;
      report.hvz_onset_estimate = pairs.values(k);
    }
  }
  return report;
}

double default_shift(const HamiltonianBundle& coarsest, const EigenSolverOptions& options) {
  return 1.0 + std::abs(ground_state(coarsest.H, options).energy);
}

CMatrix shifted_resolvent(const FockOperator& h, double beta) {
  const auto n = h.matrix.rows();
  if (is_diagonal(h.matrix)) {
    CMatrix out = CMatrix::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double d = h.matrix.coeff(r, r).real() + beta;
      if (!(d > 0.0)) throw ParameterError("shift beta does not lie above minus the spectrum");
      out(r, r) = 1.0 / d;
    }
    return out;
  }
  CMatrix a = CMatrix(h.matrix);
  a.diagonal().array() += beta;
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) throw ParameterError("shift beta does not lie above minus the spectrum");
  return llt.solve(CMatrix::Identity(n, n));
}

double number_resolvent_norm(const FockOperator& h, double beta) {
  const CMatrix r = shifted_resolvent(h, beta);
  RVector n(r.rows());
  for (Eigen::Index s = 0; s < n.size(); ++s) n(s) = h.basis->particle_number(static_cast<std::size_t>(s));
  return spectral_norm(CMatrix(n.asDiagonal() * r));
}

ConvergenceTrace resolvent_convergence(const std::vector<HamiltonianBundle>& bundles, double beta,
                                       const EigenSolverOptions& options) {
  if (bundles.empty()) throw ParameterError("resolvent_convergence needs at least one level");
  std::vector<NestedPair> pairs;
  for (std::size_t k = 0; k + 1 < bundles.size(); ++k) {
    pairs.push_back(make_nested_pair(bundles[k].basis->lattice(), bundles[k + 1].basis->lattice()));
  }
  ConvergenceTrace trace;
  trace.beta = beta;
  std::vector<CMatrix> resolvents;
  for (const auto& b : bundles) {
    const auto& lat = b.basis->lattice();
    trace.levels.push_back(ConvergenceLevel{lat.v().value(), lat.kappa(), lat.size(), b.basis->dimension()});
    const double e0 = ground_state(b.H, options).energy;
    trace.e0_trace.push_back(e0);
    if (!(e0 + beta > 0.0)) throw ParameterError("beta = " + std::to_string(beta) + " is below minus the spectrum (E0 = " + std::to_string(e0) + ")");
    resolvents.push_back(shifted_resolvent(b.H, beta));
    RVector n(resolvents.back().rows());
    for (Eigen::Index s = 0; s < n.size(); ++s) n(s) = b.basis->particle_number(static_cast<std::size_t>(s));
    trace.number_resolvent_norms.push_back(spectral_norm(CMatrix(n.asDiagonal() * resolvents.back())));
  }
  for (std::size_t k = 0; k + 1 < bundles.size(); ++k) {
    const CMatrix diff = resolvents[k] - compress(pairs[k], resolvents[k + 1], *bundles[k + 1].basis, *bundles[k].basis);
    const CMatrix herm = 0.5 * (diff + diff.adjoint());
    double gap = 0.0;
    if (max_abs(herm) > 0.0) {
      const auto ext = lanczos_extremes([&](const CVector& x, CVector& y) { y.noalias() = herm * x; }, herm.rows(), 50, 1e-8);
      gap = std::max(std::abs(ext.lowest), std::abs(ext.highest));
    }
    trace.resolvent_gaps.push_back(gap);
  }
  return trace;
}

double recurrence_time(const HamiltonianBundle& bundle, const CVector& f) {
  const OneParticleBlockOperator omega = omega_block(bundle.lambda, bundle.potential, bundle.basis->lattice());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(omega.assembled());
  const CVector coeff = es.eigenvectors().adjoint() * f;
  const double total = coeff.squaredNorm();
  std::vector<double> support;
  for (Eigen::Index k = 0; k < coeff.size(); ++k) {
    if (std::norm(coeff(k)) > 1e-12 * total) support.push_back(es.eigenvalues()(k));
  }
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < support.size(); ++k) {
    const double d = support[k] - support[k - 1];
    if (d > 1e-6 * std::max(1.0, std::abs(support[k]))) spacing = std::min(spacing, d);
  }
  return std::isfinite(spacing) ? 2.0 * kPi / spacing : std::numeric_limits<double>::infinity();
}

ProbeResult heisenberg_probe(const HamiltonianBundle& bundle, const CVector& f, const std::vector<double>& times,
                             const CVector& psi) {
  const auto& basis = bundle.basis;
  if (static_cast<std::size_t>(f.size()) != basis->slots()) throw ShapeError("heisenberg_probe: F must cover all slots");
  if (static_cast<std::size_t>(psi.size()) != basis->dimension()) throw ShapeError("heisenberg_probe: state has the wrong dimension");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ParameterError("heisenberg_probe: state must be normalized");
  for (double t : times) {
    if (!std::isfinite(t)) throw ParameterError("heisenberg_probe: times must be finite");
  }

  const OneParticleBlockOperator omega = omega_block(bundle.lambda, bundle.potential, basis->lattice());
  Eigen::SelfAdjointEigenSolver<CMatrix> one(omega.assembled());
  const CVector f_coeff = one.eigenvectors().adjoint() * f;

  const EigenPairs full = full_eigendecomposition(bundle.H.matrix);
  const CVector psi_coeff = full.vectors.adjoint() * psi;

  ProbeResult out;
  out.times = times;
  out.recurrence_time = recurrence_time(bundle, f);
  for (double t : times) {
    CVector ft_coeff = f_coeff;
    for (Eigen::Index k = 0; k < ft_coeff.size(); ++k) ft_coeff(k) *= std::polar(1.0, -t * one.eigenvalues()(k));
    const CVector ft = one.eigenvectors() * ft_coeff;
    CVector c = psi_coeff;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -t * full.values(k));
    const CVector psi_t = full.vectors * c;
    const FockOperator phi = field_operator(basis, ft);
    out.values.push_back(psi_t.dot(phi.matrix * psi_t));
    out.trusted.push_back(std::abs(t) <= out.recurrence_time);
  }
  for (std::size_t k = 0; k + 1 < out.values.size(); ++k) out.cauchy_differences.push_back(std::abs(out.values[k + 1] - out.values[k]));
  return out;
}

}  // namespace kgfock
