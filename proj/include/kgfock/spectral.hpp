#pragma once

#include <vector>

#include "kgfock/eigensolver.hpp"
#include "kgfock/hamiltonian.hpp"

namespace kgfock {

struct GroundState {
  double energy = 0.0;
  CVector vector;
  double residual = 0.0;
};

GroundState ground_state(const FockOperator& h, const EigenSolverOptions& options = {});

struct SpectralReport {
  double e0 = 0.0;
  std::vector<double> eigenvalues;  // ascending, length report_depth + 1
  double gap = 0.0;
  double hvz_onset_estimate = 0.0;  // NaN when no one-particle dominated level was found
  int onset_level = -1;
  double mass = 0.0;
  std::vector<double> one_particle_weights;
  std::vector<double> residuals;
};

// Low-lying spectrum plus the onset of the ground-state-plus-one-particle branch: the lowest excited level
// whose eigenvector has more than half of its weight in span{a*_s psi0}.
SpectralReport hvz_gap_probe(const HamiltonianBundle& bundle, int report_depth, const EigenSolverOptions& options = {},
                             int search_depth = 16);

struct ConvergenceLevel {
  double v = 0.0;
  double kappa = 0.0;
  std::size_t modes = 0;
  std::size_t dimension = 0;
};

struct ConvergenceTrace {
  std::vector<ConvergenceLevel> levels;
  std::vector<double> resolvent_gaps;  // adjacent pairs, coarse to fine
  std::vector<double> e0_trace;
  std::vector<double> number_resolvent_norms;  // ||N (H + beta)^{-1}|| per level
  double beta = 0.0;
};

// beta = 1 + |min spec H| of the first (coarsest) bundle.
double default_shift(const HamiltonianBundle& coarsest, const EigenSolverOptions& options = {});

// Bundles must be ordered coarse to fine on nested lattices with a common n_max.
ConvergenceTrace resolvent_convergence(const std::vector<HamiltonianBundle>& bundles, double beta,
                                       const EigenSolverOptions& options = {});

// Dense (H + beta)^{-1}; throws ParameterError if H + beta is not positive definite.
CMatrix shifted_resolvent(const FockOperator& h, double beta);
double number_resolvent_norm(const FockOperator& h, double beta);

struct ProbeResult {
  std::vector<double> times;
  std::vector<Complex> values;
  std::vector<double> cauchy_differences;  // |value[k+1] - value[k]|
  std::vector<bool> trusted;               // t <= recurrence time
  double recurrence_time = 0.0;
};

// <psi| e^{itH} phi(F_t) e^{-itH} |psi> with F_t = e^{-it omega_{lambda V}} F, F over the 2M slots.
ProbeResult heisenberg_probe(const HamiltonianBundle& bundle, const CVector& f, const std::vector<double>& times,
                             const CVector& psi);

// 2 pi / smallest nonzero spacing of omega_{lambda V} eigenvalues carrying weight of F.
double recurrence_time(const HamiltonianBundle& bundle, const CVector& f);

}  // namespace kgfock
