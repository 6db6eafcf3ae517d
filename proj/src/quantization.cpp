#include "kgfock/quantization.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "kgfock/errors.hpp"
#include "kgfock/linalg.hpp"

namespace kgfock {

namespace {

void require_vector(const RVector& y, int points, const char* what) {
  if (y.size() != 4 * points) {
    throw ShapeError(std::string(what) + ": phase vector has " + std::to_string(y.size()) + " entries, expected " + std::to_string(4 * points));
  }
}

}  // namespace

PhaseSpaceGrid make_phase_space_grid(int points, double length, double mass, const Potential& potential) {
  if (points <= 0 || points % 2 != 0) throw ParameterError("phase-space grid needs an even positive number of points");
  if (!(length > 0.0)) throw ParameterError("phase-space grid length must be positive");
  if (!(mass > 0.0)) throw ParameterError("mass must be positive");
  PhaseSpaceGrid grid;
  grid.points = points;
  grid.dx = length / points;
  grid.x0 = -0.5 * length;
  grid.mass = mass;
  grid.v_samples.resize(points);
  for (int i = 0; i < points; ++i) grid.v_samples(i) = potential.value(grid.x0 + i * grid.dx);
  return grid;
}

RMatrix dispersion_power(const PhaseSpaceGrid& grid, double power) {
  const double m2 = grid.mass * grid.mass;
  return fourier_multiplier(grid.points, grid.dx, [&](double k) { return std::pow(k * k + m2, 0.5 * power); });
}

double positivity_margin(const PhaseSpaceGrid& grid) {
  if (grid.v_samples.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const RMatrix cross = grid.v_samples.asDiagonal() * dispersion_power(grid, -1.0);
  Eigen::BDCSVD<RMatrix> svd(cross);
  return svd.singularValues()(0);
}

RealGenerator build_generator(const PhaseSpaceGrid& grid) {
  const int g = grid.points;
  if (grid.v_samples.size() != g) throw ShapeError("potential samples do not match the grid");
  if (!grid.v_samples.allFinite()) throw ParameterError("potential samples must be finite");
  RealGenerator gen;
  gen.delta = positivity_margin(grid);
  if (gen.delta >= 1.0) {
    throw UnstableConfigurationError("energy form is not positive: delta = " + std::to_string(gen.delta) + " >= 1", gen.delta);
  }
  const RMatrix eps2 = dispersion_power(grid, 2.0);
  const RMatrix v = grid.v_samples.asDiagonal();
  const RMatrix id = RMatrix::Identity(g, g);

  // Energy form |pi|^2 + |eps phi|^2 + 2 pi1.V phi2 - 2 pi2.V phi1.
  RMatrix e = RMatrix::Zero(4 * g, 4 * g);
  e.block(0, 0, g, g) = id;
  e.block(g, g, g, g) = id;
  e.block(2 * g, 2 * g, g, g) = eps2;
  e.block(3 * g, 3 * g, g, g) = eps2;
  e.block(0, 3 * g, g, g) = v;
  e.block(3 * g, 0, g, g) = v;
  e.block(g, 2 * g, g, g) = -v;
  e.block(2 * g, g, g, g) = -v;

  // pi' = -iV pi - eps^2 phi, phi' = pi - iV phi, split into real and imaginary parts.
  RMatrix a = RMatrix::Zero(4 * g, 4 * g);
  a.block(0, g, g, g) = v;
  a.block(0, 2 * g, g, g) = -eps2;
  a.block(g, 0, g, g) = -v;
  a.block(g, 3 * g, g, g) = -eps2;
  a.block(2 * g, 0, g, g) = id;
  a.block(2 * g, 3 * g, g, g) = v;
  a.block(3 * g, g, g, g) = id;
  a.block(3 * g, 2 * g, g, g) = -v;

  RMatrix omega = RMatrix::Zero(4 * g, 4 * g);
  omega.block(0, 2 * g, 2 * g, 2 * g) = grid.dx * RMatrix::Identity(2 * g, 2 * g);
  omega.block(2 * g, 0, 2 * g, 2 * g) = -grid.dx * RMatrix::Identity(2 * g, 2 * g);

  gen.matrix = std::move(a);
  gen.metric = grid.dx * e;
  gen.symplectic = std::move(omega);
  return gen;
}

KahlerStructure polar_decompose(const RealGenerator& generator) {
  const RMatrix& a = generator.matrix;
  const RMatrix& e = generator.metric;
  const auto n = a.rows();
  if (a.cols() != n || e.rows() != n || e.cols() != n) throw ShapeError("generator and metric must be square of equal size");
  const double scale = (e * a).norm();
  const double antisym = (a.transpose() * e + e * a).norm();
  if (antisym > 1e-10 * std::max(1.0, scale)) {
    throw ContractError("generator is not antisymmetric in the energy metric (residual " + std::to_string(antisym) + ")");
  }

  Eigen::SelfAdjointEigenSolver<RMatrix> metric_es(e);
  if (metric_es.eigenvalues()(0) <= 0.0) throw ContractError("energy metric is not positive definite");
  const RVector sq = metric_es.eigenvalues().cwiseSqrt();
  const RMatrix& q = metric_es.eigenvectors();
  const RMatrix e_half = q * sq.asDiagonal() * q.transpose();
  const RMatrix e_half_inv = q * sq.cwiseInverse().asDiagonal() * q.transpose();

  // B is antisymmetric; h~ = (B^T B)^{1/2} and j~ = B h~^{-1} is orthogonal.
  const RMatrix b = e_half * a * e_half_inv;
  RMatrix btb = b.transpose() * b;
  btb = 0.5 * (btb + btb.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(btb);
  const RVector mu = es.eigenvalues().cwiseMax(0.0);
  const double smallest = std::sqrt(mu(0));
  if (smallest <= 1e-10) throw IllConditionedError("generator is numerically singular", smallest);
  const RMatrix& w = es.eigenvectors();
  const RVector root = mu.cwiseSqrt();
  const RMatrix h_tilde = w * root.asDiagonal() * w.transpose();
  const RMatrix h_tilde_inv = w * root.cwiseInverse().asDiagonal() * w.transpose();

  KahlerStructure ks;
  ks.h = e_half_inv * h_tilde * e_half;
  ks.j = e_half_inv * (b * h_tilde_inv) * e_half;
  ks.symplectic = generator.symplectic;
  const RMatrix omega_j = ks.symplectic * ks.j;
  ks.dyn_gram = omega_j.cast<Complex>() + Complex(0.0, 1.0) * ks.symplectic.cast<Complex>();
  ks.h_spectrum = root;
  return ks;
}

Complex dyn_inner(const KahlerStructure& ks, const RVector& y1, const RVector& y2) {
  const auto n = ks.j.rows();
  if (y1.size() != n || y2.size() != n) throw ShapeError("dyn_inner: phase vectors must have dimension " + std::to_string(n));
  const RVector jy2 = ks.j * y2;
  return Complex(y1.dot(ks.symplectic * jy2), y1.dot(ks.symplectic * y2));
}

FreeImage free_identification(const PhaseSpaceGrid& grid, const RVector& y) {
  const int g = grid.points;
  require_vector(y, g, "free_identification");
  const RMatrix inv_half = dispersion_power(grid, -0.5);
  const RMatrix half = dispersion_power(grid, 0.5);
  FreeImage out;
  out.first = (inv_half * y.segment(0, g)).cast<Complex>() + Complex(0.0, 1.0) * (half * y.segment(2 * g, g)).cast<Complex>();
  out.second = (inv_half * y.segment(g, g)).cast<Complex>() + Complex(0.0, 1.0) * (half * y.segment(3 * g, g)).cast<Complex>();
  return out;
}

RVector time_reversal(const RVector& y) {
  if (y.size() % 4 != 0) throw ShapeError("time_reversal: phase vector length must be a multiple of 4");
  const auto g = y.size() / 4;
  RVector out = y;
  out.segment(0, g) = -y.segment(0, g);
  out.segment(3 * g, g) = -y.segment(3 * g, g);
  return out;
}

RMatrix time_reversal_matrix(int points) {
  RVector d = RVector::Ones(4 * points);
  d.segment(0, points).setConstant(-1.0);
  d.segment(3 * points, points).setConstant(-1.0);
  return d.asDiagonal();
}

QuantizationReport quantize(const PhaseSpaceGrid& grid) {
  QuantizationReport report;
  const RealGenerator gen = build_generator(grid);
  report.delta = gen.delta;
  report.antisymmetry_residual = (gen.matrix.transpose() * gen.metric + gen.metric * gen.matrix).norm() / (gen.metric * gen.matrix).norm();
  const KahlerStructure ks = polar_decompose(gen);
  const auto n = ks.j.rows();
  report.min_spec_hV = ks.h_spectrum(0);
  report.j_square_residual = max_abs(RMatrix(ks.j * ks.j + RMatrix::Identity(n, n)));
  report.reconstruction_residual = (ks.j * ks.h - gen.matrix).norm() / gen.matrix.norm();

  PhaseSpaceGrid free = grid;
  free.v_samples.setZero();
  const KahlerStructure ks0 = polar_decompose(build_generator(free));
  const RVector k = fft_momenta(grid.points, grid.dx);
  RVector expected(4 * grid.points);
  for (int i = 0; i < grid.points; ++i) {
    const double e = std::sqrt(k(i) * k(i) + grid.mass * grid.mass);
    for (int c = 0; c < 4; ++c) expected(4 * i + c) = e;
  }
  std::sort(expected.data(), expected.data() + expected.size());
  report.free_check_error = (ks0.h_spectrum - expected).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace kgfock
