#include "kgfock/oneparticle.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "kgfock/errors.hpp"
#include "kgfock/linalg.hpp"

namespace kgfock {

namespace {

// Vhat at the integer offsets -span..span of the lattice, with conjugate symmetry imposed exactly.
std::vector<Complex> offset_table(const Potential& potential, const MomentumLattice& lattice, std::int64_t span) {
  std::vector<Complex> table(static_cast<std::size_t>(2 * span + 1));
  for (std::int64_t d = 0; d <= span; ++d) {
    const Complex value = potential.fourier(lattice.momentum_of(d));
    table[static_cast<std::size_t>(span + d)] = value;
    table[static_cast<std::size_t>(span - d)] = std::conj(value);
  }
  table[static_cast<std::size_t>(span)] = table[static_cast<std::size_t>(span)].real();
  return table;
}

// (eps_i - eps_j) / sqrt(eps_i eps_j) without cancellation.
double bracket(const MomentumLattice& lattice, std::size_t i, std::size_t j) {
  const double gi = lattice.mode(i);
  const double gj = lattice.mode(j);
  const double ei = lattice.dispersion(i);
  const double ej = lattice.dispersion(j);
  return (gi - gj) * (gi + gj) / ((ei + ej) * std::sqrt(ei * ej));
}

}  // namespace

CMatrix potential_matrix(const Potential& potential, const MomentumLattice& lattice) {
  const auto m = static_cast<Eigen::Index>(lattice.size());
  if (potential.identically_zero) return CMatrix::Zero(m, m);
  const std::int64_t span = m - 1;
  const auto table = offset_table(potential, lattice, span);
  const double weight = 1.0 / (2.0 * kPi * lattice.v().value());
  CMatrix out(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) out(i, j) = weight * table[static_cast<std::size_t>(span + i - j)];
  }
  return out;
}

CMatrix b_matrix(const Potential& potential, const MomentumLattice& lattice) {
  const CMatrix pot = potential_matrix(potential, lattice);
  const auto m = pot.rows();
  CMatrix out(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double ej = lattice.dispersion(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double ei = lattice.dispersion(static_cast<std::size_t>(i));
      const double sym = 0.5 * (std::sqrt(ei / ej) + std::sqrt(ej / ei));
      const Complex v = sym * pot(i, j);
      out(i, j) = Complex(-v.imag(), v.real());
    }
  }
  return out;
}

PairKernel pair_kernel(const Potential& potential, const MomentumLattice& lattice) {
  const auto m = static_cast<Eigen::Index>(lattice.size());
  PairKernel kernel{lattice, CMatrix::Zero(m, m)};
  if (potential.identically_zero) return kernel;
  const std::int64_t span = 2 * lattice.half_width();
  const auto table = offset_table(potential, lattice, span);
  const double weight = 1.0 / (4.0 * kPi * lattice.v().value());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const std::int64_t sum = lattice.integer_label(static_cast<std::size_t>(i)) + lattice.integer_label(static_cast<std::size_t>(j));
      const Complex v = weight * bracket(lattice, static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                        table[static_cast<std::size_t>(span + sum)];
      const Complex entry(-v.imag(), v.real());
      kernel.matrix(i, j) = entry;
      kernel.matrix(j, i) = -entry;
    }
  }
  return kernel;
}

RMatrix pair_kernel_bound(const Potential& potential, const MomentumLattice& lattice) {
  const auto m = static_cast<Eigen::Index>(lattice.size());
  RMatrix out = RMatrix::Zero(m, m);
  if (potential.identically_zero) return out;
  const double weight = 1.0 / (4.0 * kPi * lattice.v().value());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const std::int64_t sum = lattice.integer_label(static_cast<std::size_t>(i)) + lattice.integer_label(static_cast<std::size_t>(j));
      const double k = lattice.momentum_of(sum);
      out(i, j) = weight * std::abs(potential.derivative_fourier(k)) /
                  std::sqrt(lattice.dispersion(static_cast<std::size_t>(i)) * lattice.dispersion(static_cast<std::size_t>(j)));
    }
  }
  return out;
}

CouplingReport lambda_quant(const Potential& potential, const MomentumLattice& lattice) {
  CouplingReport report{0.0, 0.0, std::numeric_limits<double>::infinity(), lattice};
  if (potential.identically_zero) return report;
  const CMatrix pot = potential_matrix(potential, lattice);
  const auto m = pot.rows();
  CMatrix sym(m, m);
  double c1_sq = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double ej = lattice.dispersion(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double ei = lattice.dispersion(static_cast<std::size_t>(i));
      sym(i, j) = pot(i, j) * (1.0 / ei + 1.0 / ej);
      // entry of eps^{-1/2} (M eps - eps M) eps^{-1/2}
      c1_sq += std::norm(pot(i, j) * bracket(lattice, static_cast<std::size_t>(j), static_cast<std::size_t>(i)));
    }
  }
  report.c0 = 0.5 * hermitian_norm(sym);
  report.c1 = std::sqrt(c1_sq);
  const double denom = report.c0 + report.c1 / lattice.mass();
  if (denom > 0.0) report.lambda_quant = 1.0 / denom;
  return report;
}

CMatrix OneParticleBlockOperator::assembled() const {
  const auto m = epsilon.size();
  CMatrix out = CMatrix::Zero(2 * m, 2 * m);
  out.topLeftCorner(m, m).diagonal() = epsilon.cast<Complex>();
  out.bottomRightCorner(m, m).diagonal() = epsilon.cast<Complex>();
  out.topRightCorner(m, m) = coupling;
  out.bottomLeftCorner(m, m) = coupling.adjoint();
  return out;
}

double OneParticleBlockOperator::min_eigenvalue() const {
  if (coupling.size() == 0 || max_abs(coupling) == 0.0) return epsilon.minCoeff();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(assembled(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

OneParticleBlockOperator omega_block(double lambda, const Potential& potential, const MomentumLattice& lattice) {
  const auto m = static_cast<Eigen::Index>(lattice.size());
  OneParticleBlockOperator op{lattice, lambda, lattice.dispersion_vector(), CMatrix::Zero(m, m)};
  if (lambda != 0.0 && !potential.identically_zero) op.coupling = lambda * b_matrix(potential, lattice);
  return op;
}

CMatrix weyl_quantize(const Symbol& symbol, const WeylGrid& grid) {
  if (grid.points <= 0 || !(grid.dx > 0.0) || !(grid.dk > 0.0)) throw ParameterError("weyl grid needs positive sizes");
  const int n = grid.points;
  const int span = 2 * n - 1;
  // Entries depend on (i + j) through the midpoint and on (i - j) through the phase.
  CMatrix sym(n, span);
  CMatrix phase(n, span);
  for (int s = 0; s < span; ++s) {
    const double mid = grid.x_min + 0.5 * s * grid.dx;
    const double diff = (s - (n - 1)) * grid.dx;
    for (int l = 0; l < n; ++l) {
      sym(l, s) = symbol(mid, grid.k(l));
      phase(l, s) = std::polar(1.0, diff * grid.k(l));
    }
  }
  const double prefactor = grid.dx * grid.dk / (2.0 * kPi);
  CMatrix out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out(i, j) = prefactor * (phase.col(i - j + n - 1).transpose() * sym.col(i + j)).value();
    }
  }
  return out;
}

double weighted_kernel_norm(const PairKernel& kernel, double s) {
  if (!(s >= 0.0)) throw ParameterError("weighted_kernel_norm needs s >= 0");
  const auto m = kernel.matrix.rows();
  if (m == 0) return 0.0;
  if (s == 0.0) return kernel.matrix.norm();
  const double v = kernel.lattice.v().value();
  std::vector<double> weight(static_cast<std::size_t>(m));
  for (Eigen::Index n = 0; n < m; ++n) {
    const double theta = 2.0 * kPi * static_cast<double>(n) / static_cast<double>(m);
    weight[static_cast<std::size_t>(n)] = std::pow(std::abs(2.0 * v * std::sin(0.5 * theta)), s);
  }
  Eigen::FFT<double> fft;
  std::vector<Complex> column(static_cast<std::size_t>(m));
  std::vector<Complex> spectrum;
  double total = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) column[static_cast<std::size_t>(i)] = kernel.matrix(i, j);
    fft.fwd(spectrum, column);
    for (Eigen::Index n = 0; n < m; ++n) total += std::norm(weight[static_cast<std::size_t>(n)] * spectrum[static_cast<std::size_t>(n)]);
  }
  return std::sqrt(total / static_cast<double>(m));
}

}  // namespace kgfock
