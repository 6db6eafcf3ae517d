#pragma once

#include <functional>
#include <limits>

#include "kgfock/lattice.hpp"
#include "kgfock/potential.hpp"
#include "kgfock/types.hpp"

namespace kgfock {

// M_{ij} = (2 pi)^{-1} Vhat(gamma_i - gamma_j) / v
CMatrix potential_matrix(const Potential& potential, const MomentumLattice& lattice);

// b_{ij} = (i/2) (sqrt(eps_i / eps_j) + sqrt(eps_j / eps_i)) M_{ij}; anti-Hermitian for real V.
CMatrix b_matrix(const Potential& potential, const MomentumLattice& lattice);

struct PairKernel {
  MomentumLattice lattice;
  CMatrix matrix;
};

// R_{ij} = (i / 4 pi) Vhat(gamma_i + gamma_j) (sqrt(eps_i / eps_j) - sqrt(eps_j / eps_i)) / v, antisymmetric.
PairKernel pair_kernel(const Potential& potential, const MomentumLattice& lattice);

// Right-hand side of the entrywise kernel bound: (1/4pi) |Vhat'(gamma_i + gamma_j)| / sqrt(eps_i eps_j) / v.
RMatrix pair_kernel_bound(const Potential& potential, const MomentumLattice& lattice);

struct CouplingReport {
  double c0 = 0.0;
  double c1 = 0.0;
  double lambda_quant = std::numeric_limits<double>::infinity();
  MomentumLattice lattice;

  bool unbounded() const { return lambda_quant == std::numeric_limits<double>::infinity(); }
};

CouplingReport lambda_quant(const Potential& potential, const MomentumLattice& lattice);

struct OneParticleBlockOperator {
  MomentumLattice lattice;
  double lambda = 0.0;
  RVector epsilon;  // diagonal blocks
  CMatrix coupling;  // upper off-diagonal block lambda * b

  CMatrix assembled() const;
  double min_eigenvalue() const;
};

OneParticleBlockOperator omega_block(double lambda, const Potential& potential, const MomentumLattice& lattice);

// Uniform position grid x_i = x_min + i dx and momentum grid k_l = k_min + l dk, same count.
struct WeylGrid {
  int points = 256;
  double x_min = -8.0;
  double dx = 1.0 / 16.0;
  double k_min = -8.0;
  double dk = 1.0 / 16.0;

  double x(int i) const { return x_min + i * dx; }
  double k(int l) const { return k_min + l * dk; }
};

using Symbol = std::function<Complex(double x, double k)>;

// Midpoint Weyl quantization acting on grid functions with the dx-weighted inner product;
// entry (i, j) = dx (2 pi)^{-1} sum_l e^{i (x_i - x_j) k_l} a((x_i + x_j) / 2, k_l) dk.
CMatrix weyl_quantize(const Symbol& symbol, const WeylGrid& grid);

// Frobenius norm of |D_{k1}|^s R with the discrete difference symbol |2 v sin(theta / 2)| applied spectrally.
double weighted_kernel_norm(const PairKernel& kernel, double s);

}  // namespace kgfock
