#pragma once

#include <cstdint>
#include <functional>

#include "kgfock/types.hpp"

namespace kgfock {

// y = A x for a Hermitian operator of dimension n.
using LinearMap = std::function<void(const CVector& x, CVector& y)>;

struct ExtremeEigenvalues {
  double lowest = 0.0;
  double highest = 0.0;
  int steps = 0;
  bool converged = false;
};

// Lanczos with full reorthogonalization for both ends of the spectrum of a Hermitian map.
ExtremeEigenvalues lanczos_extremes(const LinearMap& apply, Eigen::Index n, int max_steps, double tolerance,
                                    std::uint64_t seed = 0x5eed);

// Dimension from which norms switch from dense factorizations to Lanczos.
inline constexpr Eigen::Index kDenseNormLimit = 2048;

double hermitian_norm(const CMatrix& a);
double spectral_norm(const CMatrix& a);
// Largest singular value of a sparse matrix, dense below kDenseNormLimit.
double spectral_norm(const SparseMatrix& a);
// Largest singular value of A given A and its adjoint as maps; sqrt of the top eigenvalue of A^dag A.
double spectral_norm(const LinearMap& apply, const LinearMap& apply_adjoint, Eigen::Index n, int max_steps,
                     double tolerance);

// Real symmetric matrix of the Fourier multiplier symbol(k) on a periodic grid of g points, spacing dx.
RMatrix fourier_multiplier(int points, double dx, const std::function<double(double)>& symbol);
// FFT momenta 2 pi n / (g dx) for n in [-g/2, g/2), in FFT order.
RVector fft_momenta(int points, double dx);

double max_abs(const CMatrix& a);
double max_abs(const RMatrix& a);
double hermiticity_defect(const SparseMatrix& a);

}  // namespace kgfock
