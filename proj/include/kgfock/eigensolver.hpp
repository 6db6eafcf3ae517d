#pragma once

#include <cstddef>
#include <cstdint>

#include "kgfock/types.hpp"

namespace kgfock {

struct EigenSolverOptions {
  std::size_t dense_limit = 1500;   // dense Hermitian solver up to this dimension
  int block_size = 4;
  int max_basis = 640;              // Krylov columns kept before a thick restart
  int max_restarts = 60;
  double tolerance = 1e-10;         // Ritz residual target, relative to max(1, |E|)
  double residual_contract = 1e-8;  // hard limit on ||H psi - E psi|| / max(1, |E|)
  std::uint64_t seed = 0x6b67666f636bULL;
};

struct EigenPairs {
  RVector values;     // ascending
  CMatrix vectors;    // columns normalized
  RVector residuals;  // ||H psi - E psi||
  bool dense = false;
  int matvecs = 0;
};

// Lowest `count` eigenpairs of a Hermitian sparse matrix. Diagonal matrices are solved exactly.
EigenPairs lowest_eigenpairs(const SparseMatrix& h, int count, const EigenSolverOptions& options = {});

// Full dense eigendecomposition (for time evolution at desk scale).
EigenPairs full_eigendecomposition(const SparseMatrix& h);

}  // namespace kgfock
