#include "kgfock/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "kgfock/errors.hpp"

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

RVector residual_norms(const SparseMatrix& h, const RVector& values, const CMatrix& vectors) {
  RVector out(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const CVector r = h * vectors.col(k) - values(k) * vectors.col(k);
    out(k) = r.norm();
  }
  return out;
}

void enforce_contract(const EigenPairs& pairs, double limit) {
  for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
    const double allowed = limit * std::max(1.0, std::abs(pairs.values(k)));
    if (!(pairs.residuals(k) <= allowed)) {
      throw SolverError("eigenpair " + std::to_string(k) + " has residual " + std::to_string(pairs.residuals(k)) +
                            " above " + std::to_string(allowed),
                        pairs.residuals(k));
    }
  }
}

EigenPairs diagonal_pairs(const SparseMatrix& h, int count) {
  const Eigen::Index n = h.rows();
  RVector diag = RVector::Zero(n);
  for (Eigen::Index r = 0; r < h.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(h, r); it; ++it) diag(it.row()) = it.value().real();
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return diag(a) < diag(b); });
  EigenPairs out;
  out.values.resize(count);
  out.vectors = CMatrix::Zero(n, count);
  for (int k = 0; k < count; ++k) {
    out.values(k) = diag(order[static_cast<std::size_t>(k)]);
    out.vectors(order[static_cast<std::size_t>(k)], k) = 1.0;
  }
  out.residuals = RVector::Zero(count);
  out.dense = true;
  return out;
}

EigenPairs dense_pairs(const SparseMatrix& h, int count) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es{CMatrix(h)};
  if (es.info() != Eigen::Success) throw SolverError("dense Hermitian eigensolver failed", 0.0);
  EigenPairs out;
  out.values = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count);
  out.dense = true;
  return out;
}

// Orthonormalize the columns of x against `basis` (first `used` columns) and among themselves.
// Columns that collapse are replaced by fresh random directions.
void orthonormalize_block(CMatrix& x, const CMatrix& basis, Eigen::Index used, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const Eigen::Index n = x.rows();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double before = x.col(c).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (used > 0) x.col(c) -= basis.leftCols(used) * (basis.leftCols(used).adjoint() * x.col(c));
        if (c > 0) x.col(c) -= x.leftCols(c) * (x.leftCols(c).adjoint() * x.col(c));
      }
      const double after = x.col(c).norm();
      if (after > 1e-10 * before && after > 1e-300) {
        x.col(c) /= after;
        break;
      }
      for (Eigen::Index i = 0; i < n; ++i) x(i, c) = Complex(normal(rng), normal(rng));
    }
  }
}

EigenPairs krylov_pairs(const SparseMatrix& h, int count, const EigenSolverOptions& options) {
  const Eigen::Index n = h.rows();
  const int b = std::max(1, options.block_size);
  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max<Eigen::Index>(options.max_basis, 3 * (count + b)));
  const Eigen::Index keep = std::min<Eigen::Index>(cap - b, count + 2 * b);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;

  CMatrix v(n, cap);
  CMatrix hv(n, cap);
  Eigen::Index used = 0;
  CMatrix x(n, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = Complex(normal(rng), normal(rng));
  }
  EigenPairs out;
  int restarts = 0;
  int since_check = 0;
  while (true) {
    const Eigen::Index width = std::min<Eigen::Index>(x.cols(), cap - used);
    CMatrix block = x.leftCols(width);
    orthonormalize_block(block, v, used, rng);
    v.middleCols(used, width) = block;
    for (Eigen::Index c = 0; c < width; ++c) hv.col(used + c) = h * block.col(c);
    out.matvecs += static_cast<int>(width);
    used += width;
    since_check += static_cast<int>(width);

    const bool full = used == cap;
    if (used < count || (since_check < 24 && !full)) {
      x = hv.middleCols(used - width, width);
      continue;
    }
    since_check = 0;
    CMatrix t = v.leftCols(used).adjoint() * hv.leftCols(used);
    t = (0.5 * (t + t.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(t);
    const Eigen::Index take = std::min<Eigen::Index>(used, std::max<Eigen::Index>(keep, count));
    const CMatrix s = es.eigenvectors().leftCols(take);
    const RVector theta = es.eigenvalues().head(take);
    const CMatrix ritz = v.leftCols(used) * s;
    const CMatrix hritz = hv.leftCols(used) * s;
    const CMatrix resid = hritz - ritz * theta.cast<Complex>().asDiagonal();
    bool converged = true;
    for (int k = 0; k < count; ++k) {
      converged = converged && resid.col(k).norm() <= options.tolerance * std::max(1.0, std::abs(theta(k)));
    }
    if (converged || used == n) {
      out.values = theta.head(count);
      out.vectors = ritz.leftCols(count);
      return out;
    }
    if (full) {
      if (++restarts > options.max_restarts) {
        out.values = theta.head(count);
        out.vectors = ritz.leftCols(count);
        return out;
      }
      // Thick restart on the leading Ritz vectors; continue from their residuals.
      v.leftCols(take) = ritz;
      hv.leftCols(take) = hritz;
      used = take;
      x = resid.leftCols(std::min<Eigen::Index>(b, take));
    } else {
      x = hv.middleCols(used - width, width);
    }
  }
}

}  // namespace

EigenPairs lowest_eigenpairs(const SparseMatrix& h, int count, const EigenSolverOptions& options) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw ShapeError("eigensolver needs a square matrix");
  if (count < 1) throw ParameterError("eigensolver needs count >= 1");
  count = static_cast<int>(std::min<Eigen::Index>(count, n));
  EigenPairs out;
  if (is_diagonal(h)) {
    out = diagonal_pairs(h, count);
  } else if (static_cast<std::size_t>(n) <= options.dense_limit) {
    out = dense_pairs(h, count);
  } else {
    out = krylov_pairs(h, count, options);
  }
  out.residuals = residual_norms(h, out.values, out.vectors);
  enforce_contract(out, options.residual_contract);
  return out;
}

EigenPairs full_eigendecomposition(const SparseMatrix& h) {
  const auto n = static_cast<int>(h.rows());
  EigenPairs out = is_diagonal(h) ? diagonal_pairs(h, n) : dense_pairs(h, n);
  out.residuals = residual_norms(h, out.values, out.vectors);
  return out;
}

}  // namespace kgfock
