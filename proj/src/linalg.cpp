#include "kgfock/linalg.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

#include "kgfock/errors.hpp"

namespace kgfock {

ExtremeEigenvalues lanczos_extremes(const LinearMap& apply, Eigen::Index n, int max_steps, double tolerance,
                                    std::uint64_t seed) {
  ExtremeEigenvalues out;
  if (n == 0) return out;
  const int steps_cap = static_cast<int>(std::min<Eigen::Index>(max_steps, n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CVector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = Complex(normal(rng), normal(rng));
  q.normalize();

  CMatrix basis(n, steps_cap);
  std::vector<double> alpha;
  std::vector<double> beta;
  CVector w(n);
  for (int k = 0; k < steps_cap; ++k) {
    basis.col(k) = q;
    apply(q, w);
    const double a = q.dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      const CVector coeff = basis.leftCols(k + 1).adjoint() * w;
      w.noalias() -= basis.leftCols(k + 1) * coeff;
    }
    const double b = w.norm();

    RVector diag = Eigen::Map<RVector>(alpha.data(), k + 1);
    RVector sub(k);
    for (int i = 0; i < k; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<RMatrix> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const RVector& theta = tri.eigenvalues();
    const double lo = theta(0);
    const double hi = theta(k);
    const double res_lo = b * std::abs(tri.eigenvectors()(k, 0));
    const double res_hi = b * std::abs(tri.eigenvectors()(k, k));
    const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
    out.lowest = lo;
    out.highest = hi;
    out.steps = k + 1;
    if (b <= 1e-14 * scale || (res_lo <= tolerance * scale && res_hi <= tolerance * scale)) {
      out.converged = true;
      return out;
    }
    beta.push_back(b);
    q = w / b;
  }
  out.converged = (steps_cap == n);
  return out;
}

double hermitian_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() < kDenseNormLimit) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
    return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(a.rows() - 1)));
  }
  const auto ext = lanczos_extremes([&](const CVector& x, CVector& y) { y.noalias() = a * x; }, a.rows(), 400, 1e-10);
  return std::max(std::abs(ext.lowest), std::abs(ext.highest));
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) < kDenseNormLimit) {
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
  }
  return spectral_norm([&](const CVector& x, CVector& y) { y.noalias() = a * x; },
                       [&](const CVector& x, CVector& y) { y.noalias() = a.adjoint() * x; }, a.cols(), 400, 1e-10);
}

double spectral_norm(const SparseMatrix& a) {
  if (a.nonZeros() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) < kDenseNormLimit) return spectral_norm(CMatrix(a));
  return spectral_norm([&](const CVector& x, CVector& y) { y = a * x; },
                       [&](const CVector& x, CVector& y) { y = a.adjoint() * x; }, a.cols(), 400, 1e-10);
}

double spectral_norm(const LinearMap& apply, const LinearMap& apply_adjoint, Eigen::Index n, int max_steps,
                     double tolerance) {
  CVector tmp;
  const auto ext = lanczos_extremes(
      [&](const CVector& x, CVector& y) {
        apply(x, tmp);
        apply_adjoint(tmp, y);
      },
      n, max_steps, tolerance);
  return std::sqrt(std::max(ext.highest, 0.0));
}

RVector fft_momenta(int points, double dx) {
  RVector k(points);
  const double base = 2.0 * kPi / (points * dx);
  for (int n = 0; n < points; ++n) {
    const int signed_n = n < points / 2 ? n : n - points;
    k(n) = base * signed_n;
  }
  return k;
}

RMatrix fourier_multiplier(int points, double dx, const std::function<double(double)>& symbol) {
  if (points <= 0) throw ParameterError("grid needs at least one point");
  const RVector k = fft_momenta(points, dx);
  std::vector<double> sym(static_cast<std::size_t>(points));
  for (int n = 0; n < points; ++n) sym[static_cast<std::size_t>(n)] = symbol(k(n));
  Eigen::FFT<double> fft;
  RMatrix out(points, points);
  std::vector<Complex> column(static_cast<std::size_t>(points));
  std::vector<Complex> spectrum;
  std::vector<Complex> back;
  for (int j = 0; j < points; ++j) {
    std::fill(column.begin(), column.end(), Complex(0.0, 0.0));
    column[static_cast<std::size_t>(j)] = 1.0;
    fft.fwd(spectrum, column);
    for (int n = 0; n < points; ++n) spectrum[static_cast<std::size_t>(n)] *= sym[static_cast<std::size_t>(n)];
    fft.inv(back, spectrum);
    for (int i = 0; i < points; ++i) out(i, j) = back[static_cast<std::size_t>(i)].real();
  }
  // Circulant and symmetric for even symbols; remove rounding asymmetry.
  return 0.5 * (out + out.transpose());
}

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }
double max_abs(const RMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const SparseMatrix& a) {
  const SparseMatrix diff = a - SparseMatrix(a.adjoint());
  double worst = 0.0;
  for (Eigen::Index r = 0; r < diff.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

}  // namespace kgfock
