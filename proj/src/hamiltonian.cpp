#include "kgfock/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kgfock/eigensolver.hpp"
#include "kgfock/errors.hpp"
#include "kgfock/linalg.hpp"

namespace kgfock {

namespace {

using Triplet = Eigen::Triplet<Complex>;

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double form_value(const std::vector<Monomial>& top, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  double sum = 0.0;
  for (const auto& t : top) sum += t.coefficient * std::pow(c, t.alpha1) * std::pow(s, t.alpha2);
  return sum;
}

double form_derivative(const std::vector<Monomial>& top, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  double sum = 0.0;
  for (const auto& t : top) {
    if (t.alpha1 > 0) sum -= t.coefficient * t.alpha1 * std::pow(c, t.alpha1 - 1) * std::pow(s, t.alpha2 + 1);
    if (t.alpha2 > 0) sum += t.coefficient * t.alpha2 * std::pow(c, t.alpha1 + 1) * std::pow(s, t.alpha2 - 1);
  }
  return sum;
}

SparseMatrix diagonal_matrix(const std::vector<double>& d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] != 0.0) t.emplace_back(i, i, d[i]);
  }
  SparseMatrix m(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

double leading_form_minimum(const std::vector<Monomial>& monomials, int degree) {
  std::vector<Monomial> top;
  for (const auto& m : monomials) {
    if (m.alpha1 + m.alpha2 == degree && m.coefficient != 0.0) top.push_back(m);
  }
  if (top.empty()) return 0.0;
  constexpr int kSamples = 4096;
  const double step = 2.0 * kPi / kSamples;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    const double a = i * step;
    const double b = a + step;
    best = std::min(best, form_value(top, a));
    double da = form_derivative(top, a);
    double db = form_derivative(top, b);
    if (da < 0.0 && db >= 0.0) {
      double lo = a;
      double hi = b;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (form_derivative(top, mid) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      best = std::min(best, form_value(top, 0.5 * (lo + hi)));
    }
  }
  return best;
}

InteractionSpec make_interaction_spec(std::vector<Monomial> monomials, Potential cutoff) {
  int degree = 0;
  for (const auto& m : monomials) {
    if (m.alpha1 < 0 || m.alpha2 < 0) throw ParameterError("monomial exponents must be nonnegative");
    if (!std::isfinite(m.coefficient)) throw ParameterError("monomial coefficients must be finite");
    if (m.coefficient != 0.0) degree = std::max(degree, m.alpha1 + m.alpha2);
  }
  if (degree > 8) throw ParameterError("polynomial degree above 8 is not supported");
  InteractionSpec spec{std::move(monomials), std::move(cutoff), degree, std::numeric_limits<double>::infinity()};
  if (degree > 0) {
    if (degree % 2 != 0) throw ContractError("polynomial of odd degree " + std::to_string(degree) + " is not bounded below");
    spec.bounded_below_certificate = leading_form_minimum(spec.monomials, degree);
    double scale = 0.0;
    for (const auto& m : spec.monomials) {
      if (m.alpha1 + m.alpha2 == degree) scale += std::abs(m.coefficient);
    }
    // A vanishing direction of the top form leaves the polynomial without a certificate.
    if (!(spec.bounded_below_certificate > 1e-12 * scale)) {
      throw ContractError("polynomial is not bounded below: leading form minimum is " + std::to_string(spec.bounded_below_certificate));
    }
  }
  if (!spec.cutoff.identically_zero) {
    for (int i = -1000; i <= 1000; ++i) {
      if (spec.cutoff.value(0.05 * i) < 0.0) throw ParameterError("spatial cutoff g must be nonnegative");
    }
  }
  return spec;
}

std::vector<WickKernel> interaction_kernels(const InteractionSpec& spec, const MomentumLattice& lattice) {
  std::vector<WickKernel> out;
  const std::size_t m = lattice.size();
  const double v = lattice.v().value();
  std::vector<double> inv_sqrt_eps(m);
  for (std::size_t i = 0; i < m; ++i) inv_sqrt_eps[i] = 1.0 / std::sqrt(lattice.dispersion(i));

  for (const auto& mono : spec.monomials) {
    if (mono.coefficient == 0.0) continue;
    for (int p1 = 0; p1 <= mono.alpha1; ++p1) {
      for (int p2 = 0; p2 <= mono.alpha2; ++p2) {
        const int q1 = mono.alpha1 - p1;
        const int q2 = mono.alpha2 - p2;
        const int p = p1 + p2;
        const int q = q1 + q2;
        const int order = p + q;
        std::vector<Species> species;
        species.insert(species.end(), static_cast<std::size_t>(p1), Species::one);
        species.insert(species.end(), static_cast<std::size_t>(p2), Species::two);
        species.insert(species.end(), static_cast<std::size_t>(q1), Species::one);
        species.insert(species.end(), static_cast<std::size_t>(q2), Species::two);
        WickKernel kernel = WickKernel::zeros(p, q, std::move(species), m);
        if (spec.cutoff.identically_zero) {
          out.push_back(std::move(kernel));
          continue;
        }
        const double prefactor = mono.coefficient * binomial(mono.alpha1, p1) * binomial(mono.alpha2, p2) *
                                 std::pow(2.0, -0.5 * order) * std::pow(2.0 * kPi, -0.5 * order) * std::pow(v, -0.5 * order);
        const std::int64_t span = static_cast<std::int64_t>(order) * lattice.half_width();
        std::vector<Complex> ghat(static_cast<std::size_t>(2 * span + 1));
        for (std::int64_t d = -span; d <= span; ++d) ghat[static_cast<std::size_t>(d + span)] = spec.cutoff.fourier(lattice.momentum_of(d));

        std::vector<std::size_t> idx(static_cast<std::size_t>(order), 0);
        for (std::size_t flat = 0; flat < kernel.coeffs.size(); ++flat) {
          std::size_t rest = flat;
          for (int k = order - 1; k >= 0; --k) {
            idx[static_cast<std::size_t>(k)] = rest % m;
            rest /= m;
          }
          std::int64_t label = 0;
          double weight = prefactor;
          for (int k = 0; k < order; ++k) {
            const std::size_t mode = idx[static_cast<std::size_t>(k)];
            label += (k < p ? 1 : -1) * lattice.integer_label(mode);
            weight *= inv_sqrt_eps[mode];
          }
          kernel.coeffs[flat] = weight * ghat[static_cast<std::size_t>(label + span)];
        }
        kernel.symmetrize();
        out.push_back(std::move(kernel));
      }
    }
  }
  return out;
}

FockOperator free_hamiltonian(const std::shared_ptr<const FockBasis>& basis) {
  const auto& lattice = basis->lattice();
  const std::size_t m = basis->modes();
  std::vector<double> d(basis->dimension(), 0.0);
  for (std::size_t s = 0; s < basis->dimension(); ++s) {
    const auto occ = basis->occupation(s);
    double e = 0.0;
    for (std::size_t k = 0; k < occ.size(); ++k) {
      if (occ[k] != 0) e += occ[k] * lattice.dispersion(k % m);
    }
    d[s] = e;
  }
  return FockOperator{basis, diagonal_matrix(d), true};
}

FockOperator interaction_operator(const std::shared_ptr<const FockBasis>& basis, const InteractionSpec& spec) {
  const auto dim = static_cast<Eigen::Index>(basis->dimension());
  SparseMatrix sum(dim, dim);
  for (const auto& kernel : interaction_kernels(spec, basis->lattice())) {
    if (kernel.is_zero()) continue;
    sum += wick_operator(basis, kernel).matrix;
  }
  // The kernel family is closed under adjoints; averaging removes rounding asymmetry.
  SparseMatrix herm = 0.5 * (sum + SparseMatrix(sum.adjoint()));
  herm.prune(Complex(0.0, 0.0));
  return FockOperator{basis, herm, true};
}

FockOperator ChargeOperators::total() const { return dgamma_part + pair_create + pair_annihilate; }

ChargeOperators charge_operator(const Potential& potential, const std::shared_ptr<const FockBasis>& basis) {
  const auto& lattice = basis->lattice();
  const auto m = static_cast<Eigen::Index>(lattice.size());
  CMatrix block = CMatrix::Zero(2 * m, 2 * m);
  const CMatrix b = b_matrix(potential, lattice);
  block.topRightCorner(m, m) = b;
  block.bottomLeftCorner(m, m) = b.adjoint();
  FockOperator dg = dgamma(basis, block);

  WickKernel pair = WickKernel::zeros(2, 0, {Species::one, Species::two}, lattice.size());
  const PairKernel r = pair_kernel(potential, lattice);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const std::size_t idx[2] = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
      pair.at(idx) = r.matrix(i, j);
    }
  }
  FockOperator create = wick_operator(basis, pair);
  FockOperator annihilate = create.adjoint();
  annihilate.hermitian = false;
  return ChargeOperators{std::move(dg), std::move(create), std::move(annihilate)};
}

FockOperator HamiltonianBundle::charge() const { return Q_dgamma + Q_pair_create + Q_pair_annih; }

HamiltonianBundle assemble(const InteractionSpec& spec, const Potential& potential, double lambda,
                           const std::shared_ptr<const FockBasis>& basis, const AssemblyOptions& options) {
  if (!std::isfinite(lambda)) throw ParameterError("coupling lambda must be finite");
  CouplingReport coupling = lambda_quant(potential, basis->lattice());
  if (std::abs(lambda) >= coupling.lambda_quant && !options.override_stability) {
    throw StabilityError("|lambda| = " + std::to_string(std::abs(lambda)) + " is not below lambda_quant = " +
                             std::to_string(coupling.lambda_quant),
                         coupling.lambda_quant);
  }
  ChargeOperators q = charge_operator(potential, basis);
  FockOperator h0 = free_hamiltonian(basis);
  FockOperator hi = interaction_operator(basis, spec);
  SparseMatrix h = h0.matrix + hi.matrix;
  if (lambda != 0.0) h += lambda * (q.dgamma_part.matrix + q.pair_create.matrix + q.pair_annihilate.matrix);
  h.prune(Complex(0.0, 0.0));
  FockOperator total{basis, h, true};
  return HamiltonianBundle{basis,
                           std::move(h0),
                           std::move(hi),
                           std::move(q.dgamma_part),
                           std::move(q.pair_create),
                           std::move(q.pair_annihilate),
                           lambda,
                           std::move(total),
                           std::move(coupling),
                           potential,
                           spec};
}

FockOperator assemble_via_block_operator(const HamiltonianBundle& bundle) {
  const OneParticleBlockOperator omega = omega_block(bundle.lambda, bundle.potential, bundle.basis->lattice());
  FockOperator out = dgamma(bundle.basis, omega.assembled());
  if (bundle.lambda != 0.0) out = out + bundle.lambda * (bundle.Q_pair_create + bundle.Q_pair_annih);
  return out + bundle.HI;
}

std::vector<std::size_t> fock_injection(const NestedPair& pair, const FockBasis& fine, const FockBasis& coarse) {
  if (!coarse.lattice().same_as(pair.coarse) || !fine.lattice().same_as(pair.fine)) {
    throw ParameterError("compress: bases do not match the nested lattice pair");
  }
  if (coarse.n_max() != fine.n_max()) throw ParameterError("compress: bases must share n_max");
  const std::size_t mc = coarse.modes();
  const std::size_t mf = fine.modes();
  std::vector<std::size_t> out(coarse.dimension());
  std::vector<std::uint8_t> occ(fine.slots());
  for (std::size_t s = 0; s < coarse.dimension(); ++s) {
    std::fill(occ.begin(), occ.end(), 0);
    const auto c = coarse.occupation(s);
    for (std::size_t k = 0; k < mc; ++k) {
      occ[pair.mode_injection[k]] = c[k];
      occ[mf + pair.mode_injection[k]] = c[mc + k];
    }
    out[s] = fine.index_of(occ);
  }
  return out;
}

FockOperator compress(const NestedPair& pair, const FockOperator& fine_op, const std::shared_ptr<const FockBasis>& coarse) {
  const auto inj = fock_injection(pair, *fine_op.basis, *coarse);
  std::vector<std::ptrdiff_t> back(fine_op.basis->dimension(), -1);
  for (std::size_t s = 0; s < inj.size(); ++s) back[inj[s]] = static_cast<std::ptrdiff_t>(s);
  std::vector<Triplet> t;
  for (Eigen::Index r = 0; r < fine_op.matrix.outerSize(); ++r) {
    const std::ptrdiff_t row = back[static_cast<std::size_t>(r)];
    if (row < 0) continue;
    for (SparseMatrix::InnerIterator it(fine_op.matrix, r); it; ++it) {
      const std::ptrdiff_t col = back[static_cast<std::size_t>(it.col())];
      if (col >= 0) t.emplace_back(row, col, it.value());
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(coarse->dimension()), static_cast<Eigen::Index>(coarse->dimension()));
  m.setFromTriplets(t.begin(), t.end());
  return FockOperator{coarse, m, fine_op.hermitian};
}

CMatrix compress(const NestedPair& pair, const CMatrix& fine_op, const FockBasis& fine, const FockBasis& coarse) {
  if (fine_op.rows() != static_cast<Eigen::Index>(fine.dimension()) || fine_op.cols() != fine_op.rows()) {
    throw ShapeError("compress: dense operator does not match the fine basis");
  }
  const auto inj = fock_injection(pair, fine, coarse);
  const auto n = static_cast<Eigen::Index>(inj.size());
  CMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = fine_op(static_cast<Eigen::Index>(inj[static_cast<std::size_t>(i)]), static_cast<Eigen::Index>(inj[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

FormBoundCheck form_bound_check(const HamiltonianBundle& bundle) {
  FormBoundCheck out;
  const double lam = std::abs(bundle.lambda);
  out.delta = lam * (bundle.coupling.c0 + bundle.coupling.c1 / bundle.basis->lattice().mass());
  out.constant = lam * bundle.coupling.c1;
  const FockOperator id = identity_operator(bundle.basis);
  const FockOperator q = bundle.charge();
  const SparseMatrix base = out.delta * bundle.H0.matrix + out.constant * id.matrix;
  out.min_plus = lowest_eigenpairs(base + bundle.lambda * q.matrix, 1).values(0);
  out.min_minus = lowest_eigenpairs(base - bundle.lambda * q.matrix, 1).values(0);
  return out;
}

ChargeBoundCheck charge_bound_check(const Potential& potential, const std::shared_ptr<const FockBasis>& basis) {
  ChargeBoundCheck out;
  const FockOperator q = charge_operator(potential, basis).total();
  std::vector<double> inv(basis->dimension());
  for (std::size_t s = 0; s < inv.size(); ++s) inv[s] = 1.0 / (basis->particle_number(s) + 1.0);
  out.norm = spectral_norm(SparseMatrix(q.matrix * diagonal_matrix(inv)));
  out.bound = spectral_norm(b_matrix(potential, basis->lattice())) + 4.0 * pair_kernel(potential, basis->lattice()).matrix.norm();
  return out;
}

}  // namespace kgfock
