#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "golden.hpp"
#include "kgfock/errors.hpp"
#include "kgfock/spectral.hpp"

using namespace kgfock;

namespace {

MomentumLattice lat(int v, double kappa) { return build_lattice(make_rational(v), kappa, 1.0); }

InteractionSpec probe_polynomial(double linear = 0.0) {
  std::vector<Monomial> m{{4, 0, 0.05}, {0, 4, 0.05}, {2, 0, 0.1}, {0, 2, 0.1}};
  if (linear != 0.0) m.push_back({1, 0, linear});
  return make_interaction_spec(m, gaussian_potential(1.0, 1.0));
}

SparseMatrix random_sparse_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::vector<Eigen::Triplet<Complex>> t;
  for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, Complex(4.0 * d(rng), 0.0));
  for (int k = 0; k < 6 * n; ++k) {
    const Eigen::Index i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const Complex z(d(rng), d(rng));
    t.emplace_back(i, j, z);
    t.emplace_back(j, i, std::conj(z));
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("Krylov eigensolver agrees with the dense oracle") {
    std::mt19937_64 rng(77);
    const SparseMatrix h = random_sparse_hermitian(600, rng);
    Eigen::SelfAdjointEigenSolver<CMatrix> oracle(CMatrix(h), Eigen::EigenvaluesOnly);
    EigenSolverOptions opts;
    opts.dense_limit = 10;
    const EigenPairs krylov = lowest_eigenpairs(h, 6, opts);
    CHECK(!krylov.dense);
    CHECK(krylov.matvecs > 0);
    for (int k = 0; k < 6; ++k) {
      CHECK(std::abs(krylov.values(k) - oracle.eigenvalues()(k)) < 1e-9);
      CHECK(krylov.residuals(k) <= 1e-8 * std::max(1.0, std::abs(krylov.values(k))));
      CHECK((h * krylov.vectors.col(k) - krylov.values(k) * krylov.vectors.col(k)).norm() < 1e-8 * std::max(1.0, std::abs(krylov.values(k))));
    }
    const EigenPairs dense = lowest_eigenpairs(h, 6);
    CHECK(dense.dense);
    CHECK((dense.values - krylov.values).cwiseAbs().maxCoeff() < 1e-9);

    SparseMatrix diag(4, 4);
    diag.insert(0, 0) = 3.0;
    diag.insert(1, 1) = -1.0;
    diag.insert(2, 2) = 2.0;
    diag.insert(3, 3) = -1.0;
    const EigenPairs d = lowest_eigenpairs(diag, 3);
    CHECK(d.values(0) == -1.0);
    CHECK(d.values(1) == -1.0);
    CHECK(d.values(2) == 2.0);
    CHECK_THROWS_AS(lowest_eigenpairs(diag, 0), ParameterError);
  }

  TEST_CASE("desk ground state") {
    const auto basis = enumerate_basis(lat(1, 4.0), 3);
    REQUIRE(basis->dimension() == 1330);
    const auto spec = make_interaction_spec({{4, 0, 1.0}, {0, 4, 1.0}}, gaussian_potential(1.0, 1.0));
    const HamiltonianBundle bundle = assemble(spec, gaussian_potential(1.0, 1.0), 0.3, basis);
    const GroundState dense = ground_state(bundle.H);
    EigenSolverOptions opts;
    opts.dense_limit = 100;
    const GroundState krylov = ground_state(bundle.H, opts);
    CHECK(std::abs(dense.energy - krylov.energy) < 1e-10);
    CHECK(std::abs(dense.energy - golden::value("ground_energy.desk")) <= 1e-10);
    CHECK(std::abs(std::abs(dense.vector.dot(krylov.vector)) - 1.0) < 1e-8);
    CHECK(dense.residual < 1e-10);
  }

  TEST_CASE("HVZ onset") {
    const auto basis = enumerate_basis(lat(1, 2.0), 3);
    const auto zero = make_interaction_spec({{4, 0, 1.0}, {0, 4, 1.0}}, zero_potential());
    const SpectralReport free = hvz_gap_probe(assemble(zero, zero_potential(), 0.0, basis), 4);
    CHECK(free.e0 == 0.0);
    CHECK(free.hvz_onset_estimate == 1.0);
    CHECK(free.onset_level == 1);
    CHECK(free.eigenvalues.size() == 5);
    CHECK(free.gap == 1.0);

    const SpectralReport r = hvz_gap_probe(assemble(probe_polynomial(), gaussian_potential(1.0, 1.0), 0.0, basis), 4);
    REQUIRE(r.onset_level > 0);
    CHECK(r.one_particle_weights[static_cast<std::size_t>(r.onset_level)] > 0.5);
    for (int k = 1; k < r.onset_level; ++k) CHECK(r.one_particle_weights[static_cast<std::size_t>(k)] <= 0.5);
    CHECK(std::abs(r.hvz_onset_estimate - (r.e0 + r.mass)) < 0.1 * r.mass);
    CHECK_THROWS_AS(hvz_gap_probe(assemble(zero, zero_potential(), 0.0, basis), 0), ParameterError);
  }

  TEST_CASE("shifted resolvent and number resolvent norm") {
    const auto basis = enumerate_basis(lat(1, 2.0), 2);
    const HamiltonianBundle bundle = assemble(probe_polynomial(), gaussian_potential(1.0, 1.0), 0.3, basis);
    const double beta = default_shift(bundle);
    CHECK(beta > 1.0);
    const CMatrix h = CMatrix(bundle.H.matrix);
    const CMatrix id = CMatrix::Identity(h.rows(), h.cols());
    const CMatrix inv = (h + beta * id).inverse();
    CHECK((shifted_resolvent(bundle.H, beta) - inv).cwiseAbs().maxCoeff() < 1e-12);
    const CMatrix n = CMatrix(number_operator(basis).matrix);
    Eigen::JacobiSVD<CMatrix> svd(n * inv);
    CHECK(std::abs(number_resolvent_norm(bundle.H, beta) - svd.singularValues()(0)) < 1e-8);
    CHECK_THROWS_AS(shifted_resolvent(bundle.H, -beta), ParameterError);
    CHECK_THROWS_AS(shifted_resolvent(bundle.H0, -0.5), ParameterError);
    CHECK(std::abs(shifted_resolvent(bundle.H0, 2.0)(0, 0) - 0.5) < 1e-15);
  }

  TEST_CASE("resolvent convergence") {
    const Potential v = gaussian_potential(1.0, 1.0);
    const auto zero = make_interaction_spec({{4, 0, 1.0}, {0, 4, 1.0}}, zero_potential());
    std::vector<HamiltonianBundle> free, interacting;
    for (double kappa : {1.0, 2.0, 3.0}) {
      const auto basis = enumerate_basis(lat(1, kappa), 2);
      free.push_back(assemble(zero, zero_potential(), 0.0, basis));
      interacting.push_back(assemble(probe_polynomial(), v, 0.3, basis));
    }
    const ConvergenceTrace f = resolvent_convergence(free, 1.0);
    REQUIRE(f.resolvent_gaps.size() == 2);
    CHECK(f.resolvent_gaps[0] == 0.0);
    CHECK(f.resolvent_gaps[1] == 0.0);
    CHECK(f.levels[2].modes == 7);

    const double beta = default_shift(interacting.front());
    const ConvergenceTrace t = resolvent_convergence(interacting, beta);
    CHECK(t.beta == beta);
    CHECK(t.resolvent_gaps[1] < t.resolvent_gaps[0]);
    CHECK(t.e0_trace.size() == 3);
    CHECK(t.e0_trace[2] <= t.e0_trace[1] + 1e-12);
    CHECK(t.e0_trace[1] <= t.e0_trace[0] + 1e-12);
    const double lo = *std::min_element(t.number_resolvent_norms.begin(), t.number_resolvent_norms.end());
    const double hi = *std::max_element(t.number_resolvent_norms.begin(), t.number_resolvent_norms.end());
    CHECK(hi <= 1.1 * lo);

    std::vector<HamiltonianBundle> wrong{interacting[1], interacting[0]};
    CHECK_THROWS_AS(resolvent_convergence(wrong, beta), ParameterError);
  }

  TEST_CASE("recurrence time") {
    const auto basis = enumerate_basis(lat(1, 1.0), 2);
    const Potential v = gaussian_potential(1.0, 1.0);
    const HamiltonianBundle bundle = assemble(probe_polynomial(), v, 0.3, basis);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(omega_block(0.3, v, basis->lattice()).assembled());
    CHECK(recurrence_time(bundle, es.eigenvectors().col(0)) == std::numeric_limits<double>::infinity());
    const CVector two = es.eigenvectors().col(0) + es.eigenvectors().col(5);
    const double gap = es.eigenvalues()(5) - es.eigenvalues()(0);
    CHECK(std::abs(recurrence_time(bundle, two) - 2.0 * kPi / gap) < 1e-12 * (2.0 * kPi / gap));
  }

  TEST_CASE("Heisenberg probe") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    const auto basis = enumerate_basis(lat(1, 1.0), 3);
    const auto slots = static_cast<Eigen::Index>(basis->slots());
    const auto dim = static_cast<Eigen::Index>(basis->dimension());
    CVector f(slots), psi(dim);
    for (auto& x : f) x = Complex(d(rng), d(rng));
    for (auto& x : psi) x = Complex(d(rng), d(rng));
    psi.normalize();
    const std::vector<double> times{0.0, 1.0, 4.0, 8.0, 16.0, 32.0};

    // Free evolution: the Heisenberg field and the one-particle flow cancel.
    const auto zero = make_interaction_spec({{4, 0, 1.0}, {0, 4, 1.0}}, zero_potential());
    const ProbeResult free = heisenberg_probe(assemble(zero, zero_potential(), 0.0, basis), f, times, psi);
    for (double c : free.cauchy_differences) CHECK(c <= 1e-10);
    CHECK(std::abs(free.values[0] - psi.dot(field_operator(basis, f).matrix * psi)) < 1e-12);

    // Interacting case against matrix exponentials.
    const Potential v = gaussian_potential(1.0, 1.0);
    const HamiltonianBundle bundle = assemble(probe_polynomial(0.2), v, 0.3, basis);
    const ProbeResult r = heisenberg_probe(bundle, f, times, psi);
    const CMatrix h = CMatrix(bundle.H.matrix);
    const CMatrix omega = omega_block(0.3, v, basis->lattice()).assembled();
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double t = times[k];
      const CMatrix u = (Complex(0.0, -t) * h).exp();
      const CVector ft = (Complex(0.0, -t) * omega).exp() * f;
      const CVector psi_t = u * psi;
      const Complex ref = psi_t.dot(field_operator(basis, ft).matrix * psi_t);
      CHECK(std::abs(r.values[k] - ref) < 1e-9);
      CHECK(std::abs(r.values[k].imag()) < 1e-10);
      CHECK(r.trusted[k] == (t <= r.recurrence_time));
    }
    CHECK(r.cauchy_differences.size() == times.size() - 1);

    CHECK_THROWS_AS(heisenberg_probe(bundle, CVector::Ones(3), times, psi), ShapeError);
    CHECK_THROWS_AS(heisenberg_probe(bundle, f, times, CVector::Ones(dim)), ParameterError);
    CHECK_THROWS_AS(heisenberg_probe(bundle, f, {std::nan("")}, psi), ParameterError);
  }
}
