#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "kgfock/errors.hpp"
#include "kgfock/hamiltonian.hpp"
#include "oracles.hpp"

using namespace kgfock;

namespace {

MomentumLattice lat(int v, double kappa) { return build_lattice(make_rational(v), kappa, 1.0); }

CMatrix dense(const FockOperator& op) { return CMatrix(op.matrix); }

InteractionSpec quartic() {
  return make_interaction_spec({{4, 0, 1.0}, {0, 4, 1.0}}, gaussian_potential(1.0, 1.0));
}

// Lattice field phi_s(x) = sum_k (4 pi v eps_k)^{-1/2} (e^{-ikx} a*_k + e^{ikx} a_k) of one species.
SparseMatrix field_at(const std::shared_ptr<const FockBasis>& basis, Species sp, double x) {
  const auto& l = basis->lattice();
  const auto m = static_cast<Eigen::Index>(l.size());
  CVector f(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    f(k) = std::polar(1.0 / std::sqrt(4.0 * oracle::pi * l.v().value() * l.dispersion(k)), -l.mode(k) * x);
  }
  return (creation_field(basis, [&] {
            CVector full = CVector::Zero(2 * m);
            full.segment(sp == Species::one ? 0 : m, m) = f;
            return full;
          }()) +
          annihilation_field(basis, [&] {
            CVector full = CVector::Zero(2 * m);
            full.segment(sp == Species::one ? 0 : m, m) = f;
            return full;
          }()))
      .matrix;
}

}  // namespace

TEST_SUITE("hamiltonian") {
  TEST_CASE("leading form minimum against brute force") {
    std::vector<std::vector<Monomial>> polys{
        {{4, 0, 1.0}, {0, 4, 1.0}},
        {{4, 0, 1.0}, {2, 2, -0.5}, {0, 4, 2.0}},
        {{2, 0, 1.0}, {1, 1, 0.3}, {0, 2, 0.7}},
        {{6, 0, 1.0}, {0, 6, 1.0}, {3, 3, 0.2}, {2, 0, -5.0}},
    };
    for (const auto& poly : polys) {
      int degree = 0;
      for (const auto& m : poly) degree = std::max(degree, m.alpha1 + m.alpha2);
      double brute = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 2000000; ++i) {
        const double t = 2.0 * oracle::pi * i / 2000000.0;
        double s = 0.0;
        for (const auto& m : poly) {
          if (m.alpha1 + m.alpha2 == degree) s += m.coefficient * std::pow(std::cos(t), m.alpha1) * std::pow(std::sin(t), m.alpha2);
        }
        brute = std::min(brute, s);
      }
      CHECK(std::abs(leading_form_minimum(poly, degree) - brute) < 1e-9);
    }
    CHECK(std::abs(quartic().bounded_below_certificate - 0.5) < 1e-12);
  }

  TEST_CASE("interaction spec validation") {
    const Potential g = gaussian_potential(1.0, 1.0);
    CHECK(quartic().degree == 4);
    CHECK(make_interaction_spec({{0, 0, 3.0}}, g).bounded_below_certificate == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(make_interaction_spec({{3, 0, 1.0}}, g), ContractError);
    CHECK_THROWS_AS(make_interaction_spec({{4, 0, 1.0}, {0, 4, -1.0}}, g), ContractError);
    CHECK_THROWS_AS(make_interaction_spec({{2, 0, 1.0}}, g), ContractError);
    CHECK_THROWS_AS(make_interaction_spec({{10, 0, 1.0}}, g), ParameterError);
    CHECK_THROWS_AS(make_interaction_spec({{-1, 2, 1.0}}, g), ParameterError);
    CHECK_THROWS_AS(make_interaction_spec({{2, 0, std::nan("")}}, g), ParameterError);
    CHECK_THROWS_AS(make_interaction_spec({{2, 0, 1.0}, {0, 2, 1.0}}, gaussian_potential(-1.0, 1.0)), ParameterError);
  }

  TEST_CASE("free Hamiltonian and vacuum") {
    const auto basis = enumerate_basis(lat(1, 2.0), 3);
    const FockOperator h0 = free_hamiltonian(basis);
    for (std::size_t s = 0; s < basis->dimension(); ++s) {
      double e = 0.0;
      const auto occ = basis->occupation(s);
      for (std::size_t k = 0; k < basis->slots(); ++k) e += occ[k] * basis->lattice().dispersion(k % basis->modes());
      CHECK(std::abs(h0.matrix.coeff(s, s) - e) < 1e-14);
    }
    CHECK(h0.matrix.nonZeros() == static_cast<Eigen::Index>(basis->dimension()) - 1);
    const FockOperator hi = interaction_operator(basis, quartic());
    CHECK(std::abs(hi.matrix.coeff(0, 0)) <= 1e-13);
    CHECK(hi.hermiticity_defect() == 0.0);
    const auto zero = make_interaction_spec({{4, 0, 1.0}, {0, 4, 1.0}}, zero_potential());
    CHECK(interaction_operator(basis, zero).matrix.nonZeros() == 0);
  }

  TEST_CASE("quadratic interaction matches the smeared-field quadrature oracle") {
    const auto basis = enumerate_basis(lat(1, 2.0), 3);
    const Potential g = gaussian_potential(1.0, 1.0);
    const auto spec = make_interaction_spec({{2, 0, 0.7}, {0, 2, 0.4}, {1, 1, 0.25}}, g);
    const SparseMatrix hi = interaction_operator(basis, spec).matrix;
    const auto dim = static_cast<Eigen::Index>(basis->dimension());
    // Columns with at most n_max - 2 particles are free of truncation effects.
    std::vector<Eigen::Index> safe;
    for (Eigen::Index s = 0; s < dim; ++s) {
      if (basis->particle_number(static_cast<std::size_t>(s)) <= basis->n_max() - 2) safe.push_back(s);
    }
    CMatrix ref = CMatrix::Zero(dim, static_cast<Eigen::Index>(safe.size()));
    const int n = 2400;
    const double half = 12.0, h = 2.0 * half / n;
    for (int i = 0; i <= n; ++i) {
      const double x = -half + i * h;
      const double w = (i == 0 || i == n ? 0.5 : 1.0) * h * g.value(x);
      const SparseMatrix p1 = field_at(basis, Species::one, x), p2 = field_at(basis, Species::two, x);
      for (std::size_t j = 0; j < safe.size(); ++j) {
        CVector e = CVector::Zero(dim);
        e(safe[j]) = 1.0;
        const CVector a1 = p1 * e, a2 = p2 * e;
        // Normal ordering subtracts the vacuum expectation.
        const CVector p11 = p1 * a1, p22 = p2 * a2;
        const Complex c11 = (p1 * (p1 * CVector::Unit(dim, 0)))(0), c22 = (p2 * (p2 * CVector::Unit(dim, 0)))(0);
        ref.col(static_cast<Eigen::Index>(j)) += w * (0.7 * (p11 - c11 * e) + 0.4 * (p22 - c22 * e) + 0.25 * (p1 * a2));
      }
    }
    double err = 0.0;
    for (std::size_t j = 0; j < safe.size(); ++j) {
      const CVector col = hi * CVector::Unit(dim, safe[j]);
      err = std::max(err, (col - ref.col(static_cast<Eigen::Index>(j))).cwiseAbs().maxCoeff());
    }
    CHECK(err < 1e-9);
  }

  TEST_CASE("quartic interaction matches the Wick expansion on low sectors") {
    const auto basis = enumerate_basis(lat(1, 1.0), 5);
    const Potential g = gaussian_potential(1.0, 1.0);
    const auto spec = make_interaction_spec({{4, 0, 1.0}, {2, 2, 0.5}, {0, 4, 1.0}}, g);
    const SparseMatrix hi = interaction_operator(basis, spec).matrix;
    const auto dim = static_cast<Eigen::Index>(basis->dimension());
    const auto& l = basis->lattice();
    double c = 0.0;
    for (std::size_t k = 0; k < l.size(); ++k) c += 1.0 / (4.0 * oracle::pi * l.v().value() * l.dispersion(k));
    const int n = 1600;
    const double half = 10.0, h = 2.0 * half / n;
    std::vector<Eigen::Index> safe;
    for (Eigen::Index s = 0; s < dim; ++s) {
      if (basis->particle_number(static_cast<std::size_t>(s)) <= 1) safe.push_back(s);
    }
    CMatrix ref = CMatrix::Zero(dim, static_cast<Eigen::Index>(safe.size()));
    for (int i = 0; i <= n; ++i) {
      const double x = -half + i * h;
      const double w = (i == 0 || i == n ? 0.5 : 1.0) * h * g.value(x);
      const SparseMatrix p1 = field_at(basis, Species::one, x), p2 = field_at(basis, Species::two, x);
      for (std::size_t j = 0; j < safe.size(); ++j) {
        CVector e = CVector::Zero(dim);
        e(safe[j]) = 1.0;
        const CVector a1 = p1 * e, a11 = p1 * a1, a2 = p2 * e, a22 = p2 * a2;
        // :phi^4: = phi^4 - 6 c phi^2 + 3 c^2 and :phi1^2 phi2^2: = (phi1^2 - c)(phi2^2 - c).
        const CVector q1 = p1 * (p1 * a11) - 6.0 * c * a11 + 3.0 * c * c * e;
        const CVector q2 = p2 * (p2 * a22) - 6.0 * c * a22 + 3.0 * c * c * e;
        const CVector mix = p1 * (p1 * (a22 - c * e)) - c * (a22 - c * e);
        ref.col(static_cast<Eigen::Index>(j)) += w * (q1 + q2 + 0.5 * mix);
      }
    }
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < safe.size(); ++j) {
      CVector e = CVector::Zero(dim);
      e(safe[j]) = 1.0;
      const CVector col = hi * e;
      err = std::max(err, (col - ref.col(static_cast<Eigen::Index>(j))).cwiseAbs().maxCoeff());
      scale = std::max(scale, col.cwiseAbs().maxCoeff());
    }
    CHECK(err < 1e-9 * std::max(1.0, scale));
  }

  TEST_CASE("charge operator blocks") {
    const auto basis = enumerate_basis(lat(1, 2.0), 3);
    const Potential v = gaussian_potential(1.0, 1.0);
    const ChargeOperators q = charge_operator(v, basis);
    const auto m = static_cast<Eigen::Index>(basis->modes());
    const CMatrix b = b_matrix(v, basis->lattice());
    CMatrix block = CMatrix::Zero(2 * m, 2 * m);
    block.topRightCorner(m, m) = b;
    block.bottomLeftCorner(m, m) = b.adjoint();
    CHECK((dense(q.dgamma_part) - dense(dgamma(basis, block))).norm() == 0.0);
    // One-particle block of the dGamma part is the off-diagonal block operator.
    CHECK((dense(q.dgamma_part).block(1, 1, 2 * m, 2 * m) - block).cwiseAbs().maxCoeff() < 1e-15);
    const CMatrix r = pair_kernel(v, basis->lattice()).matrix;
    CMatrix pairs = CMatrix::Zero(static_cast<Eigen::Index>(basis->dimension()), static_cast<Eigen::Index>(basis->dimension()));
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        pairs += r(i, j) * dense(creation(basis, Species::one, i)) * dense(creation(basis, Species::two, j));
    CHECK((dense(q.pair_create) - pairs).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((dense(q.pair_annihilate) - pairs.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.total().hermiticity_defect() < 1e-15);
    // Vacuum to two-particle amplitude is R.
    std::vector<std::uint8_t> occ(basis->slots(), 0);
    occ[2] = 1;
    occ[static_cast<std::size_t>(m) + 3] = 1;
    CHECK(std::abs(q.pair_create.matrix.coeff(static_cast<Eigen::Index>(basis->index_of(occ)), 0) - r(2, 3)) < 1e-15);
  }

  TEST_CASE("assembly") {
    const auto basis = enumerate_basis(lat(1, 2.0), 3);
    const Potential v = gaussian_potential(1.0, 1.0);
    const auto spec = quartic();
    const HamiltonianBundle bundle = assemble(spec, v, 0.3, basis);
    CHECK(bundle.H.hermiticity_defect() == 0.0);
    CHECK((dense(bundle.H) - dense(bundle.H0) - dense(bundle.HI) - 0.3 * dense(bundle.charge())).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((dense(assemble_via_block_operator(bundle)) - dense(bundle.H)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(bundle.coupling.lambda_quant == lambda_quant(v, basis->lattice()).lambda_quant);

    const double lq = bundle.coupling.lambda_quant;
    CHECK_THROWS_AS(assemble(spec, v, lq, basis), StabilityError);
    CHECK_THROWS_AS(assemble(spec, v, -1.01 * lq, basis), StabilityError);
    CHECK_NOTHROW(assemble(spec, v, 1.5 * lq, basis, AssemblyOptions{true}));
    CHECK_THROWS_AS(assemble(spec, v, std::nan(""), basis), ParameterError);

    const auto free_spec = make_interaction_spec({{4, 0, 1.0}, {0, 4, 1.0}}, zero_potential());
    const HamiltonianBundle free = assemble(free_spec, zero_potential(), 0.0, basis);
    CHECK((dense(free.H) - dense(free.H0)).norm() == 0.0);
  }

  TEST_CASE("compression onto the coarse lattice") {
    const auto pair = make_nested_pair(lat(1, 2.0), lat(1, 3.0));
    const auto coarse = enumerate_basis(pair.coarse, 3);
    const auto fine = enumerate_basis(pair.fine, 3);
    const auto inj = fock_injection(pair, *fine, *coarse);
    CHECK(inj[0] == 0);
    std::vector<bool> hit(fine->dimension(), false);
    for (auto s : inj) {
      REQUIRE(s != FockBasis::npos);
      CHECK(!hit[s]);
      hit[s] = true;
    }
    const Potential v = gaussian_potential(1.0, 1.0);
    const auto spec = quartic();
    const HamiltonianBundle hf = assemble(spec, v, 0.3, fine);
    const HamiltonianBundle hc = assemble(spec, v, 0.3, coarse);
    CHECK((dense(compress(pair, hf.H0, coarse)) - dense(hc.H0)).norm() == 0.0);
    CHECK((dense(compress(pair, hf.H, coarse)) - dense(hc.H)).cwiseAbs().maxCoeff() < 1e-13);
    const CMatrix dense_fine = dense(hf.HI);
    CHECK((compress(pair, dense_fine, *fine, *coarse) - dense(compress(pair, hf.HI, coarse))).norm() == 0.0);
    CHECK_THROWS_AS(compress(pair, hf.H, fine), ParameterError);
    CHECK_THROWS_AS(compress(pair, CMatrix::Zero(3, 3), *fine, *coarse), ShapeError);
    CHECK_THROWS_AS(fock_injection(pair, *enumerate_basis(pair.fine, 2), *coarse), ParameterError);
  }

  TEST_CASE("form bound and charge bound") {
    const auto basis = enumerate_basis(lat(1, 2.0), 3);
    const Potential v = gaussian_potential(1.0, 1.0);
    const double lq = lambda_quant(v, basis->lattice()).lambda_quant;
    for (double f : {0.25, 0.5, 0.9}) {
      const FormBoundCheck r = form_bound_check(assemble(quartic(), v, f * lq, basis));
      CHECK(r.delta == doctest::Approx(f).epsilon(1e-12));
      CHECK(r.delta < 1.0);
      CHECK(r.min_plus >= -1e-9);
      CHECK(r.min_minus >= -1e-9);
    }
    for (const auto& l : {lat(1, 1.0), lat(1, 2.0), lat(2, 1.0)}) {
      for (const auto& p : {gaussian_potential(1.0, 1.0), lorentzian_potential(1.0, 1.0)}) {
        const ChargeBoundCheck c = charge_bound_check(p, enumerate_basis(l, 3));
        CHECK(c.norm <= c.bound);
        CHECK(c.norm > 0.0);
      }
    }
  }
}
