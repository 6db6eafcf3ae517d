#pragma once

#include <memory>
#include <vector>

#include "kgfock/fock.hpp"
#include "kgfock/lattice.hpp"
#include "kgfock/oneparticle.hpp"
#include "kgfock/potential.hpp"

namespace kgfock {

// a * lambda1^alpha1 * lambda2^alpha2
struct Monomial {
  int alpha1 = 0;
  int alpha2 = 0;
  double coefficient = 0.0;
};

struct InteractionSpec {
  std::vector<Monomial> monomials;
  Potential cutoff;  // g
  int degree = 0;
  // min over theta of the top-degree form; +inf for constant polynomials.
  double bounded_below_certificate = 0.0;
};

// Minimum over theta of sum_{|alpha| = degree} a_alpha cos^alpha1 sin^alpha2, by dense sampling refined
// with bisection on sign changes of the derivative.
double leading_form_minimum(const std::vector<Monomial>& monomials, int degree);

// Validates the polynomial (even degree, positive leading form) and g >= 0 on samples.
InteractionSpec make_interaction_spec(std::vector<Monomial> monomials, Potential cutoff);

std::vector<WickKernel> interaction_kernels(const InteractionSpec& spec, const MomentumLattice& lattice);

FockOperator free_hamiltonian(const std::shared_ptr<const FockBasis>& basis);
FockOperator interaction_operator(const std::shared_ptr<const FockBasis>& basis, const InteractionSpec& spec);

struct ChargeOperators {
  FockOperator dgamma_part;
  FockOperator pair_create;
  FockOperator pair_annihilate;

  FockOperator total() const;
};

ChargeOperators charge_operator(const Potential& potential, const std::shared_ptr<const FockBasis>& basis);

struct AssemblyOptions {
  bool override_stability = false;
};

struct HamiltonianBundle {
  std::shared_ptr<const FockBasis> basis;
  FockOperator H0;
  FockOperator HI;
  FockOperator Q_dgamma;
  FockOperator Q_pair_create;
  FockOperator Q_pair_annih;
  double lambda = 0.0;
  FockOperator H;
  CouplingReport coupling;
  Potential potential;
  InteractionSpec interaction;

  FockOperator charge() const;
};

HamiltonianBundle assemble(const InteractionSpec& spec, const Potential& potential, double lambda,
                           const std::shared_ptr<const FockBasis>& basis, const AssemblyOptions& options = {});

// dGamma(omega_{lambda V}) + lambda (pair terms) + HI, the second assembly order.
FockOperator assemble_via_block_operator(const HamiltonianBundle& bundle);

// Fine-basis ordinal of every coarse state under the occupation-preserving embedding.
std::vector<std::size_t> fock_injection(const NestedPair& pair, const FockBasis& fine, const FockBasis& coarse);

FockOperator compress(const NestedPair& pair, const FockOperator& fine_op, const std::shared_ptr<const FockBasis>& coarse);
CMatrix compress(const NestedPair& pair, const CMatrix& fine_op, const FockBasis& fine, const FockBasis& coarse);

struct FormBoundCheck {
  double delta = 0.0;
  double constant = 0.0;
  double min_plus = 0.0;   // min eig(delta H0 + C + lambda Q)
  double min_minus = 0.0;  // min eig(delta H0 + C - lambda Q)
};

// Constructive constants delta = |lambda| (c0 + c1/m), C = |lambda| c1.
FormBoundCheck form_bound_check(const HamiltonianBundle& bundle);

struct ChargeBoundCheck {
  double norm = 0.0;   // ||Q (N+1)^{-1}||
  double bound = 0.0;  // ||b|| + 4 ||R||_F
};

ChargeBoundCheck charge_bound_check(const Potential& potential, const std::shared_ptr<const FockBasis>& basis);

}  // namespace kgfock
