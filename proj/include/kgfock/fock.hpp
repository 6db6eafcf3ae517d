#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "kgfock/lattice.hpp"
#include "kgfock/types.hpp"

namespace kgfock {

enum class Species : int { one = 1, two = 2 };

inline constexpr std::size_t kDefaultMaxDimension = 2'000'000;

// Truncated two-species bosonic Fock basis. Slots are species-major: slot = (species - 1) * M + mode.
// States are ordered by total particle number, then lexicographically by their sorted slot lists.
class FockBasis {
 public:
  FockBasis(MomentumLattice lattice, int n_max, std::size_t max_dimension = kDefaultMaxDimension);

  const MomentumLattice& lattice() const { return lattice_; }
  int n_max() const { return n_max_; }
  std::size_t modes() const { return lattice_.size(); }
  std::size_t slots() const { return slots_; }
  std::size_t dimension() const { return dimension_; }

  std::size_t slot(Species species, std::size_t mode) const;
  std::span<const std::uint8_t> occupation(std::size_t state) const {
    return {occupations_.data() + state * slots_, slots_};
  }
  int particle_number(std::size_t state) const { return numbers_[state]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  // Ordinal of an occupation vector (length slots()); npos when it has more than n_max particles.
  std::size_t index_of(std::span<const std::uint8_t> occupation) const;

  // Number of states with at most n particles.
  std::size_t sector_end(int n) const { return offsets_[static_cast<std::size_t>(n) + 1]; }

 private:
  MomentumLattice lattice_;
  int n_max_;
  std::size_t slots_;
  std::size_t dimension_ = 0;
  std::vector<std::size_t> offsets_;
  // prefix_[r][c] = number of multisets of size r drawn from slots >= c', summed over c' < c
  std::vector<std::vector<std::uint64_t>> prefix_;
  std::vector<std::uint8_t> occupations_;
  std::vector<int> numbers_;
};

std::shared_ptr<const FockBasis> enumerate_basis(const MomentumLattice& lattice, int n_max,
                                                 std::size_t max_dimension = kDefaultMaxDimension);

struct FockOperator {
  std::shared_ptr<const FockBasis> basis;
  SparseMatrix matrix;
  bool hermitian = false;

  FockOperator adjoint() const;
  CVector apply(const CVector& x) const { return matrix * x; }
  // Largest |A_ij - conj(A_ji)|.
  double hermiticity_defect() const;
};

FockOperator operator+(const FockOperator& a, const FockOperator& b);
FockOperator operator-(const FockOperator& a, const FockOperator& b);
FockOperator operator*(double s, const FockOperator& a);
FockOperator operator*(const FockOperator& a, const FockOperator& b);
FockOperator identity_operator(const std::shared_ptr<const FockBasis>& basis);
FockOperator number_operator(const std::shared_ptr<const FockBasis>& basis);

FockOperator creation(const std::shared_ptr<const FockBasis>& basis, Species species, std::size_t mode);
FockOperator annihilation(const std::shared_ptr<const FockBasis>& basis, Species species, std::size_t mode);

// a*(F) = sum_s F_s a*_s and a(F) = sum_s conj(F_s) a_s over all 2M slots.
FockOperator creation_field(const std::shared_ptr<const FockBasis>& basis, const CVector& f);
FockOperator annihilation_field(const std::shared_ptr<const FockBasis>& basis, const CVector& f);

// h is either 2M x 2M over slots or M x M applied to both species.
FockOperator dgamma(const std::shared_ptr<const FockBasis>& basis, const CMatrix& h);

// Normal-ordered monomial kernel: creators (slots 0..p-1) left of annihilators (slots p..p+q-1).
struct WickKernel {
  int p = 0;
  int q = 0;
  std::vector<Species> species;
  std::size_t modes = 0;
  std::vector<Complex> coeffs;  // row-major over modes^(p+q)

  static WickKernel zeros(int p, int q, std::vector<Species> species, std::size_t modes);

  std::size_t flat_index(std::span<const std::size_t> idx) const;
  Complex& at(std::span<const std::size_t> idx) { return coeffs[flat_index(idx)]; }
  Complex at(std::span<const std::size_t> idx) const { return coeffs[flat_index(idx)]; }

  WickKernel adjoint() const;
  // Average over permutations of equal-species creator slots and of equal-species annihilator slots.
  void symmetrize();
  bool is_zero() const;
};

FockOperator wick_operator(const std::shared_ptr<const FockBasis>& basis, const WickKernel& kernel);

// (a*(f) + a(f)) / sqrt(2) for one species, f over the M modes.
FockOperator field_operator(const std::shared_ptr<const FockBasis>& basis, Species species, const CVector& f);
// Same over all 2M slots.
FockOperator field_operator(const std::shared_ptr<const FockBasis>& basis, const CVector& f);

struct NTauNorms {
  double lhs = 0.0;
  double rhs = 0.0;
};

// lhs = ||a(f) (dGamma(b) + 1)^{-1/2}||, rhs = ||b^{-1/2} f||, both vectors over the 2M slots.
NTauNorms ntau_check(const std::shared_ptr<const FockBasis>& basis, const CVector& f, const RVector& b);

}  // namespace kgfock
