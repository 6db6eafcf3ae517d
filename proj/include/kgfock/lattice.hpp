#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kgfock/types.hpp"

namespace kgfock {

// Positive rational number, always stored reduced with den > 0.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(std::int64_t num, std::int64_t den = 1);
Rational parse_rational(const std::string& text);

// Momentum lattice {j / v : |j / v| <= kappa}, ascending. Index i carries j = i - half_width().
class MomentumLattice {
 public:
  MomentumLattice(Rational v, double kappa, double mass);

  const Rational& v() const { return v_; }
  double kappa() const { return kappa_; }
  double mass() const { return mass_; }
  double spacing() const { return 1.0 / v_.value(); }

  std::size_t size() const { return modes_.size(); }
  std::int64_t half_width() const { return half_width_; }
  std::int64_t integer_label(std::size_t index) const {
    return static_cast<std::int64_t>(index) - half_width_;
  }
  // Index of the mode j / v; throws ParameterError when j is outside the lattice.
  std::size_t index_of(std::int64_t j) const;

  const std::vector<double>& modes() const { return modes_; }
  double mode(std::size_t index) const { return modes_[index]; }
  double dispersion(std::size_t index) const { return dispersion_[index]; }
  const std::vector<double>& dispersions() const { return dispersion_; }
  RVector dispersion_vector() const;

  // Momentum j / v computed from exact integers so that nested lattices agree bitwise.
  double momentum_of(std::int64_t j) const;

  bool same_as(const MomentumLattice& other) const;

 private:
  Rational v_;
  double kappa_;
  double mass_;
  std::int64_t half_width_;
  std::vector<double> modes_;
  std::vector<double> dispersion_;
};

MomentumLattice build_lattice(Rational v, double kappa, double mass);

// [k]_v = floor(v k) / v. Points already on the lattice are returned unchanged.
double integer_part(double k, Rational v);

struct NestedPair {
  MomentumLattice coarse;
  MomentumLattice fine;
  std::int64_t ratio;                        // fine.v / coarse.v, a power of two
  std::vector<std::size_t> mode_injection;  // coarse index -> fine index

  // Dense real matrix of the cell projection (coarse x fine), rows orthonormal.
  RMatrix projection_matrix() const;
};

NestedPair make_nested_pair(const MomentumLattice& coarse, const MomentumLattice& fine);

CVector project(const NestedPair& pair, const CVector& f);
CVector embed(const NestedPair& pair, const CVector& f);

}  // namespace kgfock
