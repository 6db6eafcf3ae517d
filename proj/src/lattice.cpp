#include "kgfock/lattice.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kgfock/errors.hpp"

namespace kgfock {

namespace {

// floor(x), but values within a few ulps of an integer snap to it so lattice points stay fixed.
std::int64_t snapped_floor(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
    return static_cast<std::int64_t>(r);
  }
  return static_cast<std::int64_t>(std::floor(x));
}

bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ParameterError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num <= 0) throw ParameterError("lattice parameter v must be positive, got " + std::to_string(num) + "/" + std::to_string(den));
  const std::int64_t g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const long long n = std::stoll(text, &used);
      if (used != text.size()) throw ParameterError("not a rational: " + text);
      return make_rational(n, 1);
    }
    const std::string a = text.substr(0, slash);
    const std::string b = text.substr(slash + 1);
    const long long n = std::stoll(a, &used);
    if (used != a.size()) throw ParameterError("not a rational: " + text);
    const long long d = std::stoll(b, &used);
    if (used != b.size()) throw ParameterError("not a rational: " + text);
    return make_rational(n, d);
  } catch (const std::logic_error&) {
    throw ParameterError("not a rational: " + text);
  }
}

MomentumLattice::MomentumLattice(Rational v, double kappa, double mass) : v_(v), kappa_(kappa), mass_(mass) {
  if (v.den <= 0 || v.num <= 0) throw ParameterError("lattice parameter v must be positive");
  v_ = make_rational(v.num, v.den);
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ParameterError("lattice cutoff kappa must be positive and finite");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ParameterError("mass must be positive and finite");
  half_width_ = snapped_floor(kappa * static_cast<double>(v_.num) / static_cast<double>(v_.den));
  if (half_width_ < 1) throw ParameterError("kappa must be at least 1/v (got kappa=" + std::to_string(kappa) + ", v=" + v_.str() + ")");
  if (half_width_ > (std::int64_t{1} << 24)) throw ResourceError("lattice with more than 2^25 modes requested");

  const std::size_t count = static_cast<std::size_t>(2 * half_width_ + 1);
  modes_.resize(count);
  dispersion_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    modes_[i] = momentum_of(integer_label(i));
    dispersion_[i] = std::sqrt(modes_[i] * modes_[i] + mass_ * mass_);
  }
}

double MomentumLattice::momentum_of(std::int64_t j) const {
  return static_cast<double>(j * v_.den) / static_cast<double>(v_.num);
}

std::size_t MomentumLattice::index_of(std::int64_t j) const {
  if (j < -half_width_ || j > half_width_) {
    throw ParameterError("mode label " + std::to_string(j) + " outside lattice of half-width " + std::to_string(half_width_));
  }
  return static_cast<std::size_t>(j + half_width_);
}

RVector MomentumLattice::dispersion_vector() const {
  return Eigen::Map<const RVector>(dispersion_.data(), static_cast<Eigen::Index>(dispersion_.size()));
}

bool MomentumLattice::same_as(const MomentumLattice& other) const {
  return v_ == other.v_ && half_width_ == other.half_width_ && mass_ == other.mass_;
}

MomentumLattice build_lattice(Rational v, double kappa, double mass) { return MomentumLattice(v, kappa, mass); }

double integer_part(double k, Rational v) {
  if (v.num <= 0 || v.den <= 0) throw ParameterError("integer_part needs v > 0");
  const std::int64_t j = snapped_floor(k * static_cast<double>(v.num) / static_cast<double>(v.den));
  return static_cast<double>(j * v.den) / static_cast<double>(v.num);
}

NestedPair make_nested_pair(const MomentumLattice& coarse, const MomentumLattice& fine) {
  if (coarse.mass() != fine.mass()) throw ParameterError("nested lattices must share the mass");
  const std::int64_t num = fine.v().num * coarse.v().den;
  const std::int64_t den = fine.v().den * coarse.v().num;
  if (num % den != 0 || !is_power_of_two(num / den)) {
    throw ParameterError("fine v (" + fine.v().str() + ") is not a power-of-two multiple of coarse v (" + coarse.v().str() + ")");
  }
  const std::int64_t ratio = num / den;
  if (fine.kappa() < coarse.kappa() || fine.half_width() < coarse.half_width() * ratio) {
    throw ParameterError("fine kappa must be at least the coarse kappa");
  }
  std::vector<std::size_t> injection(coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) injection[i] = fine.index_of(coarse.integer_label(i) * ratio);
  return NestedPair{coarse, fine, ratio, std::move(injection)};
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// For every coarse index: the fine indices whose cell [gamma']_{v_coarse} is that coarse mode.
std::vector<std::vector<std::size_t>> cells(const NestedPair& pair) {
  std::vector<std::vector<std::size_t>> out(pair.coarse.size());
  const std::int64_t jc = pair.coarse.half_width();
  for (std::size_t f = 0; f < pair.fine.size(); ++f) {
    const std::int64_t c = floor_div(pair.fine.integer_label(f), pair.ratio);
    if (c < -jc || c > jc) continue;
    out[static_cast<std::size_t>(c + jc)].push_back(f);
  }
  return out;
}

}  // namespace

RMatrix NestedPair::projection_matrix() const {
  RMatrix p = RMatrix::Zero(static_cast<Eigen::Index>(coarse.size()), static_cast<Eigen::Index>(fine.size()));
  const auto cell = cells(*this);
  for (std::size_t c = 0; c < cell.size(); ++c) {
    const double w = 1.0 / std::sqrt(static_cast<double>(cell[c].size()));
    for (std::size_t f : cell[c]) p(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(f)) = w;
  }
  return p;
}

CVector project(const NestedPair& pair, const CVector& f) {
  if (static_cast<std::size_t>(f.size()) != pair.fine.size()) {
    throw ShapeError("project: vector has " + std::to_string(f.size()) + " entries, fine lattice has " + std::to_string(pair.fine.size()));
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(pair.coarse.size()));
  const auto cell = cells(pair);
  for (std::size_t c = 0; c < cell.size(); ++c) {
    Complex sum = 0.0;
    for (std::size_t idx : cell[c]) sum += f(static_cast<Eigen::Index>(idx));
    out(static_cast<Eigen::Index>(c)) = sum / std::sqrt(static_cast<double>(cell[c].size()));
  }
  return out;
}

CVector embed(const NestedPair& pair, const CVector& f) {
  if (static_cast<std::size_t>(f.size()) != pair.coarse.size()) {
    throw ShapeError("embed: vector has " + std::to_string(f.size()) + " entries, coarse lattice has " + std::to_string(pair.coarse.size()));
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(pair.fine.size()));
  const auto cell = cells(pair);
  for (std::size_t c = 0; c < cell.size(); ++c) {
    const Complex value = f(static_cast<Eigen::Index>(c)) / std::sqrt(static_cast<double>(cell[c].size()));
    for (std::size_t idx : cell[c]) out(static_cast<Eigen::Index>(idx)) = value;
  }
  return out;
}

}  // namespace kgfock
