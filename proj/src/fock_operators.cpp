#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kgfock/errors.hpp"
#include "kgfock/fock.hpp"
#include "kgfock/linalg.hpp"

namespace kgfock {

namespace {

using Triplet = Eigen::Triplet<Complex>;

SparseMatrix from_triplets(std::size_t dim, const std::vector<Triplet>& triplets) {
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void same_basis(const FockOperator& a, const FockOperator& b) {
  if (a.basis != b.basis && (a.basis->dimension() != b.basis->dimension() || !a.basis->lattice().same_as(b.basis->lattice()))) {
    throw ShapeError("Fock operators live on different bases");
  }
}

void check_slot_vector(const FockBasis& basis, Eigen::Index size, const char* what) {
  if (static_cast<std::size_t>(size) != basis.slots()) {
    throw ShapeError(std::string(what) + ": expected a vector over " + std::to_string(basis.slots()) + " slots, got " + std::to_string(size));
  }
}

}  // namespace

FockOperator FockOperator::adjoint() const { return FockOperator{basis, SparseMatrix(matrix.adjoint()), hermitian}; }

double FockOperator::hermiticity_defect() const { return kgfock::hermiticity_defect(matrix); }

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  same_basis(a, b);
  return FockOperator{a.basis, a.matrix + b.matrix, a.hermitian && b.hermitian};
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
  same_basis(a, b);
  return FockOperator{a.basis, a.matrix - b.matrix, a.hermitian && b.hermitian};
}

FockOperator operator*(double s, const FockOperator& a) { return FockOperator{a.basis, s * a.matrix, a.hermitian}; }

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  same_basis(a, b);
  return FockOperator{a.basis, (a.matrix * b.matrix).pruned(), false};
}

FockOperator identity_operator(const std::shared_ptr<const FockBasis>& basis) {
  SparseMatrix m(static_cast<Eigen::Index>(basis->dimension()), static_cast<Eigen::Index>(basis->dimension()));
  m.setIdentity();
  return FockOperator{basis, m, true};
}

FockOperator number_operator(const std::shared_ptr<const FockBasis>& basis) {
  std::vector<Triplet> t;
  for (std::size_t s = 0; s < basis->dimension(); ++s) {
    if (basis->particle_number(s) > 0) t.emplace_back(s, s, static_cast<double>(basis->particle_number(s)));
  }
  return FockOperator{basis, from_triplets(basis->dimension(), t), true};
}

FockOperator creation_field(const std::shared_ptr<const FockBasis>& basis, const CVector& f) {
  check_slot_vector(*basis, f.size(), "creation_field");
  std::vector<Triplet> t;
  std::vector<std::uint8_t> occ(basis->slots());
  for (std::size_t s = 0; s < basis->dimension(); ++s) {
    if (basis->particle_number(s) >= basis->n_max()) continue;
    const auto src = basis->occupation(s);
    std::copy(src.begin(), src.end(), occ.begin());
    for (std::size_t slot = 0; slot < basis->slots(); ++slot) {
      const Complex fs = f(static_cast<Eigen::Index>(slot));
      if (fs == Complex(0.0, 0.0)) continue;
      ++occ[slot];
      t.emplace_back(basis->index_of(occ), s, fs * std::sqrt(static_cast<double>(occ[slot])));
      --occ[slot];
    }
  }
  return FockOperator{basis, from_triplets(basis->dimension(), t), false};
}

FockOperator annihilation_field(const std::shared_ptr<const FockBasis>& basis, const CVector& f) {
  check_slot_vector(*basis, f.size(), "annihilation_field");
  std::vector<Triplet> t;
  std::vector<std::uint8_t> occ(basis->slots());
  for (std::size_t s = 0; s < basis->dimension(); ++s) {
    const auto src = basis->occupation(s);
    std::copy(src.begin(), src.end(), occ.begin());
    for (std::size_t slot = 0; slot < basis->slots(); ++slot) {
      const Complex fs = f(static_cast<Eigen::Index>(slot));
      if (occ[slot] == 0 || fs == Complex(0.0, 0.0)) continue;
      const double amp = std::sqrt(static_cast<double>(occ[slot]));
      --occ[slot];
      t.emplace_back(basis->index_of(occ), s, std::conj(fs) * amp);
      ++occ[slot];
    }
  }
  return FockOperator{basis, from_triplets(basis->dimension(), t), false};
}

FockOperator creation(const std::shared_ptr<const FockBasis>& basis, Species species, std::size_t mode) {
  CVector f = CVector::Zero(static_cast<Eigen::Index>(basis->slots()));
  f(static_cast<Eigen::Index>(basis->slot(species, mode))) = 1.0;
  return creation_field(basis, f);
}

FockOperator annihilation(const std::shared_ptr<const FockBasis>& basis, Species species, std::size_t mode) {
  CVector f = CVector::Zero(static_cast<Eigen::Index>(basis->slots()));
  f(static_cast<Eigen::Index>(basis->slot(species, mode))) = 1.0;
  return annihilation_field(basis, f);
}

FockOperator dgamma(const std::shared_ptr<const FockBasis>& basis, const CMatrix& h) {
  const auto m = static_cast<Eigen::Index>(basis->modes());
  const auto slots = static_cast<Eigen::Index>(basis->slots());
  CMatrix full;
  if (h.rows() == slots && h.cols() == slots) {
    full = h;
  } else if (h.rows() == m && h.cols() == m) {
    full = CMatrix::Zero(slots, slots);
    full.topLeftCorner(m, m) = h;
    full.bottomRightCorner(m, m) = h;
  } else {
    throw ShapeError("dgamma: one-particle matrix must be " + std::to_string(m) + " or " + std::to_string(slots) + " square");
  }
  const double scale = std::max(1.0, max_abs(full));
  if (max_abs(CMatrix(full - full.adjoint())) > 1e-12 * scale) throw ContractError("dgamma: one-particle operator is not Hermitian");
  // Use one triangle so the result is exactly Hermitian.
  for (Eigen::Index j = 0; j < slots; ++j) {
    full(j, j) = full(j, j).real();
    for (Eigen::Index i = j + 1; i < slots; ++i) full(i, j) = std::conj(full(j, i));
  }

  std::vector<Triplet> t;
  std::vector<std::uint8_t> occ(basis->slots());
  for (std::size_t s = 0; s < basis->dimension(); ++s) {
    const auto src = basis->occupation(s);
    std::copy(src.begin(), src.end(), occ.begin());
    for (Eigen::Index j = 0; j < slots; ++j) {
      const int nj = occ[static_cast<std::size_t>(j)];
      if (nj == 0) continue;
      --occ[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < slots; ++i) {
        const Complex hij = full(i, j);
        if (hij == Complex(0.0, 0.0)) continue;
        ++occ[static_cast<std::size_t>(i)];
        const double amp = std::sqrt(static_cast<double>(nj * occ[static_cast<std::size_t>(i)]));
        t.emplace_back(basis->index_of(occ), s, hij * amp);
        --occ[static_cast<std::size_t>(i)];
      }
      ++occ[static_cast<std::size_t>(j)];
    }
  }
  return FockOperator{basis, from_triplets(basis->dimension(), t), true};
}

WickKernel WickKernel::zeros(int p, int q, std::vector<Species> species, std::size_t modes) {
  if (p < 0 || q < 0) throw ParameterError("Wick kernel degrees must be nonnegative");
  if (species.size() != static_cast<std::size_t>(p + q)) throw ShapeError("Wick kernel needs one species label per slot");
  std::size_t size = 1;
  for (int i = 0; i < p + q; ++i) size *= modes;
  return WickKernel{p, q, std::move(species), modes, std::vector<Complex>(size, Complex(0.0, 0.0))};
}

std::size_t WickKernel::flat_index(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t k : idx) flat = flat * modes + k;
  return flat;
}

WickKernel WickKernel::adjoint() const {
  std::vector<Species> sp(species.begin() + p, species.end());
  sp.insert(sp.end(), species.begin(), species.begin() + p);
  WickKernel out = zeros(q, p, std::move(sp), modes);
  const int order = p + q;
  std::vector<std::size_t> idx(static_cast<std::size_t>(order), 0);
  std::vector<std::size_t> swapped(static_cast<std::size_t>(order), 0);
  for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
    std::size_t rest = flat;
    for (int k = order - 1; k >= 0; --k) {
      idx[static_cast<std::size_t>(k)] = rest % modes;
      rest /= modes;
    }
    for (int k = 0; k < q; ++k) swapped[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(p + k)];
    for (int k = 0; k < p; ++k) swapped[static_cast<std::size_t>(q + k)] = idx[static_cast<std::size_t>(k)];
    out.at(swapped) = std::conj(coeffs[flat]);
  }
  return out;
}

void WickKernel::symmetrize() {
  const int order = p + q;
  if (order < 2) return;
  // Permutations of slot positions that only exchange equal-species slots on the same side.
  std::vector<std::vector<int>> perms;
  std::vector<int> perm(static_cast<std::size_t>(order));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> start = perm;
  do {
    bool ok = true;
    for (int k = 0; k < order && ok; ++k) {
      const int to = perm[static_cast<std::size_t>(k)];
      ok = ((k < p) == (to < p)) && species[static_cast<std::size_t>(k)] == species[static_cast<std::size_t>(to)];
    }
    if (ok) perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (perms.size() == 1) return;

  std::vector<Complex> out(coeffs.size());
  std::vector<std::size_t> idx(static_cast<std::size_t>(order));
  std::vector<std::size_t> image(static_cast<std::size_t>(order));
  auto decode = [&](std::size_t flat) {
    for (int k = order - 1; k >= 0; --k) {
      idx[static_cast<std::size_t>(k)] = flat % modes;
      flat /= modes;
    }
  };
  // Canonical representative: the permutation image with the smallest flat index.
  auto canonical = [&]() {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& pm : perms) {
      for (int k = 0; k < order; ++k) image[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(pm[static_cast<std::size_t>(k)])];
      best = std::min(best, flat_index(image));
    }
    return best;
  };
  for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
    decode(flat);
    if (canonical() != flat) continue;
    Complex sum = 0.0;
    for (const auto& pm : perms) {
      for (int k = 0; k < order; ++k) image[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(pm[static_cast<std::size_t>(k)])];
      sum += coeffs[flat_index(image)];
    }
    out[flat] = sum / static_cast<double>(perms.size());
  }
  for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
    decode(flat);
    const std::size_t c = canonical();
    if (c != flat) out[flat] = out[c];
  }
  coeffs = std::move(out);
}

bool WickKernel::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Complex& c) { return c == Complex(0.0, 0.0); });
}

namespace {

struct WickAssembler {
  const FockBasis& basis;
  const WickKernel& kernel;
  std::vector<std::uint8_t> occ;
  std::vector<std::size_t> idx;
  std::vector<Triplet>* out = nullptr;
  std::size_t column = 0;

  std::size_t slot_of(int position, std::size_t mode) const {
    return basis.slot(kernel.species[static_cast<std::size_t>(position)], mode);
  }

  // Annihilators act first; amplitude accumulates the integer product under one square root.
  void annihilate(int depth, std::uint64_t weight) {
    if (depth == kernel.q) {
      create(0, weight);
      return;
    }
    const int position = kernel.p + depth;
    for (std::size_t mode = 0; mode < kernel.modes; ++mode) {
      const std::size_t s = slot_of(position, mode);
      const std::uint8_t n = occ[s];
      if (n == 0) continue;
      --occ[s];
      idx[static_cast<std::size_t>(position)] = mode;
      annihilate(depth + 1, weight * n);
      ++occ[s];
    }
  }

  void create(int depth, std::uint64_t weight) {
    if (depth == kernel.p) {
      const Complex c = kernel.at(idx);
      if (c == Complex(0.0, 0.0)) return;
      out->emplace_back(basis.index_of(occ), column, c * std::sqrt(static_cast<double>(weight)));
      return;
    }
    for (std::size_t mode = 0; mode < kernel.modes; ++mode) {
      const std::size_t s = slot_of(depth, mode);
      ++occ[s];
      idx[static_cast<std::size_t>(depth)] = mode;
      create(depth + 1, weight * occ[s]);
      --occ[s];
    }
  }
};

}  // namespace

FockOperator wick_operator(const std::shared_ptr<const FockBasis>& basis, const WickKernel& kernel) {
  if (kernel.modes != basis->modes()) {
    throw ShapeError("Wick kernel over " + std::to_string(kernel.modes) + " modes used on a basis with " + std::to_string(basis->modes()));
  }
  std::vector<Triplet> t;
  if (!kernel.is_zero()) {
    WickAssembler as{*basis, kernel, std::vector<std::uint8_t>(basis->slots()),
                     std::vector<std::size_t>(static_cast<std::size_t>(kernel.p + kernel.q)), &t, 0};
    for (std::size_t s = 0; s < basis->dimension(); ++s) {
      const int n = basis->particle_number(s);
      if (n < kernel.q || n - kernel.q + kernel.p > basis->n_max()) continue;
      const auto src = basis->occupation(s);
      std::copy(src.begin(), src.end(), as.occ.begin());
      as.column = s;
      as.annihilate(0, 1);
    }
  }
  return FockOperator{basis, from_triplets(basis->dimension(), t), false};
}

FockOperator field_operator(const std::shared_ptr<const FockBasis>& basis, const CVector& f) {
  check_slot_vector(*basis, f.size(), "field_operator");
  const FockOperator up = creation_field(basis, f);
  // a(f) = a*(f)^dagger entrywise, so the sum is exactly Hermitian.
  SparseMatrix sum = up.matrix + SparseMatrix(up.matrix.adjoint());
  return FockOperator{basis, (1.0 / std::sqrt(2.0)) * sum, true};
}

FockOperator field_operator(const std::shared_ptr<const FockBasis>& basis, Species species, const CVector& f) {
  const auto m = static_cast<Eigen::Index>(basis->modes());
  if (f.size() != m) throw ShapeError("field_operator: expected " + std::to_string(m) + " mode coefficients");
  if (f.cwiseAbs().maxCoeff() == 0.0) throw ParameterError("field_operator: test function must be nonzero");
  CVector full = CVector::Zero(2 * m);
  full.segment(species == Species::one ? 0 : m, m) = f;
  return field_operator(basis, full);
}

NTauNorms ntau_check(const std::shared_ptr<const FockBasis>& basis, const CVector& f, const RVector& b) {
  check_slot_vector(*basis, f.size(), "ntau_check");
  check_slot_vector(*basis, b.size(), "ntau_check");
  if (b.minCoeff() <= 0.0) throw ParameterError("ntau_check: multiplier b must be positive");
  NTauNorms out;
  out.rhs = std::sqrt((f.cwiseAbs2().array() / b.array()).sum());
  if (out.rhs == 0.0) return out;
  std::vector<Triplet> t;
  for (std::size_t s = 0; s < basis->dimension(); ++s) {
    double e = 1.0;
    const auto occ = basis->occupation(s);
    for (std::size_t k = 0; k < occ.size(); ++k) e += occ[k] * b(static_cast<Eigen::Index>(k));
    t.emplace_back(s, s, 1.0 / std::sqrt(e));
  }
  const SparseMatrix weight = from_triplets(basis->dimension(), t);
  const SparseMatrix product = annihilation_field(basis, f).matrix * weight;
  out.lhs = spectral_norm(product);
  return out;
}

}  // namespace kgfock
