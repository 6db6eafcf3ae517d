#include "kgfock/fock.hpp"

#include <limits>
#include <string>

#include "kgfock/errors.hpp"

namespace kgfock {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max() / 4;

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) { return (a > kSaturated - b) ? kSaturated : a + b; }

}  // namespace

FockBasis::FockBasis(MomentumLattice lattice, int n_max, std::size_t max_dimension)
    : lattice_(std::move(lattice)), n_max_(n_max), slots_(2 * lattice_.size()) {
  if (n_max < 0) throw ParameterError("n_max must be nonnegative");
  if (n_max > 255) throw ParameterError("n_max above 255 is not supported");
  const std::size_t s = slots_;
  const auto nr = static_cast<std::size_t>(n_max) + 1;

  // multi[r][c]: multisets of size r from slots c..s-1.
  std::vector<std::vector<std::uint64_t>> multi(nr, std::vector<std::uint64_t>(s + 1, 0));
  for (std::size_t c = 0; c <= s; ++c) multi[0][c] = 1;
  for (std::size_t r = 1; r < nr; ++r) {
    for (std::size_t c = s; c-- > 0;) multi[r][c] = saturating_add(multi[r - 1][c], multi[r][c + 1]);
  }
  prefix_.assign(nr, std::vector<std::uint64_t>(s + 1, 0));
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < s; ++c) prefix_[r][c + 1] = saturating_add(prefix_[r][c], multi[r][c]);
  }

  offsets_.assign(nr + 1, 0);
  std::uint64_t total = 0;
  for (std::size_t n = 0; n < nr; ++n) {
    total = saturating_add(total, multi[n][0]);
    if (total > max_dimension) {
      throw ResourceError("Fock dimension exceeds the configured cap of " + std::to_string(max_dimension) + " states");
    }
    offsets_[n + 1] = static_cast<std::size_t>(total);
  }
  dimension_ = static_cast<std::size_t>(total);

  occupations_.assign(dimension_ * s, 0);
  numbers_.assign(dimension_, 0);
  std::size_t next = 0;
  std::vector<std::size_t> list;
  for (int n = 0; n <= n_max; ++n) {
    // Nondecreasing slot lists of length n in lexicographic order.
    list.assign(static_cast<std::size_t>(n), 0);
    while (true) {
      std::uint8_t* occ = occupations_.data() + next * s;
      for (std::size_t slot : list) ++occ[slot];
      numbers_[next] = n;
      ++next;
      int pos = n - 1;
      while (pos >= 0 && list[static_cast<std::size_t>(pos)] == s - 1) --pos;
      if (pos < 0) break;
      const std::size_t value = list[static_cast<std::size_t>(pos)] + 1;
      for (std::size_t t = static_cast<std::size_t>(pos); t < list.size(); ++t) list[t] = value;
    }
  }
}

std::size_t FockBasis::slot(Species species, std::size_t mode) const {
  if (mode >= lattice_.size()) {
    throw ParameterError("mode index " + std::to_string(mode) + " outside lattice with " + std::to_string(lattice_.size()) + " modes");
  }
  return (species == Species::one ? 0 : lattice_.size()) + mode;
}

std::size_t FockBasis::index_of(std::span<const std::uint8_t> occupation) const {
  if (occupation.size() != slots_) throw ShapeError("occupation vector has the wrong number of slots");
  int total = 0;
  for (std::uint8_t n : occupation) total += n;
  if (total > n_max_) return npos;
  std::uint64_t rank = offsets_[static_cast<std::size_t>(total)];
  std::size_t prev = 0;
  int remaining = total;
  for (std::size_t s = 0; s < slots_ && remaining > 0; ++s) {
    for (std::uint8_t k = 0; k < occupation[s]; ++k) {
      const auto& row = prefix_[static_cast<std::size_t>(remaining - 1)];
      rank += row[s] - row[prev];
      prev = s;
      --remaining;
    }
  }
  return static_cast<std::size_t>(rank);
}

std::shared_ptr<const FockBasis> enumerate_basis(const MomentumLattice& lattice, int n_max, std::size_t max_dimension) {
  return std::make_shared<const FockBasis>(lattice, n_max, max_dimension);
}

}  // namespace kgfock
