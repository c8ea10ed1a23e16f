#pragma once

#include <array>
#include <bit>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "corrnet/rng.hpp"

namespace corrnet {

/// Fixed-width GF(2) row vector. Column c lives in bit (c % 64) of word c / 64.
class BitRow {
 public:
  static constexpr std::size_t kMaxBits = 128;

  bool test(std::size_t c) const { return (words_[c >> 6] >> (c & 63)) & 1U; }
  void set(std::size_t c) { words_[c >> 6] |= std::uint64_t{1} << (c & 63); }
  void reset(std::size_t c) { words_[c >> 6] &= ~(std::uint64_t{1} << (c & 63)); }
  bool any() const { return (words_[0] | words_[1]) != 0; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::popcount(words_[0]) + std::popcount(words_[1]));
  }

  BitRow& operator^=(const BitRow& o) {
    words_[0] ^= o.words_[0];
    words_[1] ^= o.words_[1];
    return *this;
  }
  BitRow operator&(const BitRow& o) const {
    BitRow r;
    r.words_ = {words_[0] & o.words_[0], words_[1] & o.words_[1]};
    return r;
  }
  /// Parity of the popcount.
  bool parity() const { return (std::popcount(words_[0]) + std::popcount(words_[1])) & 1; }

  /// Lowest set column in [lo, hi), if any.
  std::optional<std::size_t> lowest_in(std::size_t lo, std::size_t hi) const;
  /// Highest set column in [lo, hi), if any.
  std::optional<std::size_t> highest_in(std::size_t lo, std::size_t hi) const;

  friend bool operator==(const BitRow&, const BitRow&) = default;

 private:
  std::array<std::uint64_t, 2> words_{0, 0};
};

/// One random XOR constraint: the parity of the member bits equals `parity`.
struct ParityRow {
  BitRow members;
  bool parity = false;
};

/// A batch of independent random XOR constraints over `bit_count` bits.
struct ParitySystem {
  std::size_t bit_count = 0;
  std::vector<ParityRow> rows;

  /// Every bit joins each row with probability 1/2; parities are fair coins.
  static ParitySystem random(std::size_t bit_count, std::size_t row_count, Rng& rng);

  bool satisfied_by(std::span<const std::uint8_t> bits) const;
};

/// Admissible slice levels for the completions of a partial assignment:
/// an assignment at level m admits any auxiliary vector with bits >= m clear.
struct LevelRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

/// Set of (theta, delta) assignments searched by parity_solve. Columns
/// 0..variable_count()-1 hold theta, the next slice_count() columns hold delta.
/// Unweighted sets have slice_count() == 0.
class SearchDomain {
 public:
  virtual ~SearchDomain() = default;

  virtual std::size_t variable_count() const = 0;
  virtual std::size_t slice_count() const = 0;

  /// Bounds the level over completions of `prefix` (theta bits 0..d-1).
  /// Returns nullopt when no completion is in the set. For a full prefix the
  /// range must be exact (lo == hi).
  virtual std::optional<LevelRange> levels(std::span<const std::uint8_t> prefix) const = 0;

  /// log2 of the set size, when known. Seeds the XOR row count.
  virtual std::optional<double> log2_size() const { return std::nullopt; }

  std::size_t bit_count() const { return variable_count() + slice_count(); }
};

/// Explicitly listed satisfying set (unweighted).
class ExplicitSetDomain final : public SearchDomain {
 public:
  ExplicitSetDomain(std::size_t bit_count, std::vector<std::vector<std::uint8_t>> members);

  std::size_t variable_count() const override { return bits_; }
  std::size_t slice_count() const override { return 0; }
  std::optional<LevelRange> levels(std::span<const std::uint8_t> prefix) const override;
  std::optional<double> log2_size() const override;

  const std::vector<std::vector<std::uint8_t>>& members() const { return members_; }

 private:
  std::size_t bits_;
  std::vector<std::vector<std::uint8_t>> members_;  // sorted
};

struct SearchLimits {
  /// Largest theta + delta bit count accepted (hard ceiling BitRow::kMaxBits).
  std::size_t bit_cap = 120;
  std::uint64_t node_limit = 200'000'000;
  /// Zero disables the wall-clock limit.
  std::chrono::milliseconds timeout{0};
};

struct SearchStats {
  std::uint64_t nodes = 0;
};

/// Exhaustive search for assignments in `domain` that satisfy every row of
/// `parity`. Returns up to `limit` (1 or 2) solutions, each of
/// domain.bit_count() bits; an empty result proves there are none.
///
/// Throws kSearchCapExceeded for oversized instances and kSearchIndeterminate
/// when a node or time limit stops the search before it is conclusive.
std::vector<std::vector<std::uint8_t>> parity_solve(const SearchDomain& domain,
                                                    const ParitySystem& parity, std::size_t limit,
                                                    const SearchLimits& limits = {},
                                                    SearchStats* stats = nullptr);

}  // namespace corrnet
