#include "corrnet/parity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corrnet/error.hpp"

namespace corrnet {

std::optional<std::size_t> BitRow::lowest_in(std::size_t lo, std::size_t hi) const {
  for (std::size_t w = lo >> 6; w < 2 && (w << 6) < hi; ++w) {
    std::uint64_t word = words_[w];
    if ((w << 6) < lo) word &= ~std::uint64_t{0} << (lo & 63);
    if (hi < ((w + 1) << 6)) word &= (std::uint64_t{1} << (hi & 63)) - 1;
    if (word) return (w << 6) + static_cast<std::size_t>(std::countr_zero(word));
  }
  return std::nullopt;
}

std::optional<std::size_t> BitRow::highest_in(std::size_t lo, std::size_t hi) const {
  if (hi <= lo) return std::nullopt;
  for (std::size_t w = (hi - 1) >> 6 ;; --w) {
    std::uint64_t word = words_[w];
    if ((w << 6) < lo) word &= ~std::uint64_t{0} << (lo & 63);
    if (hi < ((w + 1) << 6)) word &= (std::uint64_t{1} << (hi & 63)) - 1;
    if (word) return (w << 6) + 63 - static_cast<std::size_t>(std::countl_zero(word));
    if (w == 0 || (w << 6) <= lo) break;
  }
  return std::nullopt;
}

ParitySystem ParitySystem::random(std::size_t bit_count, std::size_t row_count, Rng& rng) {
  if (bit_count > BitRow::kMaxBits) {
    fail(ErrorCode::kSearchCapExceeded, "parity rows support at most 128 bits");
  }
  ParitySystem system;
  system.bit_count = bit_count;
  system.rows.reserve(row_count);
  for (std::size_t r = 0; r < row_count; ++r) {
    ParityRow row;
    for (std::size_t w = 0; w * 64 < bit_count; ++w) {
      const std::uint64_t bits = rng.next();
      for (std::size_t b = 0; b < 64 && w * 64 + b < bit_count; ++b) {
        if ((bits >> b) & 1U) row.members.set(w * 64 + b);
      }
    }
    row.parity = rng.next() & 1U;
    system.rows.push_back(row);
  }
  return system;
}

bool ParitySystem::satisfied_by(std::span<const std::uint8_t> bits) const {
  for (const ParityRow& row : rows) {
    bool acc = false;
    for (std::size_t c = 0; c < bit_count; ++c) {
      if (row.members.test(c) && bits[c]) acc = !acc;
    }
    if (acc != row.parity) return false;
  }
  return true;
}

ExplicitSetDomain::ExplicitSetDomain(std::size_t bit_count,
                                     std::vector<std::vector<std::uint8_t>> members)
    : bits_(bit_count), members_(std::move(members)) {
  for (const auto& m : members_) {
    if (m.size() != bits_) fail(ErrorCode::kInvalidArgument, "set member has the wrong bit count");
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

std::optional<LevelRange> ExplicitSetDomain::levels(std::span<const std::uint8_t> prefix) const {
  // Members are sorted lexicographically, so those sharing a prefix are contiguous.
  auto it = std::lower_bound(members_.begin(), members_.end(), prefix,
                             [](const std::vector<std::uint8_t>& m, std::span<const std::uint8_t> p) {
                               return std::lexicographical_compare(m.begin(), m.begin() + p.size(),
                                                                   p.begin(), p.end());
                             });
  if (it != members_.end() && std::equal(prefix.begin(), prefix.end(), it->begin())) {
    return LevelRange{0, 0};
  }
  return std::nullopt;
}

std::optional<double> ExplicitSetDomain::log2_size() const {
  if (members_.empty()) return std::nullopt;
  return std::log2(static_cast<double>(members_.size()));
}

namespace {

// Incremental reduced row-echelon search. Every row keeps one pivot column
// that appears in no other row; assigning a column substitutes it out of all
// rows and re-pivots the row it led. A row that empties with odd parity is a
// conflict.
class ParitySearch {
 public:
  ParitySearch(const SearchDomain& domain, std::size_t limit, const SearchLimits& limits,
               SearchStats* stats)
      : domain_(domain),
        n_(domain.variable_count()),
        k_(domain.slice_count()),
        limit_(limit),
        limits_(limits),
        stats_(stats),
        start_(std::chrono::steady_clock::now()),
        prefix_(n_) {}

  std::vector<std::vector<std::uint8_t>> run(const ParitySystem& parity) {
    State root;
    root.value.assign(n_ + k_, -1);
    for (const ParityRow& row : parity.rows) {
      if (!add_row(root, row.members, row.parity)) return {};
    }
    dfs(std::move(root), 0);
    return std::move(solutions_);
  }

 private:
  struct Row {
    BitRow mask;
    bool rhs = false;
    std::size_t pivot = 0;
  };
  struct State {
    std::vector<Row> rows;
    std::vector<std::int8_t> value;
  };

  // Prefer low delta bits as pivots (they stay free longest), then the theta
  // bits assigned last by the depth-first order.
  std::size_t choose_pivot(const BitRow& mask) const {
    if (auto d = mask.lowest_in(n_, n_ + k_)) return *d;
    return *mask.highest_in(0, n_);
  }

  bool add_row(State& s, BitRow mask, bool rhs) {
    for (const Row& r : s.rows) {
      if (mask.test(r.pivot)) {
        mask ^= r.mask;
        rhs ^= r.rhs;
      }
    }
    if (!mask.any()) return !rhs;
    const std::size_t p = choose_pivot(mask);
    for (Row& r : s.rows) {
      if (r.mask.test(p)) {
        r.mask ^= mask;
        r.rhs ^= rhs;
      }
    }
    s.rows.push_back(Row{mask, rhs, p});
    return true;
  }

  bool assign(State& s, std::size_t col, bool v) {
    if (s.value[col] >= 0) return s.value[col] == static_cast<std::int8_t>(v);
    s.value[col] = static_cast<std::int8_t>(v);
    std::ptrdiff_t led = -1;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      Row& r = s.rows[i];
      if (!r.mask.test(col)) continue;
      r.mask.reset(col);
      if (v) r.rhs = !r.rhs;
      if (r.pivot == col) led = static_cast<std::ptrdiff_t>(i);
    }
    if (led < 0) return true;
    Row& r = s.rows[static_cast<std::size_t>(led)];
    if (!r.mask.any()) {
      if (r.rhs) return false;
      s.rows[static_cast<std::size_t>(led)] = s.rows.back();
      s.rows.pop_back();
      return true;
    }
    r.pivot = choose_pivot(r.mask);
    const Row lead = r;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      if (static_cast<std::ptrdiff_t>(i) != led && s.rows[i].mask.test(lead.pivot)) {
        s.rows[i].mask ^= lead.mask;
        s.rows[i].rhs ^= lead.rhs;
      }
    }
    return true;
  }

  std::optional<bool> forced(const State& s, std::size_t col) const {
    for (const Row& r : s.rows) {
      if (r.pivot == col) {
        if (r.mask.count() == 1) return r.rhs;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void tick() {
    ++nodes_;
    if (stats_) stats_->nodes = nodes_;
    if (nodes_ > limits_.node_limit) {
      fail(ErrorCode::kSearchIndeterminate,
           "parity search exceeded " + std::to_string(limits_.node_limit) + " nodes");
    }
    if (limits_.timeout.count() > 0 && (nodes_ & 1023U) == 0 &&
        std::chrono::steady_clock::now() - start_ > limits_.timeout) {
      fail(ErrorCode::kSearchIndeterminate, "parity search timed out");
    }
  }

  void dfs(State s, std::size_t depth) {
    tick();
    for (std::size_t i = 0; i < depth; ++i) prefix_[i] = static_cast<std::uint8_t>(s.value[i]);
    const auto range = domain_.levels(std::span<const std::uint8_t>(prefix_.data(), depth));
    if (!range) return;
    for (std::size_t i = k_; i-- > range->hi;) {
      if (!assign(s, n_ + i, false)) return;
    }
    if (depth == n_) {
      emit(s);
      return;
    }
    if (auto v = forced(s, depth)) {
      if (assign(s, depth, *v)) dfs(std::move(s), depth + 1);
      return;
    }
    for (bool v : {false, true}) {
      State child = s;
      if (assign(child, depth, v)) dfs(std::move(child), depth + 1);
      if (solutions_.size() >= limit_) return;
    }
  }

  // All theta bits are set and delta bits at or above the level are clear;
  // the rows left are consistent with pivots among the free delta bits.
  void emit(const State& s) {
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < n_ + k_; ++c) {
      if (s.value[c] >= 0) continue;
      bool is_pivot = std::any_of(s.rows.begin(), s.rows.end(), [c](const Row& r) { return r.pivot == c; });
      if (!is_pivot) free_cols.push_back(c);
    }
    const std::uint64_t combos =
        free_cols.size() >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << free_cols.size());
    for (std::uint64_t t = 0; t < combos && solutions_.size() < limit_; ++t) {
      std::vector<std::uint8_t> bits(n_ + k_, 0);
      for (std::size_t c = 0; c < n_ + k_; ++c) {
        if (s.value[c] >= 0) bits[c] = static_cast<std::uint8_t>(s.value[c]);
      }
      for (std::size_t j = 0; j < free_cols.size(); ++j) bits[free_cols[j]] = (t >> j) & 1U;
      for (const Row& r : s.rows) {
        bool acc = r.rhs;
        for (std::size_t c : free_cols) {
          if (r.mask.test(c) && bits[c]) acc = !acc;
        }
        bits[r.pivot] = acc;
      }
      solutions_.push_back(std::move(bits));
    }
  }

  const SearchDomain& domain_;
  std::size_t n_;
  std::size_t k_;
  std::size_t limit_;
  SearchLimits limits_;
  SearchStats* stats_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
  std::vector<std::uint8_t> prefix_;
  std::vector<std::vector<std::uint8_t>> solutions_;
};

}  // namespace

std::vector<std::vector<std::uint8_t>> parity_solve(const SearchDomain& domain,
                                                    const ParitySystem& parity, std::size_t limit,
                                                    const SearchLimits& limits, SearchStats* stats) {
  if (limit != 1 && limit != 2) fail(ErrorCode::kInvalidArgument, "parity_solve limit must be 1 or 2");
  const std::size_t bits = domain.bit_count();
  if (bits > std::min(limits.bit_cap, BitRow::kMaxBits)) {
    fail(ErrorCode::kSearchCapExceeded,
         std::to_string(bits) + " search bits exceed the cap of " +
             std::to_string(std::min(limits.bit_cap, BitRow::kMaxBits)));
  }
  if (parity.bit_count != bits) {
    fail(ErrorCode::kInvalidArgument, "parity system width does not match the search domain");
  }
  ParitySearch search(domain, limit, limits, stats);
  return search.run(parity);
}

}  // namespace corrnet
