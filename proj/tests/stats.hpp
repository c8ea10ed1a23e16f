#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <cstddef>
#include <vector>

namespace teststats {

/// Pearson chi-square p-value of observed counts against expected probabilities.
/// Cells with zero expected probability must have zero counts.
inline double chi_square_p(const std::vector<std::size_t>& counts, const std::vector<double>& probs) {
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (counts[i] != 0) return 0.0;
      continue;
    }
    const double expected = total * probs[i];
    const double d = static_cast<double>(counts[i]) - expected;
    stat += d * d / expected;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace teststats
