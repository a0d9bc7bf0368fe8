#pragma once

// Envelope statistics for sampled oscillating curves.

#include <optional>
#include <span>
#include <vector>

#include "vibq/errors.hpp"

namespace vibq {

/// Upper envelope of a sampled curve: its local maxima (plus both end
/// points) joined by straight lines, evaluated back on the sample times.
template <typename Real>
std::vector<Real> upper_envelope(std::span<const Real> times, std::span<const Real> values) {
  if (times.size() != values.size()) throw ParameterError("upper_envelope: size mismatch");
  const std::size_t n = values.size();
  if (n < 3) return {values.begin(), values.end()};

  std::vector<std::size_t> peaks{0};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (values[i] >= values[i - 1] && values[i] >= values[i + 1]) peaks.push_back(i);
  }
  peaks.push_back(n - 1);

  std::vector<Real> env(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 2 < peaks.size() && peaks[seg + 1] < i) ++seg;
    const std::size_t lo = peaks[seg], hi = peaks[seg + 1];
    if (hi == lo) {
      env[i] = values[lo];
      continue;
    }
    const Real f = (times[i] - times[lo]) / (times[hi] - times[lo]);
    env[i] = values[lo] + f * (values[hi] - values[lo]);
  }
  return env;
}

/// First sample time at which the upper envelope drops below threshold.
template <typename Real>
std::optional<Real> first_envelope_crossing(std::span<const Real> times, std::span<const Real> values,
                                            Real threshold) {
  const std::vector<Real> env = upper_envelope(times, values);
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env[i] < threshold) return times[i];
  }
  return std::nullopt;
}

}  // namespace vibq
