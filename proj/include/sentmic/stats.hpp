#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "sentmic/error.hpp"

namespace sentmic {

struct SeriesStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;        // n - 1 denominator; 0 below two values
  double min = 0.0;
  double max = 0.0;
  double skewness = 0.0;  // adjusted Fisher-Pearson G1; 0 below three values or for zero spread
};

inline SeriesStats compute_series_stats(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "statistics of an empty series");
  SeriesStats s;
  s.count = values.size();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;

  long double sum = 0;
  for (double v : values) sum += v;
  const long double n = static_cast<long double>(values.size());
  const long double mean = sum / n;
  s.mean = static_cast<double>(mean);

  long double m2 = 0, m3 = 0;
  for (double v : values) {
    const long double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  if (values.size() >= 2) s.sd = static_cast<double>(std::sqrt(m2 / (n - 1)));
  if (values.size() >= 3 && m2 > 0) {
    const long double g1 = (m3 / n) / std::pow(m2 / n, 1.5L);
    s.skewness = static_cast<double>(g1 * std::sqrt(n * (n - 1)) / (n - 2));
  }
  return s;
}

}  // namespace sentmic
