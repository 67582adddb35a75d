#pragma once

// Brute-force MIC for tiny samples. Enumerates every placement of row and
// column boundaries between consecutive distinct values, on both axes at
// once, and scores each grid straight from cell probabilities. Shares no
// search code with mic.hpp; used to validate it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "sentmic/error.hpp"
#include "sentmic/mic.hpp"

namespace sentmic::mic {

inline constexpr std::size_t kOracleMaxPoints = 14;

namespace oracle_detail {

/// Midpoints between consecutive distinct sorted values.
inline std::vector<double> gaps(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<double> g;
  for (std::size_t i = 1; i < s.size(); ++i) g.push_back(s[i - 1] + (s[i] - s[i - 1]) / 2);
  return g;
}

/// Calls `fn` with every subset of `items` of size <= max_size (including empty).
inline void for_each_subset(const std::vector<double>& items, int max_size,
                            const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<double> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    fn(chosen);
    if (static_cast<int>(chosen.size()) == max_size) return;
    for (std::size_t i = from; i < items.size(); ++i) {
      chosen.push_back(items[i]);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
}

inline int bin(const std::vector<double>& cuts, double v) {
  int b = 0;
  for (double c : cuts) b += v > c;
  return b;
}

/// I = sum p(i,j) log2(p(i,j) / (p(i) p(j))) from raw cell probabilities.
inline double grid_mi(std::span<const double> xs, std::span<const double> ys, const std::vector<double>& xc,
                      const std::vector<double>& yc) {
  const double n = static_cast<double>(xs.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> px, py;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int a = bin(xc, xs[i]);
    const int b = bin(yc, ys[i]);
    joint[{a, b}] += 1.0 / n;
    px[a] += 1.0 / n;
    py[b] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [cell, p] : joint) mi += p * std::log2(p / (px[cell.first] * py[cell.second]));
  return mi;
}

}  // namespace oracle_detail

/// Exhaustive MIC; throws TooLarge for more than 14 points.
inline MicResult mic_exhaustive_oracle(const PointSet& pts, const MicConfig& cfg = {}) {
  cfg.validate();
  if (pts.size() > kOracleMaxPoints) {
    throw Error(ErrorKind::TooLarge, "oracle limited to " + std::to_string(kOracleMaxPoints) + " points");
  }
  const int b = grid_limit(pts.size(), cfg);
  const auto gx = oracle_detail::gaps(pts.x());
  const auto gy = oracle_detail::gaps(pts.y());

  CharacteristicMatrix cm;
  cm.grid_limit = b;
  for (int x = 2; x <= b / 2; ++x) {
    for (int y = 2; x * y <= b; ++y) {
      double best = 0.0;
      oracle_detail::for_each_subset(gx, x - 1, [&](const std::vector<double>& xc) {
        oracle_detail::for_each_subset(gy, y - 1, [&](const std::vector<double>& yc) {
          best = std::max(best, oracle_detail::grid_mi(pts.x(), pts.y(), xc, yc));
        });
      });
      const double m = best / std::log2(static_cast<double>(std::min(x, y)));
      cm.cells.push_back({x, y, best, std::clamp(m, 0.0, 1.0)});
    }
  }
  MicResult r = summarize(std::move(cm), pts.size(), cfg);
  r.degenerate = gx.empty() || gy.empty();
  return r;
}

}  // namespace sentmic::mic
