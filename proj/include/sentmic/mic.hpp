#pragma once

// Maximal Information Coefficient.
//
// For every grid shape (x columns, y rows) with x*y <= B(n), the best
// achievable mutual information is normalized by log2(min(x, y)); MIC is the
// largest such entry. The search equipartitions one axis and optimizes the
// other by dynamic programming over clumped candidate boundaries, and does
// so in both orientations, keeping the larger value per cell.
//
// Everything depends on the data only through value ranks, so MIC is exactly
// invariant under strictly increasing transforms of either coordinate.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sentmic/error.hpp"

namespace sentmic::mic {

struct MicConfig {
  double alpha = 0.6;
  int min_b = 4;
  int clumping_factor = 15;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be in (0, 1]");
    if (min_b < 4) throw Error(ErrorKind::InvalidArgument, "min_b must be >= 4");
    if (clumping_factor < 1) throw Error(ErrorKind::InvalidArgument, "clumping_factor must be >= 1");
  }
};

/// Paired sample with n >= 4 finite points.
class PointSet {
 public:
  PointSet(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size()) {
      throw Error(ErrorKind::LengthMismatch, std::to_string(x_.size()) + " vs " + std::to_string(y_.size()));
    }
    if (x_.size() < 4) throw Error(ErrorKind::InvalidArgument, "need at least 4 points");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) {
        throw Error(ErrorKind::InvalidArgument, "non-finite coordinate at index " + std::to_string(i));
      }
    }
  }

  std::size_t size() const noexcept { return x_.size(); }
  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }

  PointSet transposed() const { return PointSet(y_, x_); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

/// B(n) = max(floor(n^alpha), min_b).
inline int grid_limit(std::size_t n, const MicConfig& cfg) {
  cfg.validate();
  const double raw = std::pow(static_cast<double>(n), cfg.alpha);
  const int b = static_cast<int>(std::floor(raw + 1e-9));
  return std::max(b, cfg.min_b);
}

// ---------------------------------------------------------------------------
// Grids and mutual information

/// counts[col][row] over the cells cut by the boundaries. A value equal to a
/// boundary falls in the upper cell.
struct GridHistogram {
  std::vector<double> x_boundaries;
  std::vector<double> y_boundaries;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& col : counts) t = std::accumulate(col.begin(), col.end(), t);
    return t;
  }
};

inline std::size_t cell_of(std::span<const double> boundaries, double v) {
  return static_cast<std::size_t>(std::upper_bound(boundaries.begin(), boundaries.end(), v) - boundaries.begin());
}

inline GridHistogram make_grid(const PointSet& pts, std::vector<double> x_boundaries,
                               std::vector<double> y_boundaries) {
  std::sort(x_boundaries.begin(), x_boundaries.end());
  std::sort(y_boundaries.begin(), y_boundaries.end());
  GridHistogram g{std::move(x_boundaries), std::move(y_boundaries), {}};
  g.counts.assign(g.x_boundaries.size() + 1, std::vector<std::size_t>(g.y_boundaries.size() + 1, 0));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ++g.counts[cell_of(g.x_boundaries, pts.x()[i])][cell_of(g.y_boundaries, pts.y()[i])];
  }
  return g;
}

/// Empirical mutual information in bits; empty cells contribute nothing.
inline double mutual_information(const std::vector<std::vector<std::size_t>>& counts) {
  std::vector<long double> col_mass(counts.size(), 0);
  std::vector<long double> row_mass;
  long double n = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (row_mass.size() < counts[c].size()) row_mass.resize(counts[c].size(), 0);
    for (std::size_t r = 0; r < counts[c].size(); ++r) {
      col_mass[c] += counts[c][r];
      row_mass[r] += counts[c][r];
      n += counts[c][r];
    }
  }
  if (n <= 0) throw Error(ErrorKind::InvalidArgument, "grid holds no points");
  long double mi = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t r = 0; r < counts[c].size(); ++r) {
      const long double k = counts[c][r];
      if (k == 0) continue;
      mi += (k / n) * std::log2(k * n / (col_mass[c] * row_mass[r]));
    }
  }
  return std::max(0.0, static_cast<double>(mi));
}

inline double mutual_information(const GridHistogram& grid) { return mutual_information(grid.counts); }

// ---------------------------------------------------------------------------
// Axis ordering and equipartition

namespace detail {

/// Point indices sorted by value (ties by index) plus the end offset of each
/// run of equal values.
struct AxisOrder {
  std::vector<std::size_t> order;
  std::vector<std::size_t> group_end;
};

inline AxisOrder sort_axis(std::span<const double> v) {
  AxisOrder a;
  a.order.resize(v.size());
  std::iota(a.order.begin(), a.order.end(), std::size_t{0});
  std::stable_sort(a.order.begin(), a.order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  for (std::size_t i = 1; i <= v.size(); ++i) {
    if (i == v.size() || v[a.order[i]] != v[a.order[i - 1]]) a.group_end.push_back(i);
  }
  return a;
}

/// Chooses at most k-1 cuts from `edges` (ascending offsets, last one = n)
/// so the k segments have masses as equal as the edges allow. Each cut aims
/// at an equal share of the mass still unassigned and snaps to the nearest
/// edge (lower on a tie). Returns segment end offsets, last = n.
inline std::vector<std::size_t> equipartition_cuts(const std::vector<std::size_t>& edges, int k) {
  const std::size_t n = edges.back();
  std::vector<std::size_t> cuts;
  std::size_t prev = 0;
  for (int i = 0; i + 1 < k; ++i) {
    const int remaining_groups = k - i;
    const double desired = static_cast<double>(prev) + static_cast<double>(n - prev) / remaining_groups;
    auto hi = std::lower_bound(edges.begin(), edges.end(), desired,
                               [](std::size_t e, double d) { return static_cast<double>(e) < d; });
    std::size_t pick = n;
    if (hi != edges.end()) pick = *hi;
    if (hi != edges.begin()) {
      const std::size_t lo = *(hi - 1);
      if (lo > prev && (pick == n || desired - static_cast<double>(lo) <= static_cast<double>(pick) - desired)) {
        pick = lo;
      }
    }
    if (pick <= prev || pick >= n) continue;
    cuts.push_back(pick);
    prev = pick;
  }
  cuts.push_back(n);
  return cuts;
}

/// Class (0-based) of each point when `axis` is cut at `cuts`.
inline std::vector<int> classes_from_cuts(const AxisOrder& axis, const std::vector<std::size_t>& cuts) {
  std::vector<int> cls(axis.order.size());
  int c = 0;
  for (std::size_t pos = 0; pos < axis.order.size(); ++pos) {
    while (pos >= cuts[static_cast<std::size_t>(c)]) ++c;
    cls[axis.order[pos]] = c;
  }
  return cls;
}

/// k * log2(k), tabulated for k = 0..n.
inline std::vector<long double> xlogx_table(std::size_t n) {
  std::vector<long double> t(n + 1, 0);
  for (std::size_t k = 2; k <= n; ++k) t[k] = static_cast<long double>(k) * std::log2(static_cast<long double>(k));
  return t;
}

/// Best mutual information (bits) between a partition of `axis` into at most
/// l groups and the fixed classes of the other axis, for l = 0..max_groups
/// (entries 0 and 1 are zero).
///
/// Candidate cut positions are clump ends: runs of consecutive points that
/// share one class are merged (no optimal partition cuts inside such a run),
/// tied values are never separated, and when more than
/// clumping_factor * max_groups clumps remain they are merged again into that
/// many superclumps of near-equal mass. n * I is additive over groups, so an
/// O(max_groups * k^2) dynamic program finds the optimum over candidates.
/// The axis equipartition with l groups is also scored, so the result never
/// falls below it.
inline std::vector<long double> optimize_axis(const AxisOrder& axis, const std::vector<int>& other_class, int classes,
                                              int max_groups, int clumping_factor,
                                              const std::vector<long double>& xlogx) {
  const std::size_t n = axis.order.size();
  const auto r_count = static_cast<std::size_t>(classes);
  std::vector<long double> best(static_cast<std::size_t>(std::max(max_groups, 1)) + 1, 0.0L);
  if (max_groups < 2 || classes < 2) return best;

  std::vector<int> seq(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = other_class[axis.order[i]];

  // Clumps.
  std::vector<std::size_t> ends;
  int prev_pure = -1;
  std::size_t start = 0;
  for (std::size_t end : axis.group_end) {
    int pure = seq[start];
    for (std::size_t i = start + 1; i < end; ++i) {
      if (seq[i] != pure) {
        pure = -1;
        break;
      }
    }
    if (pure >= 0 && pure == prev_pure) {
      ends.back() = end;
    } else {
      ends.push_back(end);
    }
    prev_pure = pure;
    start = end;
  }
  const std::size_t max_candidates = static_cast<std::size_t>(clumping_factor) * static_cast<std::size_t>(max_groups);
  if (ends.size() > max_candidates) ends = equipartition_cuts(ends, static_cast<int>(max_candidates));

  // Prefix class counts over the whole sequence.
  std::vector<std::size_t> prefix((n + 1) * r_count, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < r_count; ++r) prefix[(i + 1) * r_count + r] = prefix[i * r_count + r];
    ++prefix[(i + 1) * r_count + static_cast<std::size_t>(seq[i])];
  }
  const auto segment_score = [&](std::size_t from, std::size_t to) {
    long double s = -xlogx[to - from];
    for (std::size_t r = 0; r < r_count; ++r) s += xlogx[prefix[to * r_count + r] - prefix[from * r_count + r]];
    return s;
  };
  long double constant = xlogx[n];
  for (std::size_t r = 0; r < r_count; ++r) constant -= xlogx[prefix[n * r_count + r]];
  const auto to_mi = [&](long double f) { return std::max(0.0L, (f + constant) / static_cast<long double>(n)); };

  const std::size_t k = ends.size();
  std::vector<std::size_t> pos(k + 1, 0);
  for (std::size_t t = 0; t < k; ++t) pos[t + 1] = ends[t];

  std::vector<long double> h((k + 1) * (k + 1), 0);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t t = s + 1; t <= k; ++t) h[s * (k + 1) + t] = segment_score(pos[s], pos[t]);
  }

  constexpr long double kNone = -std::numeric_limits<long double>::infinity();
  std::vector<long double> prev_row(k + 1, kNone), cur_row(k + 1, kNone);
  for (std::size_t t = 1; t <= k; ++t) prev_row[t] = h[t];
  long double running = to_mi(prev_row[k]);
  for (int l = 2; l <= max_groups; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    std::fill(cur_row.begin(), cur_row.end(), kNone);
    for (std::size_t t = lu; t <= k; ++t) {
      long double m = kNone;
      for (std::size_t s = lu - 1; s < t; ++s) {
        if (prev_row[s] == kNone) continue;
        m = std::max(m, prev_row[s] + h[s * (k + 1) + t]);
      }
      cur_row[t] = m;
    }
    if (cur_row[k] != kNone) running = std::max(running, to_mi(cur_row[k]));
    best[lu] = running;
    std::swap(prev_row, cur_row);
  }

  for (int l = 2; l <= max_groups; ++l) {
    const auto cuts = equipartition_cuts(axis.group_end, l);
    long double f = 0;
    std::size_t from = 0;
    for (std::size_t to : cuts) {
      f += segment_score(from, to);
      from = to;
    }
    auto& b = best[static_cast<std::size_t>(l)];
    b = std::max(b, to_mi(f));
    if (l > 2) b = std::max(b, best[static_cast<std::size_t>(l) - 1]);
  }
  return best;
}

}  // namespace detail

/// Equipartition of one axis: boundaries sit midway between neighbouring
/// groups; `masses` are the group sizes. Tied values stay together, so fewer
/// than k groups may come back.
struct AxisPartition {
  std::vector<double> boundaries;
  std::vector<std::size_t> masses;
};

inline AxisPartition equipartition_axis(std::span<const double> values, int k) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "equipartition of an empty axis");
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "equipartition needs k >= 2");
  const auto axis = detail::sort_axis(values);
  const auto cuts = detail::equipartition_cuts(axis.group_end, k);
  AxisPartition p;
  std::size_t from = 0;
  for (std::size_t to : cuts) {
    p.masses.push_back(to - from);
    if (to < values.size()) {
      p.boundaries.push_back(std::midpoint(values[axis.order[to - 1]], values[axis.order[to]]));
    }
    from = to;
  }
  return p;
}

/// For fixed rows (cut by `row_boundaries`), the best MI over column
/// partitions with at most `cols` columns, for cols = 2..max_cols.
inline std::vector<std::pair<int, double>> optimize_columns(const PointSet& pts, std::span<const double> row_boundaries,
                                                            int max_cols, const MicConfig& cfg) {
  cfg.validate();
  if (max_cols < 2) throw Error(ErrorKind::InvalidArgument, "max_cols must be >= 2");
  std::vector<double> bounds(row_boundaries.begin(), row_boundaries.end());
  std::sort(bounds.begin(), bounds.end());
  std::vector<int> rows(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) rows[i] = static_cast<int>(cell_of(bounds, pts.y()[i]));
  const auto axis = detail::sort_axis(pts.x());
  const auto best = detail::optimize_axis(axis, rows, static_cast<int>(bounds.size()) + 1, max_cols,
                                          cfg.clumping_factor, detail::xlogx_table(pts.size()));
  std::vector<std::pair<int, double>> out;
  for (int l = 2; l <= max_cols; ++l) out.emplace_back(l, static_cast<double>(best[static_cast<std::size_t>(l)]));
  return out;
}

// ---------------------------------------------------------------------------
// Characteristic matrix and MIC

struct MatrixCell {
  int x = 0;
  int y = 0;
  double mi = 0.0;  // best mutual information, bits
  double m = 0.0;   // mi / log2(min(x, y)), clamped into [0, 1]

  friend bool operator==(const MatrixCell&, const MatrixCell&) = default;
};

/// Cells for every x, y >= 2 with x*y <= B, ordered by x then y.
struct CharacteristicMatrix {
  int grid_limit = 0;
  std::vector<MatrixCell> cells;

  const MatrixCell& at(int x, int y) const {
    for (const auto& c : cells) {
      if (c.x == x && c.y == y) return c;
    }
    throw Error(ErrorKind::InvalidArgument, "no cell " + std::to_string(x) + "x" + std::to_string(y));
  }

  friend bool operator==(const CharacteristicMatrix&, const CharacteristicMatrix&) = default;
};

inline double normalize_cell(double mi, int x, int y) {
  const double m = mi / std::log2(static_cast<double>(std::min(x, y)));
  return std::clamp(m, 0.0, 1.0);
}

inline CharacteristicMatrix zero_matrix(int b) {
  CharacteristicMatrix cm{b, {}};
  for (int x = 2; x <= b / 2; ++x) {
    for (int y = 2; x * y <= b; ++y) cm.cells.push_back({x, y, 0.0, 0.0});
  }
  return cm;
}

inline bool has_constant_axis(const PointSet& pts) {
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  return constant(pts.x()) || constant(pts.y());
}

/// Throws DegenerateAxis when either coordinate is constant. Cells are
/// independent; `threads > 1` evaluates them on worker threads with
/// identical results.
inline CharacteristicMatrix characteristic_matrix(const PointSet& pts, const MicConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  if (has_constant_axis(pts)) throw Error(ErrorKind::DegenerateAxis, "a coordinate is constant");
  const std::size_t n = pts.size();
  const int b = grid_limit(n, cfg);
  const auto ax = detail::sort_axis(pts.x());
  const auto ay = detail::sort_axis(pts.y());
  const auto xlogx = detail::xlogx_table(n);

  // Task t < half: rows = y-equipartition into (t + 2) groups, optimize columns.
  // Task t >= half: columns = x-equipartition, optimize rows.
  const int half = b / 2 - 1;
  const int tasks = 2 * half;
  std::vector<std::vector<long double>> results(static_cast<std::size_t>(std::max(tasks, 0)));
  const auto run = [&](int t) {
    const bool rows_fixed = t < half;
    const int groups = (rows_fixed ? t : t - half) + 2;
    const auto& fixed = rows_fixed ? ay : ax;
    const auto& free_axis = rows_fixed ? ax : ay;
    const auto cuts = detail::equipartition_cuts(fixed.group_end, groups);
    const auto cls = detail::classes_from_cuts(fixed, cuts);
    results[static_cast<std::size_t>(t)] = detail::optimize_axis(free_axis, cls, static_cast<int>(cuts.size()),
                                                                 b / groups, cfg.clumping_factor, xlogx);
  };

  if (threads <= 1 || tasks <= 1) {
    for (int t = 0; t < tasks; ++t) run(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(tasks));
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int t = next++; t < tasks; t = next++) run(t);
      });
    }
  }

  CharacteristicMatrix cm = zero_matrix(b);
  for (auto& cell : cm.cells) {
    const auto& by_rows = results[static_cast<std::size_t>(cell.y - 2)];
    const auto& by_cols = results[static_cast<std::size_t>(half + cell.x - 2)];
    const long double mi = std::max(by_rows[static_cast<std::size_t>(cell.x)], by_cols[static_cast<std::size_t>(cell.y)]);
    cell.mi = static_cast<double>(mi);
    cell.m = normalize_cell(cell.mi, cell.x, cell.y);
  }
  return cm;
}

struct MicResult {
  double mic = 0.0;
  int best_x = 2;
  int best_y = 2;
  std::size_t n = 0;
  double alpha = 0.6;
  bool degenerate = false;
  CharacteristicMatrix matrix;
};

/// Largest entry; ties resolve to the lexicographically smallest (x, y).
inline MicResult summarize(CharacteristicMatrix cm, std::size_t n, const MicConfig& cfg) {
  MicResult r;
  r.n = n;
  r.alpha = cfg.alpha;
  r.mic = -1.0;
  for (const auto& c : cm.cells) {
    if (c.m > r.mic) {
      r.mic = c.m;
      r.best_x = c.x;
      r.best_y = c.y;
    }
  }
  if (cm.cells.empty()) r.mic = 0.0;
  r.matrix = std::move(cm);
  return r;
}

inline MicResult mic(const PointSet& pts, const MicConfig& cfg = {}, unsigned threads = 1) {
  cfg.validate();
  if (has_constant_axis(pts)) {
    MicResult r = summarize(zero_matrix(grid_limit(pts.size(), cfg)), pts.size(), cfg);
    r.degenerate = true;
    return r;
  }
  return summarize(characteristic_matrix(pts, cfg, threads), pts.size(), cfg);
}

inline MicResult mic(std::vector<double> x, std::vector<double> y, const MicConfig& cfg = {}, unsigned threads = 1) {
  return mic(PointSet(std::move(x), std::move(y)), cfg, threads);
}

}  // namespace sentmic::mic
