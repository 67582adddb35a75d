#pragma once

// Daily price bars, dated real series, min-max normalization, trailing
// rolling means and calendar alignment of sentiment onto trading days.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentmic/csv.hpp"
#include "sentmic/date.hpp"
#include "sentmic/error.hpp"

namespace sentmic {

/// Absolute slack when checking change == close - prev_close. Exchange
/// exports round prices to cents, so two rounded operands can disagree with
/// the unrounded change by up to one cent.
inline constexpr double kChangeTolerance = 0.01 + 1e-9;

struct PriceBar {
  Date date;
  double close = 0, open = 0, high = 0, low = 0, prev_close = 0;
  double change = 0, pct_change = 0;
  double volume = 0, turnover = 0;
};

/// Returns the name of the first violated bar invariant, or nullopt.
inline std::optional<std::string> check_bar(const PriceBar& b) {
  if (b.low > std::min(b.open, b.close)) return "low > min(open, close)";
  if (b.high < std::max(b.open, b.close)) return "high < max(open, close)";
  if (b.high < b.low) return "high < low";
  if (std::abs(b.change - (b.close - b.prev_close)) > kChangeTolerance) return "change != close - prev_close";
  if (b.volume < 0) return "volume < 0";
  if (b.turnover < 0) return "turnover < 0";
  return std::nullopt;
}

/// Prices CSV `date,close,open,high,low,prev_close,change,pct_change,volume,turnover`
/// with `YYYYMMDD` dates. Output is ascending by date.
inline std::vector<PriceBar> load_price_bars(std::string_view input) {
  const auto records = csv::parse(input);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no header row");
  if (!csv::header_matches(records.front(), {"date", "close", "open", "high", "low", "prev_close", "change",
                                             "pct_change", "volume", "turnover"})) {
    throw Error(ErrorKind::MalformedRow,
                "expected header date,close,open,high,low,prev_close,change,pct_change,volume,turnover",
                records.front().line);
  }
  std::vector<std::pair<PriceBar, std::size_t>> bars;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 10) {
      throw Error(ErrorKind::MalformedRow, "expected 10 columns, got " + std::to_string(rec.fields.size()), rec.line);
    }
    PriceBar b;
    const auto date = parse_compact_date(csv::trim(rec.fields[0]));
    if (!date) throw Error(ErrorKind::MalformedRow, "bad date '" + rec.fields[0] + "'", rec.line);
    b.date = *date;
    double* slots[9] = {&b.close, &b.open, &b.high, &b.low, &b.prev_close, &b.change, &b.pct_change, &b.volume,
                        &b.turnover};
    for (int k = 0; k < 9; ++k) {
      if (!csv::parse_double(rec.fields[k + 1], *slots[k])) {
        throw Error(ErrorKind::MalformedRow, "bad number '" + rec.fields[k + 1] + "'", rec.line);
      }
    }
    if (auto bad = check_bar(b)) {
      throw Error(ErrorKind::InvariantViolation, format_compact_date(b.date) + ": " + *bad, rec.line);
    }
    bars.emplace_back(b, rec.line);
  }
  if (bars.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");
  std::stable_sort(bars.begin(), bars.end(), [](const auto& a, const auto& b) { return a.first.date < b.first.date; });
  std::vector<PriceBar> out;
  out.reserve(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    if (i > 0 && bars[i].first.date == bars[i - 1].first.date) {
      throw Error(ErrorKind::InvariantViolation, format_compact_date(bars[i].first.date) + ": duplicate date",
                  bars[i].second);
    }
    out.push_back(bars[i].first);
  }
  return out;
}

struct SeriesPoint {
  Date date;
  double value = 0.0;
  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Named series with strictly increasing dates and finite values.
class Series {
 public:
  Series() = default;
  Series(std::string name, std::vector<SeriesPoint> points) : name_(std::move(name)), points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i].value)) {
        throw Error(ErrorKind::InvalidArgument, name_ + ": non-finite value at " + format_iso_date(points_[i].date));
      }
      if (i > 0 && !(points_[i - 1].date < points_[i].date)) {
        throw Error(ErrorKind::InvalidArgument, name_ + ": dates not strictly increasing at " +
                                                    format_iso_date(points_[i].date));
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<SeriesPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(points_.size());
    for (const auto& p : points_) v.push_back(p.value);
    return v;
  }

  friend bool operator==(const Series&, const Series&) = default;

 private:
  std::string name_;
  std::vector<SeriesPoint> points_;
};

inline Series close_series(const std::vector<PriceBar>& bars, std::string name = "price") {
  std::vector<SeriesPoint> pts;
  pts.reserve(bars.size());
  for (const auto& b : bars) pts.push_back({b.date, b.close});
  return Series(std::move(name), std::move(pts));
}

/// (x - min) / (max - min); min maps to exactly 0 and max to exactly 1.
inline Series min_max_normalize(const Series& series) {
  if (series.size() < 2) throw Error(ErrorKind::InvalidArgument, series.name() + ": normalization needs >= 2 points");
  const auto& pts = series.points();
  const auto [lo_it, hi_it] = std::minmax_element(pts.begin(), pts.end(),
                                                  [](const auto& a, const auto& b) { return a.value < b.value; });
  const double lo = lo_it->value;
  const double hi = hi_it->value;
  if (!(hi > lo)) throw Error(ErrorKind::DegenerateRange, series.name() + ": max == min");
  const double range = hi - lo;
  std::vector<SeriesPoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    const double v = p.value == hi ? 1.0 : std::clamp((p.value - lo) / range, 0.0, 1.0);
    out.push_back({p.date, v});
  }
  return Series(series.name(), std::move(out));
}

/// Trailing mean over indices [i - window + 1, i]; positions with fewer than
/// `min_obs` observations are omitted.
inline Series rolling_mean(const Series& series, std::size_t window = 30, std::size_t min_obs = 1) {
  if (window < 1 || min_obs < 1 || min_obs > window) {
    throw Error(ErrorKind::InvalidArgument, "rolling_mean requires 1 <= min_obs <= window");
  }
  const auto& pts = series.points();
  std::vector<SeriesPoint> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    const std::size_t count = i - first + 1;
    if (count < min_obs) continue;
    // Incremental mean: exact on constant windows and stays inside [min, max].
    double mean = 0.0;
    for (std::size_t k = first, seen = 1; k <= i; ++k, ++seen) {
      mean += (pts[k].value - mean) / static_cast<double>(seen);
    }
    out.push_back({pts[i].date, mean});
  }
  return Series(series.name(), std::move(out));
}

enum class AlignPolicy { NextTradingDay, Drop };

inline std::string_view to_string(AlignPolicy p) { return p == AlignPolicy::Drop ? "drop" : "next"; }

inline std::optional<AlignPolicy> parse_align_policy(std::string_view s) {
  if (s == "next" || s == "NextTradingDay") return AlignPolicy::NextTradingDay;
  if (s == "drop" || s == "Drop") return AlignPolicy::Drop;
  return std::nullopt;
}

struct AlignedSeries {
  std::vector<Date> dates;
  std::vector<double> sentiment;
  std::vector<double> price;

  std::size_t size() const noexcept { return dates.size(); }
  Series sentiment_series(std::string name = "sentiment") const { return zip(std::move(name), sentiment); }
  Series price_series(std::string name = "price") const { return zip(std::move(name), price); }

  friend bool operator==(const AlignedSeries&, const AlignedSeries&) = default;

 private:
  Series zip(std::string name, const std::vector<double>& v) const {
    std::vector<SeriesPoint> pts;
    pts.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) pts.push_back({dates[i], v[i]});
    return Series(std::move(name), std::move(pts));
  }
};

/// Pairs sentiment with the price calendar. Under NextTradingDay, a sentiment
/// date missing from the price calendar moves to the next price date; several
/// sources landing on one trading day are averaged, weighted by `weights`
/// (e.g. posts per day) when given. Sentiment after the last price date is
/// dropped under either policy.
inline AlignedSeries align_series(const Series& sentiment, const Series& price,
                                  AlignPolicy policy = AlignPolicy::NextTradingDay,
                                  std::span<const double> weights = {}) {
  if (sentiment.empty() || price.empty()) throw Error(ErrorKind::InvalidArgument, "align_series needs nonempty series");
  if (!weights.empty() && weights.size() != sentiment.size()) {
    throw Error(ErrorKind::LengthMismatch, "weights must match sentiment length");
  }
  const auto& ppts = price.points();

  struct Acc {
    long double weighted = 0, weight = 0;
  };
  std::map<std::size_t, Acc> by_price_index;
  const auto& spts = sentiment.points();
  for (std::size_t i = 0; i < spts.size(); ++i) {
    const auto it = std::lower_bound(ppts.begin(), ppts.end(), spts[i].date,
                                     [](const SeriesPoint& p, const Date& d) { return p.date < d; });
    if (it == ppts.end()) continue;
    if (it->date != spts[i].date && policy == AlignPolicy::Drop) continue;
    const double w = weights.empty() ? 1.0 : weights[i];
    auto& acc = by_price_index[static_cast<std::size_t>(it - ppts.begin())];
    acc.weighted += static_cast<long double>(w) * spts[i].value;
    acc.weight += w;
  }

  AlignedSeries out;
  for (const auto& [idx, acc] : by_price_index) {
    if (!(acc.weight > 0)) continue;
    out.dates.push_back(ppts[idx].date);
    out.sentiment.push_back(static_cast<double>(acc.weighted / acc.weight));
    out.price.push_back(ppts[idx].value);
  }
  if (out.size() < 2) {
    throw Error(ErrorKind::InsufficientOverlap, std::to_string(out.size()) + " common date(s) after alignment");
  }
  return out;
}

/// `rolling_mean` on both columns. They share dates, so rows stay paired.
inline AlignedSeries smooth(const AlignedSeries& a, std::size_t window = 30, std::size_t min_obs = 1) {
  const Series s = rolling_mean(a.sentiment_series(), window, min_obs);
  const Series p = rolling_mean(a.price_series(), window, min_obs);
  AlignedSeries out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.dates.push_back(s.points()[i].date);
    out.sentiment.push_back(s.points()[i].value);
    out.price.push_back(p.points()[i].value);
  }
  return out;
}

/// Aligned-series CSV `date,<sentiment_col>,<price_col>`.
inline std::string write_aligned(const AlignedSeries& a, std::string_view sentiment_col = "avg_sentiment",
                                 std::string_view price_col = "avg_price") {
  std::string out;
  csv::append_row(out, {"date", std::string(sentiment_col), std::string(price_col)});
  for (std::size_t i = 0; i < a.size(); ++i) {
    csv::append_row(out, {format_iso_date(a.dates[i]), csv::format_double(a.sentiment[i]),
                          csv::format_double(a.price[i])});
  }
  return out;
}

/// Reads any three-column `date,<x>,<y>` aligned CSV.
inline AlignedSeries read_aligned(std::string_view input) {
  const auto records = csv::parse(input);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no header row");
  if (records.front().fields.size() != 3 || records.front().fields[0] != "date") {
    throw Error(ErrorKind::MalformedRow, "expected header date,<sentiment>,<price>", records.front().line);
  }
  AlignedSeries a;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    double s = 0, p = 0;
    const auto date = rec.fields.size() == 3 ? parse_iso_date(rec.fields[0]) : std::nullopt;
    if (!date || !csv::parse_double(rec.fields[1], s) || !csv::parse_double(rec.fields[2], p)) {
      throw Error(ErrorKind::MalformedRow, "bad aligned row", rec.line);
    }
    a.dates.push_back(*date);
    a.sentiment.push_back(s);
    a.price.push_back(p);
  }
  return a;
}

}  // namespace sentmic
