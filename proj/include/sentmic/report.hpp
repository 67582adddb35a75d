#pragma once

// Analysis stage (align -> smooth -> MIC -> statistics) and its on-disk
// report: report.json, aligned.csv and two overlay charts.

#include <openssl/evp.h>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentmic/csv.hpp"
#include "sentmic/error.hpp"
#include "sentmic/mic.hpp"
#include "sentmic/sentiment.hpp"
#include "sentmic/series.hpp"
#include "sentmic/stats.hpp"
#include "sentmic/svg.hpp"

namespace sentmic {

using ordered_json = nlohmann::ordered_json;

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::InvalidArgument, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

struct AnalysisConfig {
  std::size_t window = 30;
  std::size_t min_obs = 1;
  AlignPolicy align_policy = AlignPolicy::NextTradingDay;
  mic::MicConfig mic;

  void validate() const {
    if (window < 1) throw Error(ErrorKind::InvalidArgument, "window must be >= 1");
    if (min_obs < 1 || min_obs > window) throw Error(ErrorKind::InvalidArgument, "min_obs must be in [1, window]");
    mic.validate();
  }
};

struct InputDigests {
  std::optional<std::string> posts_sha256;
  std::optional<std::string> prices_sha256;
};

struct AnalysisReport {
  mic::MicResult mic_result;
  std::vector<std::pair<std::string, SeriesStats>> series_stats;
  AnalysisConfig config;
  InputDigests inputs;
  AlignedSeries raw;       // aligned daily sentiment and close
  AlignedSeries smoothed;  // rolling means of `raw`; the MIC input
};

struct AlignedPair {
  AlignedSeries raw;       // aligned daily sentiment and close
  AlignedSeries smoothed;  // rolling means of `raw`
};

/// Aligns the daily index (weighted by posts per day) onto closing prices
/// and smooths both columns.
inline AlignedPair align_and_smooth(const std::vector<DailyIndexPoint>& index, const std::vector<PriceBar>& bars,
                                    const AnalysisConfig& cfg) {
  cfg.validate();
  return run_stage("align", "", [&] {
    std::vector<SeriesPoint> spts;
    std::vector<double> weights;
    for (const auto& p : index) {
      spts.push_back({p.date, p.emotions});
      weights.push_back(static_cast<double>(p.n_posts));
    }
    AlignedPair out;
    out.raw = align_series(Series("sentiment", std::move(spts)), close_series(bars), cfg.align_policy, weights);
    out.smoothed = smooth(out.raw, cfg.window, cfg.min_obs);
    if (out.smoothed.size() < 4) {
      throw Error(ErrorKind::InsufficientOverlap,
                  "MIC needs >= 4 smoothed points, have " + std::to_string(out.smoothed.size()));
    }
    return out;
  });
}

/// align -> rolling mean on both columns -> MIC on the smoothed pair.
inline AnalysisReport analyze(const std::vector<DailyIndexPoint>& index, const std::vector<PriceBar>& bars,
                              const AnalysisConfig& cfg, InputDigests inputs = {}, unsigned threads = 1) {
  auto [raw, smoothed] = align_and_smooth(index, bars, cfg);
  AnalysisReport r;
  r.config = cfg;
  r.inputs = std::move(inputs);
  r.raw = std::move(raw);
  r.smoothed = std::move(smoothed);
  r.mic_result = run_stage("analyze", "", [&] { return mic::mic(r.smoothed.sentiment, r.smoothed.price, cfg.mic, threads); });
  r.series_stats = {
      {"avg_sentiment", compute_series_stats(r.smoothed.sentiment)},
      {"avg_price", compute_series_stats(r.smoothed.price)},
      {"sentiment", compute_series_stats(r.raw.sentiment)},
      {"price", compute_series_stats(r.raw.price)},
  };
  return r;
}

inline ordered_json to_json(const mic::MicResult& r) {
  ordered_json matrix = ordered_json::array();
  for (const auto& c : r.matrix.cells) matrix.push_back(ordered_json::array({c.x, c.y, c.m}));
  return ordered_json{{"mic", r.mic},           {"best_x", r.best_x}, {"best_y", r.best_y},
                      {"n", r.n},               {"alpha", r.alpha},   {"degenerate", r.degenerate},
                      {"matrix", std::move(matrix)}};
}

inline ordered_json to_json(const SeriesStats& s) {
  return ordered_json{{"count", s.count}, {"mean", s.mean}, {"sd", s.sd},
                      {"min", s.min},     {"max", s.max},   {"skewness", s.skewness}};
}

inline ordered_json to_json(const AnalysisConfig& c) {
  return ordered_json{{"window", c.window},
                      {"min_obs", c.min_obs},
                      {"align_policy", std::string(to_string(c.align_policy))},
                      {"mic",
                       {{"alpha", c.mic.alpha}, {"min_b", c.mic.min_b}, {"clumping_factor", c.mic.clumping_factor}}}};
}

inline ordered_json to_json(const AnalysisReport& r) {
  ordered_json stats = ordered_json::object();
  for (const auto& [name, s] : r.series_stats) stats[name] = to_json(s);
  const auto opt = [](const std::optional<std::string>& s) { return s ? ordered_json(*s) : ordered_json(nullptr); };
  return ordered_json{{"mic", to_json(r.mic_result)},
                      {"stats", std::move(stats)},
                      {"config", to_json(r.config)},
                      {"inputs", {{"posts_sha256", opt(r.inputs.posts_sha256)},
                                  {"prices_sha256", opt(r.inputs.prices_sha256)}}}};
}

inline std::string render_report_json(const AnalysisReport& r) { return to_json(r).dump(2) + "\n"; }

inline std::vector<double> normalized_for_plot(const AlignedSeries& a, bool sentiment_column) {
  const Series s = sentiment_column ? a.sentiment_series() : a.price_series();
  try {
    return min_max_normalize(s).values();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateRange) throw;
    return svg::unit_scale(s.values());
  }
}

inline std::string render_chart(const AlignedSeries& a, std::string title, std::string sentiment_label,
                                std::string price_label) {
  svg::ChartSpec spec;
  spec.title = std::move(title);
  spec.dates = a.dates;
  spec.lines.push_back({std::move(sentiment_label), "#1f77b4", normalized_for_plot(a, true)});
  spec.lines.push_back({std::move(price_label), "#d62728", normalized_for_plot(a, false)});
  return svg::render(spec);
}

struct EmittedFiles {
  std::vector<std::string> paths;
  bool partial_outputs = false;  // charts failed, report written
  std::string chart_error;
};

/// Writes report.json, aligned.csv, fig_raw.svg and fig_smoothed.svg into `dir`.
inline EmittedFiles emit_report(const AnalysisReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, ec.message()).with_path(dir.string());

  EmittedFiles files;
  const auto put = [&](const char* name, std::string_view content) {
    const auto path = (dir / name).string();
    csv::write_file(path, content);
    files.paths.push_back(path);
  };
  put("report.json", render_report_json(report));
  put("aligned.csv", write_aligned(report.smoothed));
  try {
    put("fig_raw.svg", render_chart(report.raw, "Sentiment index vs close (min-max normalized)", "sentiment", "price"));
    put("fig_smoothed.svg", render_chart(report.smoothed, "Rolling means (min-max normalized)", "avg_sentiment",
                                         "avg_price"));
  } catch (const Error& e) {
    files.partial_outputs = true;
    files.chart_error = e.what();
  }
  return files;
}

}  // namespace sentmic
