#pragma once

// End-to-end orchestration: ingest -> score -> index -> analyze -> emit.
// Every intermediate file is persisted so any stage can be re-run alone.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentmic/corpus.hpp"
#include "sentmic/csv.hpp"
#include "sentmic/error.hpp"
#include "sentmic/report.hpp"
#include "sentmic/sentiment.hpp"
#include "sentmic/series.hpp"

namespace sentmic {

struct PipelineConfig {
  std::string posts_path;
  std::string prices_path;
  std::string lexicon_path;  // exactly one of lexicon_path / probs_path
  std::string probs_path;
  std::string output_dir;
  CorpusFilterConfig filter;
  std::size_t window = 30;
  std::size_t min_obs = 1;
  AlignPolicy align_policy = AlignPolicy::NextTradingDay;
  mic::MicConfig mic;

  AnalysisConfig analysis() const { return {window, min_obs, align_policy, mic}; }

  void validate() const {
    if (posts_path.empty()) throw Error(ErrorKind::BadConfig, "posts_path is required");
    if (prices_path.empty()) throw Error(ErrorKind::BadConfig, "prices_path is required");
    if (output_dir.empty()) throw Error(ErrorKind::BadConfig, "output_dir is required");
    if (lexicon_path.empty() == probs_path.empty()) {
      throw Error(ErrorKind::BadConfig, "configure exactly one of lexicon_path, probs_path");
    }
    try {
      filter.validate();
      analysis().validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::BadConfig, e.detail());
    }
  }
};

namespace detail {

inline std::size_t config_size(const std::string& v, std::size_t line) {
  std::int64_t n = 0;
  if (!csv::parse_int(v, n) || n < 0) throw Error(ErrorKind::BadConfig, "expected a non-negative integer", line);
  return static_cast<std::size_t>(n);
}

}  // namespace detail

/// `key = value` lines; `#` starts a comment. Keys are the PipelineConfig
/// field names, nested ones dotted (`filter.max_chars`, `mic.alpha`).
/// Relative paths resolve against `base_dir`.
inline PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  PipelineConfig cfg;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string line = csv::trim(raw);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::BadConfig, "expected key = value", line_no);
    const std::string key = csv::trim(std::string_view(line).substr(0, eq));
    const std::string value = csv::trim(std::string_view(line).substr(eq + 1));
    if (!seen.emplace(key, line_no).second) throw Error(ErrorKind::BadConfig, "duplicate key '" + key + "'", line_no);

    const auto path = [&] {
      if (value.empty()) throw Error(ErrorKind::BadConfig, key + " is empty", line_no);
      std::filesystem::path p(value);
      return (p.is_relative() && !base_dir.empty() ? base_dir / p : p).lexically_normal().string();
    };
    if (key == "posts_path") {
      cfg.posts_path = path();
    } else if (key == "prices_path") {
      cfg.prices_path = path();
    } else if (key == "lexicon_path") {
      cfg.lexicon_path = path();
    } else if (key == "probs_path") {
      cfg.probs_path = path();
    } else if (key == "output_dir") {
      cfg.output_dir = path();
    } else if (key == "filter.max_chars") {
      cfg.filter.max_chars = detail::config_size(value, line_no);
    } else if (key == "filter.top_per_day") {
      cfg.filter.top_per_day = detail::config_size(value, line_no);
    } else if (key == "window") {
      cfg.window = detail::config_size(value, line_no);
    } else if (key == "min_obs") {
      cfg.min_obs = detail::config_size(value, line_no);
    } else if (key == "align_policy") {
      const auto p = parse_align_policy(value);
      if (!p) throw Error(ErrorKind::BadConfig, "align_policy must be next or drop", line_no);
      cfg.align_policy = *p;
    } else if (key == "mic.alpha") {
      if (!csv::parse_double(value, cfg.mic.alpha)) throw Error(ErrorKind::BadConfig, "bad mic.alpha", line_no);
    } else if (key == "mic.min_b") {
      cfg.mic.min_b = static_cast<int>(detail::config_size(value, line_no));
    } else if (key == "mic.clumping_factor") {
      cfg.mic.clumping_factor = static_cast<int>(detail::config_size(value, line_no));
    } else {
      throw Error(ErrorKind::BadConfig, "unknown key '" + key + "'", line_no);
    }
  }
  return cfg;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
  try {
    return parse_pipeline_config(csv::read_file(path), std::filesystem::path(path).parent_path());
  } catch (Error& e) {
    e.with_path(path);
    throw;
  }
}

// Stage helpers shared by the CLI subcommands and run_pipeline, so that the
// stage-by-stage chain and the single-shot run produce identical files.

inline std::string ingest_stage(const std::string& posts_csv, const CorpusFilterConfig& filter) {
  return write_posts(ingest(parse_posts(posts_csv), filter));
}

enum class ScorerSource { Lexicon, Probabilities };

inline std::string score_stage(const std::string& ingested_csv, ScorerSource source, const std::string& scorer_csv) {
  const auto posts = parse_posts(ingested_csv);
  if (source == ScorerSource::Lexicon) return write_scores(score_posts(posts, LexiconScorer(load_lexicon(scorer_csv))));
  return write_scores(score_posts(posts, load_external_scores(scorer_csv)));
}

inline std::string index_stage(const std::string& scores_csv) {
  return write_daily_index(daily_index(read_scores(scores_csv)));
}

struct PipelineOutcome {
  AnalysisReport report;
  EmittedFiles files;
};

inline PipelineOutcome run_pipeline(const PipelineConfig& cfg, unsigned threads = 1) {
  run_stage("config", "", [&] { cfg.validate(); });
  const std::filesystem::path out(cfg.output_dir);
  run_stage("output", cfg.output_dir, [&] {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::IoFailure, ec.message());
  });
  const auto write = [&](const char* name, const std::string& content) {
    const auto p = (out / name).string();
    run_stage("output", p, [&] { csv::write_file(p, content); });
  };

  const std::string posts_bytes = run_stage("ingest", cfg.posts_path, [&] { return csv::read_file(cfg.posts_path); });
  const std::string ingested = run_stage("ingest", cfg.posts_path, [&] { return ingest_stage(posts_bytes, cfg.filter); });
  write("ingested.csv", ingested);

  const auto source = cfg.lexicon_path.empty() ? ScorerSource::Probabilities : ScorerSource::Lexicon;
  const std::string& scorer_path = source == ScorerSource::Lexicon ? cfg.lexicon_path : cfg.probs_path;
  const std::string scorer_bytes = run_stage("score", scorer_path, [&] { return csv::read_file(scorer_path); });
  const std::string scores =
      run_stage("score", scorer_path, [&] { return score_stage(ingested, source, scorer_bytes); });
  write("scores.csv", scores);

  const std::string index_csv = run_stage("index", "", [&] { return index_stage(scores); });
  write("index.csv", index_csv);

  const std::string price_bytes = run_stage("align", cfg.prices_path, [&] { return csv::read_file(cfg.prices_path); });
  const auto bars = run_stage("align", cfg.prices_path, [&] { return load_price_bars(price_bytes); });
  const auto index = read_daily_index(index_csv);

  PipelineOutcome outcome;
  outcome.report = run_stage("analyze", "", [&] {
    return analyze(index, bars, cfg.analysis(), {sha256_hex(posts_bytes), sha256_hex(price_bytes)}, threads);
  });
  outcome.files = run_stage("emit", cfg.output_dir, [&] { return emit_report(outcome.report, out); });
  return outcome;
}

}  // namespace sentmic
