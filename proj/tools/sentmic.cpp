// sentmic: forum sentiment index vs. price, measured with MIC.
//
//   sentmic ingest   --in posts.csv --out ingested.csv
//   sentmic score    --in ingested.csv (--lexicon lex.csv | --probs probs.csv) --out scores.csv
//   sentmic index    --in scores.csv --out index.csv
//   sentmic align    --in index.csv --prices prices.csv --out aligned.csv
//   sentmic analyze  --in index.csv --prices prices.csv --out-dir DIR
//   sentmic mic      --in aligned.csv [--out mic.json]
//   sentmic pipeline --config pipeline.conf [--out-dir DIR]

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sentmic/corpus.hpp"
#include "sentmic/csv.hpp"
#include "sentmic/error.hpp"
#include "sentmic/pipeline.hpp"
#include "sentmic/report.hpp"
#include "sentmic/sentiment.hpp"
#include "sentmic/series.hpp"

namespace {

using namespace sentmic;

struct AnalysisFlags {
  double alpha = 0.6;
  std::size_t window = 30;
  std::size_t min_obs = 1;
  std::string policy = "next";
  int min_b = 4;
  int clumping = 15;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "grid budget exponent: B(n) = n^alpha")->capture_default_str();
    cmd->add_option("--window", window, "rolling mean window (days)")->capture_default_str();
    cmd->add_option("--min-obs", min_obs, "minimum observations per window")->capture_default_str();
    cmd->add_option("--policy", policy, "calendar alignment: next|drop")
        ->check(CLI::IsMember({"next", "drop"}))
        ->capture_default_str();
    cmd->add_option("--min-b", min_b, "lower clamp on B(n)")->capture_default_str();
    cmd->add_option("--clumping", clumping, "clumping factor for the column search")->capture_default_str();
  }

  AnalysisConfig config() const {
    AnalysisConfig c;
    c.window = window;
    c.min_obs = min_obs;
    c.align_policy = *parse_align_policy(policy);
    c.mic.alpha = alpha;
    c.mic.min_b = min_b;
    c.mic.clumping_factor = clumping;
    return c;
  }
};

std::string read_input(std::string_view stage, const std::string& path) {
  return run_stage(stage, path, [&] { return csv::read_file(path); });
}

void write_output(std::string_view stage, const std::string& path, const std::string& content) {
  run_stage(stage, path, [&] { csv::write_file(path, content); });
}

std::string default_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SENTMIC_OUTPUT_DIR"); env && *env) return env;
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forum sentiment index vs. price dependence (MIC)"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads hint for MIC evaluation")->capture_default_str();

  // ingest
  std::string ingest_in, ingest_out;
  CorpusFilterConfig filter;
  auto* ingest_cmd = app.add_subcommand("ingest", "clean, de-duplicate and cap a posts CSV");
  ingest_cmd->add_option("--in", ingest_in, "posts CSV")->required();
  ingest_cmd->add_option("--out", ingest_out, "ingested posts CSV")->required();
  ingest_cmd->add_option("--max-chars", filter.max_chars, "keep texts shorter than this")->capture_default_str();
  ingest_cmd->add_option("--top-per-day", filter.top_per_day, "most-read posts kept per day")->capture_default_str();

  // score
  std::string score_in, score_out, lexicon_path, probs_path;
  auto* score_cmd = app.add_subcommand("score", "assign per-post class probabilities");
  score_cmd->add_option("--in", score_in, "ingested posts CSV")->required();
  score_cmd->add_option("--out", score_out, "scores CSV")->required();
  auto* lex_opt = score_cmd->add_option("--lexicon", lexicon_path, "lexicon CSV (term,weight)");
  auto* probs_opt = score_cmd->add_option("--probs", probs_path, "external probabilities CSV");
  lex_opt->excludes(probs_opt);
  probs_opt->excludes(lex_opt);

  // index
  std::string index_in, index_out;
  auto* index_cmd = app.add_subcommand("index", "daily mean sentiment");
  index_cmd->add_option("--in", index_in, "scores CSV")->required();
  index_cmd->add_option("--out", index_out, "daily index CSV")->required();

  // align
  std::string align_in, align_prices, align_out, align_raw_out;
  AnalysisFlags align_flags;
  auto* align_cmd = app.add_subcommand("align", "align the daily index to trading days and smooth both series");
  align_cmd->add_option("--in", align_in, "daily index CSV")->required();
  align_cmd->add_option("--prices", align_prices, "prices CSV")->required();
  align_cmd->add_option("--out", align_out, "smoothed aligned CSV (date,avg_sentiment,avg_price)")->required();
  align_cmd->add_option("--raw-out", align_raw_out, "unsmoothed aligned CSV (date,sentiment,price)");
  align_flags.attach(align_cmd);

  // analyze
  std::string analyze_in, analyze_prices, analyze_posts, analyze_dir;
  AnalysisFlags analyze_flags;
  auto* analyze_cmd = app.add_subcommand("analyze", "align, smooth, compute MIC and write the report");
  analyze_cmd->add_option("--in", analyze_in, "daily index CSV")->required();
  analyze_cmd->add_option("--prices", analyze_prices, "prices CSV")->required();
  analyze_cmd->add_option("--posts", analyze_posts, "original posts CSV (digest recorded in the report)");
  analyze_cmd->add_option("--out-dir,--out", analyze_dir, "report directory (default $SENTMIC_OUTPUT_DIR)");
  analyze_flags.attach(analyze_cmd);

  // mic
  std::string mic_in, mic_out;
  mic::MicConfig mic_cfg;
  auto* mic_cmd = app.add_subcommand("mic", "MIC of the two value columns of an aligned CSV");
  mic_cmd->add_option("--in", mic_in, "aligned CSV (date,<x>,<y>)")->required();
  mic_cmd->add_option("--out", mic_out, "JSON output (default stdout)");
  mic_cmd->add_option("--alpha", mic_cfg.alpha, "grid budget exponent")->capture_default_str();
  mic_cmd->add_option("--min-b", mic_cfg.min_b, "lower clamp on B(n)")->capture_default_str();
  mic_cmd->add_option("--clumping", mic_cfg.clumping_factor, "clumping factor")->capture_default_str();

  // pipeline
  std::string config_path, pipeline_dir;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage from a config file");
  pipeline_cmd->add_option("--config", config_path, "key = value config file")->required();
  pipeline_cmd->add_option("--out-dir,--out", pipeline_dir, "overrides output_dir");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) {
      const auto bytes = read_input("ingest", ingest_in);
      write_output("ingest", ingest_out, run_stage("ingest", ingest_in, [&] { return ingest_stage(bytes, filter); }));
    } else if (*score_cmd) {
      if (lexicon_path.empty() == probs_path.empty()) {
        std::cerr << "score: exactly one of --lexicon, --probs is required\n";
        return 2;
      }
      const auto posts = read_input("score", score_in);
      const auto source = lexicon_path.empty() ? ScorerSource::Probabilities : ScorerSource::Lexicon;
      const auto& scorer_path = lexicon_path.empty() ? probs_path : lexicon_path;
      const auto scorer = read_input("score", scorer_path);
      const auto scores = run_stage("score", scorer_path, [&] { return score_stage(posts, source, scorer); });
      write_output("score", score_out, scores);
    } else if (*index_cmd) {
      const auto scores = read_input("index", index_in);
      write_output("index", index_out, run_stage("index", index_in, [&] { return index_stage(scores); }));
    } else if (*align_cmd) {
      const auto index = run_stage("align", align_in, [&] { return read_daily_index(read_input("align", align_in)); });
      const auto bars = run_stage("align", align_prices,
                                  [&] { return load_price_bars(read_input("align", align_prices)); });
      const auto pair = align_and_smooth(index, bars, align_flags.config());
      write_output("align", align_out, write_aligned(pair.smoothed));
      if (!align_raw_out.empty()) write_output("align", align_raw_out, write_aligned(pair.raw, "sentiment", "price"));
    } else if (*analyze_cmd) {
      const std::string dir = default_out_dir(analyze_dir);
      if (dir.empty()) {
        std::cerr << "analyze: --out-dir or SENTMIC_OUTPUT_DIR is required\n";
        return 2;
      }
      const auto index_bytes = read_input("analyze", analyze_in);
      const auto price_bytes = read_input("analyze", analyze_prices);
      const auto index = run_stage("analyze", analyze_in, [&] { return read_daily_index(index_bytes); });
      const auto bars = run_stage("analyze", analyze_prices, [&] { return load_price_bars(price_bytes); });
      InputDigests digests;
      digests.prices_sha256 = sha256_hex(price_bytes);
      if (!analyze_posts.empty()) digests.posts_sha256 = sha256_hex(read_input("analyze", analyze_posts));
      const auto report = analyze(index, bars, analyze_flags.config(), digests, threads);
      const auto files = run_stage("emit", dir, [&] { return emit_report(report, dir); });
      std::cout << "mic " << csv::format_double(report.mic_result.mic) << " (" << report.mic_result.best_x << "x"
                << report.mic_result.best_y << ", n=" << report.mic_result.n << ")\n";
      if (files.partial_outputs) {
        std::cerr << "warning: charts not written: " << files.chart_error << "\n";
        return 3;
      }
    } else if (*mic_cmd) {
      const auto aligned = run_stage("mic", mic_in, [&] { return read_aligned(read_input("mic", mic_in)); });
      const auto result = run_stage("mic", mic_in, [&] { return mic::mic(aligned.sentiment, aligned.price, mic_cfg, threads); });
      const std::string json = to_json(result).dump(2) + "\n";
      if (mic_out.empty()) {
        std::cout << json;
      } else {
        write_output("mic", mic_out, json);
      }
    } else if (*pipeline_cmd) {
      auto cfg = run_stage("config", config_path, [&] { return load_pipeline_config(config_path); });
      if (!pipeline_dir.empty()) {
        cfg.output_dir = pipeline_dir;
      } else if (cfg.output_dir.empty()) {
        cfg.output_dir = default_out_dir("");
      }
      const auto outcome = run_pipeline(cfg, threads);
      std::cout << "mic " << csv::format_double(outcome.report.mic_result.mic) << " ("
                << outcome.report.mic_result.best_x << "x" << outcome.report.mic_result.best_y
                << ", n=" << outcome.report.mic_result.n << ") -> " << cfg.output_dir << "\n";
      if (outcome.files.partial_outputs) {
        std::cerr << "warning: charts not written: " << outcome.files.chart_error << "\n";
        return 3;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
