// Synthetic forum + price fixture generator.
//
// Produces posts.csv, prices.csv, probs.csv, lexicon.csv and pipeline.conf.
// Daily sentiment follows a (lagged, smoothed) copy of the close plus a slow
// independent drift and per-post noise, so the pipeline sees a dependence of
// tunable strength. Output is a pure function of the flags.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sentmic/csv.hpp"
#include "sentmic/date.hpp"

namespace {

using namespace sentmic;

/// Portable draws on top of mt19937_64 (std distributions differ across
/// standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }
  int below(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 eng_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

double round9(double v) { return std::round(v * 1e9) / 1e9; }

/// p_neg, p_neu, p_pos rendered so the three decimals sum to one within 1e-8.
std::vector<std::string> probability_fields(double p_neg, double p_pos) {
  return {fixed(p_neg, 9), fixed(1.0 - round9(p_neg) - round9(p_pos), 9), fixed(p_pos, 9)};
}

const std::array<const char*, 8> kBullish = {"大涨", "牛市", "抄底", "翻红", "利好", "起飞", "反弹", "涨停"};
const std::array<const char*, 8> kBearish = {"大跌", "熊市", "割肉", "跌停", "利空", "崩盘", "套牢", "减持"};
const std::array<const char*, 10> kFiller = {"今天", "大盘", "明天", "创业板", "深成指",
                                             "感觉", "北上资金", "尾盘", "散户", "主力"};

std::vector<double> trailing_mean(const std::vector<double>& v, std::size_t w) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t first = i + 1 >= w ? i + 1 - w : 0;
    double s = 0;
    for (std::size_t k = first; k <= i; ++k) s += v[k];
    out[i] = s / static_cast<double>(i - first + 1);
  }
  return out;
}

std::vector<double> standardized(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(v.size()));
  std::vector<double> out;
  for (double x : v) out.push_back(sd > 0 ? (x - m) / sd : 0.0);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic sentiment/price fixture"};
  std::string out_dir;
  int days = 200;
  std::uint64_t seed = 1;
  int lag = 0;
  std::size_t smooth = 1;
  double signal = 1.0;
  double drift = 0.0;
  double post_noise = 0.3;
  app.add_option("--out-dir", out_dir)->required();
  app.add_option("--days", days, "trading days")->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--lag", lag, "sentiment trails price by this many trading days")->capture_default_str();
  app.add_option("--smooth", smooth, "trailing window applied to the price signal")->capture_default_str();
  app.add_option("--signal", signal, "weight of the price signal")->capture_default_str();
  app.add_option("--drift", drift, "weight of the independent slow drift")->capture_default_str();
  app.add_option("--post-noise", post_noise, "per-post noise scale")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  Rng rng(seed);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  // Trading calendar: weekdays from 2019-01-02.
  std::vector<Date> trading;
  for (Date d = *parse_iso_date("2019-01-02"); static_cast<int>(trading.size()) < days; d = add_days(d, 1)) {
    const std::chrono::weekday wd{std::chrono::sys_days{d}};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) trading.push_back(d);
  }

  // Prices.
  std::string prices;
  csv::append_row(prices, {"date", "close", "open", "high", "low", "prev_close", "change", "pct_change", "volume",
                           "turnover"});
  std::vector<double> closes;
  double prev = 10000.0;
  for (const auto& d : trading) {
    const double close = std::round(prev * std::exp(0.012 * rng.normal()) * 100.0) / 100.0;
    const double open = std::round(prev * (1.0 + 0.003 * rng.normal()) * 100.0) / 100.0;
    const double high = std::max(std::round(std::max(open, close) * (1.0 + 0.004 * rng.uniform()) * 100.0) / 100.0,
                                 std::max(open, close));
    const double low = std::min(std::round(std::min(open, close) * (1.0 - 0.004 * rng.uniform()) * 100.0) / 100.0,
                                std::min(open, close));
    const double change = close - prev;
    const double volume = std::round(3.0e8 * (1.0 + 0.2 * rng.uniform()));
    csv::append_row(prices, {format_compact_date(d), fixed(close, 2), fixed(open, 2), fixed(high, 2),
                             fixed(low, 2), fixed(prev, 2), fixed(change, 4),
                             fixed(change / prev * 100.0, 4), fixed(volume, 0), fixed(volume * 1.35, 0)});
    closes.push_back(close);
    prev = close;
  }

  // Daily sentiment target per trading day.
  const auto price_signal = standardized(trailing_mean(closes, smooth));
  std::vector<double> walk(trading.size());
  double w = 0;
  for (auto& x : walk) x = (w += rng.normal());
  const auto drift_signal = standardized(trailing_mean(walk, 5));
  std::vector<double> target(trading.size());
  for (std::size_t t = 0; t < trading.size(); ++t) {
    const std::size_t src = t >= static_cast<std::size_t>(lag) ? t - static_cast<std::size_t>(lag) : 0;
    target[t] = std::tanh(0.6 * (signal * price_signal[src] + drift * drift_signal[t]));
  }

  // Posts on every calendar day; weekends carry the next trading day's mood.
  std::string posts, probs;
  csv::append_row(posts, {"date", "text", "reads", "replies", "url"});
  csv::append_row(probs, {"post_id", "p_neg", "p_neu", "p_pos"});
  int row = 0;
  std::size_t next_trading = 0;
  const Date last = trading.back();
  for (Date d = trading.front(); d <= last; d = add_days(d, 1)) {
    while (trading[next_trading] < d) ++next_trading;
    const double mood = target[next_trading];
    const int day_index = static_cast<int>(std::chrono::sys_days{d}.time_since_epoch().count());
    int count = 3 + rng.below(6);
    if (day_index % 97 == 0) count = 60;  // exercises the per-day cap
    for (int k = 0; k < count; ++k) {
      const double s = std::clamp(mood + post_noise * rng.normal(), -0.95, 0.95);
      const double p_neu = 0.05 + 0.1 * rng.uniform();
      const double m = 1.0 - p_neu;
      const double v = std::clamp(s, -m, m);
      const double p_pos = (m + v) / 2.0;
      const double p_neg = (m - v) / 2.0;

      std::string text = kFiller[static_cast<std::size_t>(rng.below(10))];
      text += (v >= 0 ? kBullish : kBearish)[static_cast<std::size_t>(rng.below(8))];
      text += "，";
      text += kFiller[static_cast<std::size_t>(rng.below(10))];
      text += " 第" + std::to_string(k + 1) + "帖";
      if (k == 1 && day_index % 5 == 0) text = "<b>" + text + "</b>🚀";
      if (k == 2 && day_index % 11 == 0) text = std::string(160, 'x');  // over the length cap
      const int reads = 20 + rng.below(2000);
      const int replies = rng.below(40);
      ++row;
      csv::append_row(posts, {format_iso_date(d), text, std::to_string(reads), std::to_string(replies),
                              "http://guba.example/news," + std::to_string(900000000 + row) + ".html"});
      auto pf = probability_fields(p_neg, p_pos);
      csv::append_row(probs, {std::to_string(row), pf[0], pf[1], pf[2]});
      if (k == 0 && day_index % 7 == 0) {
        // Same-day repost of the first message; dropped by de-duplication.
        ++row;
        csv::append_row(posts, {format_iso_date(d), text + "  ", std::to_string(reads / 2), "0", ""});
        csv::append_row(probs, {std::to_string(row), pf[0], pf[1], pf[2]});
      }
    }
  }

  std::string lexicon = "neutral_bias=0.5\n";
  csv::append_row(lexicon, {"term", "weight"});
  for (const char* t : kBullish) csv::append_row(lexicon, {t, "1.5"});
  for (const char* t : kBearish) csv::append_row(lexicon, {t, "-1.5"});

  const std::string conf =
      "# synthetic fixture\n"
      "posts_path = posts.csv\n"
      "prices_path = prices.csv\n"
      "probs_path = probs.csv\n"
      "output_dir = out\n"
      "filter.max_chars = 150\n"
      "filter.top_per_day = 50\n"
      "window = 30\n"
      "min_obs = 1\n"
      "align_policy = next\n"
      "mic.alpha = 0.6\n";

  csv::write_file((dir / "prices.csv").string(), prices);
  csv::write_file((dir / "posts.csv").string(), posts);
  csv::write_file((dir / "probs.csv").string(), probs);
  csv::write_file((dir / "lexicon.csv").string(), lexicon);
  csv::write_file((dir / "pipeline.conf").string(), conf);
  std::cout << "wrote " << row << " posts over " << trading.size() << " trading days to " << out_dir << "\n";
  return 0;
}
