#pragma once

// Per-post class probabilities, the per-post sentiment score and the daily
// sentiment index.
//
// The classifier is a port: a `Lexicon` scorer ships in-tree, and
// `load_external_scores` accepts probabilities produced by any external
// model keyed by post id.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sentmic/corpus.hpp"
#include "sentmic/csv.hpp"
#include "sentmic/date.hpp"
#include "sentmic/error.hpp"
#include "sentmic/utf8.hpp"

namespace sentmic {

enum class Label : int { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr double kProbabilitySumTolerance = 1e-9;
inline constexpr double kExternalSumTolerance = 1e-6;

/// Largest probability wins; any tie for the maximum resolves to Neutral.
inline Label argmax_label(double p_neg, double p_neu, double p_pos) {
  const double top = std::max({p_neg, p_neu, p_pos});
  const int hits = (p_neg == top) + (p_neu == top) + (p_pos == top);
  if (hits > 1 || p_neu == top) return Label::Neutral;
  return p_neg == top ? Label::Negative : Label::Positive;
}

/// Three-class probability triple in label order (negative, neutral, positive).
class SentimentScore {
 public:
  static SentimentScore from_probabilities(double p_neg, double p_neu, double p_pos) {
    for (double p : {p_neg, p_neu, p_pos}) {
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "probability outside [0,1]");
    }
    if (std::abs(p_neg + p_neu + p_pos - 1.0) > kProbabilitySumTolerance) {
      throw Error(ErrorKind::InvalidArgument, "probabilities do not sum to 1");
    }
    return SentimentScore(p_neg, p_neu, p_pos);
  }

  double p_negative() const noexcept { return p_[0]; }
  double p_neutral() const noexcept { return p_[1]; }
  double p_positive() const noexcept { return p_[2]; }
  Label label() const noexcept { return label_; }

  friend bool operator==(const SentimentScore&, const SentimentScore&) = default;

 private:
  SentimentScore(double n, double u, double p) : p_{n, u, p}, label_(argmax_label(n, u, p)) {}

  std::array<double, 3> p_;
  Label label_;
};

/// Per-post score: P(positive) - P(negative).
inline double post_sentiment(double p_positive, double p_negative) noexcept { return p_positive - p_negative; }

inline double post_sentiment(const SentimentScore& s) noexcept {
  return post_sentiment(s.p_positive(), s.p_negative());
}

struct PostSentiment {
  std::string post_id;
  Date posted_at;
  double value = 0.0;
};

struct DailyIndexPoint {
  Date date;
  double emotions = 0.0;
  std::size_t n_posts = 0;

  friend bool operator==(const DailyIndexPoint&, const DailyIndexPoint&) = default;
};

// ---------------------------------------------------------------------------
// Lexicon scorer

struct Lexicon {
  std::map<std::string, double> entries;
  double neutral_bias = 0.0;

  void validate() const {
    if (entries.empty()) throw Error(ErrorKind::EmptyLexicon, "lexicon has no terms");
    for (const auto& [term, w] : entries) {
      if (term.empty()) throw Error(ErrorKind::InvalidArgument, "empty lexicon term");
      if (!std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "non-finite weight for '" + term + "'");
    }
    if (!std::isfinite(neutral_bias)) throw Error(ErrorKind::InvalidArgument, "non-finite neutral_bias");
  }
};

/// Lexicon CSV: optional leading `neutral_bias=<real>` line, then header
/// `term,weight`. A repeated term is a malformed row.
inline Lexicon load_lexicon(std::string_view input) {
  Lexicon lex;
  std::size_t line_offset = 0;
  {
    std::string_view probe = input;
    if (probe.starts_with("\xEF\xBB\xBF")) probe.remove_prefix(3);
    if (probe.starts_with("neutral_bias")) {
      const auto nl = probe.find('\n');
      const std::string_view first = probe.substr(0, nl);
      const auto eq = first.find('=');
      if (eq == std::string_view::npos || !csv::parse_double(csv::trim(first.substr(eq + 1)), lex.neutral_bias)) {
        throw Error(ErrorKind::MalformedRow, "bad neutral_bias line", 1);
      }
      input = nl == std::string_view::npos ? std::string_view{} : probe.substr(nl + 1);
      line_offset = 1;
    }
  }
  const auto records = csv::parse(input);
  if (records.empty()) throw Error(ErrorKind::EmptyLexicon, "no header row");
  if (!csv::header_matches(records.front(), {"term", "weight"})) {
    throw Error(ErrorKind::MalformedRow, "expected header term,weight", records.front().line + line_offset);
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::size_t line = rec.line + line_offset;
    double w = 0.0;
    if (rec.fields.size() != 2 || rec.fields[0].empty() || !csv::parse_double(rec.fields[1], w)) {
      throw Error(ErrorKind::MalformedRow, "expected term,weight", line);
    }
    if (!lex.entries.emplace(rec.fields[0], w).second) {
      throw Error(ErrorKind::MalformedRow, "duplicate term '" + rec.fields[0] + "'", line);
    }
  }
  lex.validate();
  return lex;
}

/// Matched evidence for one text.
struct LexiconMatch {
  double positive = 0.0;  // sum of matched positive weights
  double negative = 0.0;  // sum of |matched negative weights|
};

/// Immutable matcher built once per lexicon; safe to share across threads.
class LexiconScorer {
 public:
  explicit LexiconScorer(Lexicon lexicon) : lexicon_(std::move(lexicon)) {
    lexicon_.validate();
    for (const auto& [term, w] : lexicon_.entries) {
      std::u32string cps = utf8::decode(term);
      by_first_[cps.front()].emplace_back(std::move(cps), w);
    }
    for (auto& [_, terms] : by_first_) {
      std::stable_sort(terms.begin(), terms.end(),
                       [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    }
  }

  const Lexicon& lexicon() const noexcept { return lexicon_; }

  /// Leftmost-longest scan; each character is consumed by at most one term.
  LexiconMatch match(std::string_view text) const {
    const std::u32string cps = utf8::decode(text);
    LexiconMatch m;
    std::size_t i = 0;
    while (i < cps.size()) {
      const auto it = by_first_.find(cps[i]);
      std::size_t consumed = 1;
      if (it != by_first_.end()) {
        for (const auto& [term, w] : it->second) {
          if (cps.compare(i, term.size(), term) == 0) {
            if (w > 0) m.positive += w;
            if (w < 0) m.negative += -w;
            consumed = term.size();
            break;
          }
        }
      }
      i += consumed;
    }
    return m;
  }

  /// Softmax over (negative evidence, neutral bias, positive evidence).
  SentimentScore score(std::string_view text) const {
    const LexiconMatch m = match(text);
    const long double logits[3] = {m.negative, lexicon_.neutral_bias, m.positive};
    const long double top = std::max({logits[0], logits[1], logits[2]});
    long double e[3];
    long double z = 0;
    for (int k = 0; k < 3; ++k) z += (e[k] = std::exp(logits[k] - top));
    const double p_neg = static_cast<double>(e[0] / z);
    const double p_pos = static_cast<double>(e[2] / z);
    const double p_neu = static_cast<double>(e[1] / z);
    return SentimentScore::from_probabilities(p_neg, p_neu, p_pos);
  }

 private:
  Lexicon lexicon_;
  std::unordered_map<char32_t, std::vector<std::pair<std::u32string, double>>> by_first_;
};

inline SentimentScore score_with_lexicon(std::string_view text, const Lexicon& lexicon) {
  return LexiconScorer(lexicon).score(text);
}

// ---------------------------------------------------------------------------
// External probabilities

/// Probabilities CSV `post_id,p_neg,p_neu,p_pos`. Rows whose sum is within
/// 1e-6 of one are renormalized; anything else is rejected.
inline std::map<std::string, SentimentScore> load_external_scores(std::string_view input) {
  const auto records = csv::parse(input);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no header row");
  if (!csv::header_matches(records.front(), {"post_id", "p_neg", "p_neu", "p_pos"})) {
    throw Error(ErrorKind::MalformedRow, "expected header post_id,p_neg,p_neu,p_pos", records.front().line);
  }
  std::map<std::string, SentimentScore> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 4) throw Error(ErrorKind::MalformedRow, "expected 4 columns", rec.line);
    double p[3];
    for (int k = 0; k < 3; ++k) {
      if (!csv::parse_double(rec.fields[k + 1], p[k])) {
        throw Error(ErrorKind::BadProbabilityRow, "unparseable probability '" + rec.fields[k + 1] + "'", rec.line);
      }
      if (p[k] < 0.0 || p[k] > 1.0) throw Error(ErrorKind::BadProbabilityRow, "probability outside [0,1]", rec.line);
    }
    const long double sum = static_cast<long double>(p[0]) + p[1] + p[2];
    if (std::abs(sum - 1.0L) > kExternalSumTolerance) {
      throw Error(ErrorKind::BadProbabilityRow, "probabilities sum to " + csv::format_double(double(sum)), rec.line);
    }
    double q[3];
    for (int k = 0; k < 3; ++k) q[k] = static_cast<double>(p[k] / sum);
    if (out.contains(rec.fields[0])) throw Error(ErrorKind::DuplicatePostId, rec.fields[0], rec.line);
    out.emplace(rec.fields[0], SentimentScore::from_probabilities(q[0], q[1], q[2]));
  }
  return out;
}

inline std::string write_external_scores(const std::map<std::string, SentimentScore>& scores) {
  std::string out;
  csv::append_row(out, {"post_id", "p_neg", "p_neu", "p_pos"});
  for (const auto& [id, s] : scores) {
    csv::append_row(out, {id, csv::format_double(s.p_negative()), csv::format_double(s.p_neutral()),
                          csv::format_double(s.p_positive())});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scoring a corpus and the daily index

struct ScoredPost {
  std::string post_id;
  Date posted_at;
  SentimentScore score;
  double sentiment = 0.0;
};

inline std::vector<ScoredPost> score_posts(const std::vector<ForumPost>& posts, const LexiconScorer& scorer) {
  std::vector<ScoredPost> out;
  out.reserve(posts.size());
  for (const auto& p : posts) {
    const SentimentScore s = scorer.score(p.text);
    out.push_back({p.post_id, p.posted_at, s, post_sentiment(s)});
  }
  return out;
}

inline std::vector<ScoredPost> score_posts(const std::vector<ForumPost>& posts,
                                           const std::map<std::string, SentimentScore>& external) {
  std::vector<ScoredPost> out;
  out.reserve(posts.size());
  for (const auto& p : posts) {
    const auto it = external.find(p.post_id);
    if (it == external.end()) throw Error(ErrorKind::MissingScore, "no probabilities for post " + p.post_id);
    out.push_back({p.post_id, p.posted_at, it->second, post_sentiment(it->second)});
  }
  return out;
}

/// Scores CSV `post_id,date,p_neg,p_neu,p_pos,label,sentiment`.
inline std::string write_scores(const std::vector<ScoredPost>& scored) {
  std::string out;
  csv::append_row(out, {"post_id", "date", "p_neg", "p_neu", "p_pos", "label", "sentiment"});
  for (const auto& s : scored) {
    csv::append_row(out, {s.post_id, format_iso_date(s.posted_at), csv::format_double(s.score.p_negative()),
                          csv::format_double(s.score.p_neutral()), csv::format_double(s.score.p_positive()),
                          std::to_string(static_cast<int>(s.score.label())), csv::format_double(s.sentiment)});
  }
  return out;
}

inline std::vector<PostSentiment> read_scores(std::string_view input) {
  const auto records = csv::parse(input);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no header row");
  if (!csv::header_matches(records.front(), {"post_id", "date", "p_neg", "p_neu", "p_pos", "label", "sentiment"})) {
    throw Error(ErrorKind::MalformedRow, "expected header post_id,date,p_neg,p_neu,p_pos,label,sentiment",
                records.front().line);
  }
  std::vector<PostSentiment> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 7) throw Error(ErrorKind::MalformedRow, "expected 7 columns", rec.line);
    const auto date = parse_iso_date(rec.fields[1]);
    double v = 0.0;
    if (!date) throw Error(ErrorKind::MalformedRow, "bad date '" + rec.fields[1] + "'", rec.line);
    if (!csv::parse_double(rec.fields[6], v) || v < -1.0 || v > 1.0) {
      throw Error(ErrorKind::MalformedRow, "bad sentiment '" + rec.fields[6] + "'", rec.line);
    }
    out.push_back({rec.fields[0], *date, v});
  }
  return out;
}

inline std::vector<PostSentiment> to_post_sentiments(const std::vector<ScoredPost>& scored) {
  std::vector<PostSentiment> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back({s.post_id, s.posted_at, s.sentiment});
  return out;
}

/// Mean post sentiment per date, ascending by date; dates without posts are absent.
inline std::vector<DailyIndexPoint> daily_index(const std::vector<PostSentiment>& sentiments) {
  struct Acc {
    long double sum = 0;
    double lo = 1.0, hi = -1.0;
    std::size_t n = 0;
  };
  std::map<Date, Acc> by_date;
  for (const auto& s : sentiments) {
    auto& a = by_date[s.posted_at];
    a.sum += s.value;
    a.lo = std::min(a.lo, s.value);
    a.hi = std::max(a.hi, s.value);
    ++a.n;
  }
  std::vector<DailyIndexPoint> out;
  out.reserve(by_date.size());
  for (const auto& [date, a] : by_date) {
    const double mean = static_cast<double>(a.sum / static_cast<long double>(a.n));
    out.push_back({date, std::clamp(mean, a.lo, a.hi), a.n});
  }
  return out;
}

/// Daily index CSV `date,emotions,n_posts`.
inline std::string write_daily_index(const std::vector<DailyIndexPoint>& index) {
  std::string out;
  csv::append_row(out, {"date", "emotions", "n_posts"});
  for (const auto& p : index) {
    csv::append_row(out, {format_iso_date(p.date), csv::format_double(p.emotions), std::to_string(p.n_posts)});
  }
  return out;
}

inline std::vector<DailyIndexPoint> read_daily_index(std::string_view input) {
  const auto records = csv::parse(input);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no header row");
  if (!csv::header_matches(records.front(), {"date", "emotions", "n_posts"})) {
    throw Error(ErrorKind::MalformedRow, "expected header date,emotions,n_posts", records.front().line);
  }
  std::vector<DailyIndexPoint> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 3) throw Error(ErrorKind::MalformedRow, "expected 3 columns", rec.line);
    const auto date = parse_iso_date(rec.fields[0]);
    double v = 0.0;
    std::int64_t n = 0;
    if (!date || !csv::parse_double(rec.fields[1], v) || !csv::parse_int(rec.fields[2], n) || n < 1) {
      throw Error(ErrorKind::MalformedRow, "bad index row", rec.line);
    }
    if (!out.empty() && !(out.back().date < *date)) {
      throw Error(ErrorKind::MalformedRow, "dates must be strictly increasing", rec.line);
    }
    out.push_back({*date, v, static_cast<std::size_t>(n)});
  }
  if (out.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");
  return out;
}

}  // namespace sentmic
