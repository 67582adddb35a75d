#pragma once

// Forum post ingestion: CSV parsing, text cleaning, de-duplication, the
// length cap and the per-day read-count cap.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sentmic/csv.hpp"
#include "sentmic/date.hpp"
#include "sentmic/error.hpp"
#include "sentmic/utf8.hpp"

namespace sentmic {

struct ForumPost {
  std::string post_id;
  Date posted_at;
  std::string text;
  std::uint64_t read_count = 0;
  std::uint64_t reply_count = 0;
  std::string source_url;

  friend bool operator==(const ForumPost&, const ForumPost&) = default;
};

struct CorpusFilterConfig {
  std::size_t max_chars = 150;
  std::size_t top_per_day = 50;

  void validate() const {
    if (max_chars < 1) throw Error(ErrorKind::InvalidArgument, "max_chars must be >= 1");
    if (top_per_day < 1) throw Error(ErrorKind::InvalidArgument, "top_per_day must be >= 1");
  }
};

namespace detail {

inline std::uint64_t parse_count(std::string_view field, std::size_t line, const char* what) {
  if (csv::trim(field).empty()) return 0;
  std::int64_t v = 0;
  if (!csv::parse_int(field, v) || v < 0) {
    throw Error(ErrorKind::MalformedRow, std::string("bad ") + what + " '" + std::string(field) + "'", line);
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

/// Parses the posts CSV (`date,text,reads,replies,url`, optionally preceded by
/// a `post_id` column). Without an id column, each post's id is its 1-based
/// data-row ordinal.
inline std::vector<ForumPost> parse_posts(std::string_view input) {
  const auto records = csv::parse(input);
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no header row");

  const bool with_id = csv::header_matches(records.front(), {"post_id", "date", "text", "reads", "replies", "url"});
  if (!with_id && !csv::header_matches(records.front(), {"date", "text", "reads", "replies", "url"})) {
    throw Error(ErrorKind::MalformedRow, "expected header date,text,reads,replies,url", records.front().line);
  }
  const std::size_t base = with_id ? 1 : 0;
  const std::size_t width = base + 5;

  std::vector<ForumPost> posts;
  posts.reserve(records.size() - 1);
  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != width) {
      throw Error(ErrorKind::MalformedRow,
                  "expected " + std::to_string(width) + " columns, got " + std::to_string(rec.fields.size()), rec.line);
    }
    ForumPost p;
    p.post_id = with_id ? rec.fields[0] : std::to_string(r);
    if (p.post_id.empty()) throw Error(ErrorKind::MalformedRow, "empty post_id", rec.line);
    const auto date = parse_iso_date(csv::trim(rec.fields[base]));
    if (!date) throw Error(ErrorKind::MalformedRow, "bad date '" + rec.fields[base] + "'", rec.line);
    p.posted_at = *date;
    p.text = rec.fields[base + 1];
    p.read_count = detail::parse_count(rec.fields[base + 2], rec.line, "read count");
    p.reply_count = detail::parse_count(rec.fields[base + 3], rec.line, "reply count");
    p.source_url = rec.fields[base + 4];
    if (!seen_ids.insert(p.post_id).second) throw Error(ErrorKind::DuplicatePostId, p.post_id, rec.line);
    posts.push_back(std::move(p));
  }
  if (posts.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");
  return posts;
}

/// Serializes posts in the ingest output layout (`post_id` first).
inline std::string write_posts(const std::vector<ForumPost>& posts) {
  std::string out;
  csv::append_row(out, {"post_id", "date", "text", "reads", "replies", "url"});
  for (const auto& p : posts) {
    csv::append_row(out, {p.post_id, format_iso_date(p.posted_at), p.text, std::to_string(p.read_count),
                          std::to_string(p.reply_count), p.source_url});
  }
  return out;
}

/// Emoji and pictograph code points removed by `clean_text`.
inline bool is_emoji(char32_t c) {
  return (c >= 0x1F000 && c <= 0x1FAFF)    // mahjong .. symbols & pictographs ext-A, incl. flags and skin tones
         || (c >= 0x2600 && c <= 0x27BF)   // misc symbols, dingbats
         || (c >= 0x2B00 && c <= 0x2BFF)   // misc symbols and arrows
         || (c >= 0xFE00 && c <= 0xFE0F)   // variation selectors
         || (c >= 0xE0020 && c <= 0xE007F) // tag sequences
         || c == 0x200D                    // zero width joiner
         || c == 0x20E3;                   // combining keycap
}

inline bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

inline bool is_control(char32_t c) {
  return c < 0x20 || (c >= 0x7F && c <= 0x9F) || c == 0x200B || c == 0xFEFF;
}

/// Strips `<...>` spans, emoji, control characters; collapses whitespace.
inline std::string clean_text(std::string_view text) {
  const std::u32string cps = utf8::decode(text);

  std::u32string untagged;
  untagged.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] == U'<') {
      const auto close = cps.find(U'>', i + 1);
      if (close != std::u32string::npos) {
        i = close;
        continue;
      }
    }
    untagged.push_back(cps[i]);
  }

  std::u32string out;
  out.reserve(untagged.size());
  bool pending_space = false;
  for (char32_t c : untagged) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (is_control(c) || is_emoji(c)) continue;
    if (pending_space && !out.empty()) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return utf8::encode(out);
}

inline ForumPost clean_text(ForumPost post) {
  post.text = clean_text(std::string_view(post.text));
  return post;
}

/// Keeps the first occurrence of each (date, text) pair, preserving order.
inline std::vector<ForumPost> deduplicate(const std::vector<ForumPost>& posts) {
  std::set<std::pair<int, std::string_view>> seen;
  std::vector<ForumPost> out;
  out.reserve(posts.size());
  for (const auto& p : posts) {
    const int day = std::chrono::sys_days{p.posted_at}.time_since_epoch().count();
    if (seen.emplace(day, p.text).second) out.push_back(p);
  }
  return out;
}

/// Keeps posts with strictly fewer than `cfg.max_chars` code points.
inline std::vector<ForumPost> filter_by_length(const std::vector<ForumPost>& posts, const CorpusFilterConfig& cfg) {
  cfg.validate();
  std::vector<ForumPost> out;
  std::copy_if(posts.begin(), posts.end(), std::back_inserter(out),
               [&](const ForumPost& p) { return utf8::length(p.text) < cfg.max_chars; });
  return out;
}

/// Per date, the `cfg.top_per_day` most-read posts; ties keep input order.
/// Output is grouped by ascending date.
inline std::vector<ForumPost> select_daily_top(const std::vector<ForumPost>& posts, const CorpusFilterConfig& cfg) {
  cfg.validate();
  std::vector<ForumPost> sorted = posts;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ForumPost& a, const ForumPost& b) {
    if (a.posted_at != b.posted_at) return a.posted_at < b.posted_at;
    return a.read_count > b.read_count;
  });
  std::vector<ForumPost> out;
  out.reserve(sorted.size());
  std::size_t taken = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i].posted_at != sorted[i - 1].posted_at) taken = 0;
    if (taken < cfg.top_per_day) {
      out.push_back(std::move(sorted[i]));
      ++taken;
    }
  }
  return out;
}

/// clean -> deduplicate -> length cap -> daily top.
inline std::vector<ForumPost> ingest(const std::vector<ForumPost>& raw, const CorpusFilterConfig& cfg) {
  cfg.validate();
  std::vector<ForumPost> cleaned;
  cleaned.reserve(raw.size());
  for (const auto& p : raw) cleaned.push_back(clean_text(p));
  return select_daily_top(filter_by_length(deduplicate(cleaned), cfg), cfg);
}

}  // namespace sentmic
