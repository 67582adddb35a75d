#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "sentmic/corpus.hpp"

using namespace sentmic;

namespace {

ForumPost post(std::string id, const char* date, std::string text, std::uint64_t reads = 0) {
  ForumPost p;
  p.post_id = std::move(id);
  p.posted_at = *parse_iso_date(date);
  p.text = std::move(text);
  p.read_count = reads;
  return p;
}

std::string repeat(const std::string& s, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += s;
  return out;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::BadConfig;
}

}  // namespace

TEST(ParsePosts, ForumExportRow) {
  const auto posts = parse_posts(
      "date,text,reads,replies,url\n"
      "2020-9-9,今天抄底爽歪歪了,95,0,\"http://guba.eastmoney.com/news,zssz399001,9634\"\n");
  ASSERT_EQ(posts.size(), 1u);
  EXPECT_EQ(posts[0].posted_at, *parse_iso_date("2020-09-09"));
  EXPECT_EQ(posts[0].text, "今天抄底爽歪歪了");
  EXPECT_EQ(posts[0].read_count, 95u);
  EXPECT_EQ(posts[0].reply_count, 0u);
  EXPECT_EQ(posts[0].source_url, "http://guba.eastmoney.com/news,zssz399001,9634");
  EXPECT_EQ(posts[0].post_id, "1");
}

TEST(ParsePosts, HeaderOnlyIsEmptyInput) {
  EXPECT_EQ(kind_of([] { parse_posts("date,text,reads,replies,url\n"); }), ErrorKind::EmptyInput);
  EXPECT_EQ(kind_of([] { parse_posts(""); }), ErrorKind::EmptyInput);
}

TEST(ParsePosts, BadCountReportsLine) {
  try {
    parse_posts("date,text,reads,replies,url\n2020-09-09,x,abc,0,\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedRow);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParsePosts, MalformedRows) {
  EXPECT_EQ(kind_of([] { parse_posts("date,text,reads,replies,url\n2020-09-09,x,1\n"); }), ErrorKind::MalformedRow);
  EXPECT_EQ(kind_of([] { parse_posts("date,text,reads,replies,url\n2020-02-30,x,1,1,\n"); }), ErrorKind::MalformedRow);
  EXPECT_EQ(kind_of([] { parse_posts("date,text,reads,replies,url\n2020-02-03,x,-1,1,\n"); }), ErrorKind::MalformedRow);
  EXPECT_EQ(kind_of([] { parse_posts("when,text,reads,replies,url\n2020-02-03,x,1,1,\n"); }), ErrorKind::MalformedRow);
}

TEST(ParsePosts, MissingCountsDefaultToZeroAndQuotedNewlines) {
  const auto posts = parse_posts("date,text,reads,replies,url\n2020-09-09,\"a,\nb\",,,\n2020-09-10,c,3,,\n");
  ASSERT_EQ(posts.size(), 2u);
  EXPECT_EQ(posts[0].text, "a,\nb");
  EXPECT_EQ(posts[0].read_count, 0u);
  EXPECT_EQ(posts[1].read_count, 3u);
  EXPECT_EQ(posts[1].post_id, "2");
}

TEST(ParsePosts, IngestLayoutRoundTrips) {
  std::vector<ForumPost> posts = {post("7", "2020-09-09", "含,逗号 \"引号\"", 5), post("9", "2020-09-10", "b", 1)};
  posts[1].source_url = "http://x";
  EXPECT_EQ(parse_posts(write_posts(posts)), posts);
  EXPECT_EQ(kind_of([] { parse_posts("post_id,date,text,reads,replies,url\n1,2020-09-09,a,1,1,\n1,2020-09-09,b,1,1,\n"); }),
            ErrorKind::DuplicatePostId);
}

TEST(CleanText, StripsMarkupEmojiAndControls) {
  EXPECT_EQ(clean_text("大涨<br>了🚀"), "大涨了");
  EXPECT_EQ(clean_text("  今天抄底爽歪歪了  "), "今天抄底爽歪歪了");
  EXPECT_EQ(clean_text("今天抄底爽歪歪了"), "今天抄底爽歪歪了");
  EXPECT_EQ(clean_text("a\t\n  b\x01\x7f c"), "a b c");
  EXPECT_EQ(clean_text("<div class=\"x\">利好</div>"), "利好");
  EXPECT_EQ(clean_text("👍🏻❤️ 起飞"), "起飞");
  EXPECT_EQ(clean_text("3<5 still"), "3<5 still");
  EXPECT_EQ(clean_text(""), "");
  EXPECT_EQ(clean_text("\xff"), "\xEF\xBF\xBD");
}

TEST(CleanText, PostOverloadLeavesOtherFields) {
  ForumPost p = post("1", "2020-01-02", " <p>x</p> ", 7);
  p.source_url = "u";
  const ForumPost c = clean_text(p);
  EXPECT_EQ(c.text, "x");
  EXPECT_EQ(c.read_count, 7u);
  EXPECT_EQ(c.source_url, "u");
  EXPECT_EQ(c.post_id, "1");
}

TEST(CleanText, IdempotentOnRandomStrings) {
  const std::vector<std::string> alphabet = {"a", " ", "\n", "<", ">", "大", "🚀", "\xEF\xB8\x8F", "\x01", "b", "\xff"};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const int len = static_cast<int>(rng() % 20);
    for (int i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    const std::string once = clean_text(s);
    ASSERT_EQ(clean_text(once), once) << "input: " << s;
  }
}

TEST(Deduplicate, KeyIsDateAndText) {
  const std::vector<ForumPost> posts = {post("1", "2020-01-02", "x"), post("2", "2020-01-02", "x"),
                                        post("3", "2020-01-03", "x"), post("4", "2020-01-02", "y")};
  const auto d = deduplicate(posts);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].post_id, "1");
  EXPECT_EQ(d[1].post_id, "3");
  EXPECT_EQ(d[2].post_id, "4");
  EXPECT_EQ(deduplicate(d), d);
  EXPECT_TRUE(deduplicate({}).empty());
}

TEST(FilterByLength, StrictBoundaryInCodePoints) {
  const CorpusFilterConfig cfg;
  const std::vector<ForumPost> posts = {post("1", "2020-01-02", repeat("涨", 149)),
                                        post("2", "2020-01-02", repeat("涨", 150)),
                                        post("3", "2020-01-02", repeat("a", 151))};
  const auto kept = filter_by_length(posts, cfg);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].post_id, "1");
  EXPECT_THROW(filter_by_length(posts, CorpusFilterConfig{0, 50}), Error);
}

TEST(SelectDailyTop, CapsEachDayByReads) {
  std::vector<ForumPost> posts;
  for (int i = 0; i < 60; ++i) posts.push_back(post(std::to_string(i), "2020-01-02", "t" + std::to_string(i), 1000 - i));
  for (int i = 0; i < 3; ++i) posts.push_back(post("b" + std::to_string(i), "2020-01-01", "u", i));
  const auto top = select_daily_top(posts, CorpusFilterConfig{});
  ASSERT_EQ(top.size(), 53u);
  // Ascending dates; under-full day kept whole, sorted by reads.
  EXPECT_EQ(top[0].post_id, "b2");
  EXPECT_EQ(top[2].post_id, "b0");
  EXPECT_EQ(top[3].post_id, "0");
  EXPECT_EQ(top[52].post_id, "49");
}

TEST(SelectDailyTop, TieAtCutoffKeepsEarlierInput) {
  // Reference: explicit (reads desc, input index asc) ordering.
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ForumPost> posts;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      posts.push_back(post(std::to_string(i), rng() % 2 ? "2020-01-02" : "2020-01-03", "t", rng() % 4));
    }
    const CorpusFilterConfig cfg{150, 1 + rng() % 6};
    const auto got = select_daily_top(posts, cfg);

    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const auto& pa = posts[static_cast<std::size_t>(a)];
      const auto& pb = posts[static_cast<std::size_t>(b)];
      if (pa.posted_at != pb.posted_at) return pa.posted_at < pb.posted_at;
      if (pa.read_count != pb.read_count) return pa.read_count > pb.read_count;
      return a < b;
    });
    std::vector<std::string> expected;
    std::map<Date, std::size_t> per_day;
    for (int i : idx) {
      const auto& p = posts[static_cast<std::size_t>(i)];
      if (per_day[p.posted_at]++ < cfg.top_per_day) expected.push_back(p.post_id);
    }
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) ASSERT_EQ(got[i].post_id, expected[i]);
  }
}

TEST(Ingest, DedupBeforeCapAndDeterministic) {
  std::vector<ForumPost> raw;
  raw.push_back(post("1", "2020-01-02", "<b>同一条</b>", 5));
  raw.push_back(post("2", "2020-01-02", "同一条 ", 100));  // same cleaned text, later: dropped
  raw.push_back(post("3", "2020-01-02", repeat("长", 150), 1000));
  raw.push_back(post("4", "2020-01-02", "另一条", 1));
  const auto out = ingest(raw, CorpusFilterConfig{150, 50});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].post_id, "1");
  EXPECT_EQ(out[0].text, "同一条");
  EXPECT_EQ(out[1].post_id, "4");
  EXPECT_EQ(write_posts(ingest(raw, {})), write_posts(out));
}
