#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sentmic/sentiment.hpp"

using namespace sentmic;

namespace {

Lexicon lexicon(std::map<std::string, double> entries, double bias = 0.0) {
  Lexicon l;
  l.entries = std::move(entries);
  l.neutral_bias = bias;
  return l;
}

}  // namespace

TEST(SentimentScore, KnownProbabilityRows) {
  // Per-post score = P(positive) - P(negative) on reference classifier outputs.
  EXPECT_NEAR(post_sentiment(0.938666, 0.0613335), 0.8773325, 1e-9);
  EXPECT_NEAR(post_sentiment(0.00298048, 0.99702), -0.99403952, 1e-9);
  EXPECT_DOUBLE_EQ(post_sentiment(SentimentScore::from_probabilities(0.5, 0.0, 0.5)), 0.0);
}

TEST(SentimentScore, LabelIsArgmaxWithNeutralTies) {
  EXPECT_EQ(SentimentScore::from_probabilities(0.7, 0.2, 0.1).label(), Label::Negative);
  EXPECT_EQ(SentimentScore::from_probabilities(0.1, 0.2, 0.7).label(), Label::Positive);
  EXPECT_EQ(SentimentScore::from_probabilities(0.1, 0.8, 0.1).label(), Label::Neutral);
  EXPECT_EQ(SentimentScore::from_probabilities(0.4, 0.2, 0.4).label(), Label::Neutral);
  EXPECT_EQ(SentimentScore::from_probabilities(0.4, 0.4, 0.2).label(), Label::Neutral);
  EXPECT_EQ(static_cast<int>(Label::Negative), 0);
  EXPECT_EQ(static_cast<int>(Label::Positive), 2);
}

TEST(SentimentScore, RejectsInvalidTriples) {
  EXPECT_THROW(SentimentScore::from_probabilities(0.5, 0.5, 0.5), Error);
  EXPECT_THROW(SentimentScore::from_probabilities(-0.1, 0.6, 0.5), Error);
  EXPECT_THROW(SentimentScore::from_probabilities(std::nan(""), 0.5, 0.5), Error);
}

TEST(SentimentScore, AntisymmetricUnderSwap) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng) * (1 - a);
    const auto s = SentimentScore::from_probabilities(a, 1 - a - b, b);
    const auto t = SentimentScore::from_probabilities(b, 1 - a - b, a);
    ASSERT_EQ(post_sentiment(s), -post_sentiment(t));
    ASSERT_GE(post_sentiment(s), -1.0);
    ASSERT_LE(post_sentiment(s), 1.0);
  }
}

TEST(Lexicon, NoMatchIsUniform) {
  const auto s = score_with_lexicon("平淡无奇", lexicon({{"大涨", 2.0}}));
  EXPECT_NEAR(s.p_negative(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(s.p_neutral(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(s.p_positive(), 1.0 / 3, 1e-15);
  EXPECT_EQ(s.label(), Label::Neutral);
}

TEST(Lexicon, SinglePositiveTerm) {
  const auto s = score_with_lexicon("今天大涨", lexicon({{"大涨", 2.0}, {"大跌", -1.0}}));
  EXPECT_NEAR(s.p_positive(), 0.7869860421615985, 1e-12);  // e^2 / (e^2 + 2)
  EXPECT_EQ(s.label(), Label::Positive);
}

TEST(Lexicon, BalancedEvidenceIsNeutral) {
  const auto s = score_with_lexicon("大涨之后大跌", lexicon({{"大涨", 1.0}, {"大跌", -1.0}}));
  EXPECT_EQ(s.p_positive(), s.p_negative());
  EXPECT_EQ(s.label(), Label::Neutral);
}

TEST(Lexicon, LongestMatchConsumesCharacters) {
  const LexiconScorer scorer(lexicon({{"涨", 1.0}, {"涨停", 3.0}, {"停", -5.0}}));
  const auto m = scorer.match("涨停了涨");
  EXPECT_DOUBLE_EQ(m.positive, 4.0);  // 涨停 + 涨; 停 inside 涨停 is not re-used
  EXPECT_DOUBLE_EQ(m.negative, 0.0);
  EXPECT_DOUBLE_EQ(scorer.match("停").negative, 5.0);
}

TEST(Lexicon, LoadWithBiasAndErrors) {
  const Lexicon l = load_lexicon("neutral_bias=0.5\nterm,weight\n大涨,1.5\n大跌,-2\n");
  EXPECT_DOUBLE_EQ(l.neutral_bias, 0.5);
  EXPECT_EQ(l.entries.size(), 2u);
  EXPECT_DOUBLE_EQ(l.entries.at("大跌"), -2.0);
  try {
    load_lexicon("term,weight\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyLexicon);
  }
  try {
    load_lexicon("neutral_bias=0\nterm,weight\na,1\na,2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedRow);
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(LexiconScorer(Lexicon{}), Error);
}

TEST(ExternalScores, ClassifierRowsDecode) {
  const auto scores = load_external_scores(
      "post_id,p_neg,p_neu,p_pos\n"
      "a,0.0613335,0.0000005,0.938666\n"
      "b,0.99702,0,0.00298048\n");
  EXPECT_EQ(scores.at("a").label(), Label::Positive);
  EXPECT_EQ(scores.at("b").label(), Label::Negative);
  EXPECT_NEAR(post_sentiment(scores.at("a")), 0.8773325, 1e-6);
  EXPECT_NEAR(post_sentiment(scores.at("b")), -0.99403952, 1e-6);
  for (const auto& [id, s] : scores) {
    EXPECT_NEAR(s.p_negative() + s.p_neutral() + s.p_positive(), 1.0, 1e-9) << id;
  }
}

TEST(ExternalScores, Rejections) {
  const auto kind = [](const char* csv) {
    try {
      load_external_scores(csv);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::BadConfig;
  };
  EXPECT_EQ(kind("post_id,p_neg,p_neu,p_pos\na,0.2,0.2,0.1\n"), ErrorKind::BadProbabilityRow);
  EXPECT_EQ(kind("post_id,p_neg,p_neu,p_pos\na,1.2,0,0\n"), ErrorKind::BadProbabilityRow);
  EXPECT_EQ(kind("post_id,p_neg,p_neu,p_pos\na,x,0,1\n"), ErrorKind::BadProbabilityRow);
  EXPECT_EQ(kind("post_id,p_neg,p_neu,p_pos\na,0,0,1\na,1,0,0\n"), ErrorKind::DuplicatePostId);
}

TEST(ExternalScores, SerializeRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<std::string, SentimentScore> scores;
  for (int i = 0; i < 300; ++i) {
    const double a = u(rng), b = u(rng) * (1 - a);
    scores.emplace("p" + std::to_string(i), SentimentScore::from_probabilities(a, 1 - a - b, b));
  }
  const auto back = load_external_scores(write_external_scores(scores));
  ASSERT_EQ(back.size(), scores.size());
  for (const auto& [id, s] : scores) {
    const auto& t = back.at(id);
    EXPECT_NEAR(s.p_negative(), t.p_negative(), 1e-9);
    EXPECT_NEAR(s.p_neutral(), t.p_neutral(), 1e-9);
    EXPECT_NEAR(s.p_positive(), t.p_positive(), 1e-9);
  }
}

TEST(DailyIndex, MeanPerDate) {
  const Date d1 = *parse_iso_date("2020-06-09");
  const Date d0 = *parse_iso_date("2020-06-08");
  const auto idx = daily_index({{"1", d1, 0.8773325}, {"2", d1, -0.99403952}, {"3", d0, 0.25}});
  ASSERT_EQ(idx.size(), 2u);
  EXPECT_EQ(idx[0].date, d0);
  EXPECT_DOUBLE_EQ(idx[0].emotions, 0.25);
  EXPECT_EQ(idx[0].n_posts, 1u);
  EXPECT_NEAR(idx[1].emotions, -0.05835351, 1e-12);
  EXPECT_EQ(idx[1].n_posts, 2u);
  EXPECT_TRUE(daily_index({}).empty());
}

TEST(DailyIndex, BoundedByDayExtremes) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<PostSentiment> s;
  const Date base = *parse_iso_date("2020-01-01");
  for (int i = 0; i < 5000; ++i) s.push_back({std::to_string(i), add_days(base, static_cast<int>(rng() % 40)), u(rng)});
  std::map<Date, std::pair<double, double>> ext;
  for (const auto& p : s) {
    auto [it, fresh] = ext.emplace(p.posted_at, std::pair{p.value, p.value});
    it->second.first = std::min(it->second.first, p.value);
    it->second.second = std::max(it->second.second, p.value);
  }
  for (const auto& point : daily_index(s)) {
    EXPECT_GE(point.emotions, ext[point.date].first);
    EXPECT_LE(point.emotions, ext[point.date].second);
  }
}

TEST(DailyIndex, CsvRoundTrip) {
  const Date d = *parse_iso_date("2020-06-09");
  const std::vector<DailyIndexPoint> idx = {{d, -0.05835351, 2}, {add_days(d, 1), 0.1, 7}};
  EXPECT_EQ(read_daily_index(write_daily_index(idx)), idx);
}

TEST(ScorePosts, ExternalScoresMustCoverEveryPost) {
  ForumPost p;
  p.post_id = "42";
  p.posted_at = *parse_iso_date("2020-06-09");
  std::map<std::string, SentimentScore> none;
  try {
    score_posts({p}, none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingScore);
  }
  const auto scored = score_posts({p}, std::map<std::string, SentimentScore>{
                                           {"42", SentimentScore::from_probabilities(0.1, 0.2, 0.7)}});
  const auto back = read_scores(write_scores(scored));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].post_id, "42");
  EXPECT_DOUBLE_EQ(back[0].value, scored[0].sentiment);
}
