// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/evaluate.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "egoview/error.hpp"
#include "em_cases.hpp"
#include "support.hpp"

namespace egoview::evaluate {
namespace {

using solvability::ViewBucket;

TEST(NormalizeAnswer, HandComputedCases) {
  for (const auto& c : testing::kNormalizeCases) {
    EXPECT_EQ(normalize_answer(c.input), c.expected) << "input: [" << c.input << "]";
  }
}

TEST(NormalizeAnswer, IdempotentOnRandomStrings) {
  const std::vector<std::string> atoms{
      "a", "B", "z", " ", "  ", "\t", "\n", ".", "?", "!", ",", "'", "1",
      "\xEF\xBC\xA1",            // full-width A
      "\xEF\xBD\x82",            // full-width b
      "\xEF\xAC\x81",            // fi ligature
      "\xE2\x91\xA0",            // circled one
      "\xE2\x85\xAB",            // roman numeral twelve
      "\xC3\x89", "e\xCC\x81",   // precomposed and decomposed e-acute
      "\xCC\x81",                // lone combining acute
      "\xC2\xA0",                // no-break space
      "\xE3\x80\x80",            // ideographic space
      "\xC3\x9F",                // sharp s
      "\xCE\xA3", "\xCF\x82",    // sigma, final sigma
      "\xC4\xB0",                // dotted capital I
      "\xC2\xBD",                // one half
      "\xEF\xBC\x8E", "\xEF\xBC\x9F"};  // full-width . and ?
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1), len(0, 12);
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    for (std::size_t k = len(rng); k > 0; --k) s += atoms[pick(rng)];
    const auto once = normalize_answer(s);
    EXPECT_EQ(normalize_answer(once), once) << "input: [" << s << "]";
  }
}

GoldRecord gold(std::string id, std::string answer, std::optional<ViewBucket> b) {
  return {std::move(id), {std::move(answer)}, b};
}

TEST(EmScore, ThreeOfFour) {
  const std::vector<GoldRecord> g{gold("a", "left", ViewBucket::One), gold("b", "red", ViewBucket::Two),
                                  gold("c", "two", ViewBucket::Three), gold("d", "yes", ViewBucket::FourPlus)};
  const std::vector<Prediction> p{{"a", "Left."}, {"b", "blue"}, {"c", "two"}, {"d", "YES"}};
  const auto r = em_score(p, g);
  EXPECT_EQ(r.total, 4u);
  EXPECT_EQ(r.correct, 3u);
  EXPECT_DOUBLE_EQ(r.overall_em, 75.0);
  EXPECT_DOUBLE_EQ(r.buckets[0].em, 100.0);
  EXPECT_DOUBLE_EQ(r.buckets[1].em, 0.0);
  EXPECT_EQ(r.buckets[3].count, 1u);
}

TEST(EmScore, ExactEqualScoresOne) {
  const std::vector<GoldRecord> g{gold("a", "On the Right Side.", std::nullopt)};
  const std::vector<Prediction> p{{"a", "On the Right Side."}};
  const auto r = em_score(p, g);
  EXPECT_EQ(r.correct, 1u);
  EXPECT_EQ(r.unbucketed, 1u);
}

TEST(EmScore, AnyGoldAnswerCounts) {
  const std::vector<GoldRecord> g{{"a", {"trash can", "waste basket"}, ViewBucket::One}};
  const std::vector<Prediction> p{{"a", "Waste  Basket"}};
  EXPECT_EQ(em_score(p, g).correct, 1u);
}

TEST(EmScore, Errors) {
  const std::vector<GoldRecord> g{gold("a", "x", ViewBucket::One)};
  const std::vector<Prediction> unknown{{"zz", "x"}};
  const std::vector<Prediction> dup{{"a", "x"}, {"a", "y"}};
  try {
    em_score(unknown, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingGold);
  }
  try {
    em_score(dup, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicatePrediction);
  }
}

TEST(EmScore, MissingPredictionScoresZero) {
  const std::vector<GoldRecord> g{gold("a", "x", ViewBucket::One), gold("b", "y", ViewBucket::One)};
  const std::vector<Prediction> p{{"a", "x"}};
  const auto r = em_score(p, g);
  EXPECT_EQ(r.missing_predictions, 1u);
  EXPECT_DOUBLE_EQ(r.overall_em, 50.0);
}

TEST(EmScore, HalfUpRounding) {
  // 1/8 = 12.5 exactly; 1/3 = 33.33..; 2/3 = 66.66..; 1/16 = 6.25 -> 6.3.
  std::vector<GoldRecord> g;
  std::vector<Prediction> p;
  for (int i = 0; i < 16; ++i) {
    g.push_back(gold("q" + std::to_string(i), "x", ViewBucket::One));
    p.push_back({"q" + std::to_string(i), i == 0 ? "x" : "no"});
  }
  EXPECT_DOUBLE_EQ(em_score(p, g).overall_em, 6.3);
  g.resize(8);
  p.resize(8);
  EXPECT_DOUBLE_EQ(em_score(p, g).overall_em, 12.5);
  g.resize(3);
  p.resize(3);
  EXPECT_DOUBLE_EQ(em_score(p, g).overall_em, 33.3);
  p[1].prediction = "x";
  EXPECT_DOUBLE_EQ(em_score(p, g).overall_em, 66.7);
}

TEST(EmScore, PermutationInvariantAndWeightedMean) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> bucket(0, 3), coin(0, 1);
  for (int t = 0; t < 50; ++t) {
    std::vector<GoldRecord> g;
    std::vector<Prediction> p;
    for (int i = 0; i < 37; ++i) {
      const auto id = "q" + std::to_string(i);
      g.push_back(gold(id, "ans" + std::to_string(i % 5), static_cast<ViewBucket>(bucket(rng))));
      p.push_back({id, coin(rng) ? "ANS" + std::to_string(i % 5) : "other"});
    }
    const auto base = em_score(p, g);
    std::shuffle(g.begin(), g.end(), rng);
    std::shuffle(p.begin(), p.end(), rng);
    const auto again = em_score(p, g);
    EXPECT_EQ(to_json(base).dump(), to_json(again).dump());
    std::size_t correct = 0;
    double weighted = 0.0;
    for (const auto& b : base.buckets) {
      correct += b.correct;
      weighted += b.em * static_cast<double>(b.count);
    }
    EXPECT_EQ(correct, base.correct);
    const double exact = 100.0 * static_cast<double>(base.correct) / static_cast<double>(base.total);
    EXPECT_NEAR(exact, base.overall_em, 0.05 + 1e-9);
    // Bucket values are rounded once and overall once.
    EXPECT_NEAR(weighted / static_cast<double>(base.total), base.overall_em, 0.1 + 1e-9);
  }
}

TEST(ReadFiles, FixtureReport) {
  std::ifstream gin(testing::fixtures() / "eval_gold.jsonl");
  std::ifstream pin(testing::fixtures() / "eval_pred.jsonl");
  const auto g = read_gold(gin);
  const auto p = read_predictions(pin);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g[3].bucket, ViewBucket::FourPlus);
  const auto r = em_score(p, g);
  EXPECT_DOUBLE_EQ(r.overall_em, 75.0);
  const auto j = to_json(r);
  EXPECT_EQ(j.at("normalization"), kNormalizationVersion);
  EXPECT_EQ(j.at("articles_stripped"), false);
  const auto table = format_table(r);
  EXPECT_NE(table.find("75.0"), std::string::npos);
}

TEST(ReadFiles, GoldShapes) {
  std::istringstream in(
      R"({"_provenance": {"tool": "egoview"}})" "\n"
      R"({"question_id": "a", "answers": ["x", "y"], "min_view_count": {"n": 3, "bucket": "3"}})" "\n"
      R"({"instruction_id": "b", "answer": "z", "bucket": "4+"})" "\n"
      R"({"question_id": "c", "answer": "w", "min_view_count": null})" "\n");
  const auto g = read_gold(in);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0].answers.size(), 2u);
  EXPECT_EQ(g[0].bucket, ViewBucket::Three);
  EXPECT_EQ(g[1].bucket, ViewBucket::FourPlus);
  EXPECT_FALSE(g[2].bucket);
  std::istringstream dup(R"({"question_id": "a", "answer": "x"})" "\n" R"({"question_id": "a", "answer": "y"})" "\n");
  EXPECT_THROW(read_gold(dup), Error);
}

TEST(ReadFiles, DuplicatePredictionLine) {
  std::ifstream in(testing::fixtures() / "eval_pred_duplicate.jsonl");
  try {
    read_predictions(in, "p.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicatePrediction);
    EXPECT_NE(std::string(e.what()).find("p.jsonl:5"), std::string::npos);
  }
}

TEST(SolvabilityReport, FixtureHistogram) {
  solvability::ViewHistogram h;
  for (std::size_t n : {1, 1, 2, 3, 5}) h.add({true, n, solvability::Solver::Exact, {}});
  const auto j = solvability_report(h, {}, 1);
  EXPECT_EQ(j.at("total"), 5);
  EXPECT_EQ(j.at("empty"), false);
  EXPECT_EQ(j.at("histogram").at("1").at("percent"), 40.0);
  EXPECT_EQ(j.at("histogram").at("2").at("percent"), 20.0);
  EXPECT_EQ(j.at("histogram").at("3").at("percent"), 20.0);
  EXPECT_EQ(j.at("histogram").at("4+").at("percent"), 20.0);
  EXPECT_EQ(j.at("solver_mix").at("exact"), 5);
  EXPECT_EQ(j.at("witness_config").at("iosa_threshold"), 0.5);
  EXPECT_EQ(j.at("view_stride"), 1);
}

TEST(SolvabilityReport, EmptyFlagged) {
  const auto j = solvability_report({}, {}, 20);
  EXPECT_EQ(j.at("total"), 0);
  EXPECT_EQ(j.at("empty"), true);
  for (const char* b : {"1", "2", "3", "4+", "unsolvable"}) EXPECT_EQ(j.at("histogram").at(b).at("percent"), 0.0);
}

}  // namespace
}  // namespace egoview::evaluate
