// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// Exact-match QA scoring with a per-view-count breakdown, and the
// view-requirement report.

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egoview/solvability.hpp"

namespace egoview::evaluate {

// Bumped whenever normalize_answer changes behaviour.
inline constexpr std::string_view kNormalizationVersion = "em-norm-v1";

/// NFKC, lowercase, trim, collapse whitespace runs to one space, then drop
/// trailing '.', '?' and '!' (and any whitespace they leave). Articles are
/// kept. Idempotent.
std::string normalize_answer(std::string_view text);

struct Prediction {
  std::string question_id;
  std::string prediction;
};

struct GoldRecord {
  std::string question_id;
  std::vector<std::string> answers;  // a prediction matching any one scores 1
  std::optional<solvability::ViewBucket> bucket;
};

/// {question_id, prediction} lines. Throws Error(DuplicatePrediction).
std::vector<Prediction> read_predictions(std::istream& in, std::string_view source = "<stream>");

/// Lines with question_id (or instruction_id), answer or answers, and an
/// optional min_view_count (integer, {"n": ...} object, or null) or bucket.
std::vector<GoldRecord> read_gold(std::istream& in, std::string_view source = "<stream>");

struct BucketScore {
  std::size_t count = 0;
  std::size_t correct = 0;
  double em = 0.0;  // percent, one decimal
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  double overall_em = 0.0;
  std::array<BucketScore, 4> buckets{};  // N = 1, 2, 3, 4+
  std::size_t unbucketed = 0;
  std::size_t missing_predictions = 0;  // gold items without a prediction score 0
};

/// Scores every gold item. Throws Error(MissingGold) for a prediction with no
/// gold record and Error(DuplicatePrediction) for repeated prediction ids.
EvalReport em_score(std::span<const Prediction> predictions, std::span<const GoldRecord> gold);

nlohmann::ordered_json to_json(const EvalReport& report);
std::string format_table(const EvalReport& report);

nlohmann::ordered_json solvability_report(const solvability::ViewHistogram& histogram,
                                          const solvability::WitnessConfig& cfg,
                                          std::size_t stride);
std::string format_table(const solvability::ViewHistogram& histogram);

}  // namespace egoview::evaluate
