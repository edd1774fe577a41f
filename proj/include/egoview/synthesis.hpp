// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// Compositional question synthesis: pair same-scene questions whose anchor
// sets overlap without nesting, ask a generator to merge each pair into one
// multi-view question, check the result, and annotate it with the minimum
// number of views needed.

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "egoview/scene.hpp"
#include "egoview/services.hpp"
#include "egoview/solvability.hpp"

namespace egoview::synthesis {

struct QuestionRecord {
  std::string question_id;
  std::string scene_id;
  std::string text;
  std::string answer;
  ObjectIdSet related_object_ids;
};

/// qa instructions become question records. Throws Error(Schema) for other
/// tasks, a missing answer, or an empty anchor set.
QuestionRecord to_question(const Instruction& instruction);

struct CandidatePair {
  QuestionRecord first;   // first.question_id < second.question_id
  QuestionRecord second;
  ObjectIdSet shared_anchor_ids;
};

/// Anchor sets share an object and neither contains the other.
bool anchors_compatible(const ObjectIdSet& a, const ObjectIdSet& b);

/// All unordered same-scene pairs with compatible anchors, sorted by
/// (scene_id, first id, second id).
std::vector<CandidatePair> eligible_pairs(std::span<const QuestionRecord> questions);

struct ComposedQA {
  std::string question_id;
  std::string scene_id;
  std::string question;
  std::string answer;
  std::array<std::string, 2> parent_question_ids;
  ObjectIdSet anchor_object_ids;   // O1 ∩ O2
  ObjectIdSet related_object_ids;  // O1 ∪ O2
  std::optional<solvability::ViewRequirement> min_view_count;
};

enum class DropReason {
  ParseFailure,
  MissingQuestionMark,
  EmptyAnswer,
  AnswerTooLong,
  DegenerateCopy,
};

std::string_view to_string(DropReason reason) noexcept;

struct Dropped {
  DropReason reason;
  std::string detail;
};

inline constexpr std::size_t kMaxAnswerTokens = 10;

struct SynthesisConfig {
  std::string prompt_version = "compose-v1";
  int max_tokens = 256;
  double temperature = 0.2;
  int max_attempts = 3;  // generation attempts per pair before dropping it
  std::size_t max_in_flight = 8;
  std::size_t view_stride = 1;
};

std::string build_prompt(const CandidatePair& pair, std::span<const std::string> anchor_labels,
                         const SynthesisConfig& cfg);

struct QuestionAnswer {
  std::string question;
  std::string answer;
};

/// Reads the first {...} span of `reply` as {"question": str, "answer": str}.
std::optional<QuestionAnswer> parse_reply(std::string_view reply);

/// Throws Error(ServiceUnavailable) when the generator stays unreachable.
std::variant<ComposedQA, Dropped> compose_question(const CandidatePair& pair,
                                                   services::ModelService& generator,
                                                   const SynthesisConfig& cfg,
                                                   std::span<const std::string> anchor_labels = {});

/// Structural checks: question ends in '?', answer has 1..10 tokens, and the
/// question is not a verbatim copy of a parent. nullopt means pass.
std::optional<DropReason> verify_composition(const ComposedQA& record,
                                             std::span<const std::string> parent_texts = {});

struct DroppedPair {
  std::string first_id;
  std::string second_id;
  DropReason reason;
  std::string detail;
};

struct SynthesisReport {
  std::size_t questions = 0;
  std::size_t pairs_considered = 0;
  std::size_t composed = 0;  // generator produced a parseable record
  std::size_t kept = 0;      // and it passed verification
  std::map<std::string, std::size_t> dropped_by_reason;
  std::vector<DroppedPair> dropped;
  std::size_t exact_duplicates = 0;
  std::string prompt_version;
  std::string config_hash;
  solvability::ViewHistogram view_histogram;
};

struct SynthesisResult {
  std::vector<ComposedQA> records;
  SynthesisReport report;
};

/// Stable hash of the settings that shape synthesis output.
std::string synthesis_config_hash(const SynthesisConfig& cfg,
                                  const solvability::WitnessConfig& witness);

/// eligible_pairs -> compose_question -> verify_composition -> min view count.
/// Throws Error(UnknownScene) before generating anything if a question names
/// a scene that is not loaded.
SynthesisResult synthesize_dataset(std::span<const QuestionRecord> questions,
                                   services::ModelService& generator, const SceneSet& scenes,
                                   const solvability::WitnessConfig& witness,
                                   const SynthesisConfig& cfg = {});

}  // namespace egoview::synthesis
