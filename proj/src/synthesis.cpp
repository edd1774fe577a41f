// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/synthesis.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "egoview/error.hpp"
#include "egoview/util.hpp"

namespace egoview::synthesis {

namespace {

std::string one_line(std::string_view text) {
  std::string out(text);
  std::ranges::replace(out, '\n', ' ');
  std::ranges::replace(out, '\r', ' ');
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t count_words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

ObjectIdSet intersect(const ObjectIdSet& a, const ObjectIdSet& b) {
  ObjectIdSet out;
  std::ranges::set_intersection(a, b, std::inserter(out, out.end()));
  return out;
}

}  // namespace

QuestionRecord to_question(const Instruction& ins) {
  if (ins.task != Task::QA) {
    throw Error(ErrorKind::Schema, ins.instruction_id + ": only qa instructions can be composed");
  }
  if (!ins.answer || ins.answer->empty()) {
    throw Error(ErrorKind::Schema, ins.instruction_id + ": qa record has no answer");
  }
  if (ins.related_object_ids.empty()) {
    throw Error(ErrorKind::Schema, ins.instruction_id + ": related_object_ids is empty");
  }
  return {ins.instruction_id, ins.scene_id, ins.text, *ins.answer, ins.related_object_ids};
}

bool anchors_compatible(const ObjectIdSet& a, const ObjectIdSet& b) {
  const bool shared = std::ranges::any_of(a, [&](ObjectId id) { return b.contains(id); });
  return shared && !std::ranges::includes(b, a) && !std::ranges::includes(a, b);
}

std::vector<CandidatePair> eligible_pairs(std::span<const QuestionRecord> questions) {
  std::map<std::string, std::vector<const QuestionRecord*>> by_scene;
  for (const auto& q : questions) by_scene[q.scene_id].push_back(&q);

  std::vector<CandidatePair> pairs;
  for (auto& [scene_id, group] : by_scene) {
    std::ranges::sort(group, {}, &QuestionRecord::question_id);
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const auto& a = *group[i];
        const auto& b = *group[j];
        if (!anchors_compatible(a.related_object_ids, b.related_object_ids)) continue;
        pairs.push_back({a, b, intersect(a.related_object_ids, b.related_object_ids)});
      }
    }
  }
  return pairs;
}

std::string_view to_string(DropReason reason) noexcept {
  switch (reason) {
    case DropReason::ParseFailure: return "parse_failure";
    case DropReason::MissingQuestionMark: return "missing_question_mark";
    case DropReason::EmptyAnswer: return "empty_answer";
    case DropReason::AnswerTooLong: return "answer_too_long";
    case DropReason::DegenerateCopy: return "degenerate_copy";
  }
  return "parse_failure";
}

std::string build_prompt(const CandidatePair& pair, std::span<const std::string> anchor_labels,
                         const SynthesisConfig& cfg) {
  std::string anchors;
  if (!anchor_labels.empty()) {
    for (std::size_t i = 0; i < anchor_labels.size(); ++i) {
      if (i) anchors += ", ";
      anchors += anchor_labels[i];
    }
  } else {
    for (ObjectId id : pair.shared_anchor_ids) {
      if (!anchors.empty()) anchors += ", ";
      anchors += "object " + std::to_string(id);
    }
  }

  std::ostringstream p;
  p << services::kSynthesisMarker << " prompt=" << cfg.prompt_version << "\n"
    << "You are given two questions about the same 3D indoor scene. Both involve the shared "
       "anchor object(s): "
    << one_line(anchors) << ".\n"
    << "Write ONE new question that follows both directives:\n"
    << "1. Integrative complexity: weave together the informational requirements of both "
       "questions, so that answering the new question needs what each of them asks about.\n"
    << "2. QA verifiability: state the question clearly and pair it with an accurate, "
       "unambiguous and definitive short answer of at most "
    << kMaxAnswerTokens << " words.\n"
    << services::kPromptQuestion1 << one_line(pair.first.text) << "\n"
    << services::kPromptAnswer1 << one_line(pair.first.answer) << "\n"
    << services::kPromptQuestion2 << one_line(pair.second.text) << "\n"
    << services::kPromptAnswer2 << one_line(pair.second.answer) << "\n"
    << "Reply with a single JSON object and nothing else: "
       "{\"question\": \"...\", \"answer\": \"...\"}\n";
  return p.str();
}

std::optional<QuestionAnswer> parse_reply(std::string_view reply) {
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return std::nullopt;
  }
  const auto doc = nlohmann::json::parse(reply.substr(open, close - open + 1), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  const auto q = doc.find("question");
  const auto a = doc.find("answer");
  if (q == doc.end() || a == doc.end() || !q->is_string() || !a->is_string()) return std::nullopt;
  return QuestionAnswer{trim(q->get<std::string>()), trim(a->get<std::string>())};
}

std::variant<ComposedQA, Dropped> compose_question(const CandidatePair& pair,
                                                   services::ModelService& generator,
                                                   const SynthesisConfig& cfg,
                                                   std::span<const std::string> anchor_labels) {
  const std::string prompt = build_prompt(pair, anchor_labels, cfg);
  std::string last_reply;
  for (int attempt = 0; attempt < std::max(cfg.max_attempts, 1); ++attempt) {
    last_reply = generator.generate_text(prompt, cfg.max_tokens, cfg.temperature);
    auto parsed = parse_reply(last_reply);
    if (!parsed) continue;

    ComposedQA out;
    out.question_id = "mv_" + pair.first.question_id + "_" + pair.second.question_id;
    out.scene_id = pair.first.scene_id;
    out.question = std::move(parsed->question);
    out.answer = std::move(parsed->answer);
    out.parent_question_ids = {pair.first.question_id, pair.second.question_id};
    out.anchor_object_ids = pair.shared_anchor_ids;
    out.related_object_ids = pair.first.related_object_ids;
    out.related_object_ids.insert(pair.second.related_object_ids.begin(),
                                  pair.second.related_object_ids.end());
    return out;
  }
  std::string excerpt = one_line(last_reply.substr(0, 80));
  return Dropped{DropReason::ParseFailure,
                 "no parseable reply after " + std::to_string(std::max(cfg.max_attempts, 1)) +
                     " attempts; last: " + excerpt};
}

std::optional<DropReason> verify_composition(const ComposedQA& record,
                                             std::span<const std::string> parent_texts) {
  const std::string question = trim(record.question);
  if (question.empty() || question.back() != '?') return DropReason::MissingQuestionMark;
  const std::size_t words = count_words(record.answer);
  if (words == 0) return DropReason::EmptyAnswer;
  if (words > kMaxAnswerTokens) return DropReason::AnswerTooLong;
  for (const auto& parent : parent_texts) {
    if (record.question == parent) return DropReason::DegenerateCopy;
  }
  return std::nullopt;
}

std::string synthesis_config_hash(const SynthesisConfig& cfg,
                                  const solvability::WitnessConfig& witness) {
  nlohmann::ordered_json j;
  j["prompt_version"] = cfg.prompt_version;
  j["max_tokens"] = cfg.max_tokens;
  j["temperature"] = cfg.temperature;
  j["max_attempts"] = cfg.max_attempts;
  j["view_stride"] = cfg.view_stride;
  j["max_answer_tokens"] = kMaxAnswerTokens;
  j["iosa_threshold"] = witness.iosa_threshold;
  j["min_area_ratio"] = witness.min_area_ratio;
  return hex64(fnv1a64(j.dump()));
}

SynthesisResult synthesize_dataset(std::span<const QuestionRecord> questions,
                                   services::ModelService& generator, const SceneSet& scenes,
                                   const solvability::WitnessConfig& witness,
                                   const SynthesisConfig& cfg) {
  for (const auto& q : questions) require_scene(scenes, q.scene_id);

  SynthesisResult result;
  auto& report = result.report;
  report.questions = questions.size();
  report.prompt_version = cfg.prompt_version;
  report.config_hash = synthesis_config_hash(cfg, witness);

  const auto pairs = eligible_pairs(questions);
  report.pairs_considered = pairs.size();

  std::vector<std::optional<std::variant<ComposedQA, Dropped>>> outcomes(pairs.size());
  parallel_for(pairs.size(), cfg.max_in_flight, [&](std::size_t i) {
    const Scene& scene = require_scene(scenes, pairs[i].first.scene_id);
    std::vector<std::string> labels;
    for (ObjectId id : pairs[i].shared_anchor_ids) {
      const auto* obj = scene.find_object(id);
      labels.push_back(obj ? obj->label : "object " + std::to_string(id));
    }
    outcomes[i] = compose_question(pairs[i], generator, cfg, labels);
  });

  std::map<const Scene*, std::vector<View>> sampled;
  std::set<std::pair<std::string, std::string>> seen_questions;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    auto& outcome = *outcomes[i];
    auto drop = [&](DropReason reason, std::string detail) {
      ++report.dropped_by_reason[std::string(to_string(reason))];
      report.dropped.push_back({pair.first.question_id, pair.second.question_id, reason,
                                std::move(detail)});
    };
    if (auto* d = std::get_if<Dropped>(&outcome)) {
      drop(d->reason, d->detail);
      continue;
    }
    auto& record = std::get<ComposedQA>(outcome);
    ++report.composed;
    const std::string parents[] = {pair.first.text, pair.second.text};
    if (auto reason = verify_composition(record, parents)) {
      drop(*reason, "question: " + one_line(record.question));
      continue;
    }

    const Scene& scene = require_scene(scenes, record.scene_id);
    auto [it, inserted] = sampled.try_emplace(&scene);
    if (inserted) it->second = solvability::sample_views(scene.views, cfg.view_stride);
    record.min_view_count =
        solvability::min_view_count(record.related_object_ids, it->second, scene.objects, witness);
    report.view_histogram.add(*record.min_view_count);

    if (!seen_questions.emplace(record.scene_id, record.question).second) ++report.exact_duplicates;
    ++report.kept;
    result.records.push_back(std::move(record));
  }
  return result;
}

}  // namespace egoview::synthesis
