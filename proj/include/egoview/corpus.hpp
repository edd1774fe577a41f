// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// File schemas and corpus construction.
//
// Scene file (one JSON document per scene):
//   {scene_id, split: train|val|test, points_path?,
//    objects: [{object_id, label, box: {center: [3], size: [3], heading}}],
//    views: [{view_id, image_path?, intrinsics: {fx, fy, cx, cy, width, height},
//             pose: {rotation: [3][3], translation: [3], convention: "camera_to_world"}}]}
//
// Record files are JSON Lines with keys in a fixed order. A first line of the
// form {"_provenance": {...}} is a header and is skipped by every reader.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egoview/error.hpp"
#include "egoview/scene.hpp"
#include "egoview/services.hpp"
#include "egoview/synthesis.hpp"

namespace egoview::corpus {

inline constexpr std::string_view kProvenanceKey = "_provenance";

/// Throws Error(Schema) with the offending field path, or Error(DuplicateId).
Scene parse_scene(std::string_view text, std::string_view source = "<memory>");
Scene load_scene(const std::filesystem::path& path);
/// Every *.json file in `dir`, in file-name order. Duplicate scene ids throw
/// Error(DuplicateId).
SceneSet load_scenes(const std::filesystem::path& dir);
/// Pretty-printed scene document in the schema above.
std::string scene_to_json(const Scene& scene);

/// Reads instruction records {instruction_id, scene_id, task, text, answer?,
/// related_object_ids, target_object_id?}. Errors carry source:line.
std::vector<Instruction> read_instructions(std::istream& in, std::string_view source = "<stream>");
std::vector<Instruction> load_instructions(const std::filesystem::path& path);
std::string to_json_line(const Instruction& instruction);

enum class TripletSource { GeneratedCaption, ExtendedQA, ExtendedDC };

std::string_view to_string(TripletSource source) noexcept;

struct TripletProvenance {
  std::optional<double> retrieval_score;
  std::optional<std::string> parent_instruction_id;
  std::string config_hash;
};

struct TripletRecord {
  std::string triplet_id;
  std::string scene_id;
  std::string view_id;
  ObjectIdSet object_ids;
  std::string text;
  TripletSource source = TripletSource::GeneratedCaption;
  TripletProvenance provenance;
};

std::string to_json_line(const TripletRecord& record);
TripletRecord parse_triplet_line(std::string_view line, std::string_view where = "<line>");
std::vector<TripletRecord> read_triplets(std::istream& in, std::string_view source = "<stream>");

/// Throws Error(UnknownScene) or Error(Schema) when the triplet names a view
/// or object its scene does not have, or has empty text.
void validate_triplet(const TripletRecord& record, const SceneSet& scenes);

std::string to_json_line(const synthesis::ComposedQA& record);

struct CaptionCorpusConfig {
  std::size_t stride = 20;
  std::size_t num_captions = 3;
  double threshold = 0.5;
  double tau = 0.5;
  std::size_t max_in_flight = 8;

  std::string hash() const;
};

/// Captions every stride-th view (the first always), keeps captions scoring
/// >= threshold against the view, and binds each to the view's visible
/// objects. Output is in view order, then caption order.
std::vector<TripletRecord> build_caption_triplets(const Scene& scene,
                                                  services::ModelService& captioner,
                                                  services::ModelService& scorer,
                                                  const CaptionCorpusConfig& cfg);

struct ExtendConfig {
  double tau = 0.5;
  std::size_t max_in_flight = 8;

  std::string hash() const;
};

struct SkippedInstruction {
  std::string instruction_id;
  std::string reason;
};

struct ExtendResult {
  std::vector<TripletRecord> triplets;
  std::vector<SkippedInstruction> skipped;
};

/// One triplet per instruction bound to its most informative view: qa and
/// caption by image-text score, dc by target visibility. dc targets visible
/// in no view are reported in `skipped`. Throws Error(UnknownScene).
ExtendResult extend_dataset_triplets(std::span<const Instruction> instructions,
                                     const SceneSet& scenes, services::ModelService& scorer,
                                     const ExtendConfig& cfg);

template <typename Record>
struct SplitPartitions {
  std::vector<Record> train;
  std::vector<Record> val;
  std::vector<Record> test;
};

/// Routes each record to its scene's split, preserving input order.
/// Throws Error(UnknownScene).
template <typename Record>
SplitPartitions<Record> split_records(std::span<const Record> records, const SceneSet& scenes) {
  SplitPartitions<Record> out;
  for (const Record& r : records) {
    switch (require_scene(scenes, r.scene_id).split) {
      case Split::Train: out.train.push_back(r); break;
      case Split::Val: out.val.push_back(r); break;
      case Split::Test: out.test.push_back(r); break;
    }
  }
  return out;
}

}  // namespace egoview::corpus
