// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "egoview/selection.hpp"
#include "egoview/util.hpp"

namespace egoview::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Walks a JSON object while remembering where it is, so schema errors name
// the exact field.
class Node {
 public:
  Node(const json& value, std::string path, std::string_view source)
      : value_(value), path_(std::move(path)), source_(source) {}

  [[noreturn]] void fail(std::string_view reason) const {
    throw Error(ErrorKind::Schema,
                std::string(source_) + ": " + (path_.empty() ? "<root>" : path_) + ": " +
                    std::string(reason));
  }

  const json& value() const { return value_; }

  bool has(std::string_view key) const {
    return value_.is_object() && value_.contains(key) && !value_.at(std::string(key)).is_null();
  }

  Node child(std::string_view key) const {
    if (!value_.is_object()) fail("expected an object");
    auto it = value_.find(key);
    const std::string p = path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    if (it == value_.end() || it->is_null()) Node(value_, p, source_).fail("missing");
    return Node(*it, p, source_);
  }

  Node element(std::size_t i) const {
    return Node(value_.at(i), path_ + "[" + std::to_string(i) + "]", source_);
  }

  std::size_t array_size(std::optional<std::size_t> expected = std::nullopt) const {
    if (!value_.is_array()) fail("expected an array");
    if (expected && value_.size() != *expected) {
      fail("expected " + std::to_string(*expected) + " elements");
    }
    return value_.size();
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::int64_t integer() const {
    if (value_.is_number_integer()) return value_.get<std::int64_t>();
    if (value_.is_number_float()) {
      const double v = value_.get<double>();
      if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
    }
    fail("expected an integer");
  }

  std::string string(bool allow_empty = false) const {
    if (!value_.is_string()) fail("expected a string");
    auto s = value_.get<std::string>();
    if (!allow_empty && s.empty()) fail("must not be empty");
    return s;
  }

  const std::string& path() const { return path_; }

 private:
  const json& value_;
  std::string path_;
  std::string_view source_;
};

geometry::Vec3 vec3(const Node& n) {
  n.array_size(3);
  return {n.element(0).number(), n.element(1).number(), n.element(2).number()};
}

template <typename Check>
void check(const Node& n, Check&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

json parse_document(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, std::string(source) + ":" +
                                       std::to_string(line_of_offset(text, e.byte)) +
                                       ": malformed JSON: " + e.what());
  }
}

ObjectIdSet id_set(const Node& n) {
  ObjectIdSet ids;
  const std::size_t size = n.array_size();
  for (std::size_t i = 0; i < size; ++i) ids.insert(n.element(i).integer());
  return ids;
}

ordered_json ids_json(const ObjectIdSet& ids) {
  ordered_json a = ordered_json::array();
  for (ObjectId id : ids) a.push_back(id);
  return a;
}

template <typename Fn>
void for_each_record_line(std::istream& in, std::string_view source, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = std::string(source) + ":" + std::to_string(number);
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw Error(ErrorKind::Schema, where + ": not a JSON object");
    }
    if (doc.contains(kProvenanceKey)) continue;
    fn(doc, where);
  }
}

}  // namespace

// --- scenes ----------------------------------------------------------------

Scene parse_scene(std::string_view text, std::string_view source) {
  const json doc = parse_document(text, source);
  const Node root(doc, "", source);
  if (!doc.is_object()) root.fail("expected an object");

  Scene scene;
  scene.scene_id = root.child("scene_id").string();
  const Node split = root.child("split");
  const auto parsed_split = parse_split(split.string());
  if (!parsed_split) split.fail("expected train, val or test");
  scene.split = *parsed_split;
  if (root.has("points_path")) scene.points_path = root.child("points_path").string();

  const Node objects = root.child("objects");
  std::set<ObjectId> object_ids;
  for (std::size_t i = 0, n = objects.array_size(); i < n; ++i) {
    const Node o = objects.element(i);
    SceneObject obj;
    obj.object_id = o.child("object_id").integer();
    obj.label = o.child("label").string();
    const Node box = o.child("box");
    obj.box.center = vec3(box.child("center"));
    obj.box.size = vec3(box.child("size"));
    obj.box.heading = box.has("heading") ? box.child("heading").number() : 0.0;
    check(box, [&] { obj.box.validate(); });
    if (!object_ids.insert(obj.object_id).second) {
      throw Error(ErrorKind::DuplicateId, std::string(source) + ": " + o.path() +
                                              ": duplicate object_id " +
                                              std::to_string(obj.object_id));
    }
    scene.objects.push_back(std::move(obj));
  }

  const Node views = root.child("views");
  std::set<std::string> view_ids;
  for (std::size_t i = 0, n = views.array_size(); i < n; ++i) {
    const Node v = views.element(i);
    View view;
    view.view_id = v.child("view_id").string();
    if (v.has("image_path")) view.image_path = v.child("image_path").string();

    const Node intr = v.child("intrinsics");
    view.intrinsics.fx = intr.child("fx").number();
    view.intrinsics.fy = intr.child("fy").number();
    view.intrinsics.cx = intr.child("cx").number();
    view.intrinsics.cy = intr.child("cy").number();
    view.intrinsics.width = static_cast<int>(intr.child("width").integer());
    view.intrinsics.height = static_cast<int>(intr.child("height").integer());
    check(intr, [&] { view.intrinsics.validate(); });

    const Node pose = v.child("pose");
    const Node rot = pose.child("rotation");
    rot.array_size(3);
    for (int r = 0; r < 3; ++r) {
      const auto row = vec3(rot.element(static_cast<std::size_t>(r)));
      view.pose.rotation.row(r) = row.transpose();
    }
    view.pose.translation = vec3(pose.child("translation"));
    if (pose.has("convention")) {
      const Node conv = pose.child("convention");
      if (conv.string() != "camera_to_world") conv.fail("only camera_to_world is supported");
    }
    check(pose, [&] { view.pose.validate(); });

    if (!view_ids.insert(view.view_id).second) {
      throw Error(ErrorKind::DuplicateId,
                  std::string(source) + ": " + v.path() + ": duplicate view_id " + view.view_id);
    }
    scene.views.push_back(std::move(view));
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Schema, path.string() + ": cannot open scene file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str(), path.string());
}

SceneSet load_scenes(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::Schema, dir.string() + ": not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::ranges::sort(files);
  SceneSet scenes;
  for (const auto& f : files) {
    Scene s = load_scene(f);
    const std::string id = s.scene_id;
    if (!scenes.emplace(id, std::move(s)).second) {
      throw Error(ErrorKind::DuplicateId, f.string() + ": duplicate scene_id " + id);
    }
  }
  return scenes;
}

std::string scene_to_json(const Scene& scene) {
  ordered_json j;
  j["scene_id"] = scene.scene_id;
  j["split"] = to_string(scene.split);
  if (scene.points_path) j["points_path"] = *scene.points_path;
  j["objects"] = ordered_json::array();
  for (const auto& o : scene.objects) {
    ordered_json box;
    box["center"] = {o.box.center.x(), o.box.center.y(), o.box.center.z()};
    box["size"] = {o.box.size.x(), o.box.size.y(), o.box.size.z()};
    box["heading"] = o.box.heading;
    j["objects"].push_back({{"object_id", o.object_id}, {"label", o.label}, {"box", box}});
  }
  j["views"] = ordered_json::array();
  for (const auto& v : scene.views) {
    ordered_json view;
    view["view_id"] = v.view_id;
    if (v.image_path) view["image_path"] = *v.image_path;
    const auto& k = v.intrinsics;
    view["intrinsics"] = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx},
                          {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
    ordered_json rot = ordered_json::array();
    for (int r = 0; r < 3; ++r) {
      rot.push_back({v.pose.rotation(r, 0), v.pose.rotation(r, 1), v.pose.rotation(r, 2)});
    }
    const auto& t = v.pose.translation;
    view["pose"] = {{"rotation", rot},
                    {"translation", {t.x(), t.y(), t.z()}},
                    {"convention", "camera_to_world"}};
    j["views"].push_back(view);
  }
  return j.dump(2) + "\n";
}

// --- instructions ----------------------------------------------------------

std::vector<Instruction> read_instructions(std::istream& in, std::string_view source) {
  std::vector<Instruction> out;
  std::set<std::string> seen;
  for_each_record_line(in, source, [&](const json& doc, const std::string& where) {
    const Node n(doc, "", where);
    Instruction ins;
    ins.instruction_id = n.child("instruction_id").string();
    ins.scene_id = n.child("scene_id").string();
    const Node task = n.child("task");
    const auto parsed_task = parse_task(task.string());
    if (!parsed_task) task.fail("expected qa, dc or caption");
    ins.task = *parsed_task;
    ins.text = n.child("text").string();
    if (n.has("answer")) ins.answer = n.child("answer").string(/*allow_empty=*/true);
    const Node related = n.child("related_object_ids");
    ins.related_object_ids = id_set(related);
    if (n.has("target_object_id")) ins.target_object_id = n.child("target_object_id").integer();

    if (ins.related_object_ids.empty()) related.fail("must not be empty");
    if (ins.task == Task::DC && !ins.target_object_id) n.fail("dc record needs target_object_id");
    if (ins.task == Task::QA && !ins.answer) n.fail("qa record needs an answer");
    if (!seen.insert(ins.instruction_id).second) {
      throw Error(ErrorKind::DuplicateId, where + ": duplicate instruction_id " + ins.instruction_id);
    }
    out.push_back(std::move(ins));
  });
  return out;
}

std::vector<Instruction> load_instructions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Schema, path.string() + ": cannot open instruction file");
  return read_instructions(in, path.string());
}

std::string to_json_line(const Instruction& ins) {
  ordered_json j;
  j["instruction_id"] = ins.instruction_id;
  j["scene_id"] = ins.scene_id;
  j["task"] = to_string(ins.task);
  j["text"] = ins.text;
  if (ins.answer) j["answer"] = *ins.answer;
  j["related_object_ids"] = ids_json(ins.related_object_ids);
  if (ins.target_object_id) j["target_object_id"] = *ins.target_object_id;
  return j.dump();
}

// --- triplets --------------------------------------------------------------

std::string_view to_string(TripletSource source) noexcept {
  switch (source) {
    case TripletSource::GeneratedCaption: return "generated_caption";
    case TripletSource::ExtendedQA: return "extended_qa";
    case TripletSource::ExtendedDC: return "extended_dc";
  }
  return "generated_caption";
}

std::string to_json_line(const TripletRecord& r) {
  ordered_json j;
  j["triplet_id"] = r.triplet_id;
  j["scene_id"] = r.scene_id;
  j["view_id"] = r.view_id;
  j["object_ids"] = ids_json(r.object_ids);
  j["text"] = r.text;
  j["source"] = to_string(r.source);
  ordered_json prov;
  prov["retrieval_score"] =
      r.provenance.retrieval_score ? ordered_json(*r.provenance.retrieval_score) : ordered_json();
  prov["parent_instruction_id"] = r.provenance.parent_instruction_id
                                      ? ordered_json(*r.provenance.parent_instruction_id)
                                      : ordered_json();
  prov["config_hash"] = r.provenance.config_hash;
  j["provenance"] = prov;
  return j.dump();
}

namespace {

TripletRecord triplet_from_json(const json& doc, std::string_view where) {
  const Node n(doc, "", where);
  TripletRecord r;
  r.triplet_id = n.child("triplet_id").string();
  r.scene_id = n.child("scene_id").string();
  r.view_id = n.child("view_id").string();
  r.object_ids = id_set(n.child("object_ids"));
  r.text = n.child("text").string();
  const Node source = n.child("source");
  const std::string s = source.string();
  if (s == "generated_caption") {
    r.source = TripletSource::GeneratedCaption;
  } else if (s == "extended_qa") {
    r.source = TripletSource::ExtendedQA;
  } else if (s == "extended_dc") {
    r.source = TripletSource::ExtendedDC;
  } else {
    source.fail("unknown source");
  }
  const Node prov = n.child("provenance");
  if (prov.has("retrieval_score")) r.provenance.retrieval_score = prov.child("retrieval_score").number();
  if (prov.has("parent_instruction_id")) {
    r.provenance.parent_instruction_id = prov.child("parent_instruction_id").string();
  }
  r.provenance.config_hash = prov.child("config_hash").string(/*allow_empty=*/true);
  return r;
}

}  // namespace

TripletRecord parse_triplet_line(std::string_view line, std::string_view where) {
  const json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorKind::Schema, std::string(where) + ": not a JSON object");
  }
  return triplet_from_json(doc, where);
}

std::vector<TripletRecord> read_triplets(std::istream& in, std::string_view source) {
  std::vector<TripletRecord> out;
  for_each_record_line(in, source, [&](const json& doc, const std::string& where) {
    out.push_back(triplet_from_json(doc, where));
  });
  return out;
}

void validate_triplet(const TripletRecord& r, const SceneSet& scenes) {
  const Scene& scene = require_scene(scenes, r.scene_id);
  if (r.text.empty()) throw Error(ErrorKind::Schema, r.triplet_id + ": empty text");
  if (!scene.find_view(r.view_id)) {
    throw Error(ErrorKind::Schema, r.triplet_id + ": unknown view " + r.view_id);
  }
  for (ObjectId id : r.object_ids) {
    if (!scene.find_object(id)) {
      throw Error(ErrorKind::Schema, r.triplet_id + ": unknown object " + std::to_string(id));
    }
  }
}

// --- composed questions ----------------------------------------------------

std::string to_json_line(const synthesis::ComposedQA& r) {
  ordered_json j;
  j["question_id"] = r.question_id;
  j["scene_id"] = r.scene_id;
  j["question"] = r.question;
  j["answer"] = r.answer;
  j["parent_question_ids"] = {r.parent_question_ids[0], r.parent_question_ids[1]};
  j["anchor_object_ids"] = ids_json(r.anchor_object_ids);
  j["related_object_ids"] = ids_json(r.related_object_ids);
  if (r.min_view_count) {
    const auto& m = *r.min_view_count;
    ordered_json req;
    req["n"] = m.solvable ? ordered_json(m.count) : ordered_json();
    req["bucket"] = solvability::to_string(m.bucket());
    req["solver"] = solvability::to_string(m.solver);
    req["views"] = m.cover;
    j["min_view_count"] = req;
  } else {
    j["min_view_count"] = nullptr;
  }
  return j.dump();
}

// --- corpus building -------------------------------------------------------

std::string CaptionCorpusConfig::hash() const {
  ordered_json j;
  j["strategy"] = "captions";
  j["stride"] = stride;
  j["num_captions"] = num_captions;
  j["threshold"] = threshold;
  j["tau"] = tau;
  return hex64(fnv1a64(j.dump()));
}

std::string ExtendConfig::hash() const {
  ordered_json j;
  j["strategy"] = "extend";
  j["tau"] = tau;
  return hex64(fnv1a64(j.dump()));
}

std::vector<TripletRecord> build_caption_triplets(const Scene& scene,
                                                  services::ModelService& captioner,
                                                  services::ModelService& scorer,
                                                  const CaptionCorpusConfig& cfg) {
  const selection::AlignmentConfig align{cfg.tau};
  align.validate();
  const std::string config_hash = cfg.hash();
  const std::size_t stride = std::max<std::size_t>(cfg.stride, 1);

  std::vector<const View*> sampled;
  for (std::size_t i = 0; i < scene.views.size(); i += stride) sampled.push_back(&scene.views[i]);

  std::vector<std::vector<TripletRecord>> per_view(sampled.size());
  parallel_for(sampled.size(), cfg.max_in_flight, [&](std::size_t i) {
    const View& view = *sampled[i];
    const ObjectIdSet visible = selection::visible_objects(view, scene.objects, align);
    const auto ref = selection::image_ref(view, scene.objects, visible);
    const auto captions = captioner.caption_image(ref, cfg.num_captions);
    const auto kept = selection::filter_captions(ref, captions, scorer, cfg.threshold);
    for (std::size_t k = 0; k < kept.size(); ++k) {
      TripletRecord r;
      r.triplet_id = "cap/" + scene.scene_id + "/" + view.view_id + "/" + std::to_string(k);
      r.scene_id = scene.scene_id;
      r.view_id = view.view_id;
      r.object_ids = visible;
      r.text = kept[k].text;
      r.source = TripletSource::GeneratedCaption;
      r.provenance.retrieval_score = kept[k].score;
      r.provenance.config_hash = config_hash;
      per_view[i].push_back(std::move(r));
    }
  });

  std::vector<TripletRecord> out;
  for (auto& batch : per_view) std::ranges::move(batch, std::back_inserter(out));
  return out;
}

ExtendResult extend_dataset_triplets(std::span<const Instruction> instructions,
                                     const SceneSet& scenes, services::ModelService& scorer,
                                     const ExtendConfig& cfg) {
  const selection::AlignmentConfig align{cfg.tau};
  align.validate();
  const std::string config_hash = cfg.hash();

  struct SceneViews {
    std::vector<ObjectIdSet> visible;
    std::vector<services::ImageRef> refs;
  };
  std::map<std::string, SceneViews, std::less<>> cache;
  for (const auto& ins : instructions) {
    const Scene& scene = require_scene(scenes, ins.scene_id);
    if (cache.contains(scene.scene_id)) continue;
    SceneViews sv;
    for (const auto& v : scene.views) {
      sv.visible.push_back(selection::visible_objects(v, scene.objects, align));
      sv.refs.push_back(selection::image_ref(v, scene.objects, sv.visible.back()));
    }
    cache.emplace(scene.scene_id, std::move(sv));
  }

  struct Outcome {
    std::optional<TripletRecord> triplet;
    std::optional<SkippedInstruction> skipped;
  };
  std::vector<Outcome> outcomes(instructions.size());
  parallel_for(instructions.size(), cfg.max_in_flight, [&](std::size_t i) {
    const Instruction& ins = instructions[i];
    const Scene& scene = require_scene(scenes, ins.scene_id);
    const SceneViews& sv = cache.at(ins.scene_id);
    if (scene.views.empty()) {
      outcomes[i].skipped = SkippedInstruction{ins.instruction_id, "scene has no views"};
      return;
    }

    TripletRecord r;
    r.triplet_id = "ext/" + ins.instruction_id;
    r.scene_id = ins.scene_id;
    r.provenance.parent_instruction_id = ins.instruction_id;
    r.provenance.config_hash = config_hash;
    std::size_t chosen = 0;
    if (ins.task == Task::DC) {
      const auto pick = selection::select_view_for_dc(*ins.target_object_id, scene.views, scene.objects);
      if (!pick) {
        outcomes[i].skipped = SkippedInstruction{
            ins.instruction_id,
            "target object " + std::to_string(*ins.target_object_id) + " is visible in no view"};
        return;
      }
      chosen = static_cast<std::size_t>(
          std::ranges::find(scene.views, pick->view_id, &View::view_id) - scene.views.begin());
      r.source = TripletSource::ExtendedDC;
      r.provenance.retrieval_score = pick->iosa;
      r.text = ins.text;
    } else {
      const auto pick = selection::select_view_for_qa(ins.text, sv.refs, scorer);
      chosen = static_cast<std::size_t>(
          std::ranges::find(scene.views, pick.view_id, &View::view_id) - scene.views.begin());
      r.source = TripletSource::ExtendedQA;
      r.provenance.retrieval_score = pick.score;
      r.text = ins.text;
      if (ins.task == Task::QA && ins.answer && !ins.answer->empty()) r.text += " " + *ins.answer;
    }
    r.view_id = scene.views[chosen].view_id;
    r.object_ids = sv.visible[chosen];
    outcomes[i].triplet = std::move(r);
  });

  ExtendResult result;
  for (auto& o : outcomes) {
    if (o.triplet) result.triplets.push_back(std::move(*o.triplet));
    if (o.skipped) result.skipped.push_back(std::move(*o.skipped));
  }
  return result;
}

}  // namespace egoview::corpus
