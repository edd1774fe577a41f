// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/scene.hpp"

#include <algorithm>

#include "egoview/error.hpp"

namespace egoview {

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view text) noexcept {
  if (text == "train") return Split::Train;
  if (text == "val") return Split::Val;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

std::string_view to_string(Task task) noexcept {
  switch (task) {
    case Task::QA: return "qa";
    case Task::DC: return "dc";
    case Task::Caption: return "caption";
  }
  return "qa";
}

std::optional<Task> parse_task(std::string_view text) noexcept {
  if (text == "qa") return Task::QA;
  if (text == "dc") return Task::DC;
  if (text == "caption") return Task::Caption;
  return std::nullopt;
}

const SceneObject* Scene::find_object(ObjectId id) const noexcept {
  auto it = std::ranges::find(objects, id, &SceneObject::object_id);
  return it == objects.end() ? nullptr : &*it;
}

const View* Scene::find_view(std::string_view view_id) const noexcept {
  auto it = std::ranges::find(views, view_id, &View::view_id);
  return it == views.end() ? nullptr : &*it;
}

const SceneObject& Scene::object(ObjectId id) const {
  if (const auto* obj = find_object(id)) return *obj;
  throw Error(ErrorKind::UnknownObjectId,
              "scene " + scene_id + " has no object " + std::to_string(id));
}

const Scene& require_scene(const SceneSet& scenes, std::string_view scene_id) {
  auto it = scenes.find(scene_id);
  if (it == scenes.end()) {
    throw Error(ErrorKind::UnknownScene, "unknown scene '" + std::string(scene_id) + "'");
  }
  return it->second;
}

}  // namespace egoview
