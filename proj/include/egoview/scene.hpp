// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// Scene and instruction data model shared by every pipeline stage.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "egoview/geometry.hpp"

namespace egoview {

using ObjectId = std::int64_t;
using ObjectIdSet = std::set<ObjectId>;

struct SceneObject {
  ObjectId object_id = 0;
  std::string label;
  geometry::OrientedBox3D box;
};

struct View {
  std::string view_id;
  geometry::CameraIntrinsics intrinsics;
  geometry::CameraPose pose;
  std::optional<std::string> image_path;
};

enum class Split { Train, Val, Test };

std::string_view to_string(Split split) noexcept;
std::optional<Split> parse_split(std::string_view text) noexcept;

struct Scene {
  std::string scene_id;
  Split split = Split::Train;
  std::optional<std::string> points_path;
  std::vector<SceneObject> objects;
  std::vector<View> views;

  const SceneObject* find_object(ObjectId id) const noexcept;
  const View* find_view(std::string_view view_id) const noexcept;
  /// Throws Error(UnknownObjectId).
  const SceneObject& object(ObjectId id) const;
};

/// Scenes keyed by scene_id.
using SceneSet = std::map<std::string, Scene, std::less<>>;

/// Throws Error(UnknownScene).
const Scene& require_scene(const SceneSet& scenes, std::string_view scene_id);

enum class Task { QA, DC, Caption };

std::string_view to_string(Task task) noexcept;
std::optional<Task> parse_task(std::string_view text) noexcept;

struct Instruction {
  std::string instruction_id;
  std::string scene_id;
  Task task = Task::QA;
  std::string text;
  std::optional<std::string> answer;
  ObjectIdSet related_object_ids;
  std::optional<ObjectId> target_object_id;
};

}  // namespace egoview
