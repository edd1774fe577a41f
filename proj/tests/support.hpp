// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// Fixture builders shared by the unit tests and the acceptance binary.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "egoview/corpus.hpp"
#include "egoview/geometry.hpp"
#include "egoview/scene.hpp"

namespace egoview::testing {

inline std::filesystem::path fixtures() { return EGOVIEW_FIXTURES_DIR; }
inline std::filesystem::path goldens() { return EGOVIEW_GOLDEN_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline geometry::CameraIntrinsics vga() { return {500.0, 500.0, 320.0, 240.0, 640, 480}; }

// Camera at `eye` looking along world +y with world +z up (image v points down).
inline geometry::CameraPose facing_plus_y(const geometry::Vec3& eye) {
  geometry::CameraPose pose;
  pose.rotation << 1, 0, 0,
                   0, 0, 1,
                   0, -1, 0;
  pose.translation = eye;
  return pose;
}

inline View make_view(std::string id, const geometry::CameraPose& pose,
                      geometry::CameraIntrinsics intr = vga()) {
  return View{std::move(id), intr, pose, std::nullopt};
}

inline SceneObject make_object(ObjectId id, std::string label, const geometry::Vec3& center,
                               double edge = 1.0) {
  SceneObject o;
  o.object_id = id;
  o.label = std::move(label);
  o.box.center = center;
  o.box.size = geometry::Vec3::Constant(edge);
  return o;
}

// A box whose projection is [608, 208, 672, 272] in a 640 x 480 image:
// exactly half inside. The far face sets x_min (3.796875 / 6.75 = 9/16), the
// near face sets x_max (4.296875 / 6.25 = 11/16) and both y extents, and every
// quantity is exact in binary floating point.
inline View half_in_view() {
  return make_view("half", facing_plus_y({0, -4, 0}), {512.0, 512.0, 320.0, 240.0, 640, 480});
}
inline SceneObject half_in_object() {
  auto o = make_object(1, "panel", {4.046875, 2.5, 0});
  o.box.size = {0.5, 0.5, 0.78125};
  return o;
}

inline SceneSet fixture_scenes() { return corpus::load_scenes(fixtures() / "scenes"); }

}  // namespace egoview::testing
