// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// View selection: which objects a view shows, which view best serves a
// question or a dense-captioning target, caption filtering, and picking
// mutually dissimilar views for a 2x2 input grid.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoview/scene.hpp"
#include "egoview/services.hpp"

namespace egoview::selection {

struct AlignmentConfig {
  double tau = 0.5;

  void validate() const;
};

/// Objects whose projected box has IoSA with the image strictly above tau.
/// No minimum-area rule applies here.
ObjectIdSet visible_objects(const View& view, std::span<const SceneObject> objects,
                            const AlignmentConfig& cfg);

/// Image reference for `view` with the labels of its visible objects attached
/// as the stub sidecar (sorted, duplicates kept once).
services::ImageRef image_ref(const View& view, std::span<const SceneObject> objects,
                             const AlignmentConfig& cfg);

/// Same, for an already computed visible set.
services::ImageRef image_ref(const View& view, std::span<const SceneObject> objects,
                             const ObjectIdSet& visible);

struct ScoredView {
  std::string view_id;
  double score = 0.0;
};

/// Highest image-text score wins; ties go to the smaller view id.
/// Throws Error(NoViews).
ScoredView select_view_for_qa(const std::string& question, std::span<const services::ImageRef> views,
                              services::ModelService& scorer, std::size_t max_in_flight = 1);

struct DcSelection {
  std::string view_id;
  double iosa = 0.0;
  double projected_area = 0.0;
};

/// View maximizing IoSA(projected target, image); ties go to the larger
/// projected area, then the smaller view id. nullopt when the target projects
/// into no view. Throws Error(UnknownObjectId).
std::optional<DcSelection> select_view_for_dc(ObjectId target, std::span<const View> views,
                                              std::span<const SceneObject> objects);

struct ScoredCaption {
  std::string text;
  double score = 0.0;
};

/// Captions scoring >= threshold, in input order.
std::vector<ScoredCaption> filter_captions(const services::ImageRef& view,
                                           std::span<const std::string> captions,
                                           services::ModelService& scorer, double threshold);

struct DiversityConfig {
  std::size_t k = 4;
  double lambda_rot = 1.0;       // meters per radian
  double min_separation = 0.3;

  void validate() const;
};

/// Translation distance plus lambda_rot times the relative rotation angle.
double view_dissimilarity(const View& a, const View& b, double lambda_rot);

struct DiverseSelection {
  std::vector<std::string> view_ids;
  bool short_selection = false;  // fewer than k views survived
};

/// Greedy farthest-point selection seeded at the smallest view id. Candidates
/// closer than min_separation to a selected view are skipped.
/// Throws Error(NoViews).
DiverseSelection select_diverse_views(std::span<const View> views, const DiversityConfig& cfg);

struct GridCell {
  std::string view_id;
  std::optional<std::string> image_path;
};

struct GridManifest {
  std::size_t rows = 2;
  std::size_t cols = 2;
  std::vector<std::optional<GridCell>> cells;  // row-major, empty cells unset
};

inline constexpr std::size_t kGridCapacity = 4;

/// Places up to four views row-major into a 2x2 grid. Throws
/// Error(TooManyViews) beyond four and Error(NoViews) for none.
GridManifest build_grid_manifest(std::span<const View> selected);

}  // namespace egoview::selection
