// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/selection.hpp"

#include <algorithm>
#include <limits>

#include "egoview/error.hpp"
#include "egoview/util.hpp"

namespace egoview::selection {

void AlignmentConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::InvalidArgument, "tau must lie in (0, 1)");
}

ObjectIdSet visible_objects(const View& view, std::span<const SceneObject> objects,
                            const AlignmentConfig& cfg) {
  const auto image = view.intrinsics.image_rect();
  ObjectIdSet ids;
  for (const auto& obj : objects) {
    const auto rect = geometry::project_box(obj.box, view.intrinsics, view.pose);
    if (rect && geometry::iosa(*rect, image) > cfg.tau) ids.insert(obj.object_id);
  }
  return ids;
}

services::ImageRef image_ref(const View& view, std::span<const SceneObject> objects,
                             const AlignmentConfig& cfg) {
  return image_ref(view, objects, visible_objects(view, objects, cfg));
}

services::ImageRef image_ref(const View& view, std::span<const SceneObject> objects,
                             const ObjectIdSet& visible) {
  std::vector<std::string> labels;
  for (ObjectId id : visible) {
    auto it = std::ranges::find(objects, id, &SceneObject::object_id);
    if (it != objects.end()) labels.push_back(it->label);
  }
  std::ranges::sort(labels);
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return {view.view_id, view.image_path, std::nullopt, std::move(labels)};
}

ScoredView select_view_for_qa(const std::string& question, std::span<const services::ImageRef> views,
                              services::ModelService& scorer, std::size_t max_in_flight) {
  if (views.empty()) throw Error(ErrorKind::NoViews, "no candidate views for question");
  std::vector<double> scores(views.size());
  const std::string texts[] = {question};
  parallel_for(views.size(), max_in_flight, [&](std::size_t i) {
    scores[i] = scorer.score_image_text(views[i], texts).scores.at(0);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < views.size(); ++i) {
    if (scores[i] > scores[best] ||
        (scores[i] == scores[best] && views[i].view_id < views[best].view_id)) {
      best = i;
    }
  }
  return {views[best].view_id, scores[best]};
}

std::optional<DcSelection> select_view_for_dc(ObjectId target, std::span<const View> views,
                                              std::span<const SceneObject> objects) {
  auto it = std::ranges::find(objects, target, &SceneObject::object_id);
  if (it == objects.end()) {
    throw Error(ErrorKind::UnknownObjectId, "unknown target object " + std::to_string(target));
  }
  std::optional<DcSelection> best;
  for (const auto& view : views) {
    const auto rect = geometry::project_box(it->box, view.intrinsics, view.pose);
    if (!rect) continue;
    const double score = geometry::iosa(*rect, view.intrinsics.image_rect());
    if (!(score > 0.0)) continue;
    const DcSelection cand{view.view_id, score, rect->area()};
    const bool better =
        !best || cand.iosa > best->iosa ||
        (cand.iosa == best->iosa &&
         (cand.projected_area > best->projected_area ||
          (cand.projected_area == best->projected_area && cand.view_id < best->view_id)));
    if (better) best = cand;
  }
  return best;
}

std::vector<ScoredCaption> filter_captions(const services::ImageRef& view,
                                           std::span<const std::string> captions,
                                           services::ModelService& scorer, double threshold) {
  std::vector<ScoredCaption> kept;
  if (captions.empty()) return kept;
  const auto result = scorer.score_image_text(view, captions);
  for (std::size_t i = 0; i < captions.size(); ++i) {
    if (result.scores.at(i) >= threshold) kept.push_back({captions[i], result.scores[i]});
  }
  return kept;
}

void DiversityConfig::validate() const {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (!(lambda_rot >= 0.0) || !(min_separation >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "diversity weights must be non-negative");
  }
}

double view_dissimilarity(const View& a, const View& b, double lambda_rot) {
  return (a.pose.translation - b.pose.translation).norm() +
         lambda_rot * geometry::geodesic_angle(a.pose.rotation, b.pose.rotation);
}

DiverseSelection select_diverse_views(std::span<const View> views, const DiversityConfig& cfg) {
  if (views.empty()) throw Error(ErrorKind::NoViews, "no views to select from");
  cfg.validate();

  std::vector<std::size_t> order(views.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::ranges::sort(order, {}, [&](std::size_t i) -> const std::string& { return views[i].view_id; });

  std::vector<std::size_t> selected = {order.front()};
  // min distance from each candidate to the selected set
  std::vector<double> nearest(views.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> taken(views.size(), false);
  taken[order.front()] = true;

  while (selected.size() < cfg.k) {
    const View& last = views[selected.back()];
    std::optional<std::size_t> best;
    for (std::size_t i : order) {
      if (taken[i]) continue;
      nearest[i] = std::min(nearest[i], view_dissimilarity(views[i], last, cfg.lambda_rot));
      if (nearest[i] < cfg.min_separation) continue;
      if (!best || nearest[i] > nearest[*best]) best = i;  // order gives id tie-break
    }
    if (!best) break;
    taken[*best] = true;
    selected.push_back(*best);
  }

  DiverseSelection out;
  for (std::size_t i : selected) out.view_ids.push_back(views[i].view_id);
  out.short_selection = out.view_ids.size() < cfg.k;
  return out;
}

GridManifest build_grid_manifest(std::span<const View> selected) {
  if (selected.empty()) throw Error(ErrorKind::NoViews, "grid needs at least one view");
  if (selected.size() > kGridCapacity) {
    throw Error(ErrorKind::TooManyViews,
                "a 2x2 grid holds at most 4 views, got " + std::to_string(selected.size()));
  }
  GridManifest grid;
  grid.cells.resize(grid.rows * grid.cols);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (selected[j].view_id == selected[i].view_id) {
        throw Error(ErrorKind::InvalidArgument, "duplicate view '" + selected[i].view_id + "' in grid");
      }
    }
    grid.cells[i] = GridCell{selected[i].view_id, selected[i].image_path};
  }
  return grid;
}

}  // namespace egoview::selection
