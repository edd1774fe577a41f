// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// Which views witness which objects, whether an instruction is answerable
// from a view set, and how many views it needs at minimum (a set cover of
// the instruction's relevant objects by per-view witness sets).

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "egoview/scene.hpp"

namespace egoview::solvability {

struct WitnessConfig {
  // An object is witnessed only when IoSA with the image is strictly greater.
  double iosa_threshold = 0.5;
  // Projections smaller than this fraction of the image are never witnessed.
  double min_area_ratio = 0.005;

  void validate() const;
};

bool witnesses(const View& view, const SceneObject& object, const WitnessConfig& cfg);

/// Row-major boolean matrix, rows = views, columns = objects.
class WitnessMatrix {
 public:
  WitnessMatrix() = default;
  WitnessMatrix(std::size_t num_views, std::size_t num_objects)
      : views_(num_views), objects_(num_objects), cells_(num_views * num_objects, 0) {}

  std::size_t num_views() const noexcept { return views_; }
  std::size_t num_objects() const noexcept { return objects_; }
  bool operator()(std::size_t view, std::size_t object) const noexcept {
    return cells_[view * objects_ + object] != 0;
  }
  void set(std::size_t view, std::size_t object, bool value) noexcept {
    cells_[view * objects_ + object] = value ? 1 : 0;
  }

 private:
  std::size_t views_ = 0;
  std::size_t objects_ = 0;
  std::vector<unsigned char> cells_;
};

/// Throws Error(EmptyInput) when either list is empty.
WitnessMatrix witness_matrix(std::span<const SceneObject> objects, std::span<const View> views,
                             const WitnessConfig& cfg);

/// True iff every relevant object is witnessed by at least one view in
/// `view_set`. Throws Error(UnknownObjectId).
bool is_solvable(const ObjectIdSet& relevant, std::span<const View> view_set,
                 std::span<const SceneObject> objects, const WitnessConfig& cfg);

enum class Solver { Exact, Greedy };
enum class ViewBucket { One = 0, Two = 1, Three = 2, FourPlus = 3, Unsolvable = 4 };

inline constexpr std::array<ViewBucket, 5> kAllBuckets = {
    ViewBucket::One, ViewBucket::Two, ViewBucket::Three, ViewBucket::FourPlus,
    ViewBucket::Unsolvable};

std::string_view to_string(Solver solver) noexcept;
std::string_view to_string(ViewBucket bucket) noexcept;
ViewBucket bucket_for_count(std::size_t count) noexcept;

struct ViewRequirement {
  bool solvable = false;
  std::size_t count = 0;  // 0 when unsolvable
  Solver solver = Solver::Exact;
  std::vector<std::string> cover;  // chosen view ids, sorted

  ViewBucket bucket() const noexcept {
    return solvable ? bucket_for_count(count) : ViewBucket::Unsolvable;
  }
};

/// Set cover over elements [0, num_elements): covers[i] lists the elements
/// view i witnesses.
struct CoverProblem {
  std::size_t num_elements = 0;
  std::vector<std::string> view_ids;
  std::vector<std::vector<std::size_t>> covers;
};

enum class CoverStrategy { Auto, Exact, Greedy };

// Auto switches to greedy above this many views left after dominance pruning.
inline constexpr std::size_t kExactViewLimit = 24;

/// Exact search runs branch-and-bound after dropping views whose witness set
/// is contained in another view's (equal sets keep the smaller view id).
/// Greedy takes the view covering the most uncovered elements, ties going to
/// the lexicographically smallest id.
ViewRequirement solve_cover(const CoverProblem& problem, CoverStrategy strategy = CoverStrategy::Auto);

/// Builds the cover problem from geometry. Throws Error(UnknownObjectId), or
/// Error(InvalidArgument) for an empty relevant set.
CoverProblem cover_problem(const ObjectIdSet& relevant, std::span<const View> views,
                           std::span<const SceneObject> objects, const WitnessConfig& cfg);

ViewRequirement min_view_count(const ObjectIdSet& relevant, std::span<const View> views,
                               std::span<const SceneObject> objects, const WitnessConfig& cfg,
                               CoverStrategy strategy = CoverStrategy::Auto);

/// Every `stride`-th view starting with the first. stride 0 is treated as 1.
std::vector<View> sample_views(std::span<const View> views, std::size_t stride);

struct ViewHistogram {
  std::array<std::size_t, 5> counts{};  // indexed by ViewBucket
  std::size_t exact = 0;
  std::size_t greedy = 0;

  std::size_t total() const noexcept;
  std::size_t count(ViewBucket b) const noexcept { return counts[static_cast<std::size_t>(b)]; }
  /// Share of total, percent rounded half-up to one decimal.
  double percent(ViewBucket b) const noexcept;
  void add(const ViewRequirement& req) noexcept;
};

struct StatsOptions {
  std::size_t stride = 1;
  std::size_t threads = 1;
};

/// Buckets every instruction by its minimum view count over its scene's
/// (stride-sampled) views. Throws Error(UnknownScene).
ViewHistogram view_requirement_stats(std::span<const Instruction> instructions,
                                     const SceneSet& scenes, const WitnessConfig& cfg,
                                     const StatsOptions& options = {});

}  // namespace egoview::solvability
