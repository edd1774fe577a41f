// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/solvability.hpp"

#include <algorithm>
#include <numeric>

#include <boost/dynamic_bitset.hpp>

#include "egoview/error.hpp"
#include "egoview/util.hpp"

namespace egoview::solvability {

namespace {

using Bits = boost::dynamic_bitset<>;

struct CoverSet {
  const std::string* id;
  Bits bits;
};

std::vector<CoverSet> to_sets(const CoverProblem& problem) {
  if (problem.view_ids.size() != problem.covers.size()) {
    throw Error(ErrorKind::InvalidArgument, "cover problem: view_ids and covers differ in length");
  }
  std::vector<CoverSet> sets;
  sets.reserve(problem.covers.size());
  for (std::size_t i = 0; i < problem.covers.size(); ++i) {
    Bits bits(problem.num_elements);
    for (std::size_t e : problem.covers[i]) {
      if (e >= problem.num_elements) {
        throw Error(ErrorKind::InvalidArgument, "cover problem: element out of range");
      }
      bits.set(e);
    }
    sets.push_back({&problem.view_ids[i], std::move(bits)});
  }
  return sets;
}

std::vector<CoverSet> prune_dominated(const std::vector<CoverSet>& sets) {
  std::vector<CoverSet> kept;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const Bits& bi = sets[i].bits;
    if (bi.none()) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < sets.size() && !dominated; ++j) {
      if (i == j) continue;
      const Bits& bj = sets[j].bits;
      if (!bi.is_subset_of(bj)) continue;
      // Equal sets: keep the smaller view id.
      dominated = bi != bj || *sets[j].id < *sets[i].id;
    }
    if (!dominated) kept.push_back(sets[i]);
  }
  return kept;
}

std::vector<std::size_t> greedy_cover(const std::vector<CoverSet>& sets, Bits uncovered) {
  std::vector<std::size_t> chosen;
  while (uncovered.any()) {
    std::size_t best = sets.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const std::size_t gain = (sets[i].bits & uncovered).count();
      if (gain > best_gain || (gain == best_gain && gain > 0 && *sets[i].id < *sets[best].id)) {
        best = i;
        best_gain = gain;
      }
    }
    if (best_gain == 0) break;  // unreachable once coverability was checked
    chosen.push_back(best);
    uncovered -= sets[best].bits;
  }
  return chosen;
}

class BranchAndBound {
 public:
  explicit BranchAndBound(const std::vector<CoverSet>& sets) : sets_(sets) {}

  std::vector<std::size_t> solve(const Bits& universe, std::vector<std::size_t> upper_bound) {
    best_ = std::move(upper_bound);
    std::vector<std::size_t> chosen;
    search(universe, chosen);
    return best_;
  }

 private:
  void search(const Bits& uncovered, std::vector<std::size_t>& chosen) {
    if (uncovered.none()) {
      if (chosen.size() < best_.size()) best_ = chosen;
      return;
    }
    if (chosen.size() + 1 >= best_.size()) return;

    std::size_t max_gain = 0;
    for (const auto& s : sets_) max_gain = std::max(max_gain, (s.bits & uncovered).count());
    const std::size_t remaining = uncovered.count();
    const std::size_t lower = (remaining + max_gain - 1) / max_gain;
    if (chosen.size() + lower >= best_.size()) return;

    // Branch on the uncovered element with the fewest covering sets.
    std::size_t pivot = Bits::npos;
    std::size_t fewest = sets_.size() + 1;
    for (auto e = uncovered.find_first(); e != Bits::npos; e = uncovered.find_next(e)) {
      std::size_t n = 0;
      for (const auto& s : sets_) n += s.bits.test(e) ? 1 : 0;
      if (n < fewest) {
        fewest = n;
        pivot = e;
      }
    }

    std::vector<std::size_t> options;
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      if (sets_[i].bits.test(pivot)) options.push_back(i);
    }
    std::ranges::sort(options, [&](std::size_t a, std::size_t b) {
      const auto ga = (sets_[a].bits & uncovered).count();
      const auto gb = (sets_[b].bits & uncovered).count();
      return ga != gb ? ga > gb : *sets_[a].id < *sets_[b].id;
    });
    for (std::size_t i : options) {
      chosen.push_back(i);
      search(uncovered - sets_[i].bits, chosen);
      chosen.pop_back();
    }
  }

  const std::vector<CoverSet>& sets_;
  std::vector<std::size_t> best_;
};

ViewRequirement make_requirement(const std::vector<CoverSet>& sets,
                                 const std::vector<std::size_t>& picks, Solver solver) {
  ViewRequirement req;
  req.solvable = true;
  req.count = picks.size();
  req.solver = solver;
  for (std::size_t i : picks) req.cover.push_back(*sets[i].id);
  std::ranges::sort(req.cover);
  return req;
}

}  // namespace

void WitnessConfig::validate() const {
  if (!(iosa_threshold > 0.0 && iosa_threshold < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "iosa_threshold must lie in (0, 1)");
  }
  if (!(min_area_ratio >= 0.0 && min_area_ratio < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "min_area_ratio must lie in [0, 1)");
  }
}

bool witnesses(const View& view, const SceneObject& object, const WitnessConfig& cfg) {
  const auto rect = geometry::project_box(object.box, view.intrinsics, view.pose);
  if (!rect) return false;
  if (rect->area() < cfg.min_area_ratio * view.intrinsics.image_area()) return false;
  return geometry::iosa(*rect, view.intrinsics.image_rect()) > cfg.iosa_threshold;
}

WitnessMatrix witness_matrix(std::span<const SceneObject> objects, std::span<const View> views,
                             const WitnessConfig& cfg) {
  if (objects.empty() || views.empty()) {
    throw Error(ErrorKind::EmptyInput, "witness_matrix needs at least one view and one object");
  }
  WitnessMatrix m(views.size(), objects.size());
  for (std::size_t i = 0; i < views.size(); ++i) {
    for (std::size_t j = 0; j < objects.size(); ++j) m.set(i, j, witnesses(views[i], objects[j], cfg));
  }
  return m;
}

bool is_solvable(const ObjectIdSet& relevant, std::span<const View> view_set,
                 std::span<const SceneObject> objects, const WitnessConfig& cfg) {
  for (ObjectId id : relevant) {
    auto it = std::ranges::find(objects, id, &SceneObject::object_id);
    if (it == objects.end()) {
      throw Error(ErrorKind::UnknownObjectId, "unknown object id " + std::to_string(id));
    }
    const bool seen = std::ranges::any_of(
        view_set, [&](const View& v) { return witnesses(v, *it, cfg); });
    if (!seen) return false;
  }
  return true;
}

std::string_view to_string(Solver solver) noexcept {
  return solver == Solver::Exact ? "exact" : "greedy";
}

std::string_view to_string(ViewBucket bucket) noexcept {
  switch (bucket) {
    case ViewBucket::One: return "1";
    case ViewBucket::Two: return "2";
    case ViewBucket::Three: return "3";
    case ViewBucket::FourPlus: return "4+";
    case ViewBucket::Unsolvable: return "unsolvable";
  }
  return "unsolvable";
}

ViewBucket bucket_for_count(std::size_t count) noexcept {
  switch (count) {
    case 0:
    case 1: return ViewBucket::One;
    case 2: return ViewBucket::Two;
    case 3: return ViewBucket::Three;
    default: return ViewBucket::FourPlus;
  }
}

ViewRequirement solve_cover(const CoverProblem& problem, CoverStrategy strategy) {
  const auto sets = to_sets(problem);

  Bits universe(problem.num_elements);
  universe.set();
  Bits reachable(problem.num_elements);
  for (const auto& s : sets) reachable |= s.bits;
  if (!universe.is_subset_of(reachable)) {
    ViewRequirement req;
    req.solver = strategy == CoverStrategy::Greedy ? Solver::Greedy : Solver::Exact;
    return req;
  }
  if (problem.num_elements == 0) return make_requirement(sets, {}, Solver::Exact);

  if (strategy == CoverStrategy::Greedy) {
    return make_requirement(sets, greedy_cover(sets, universe), Solver::Greedy);
  }
  const auto pruned = prune_dominated(sets);
  if (strategy == CoverStrategy::Auto && pruned.size() > kExactViewLimit) {
    return make_requirement(sets, greedy_cover(sets, universe), Solver::Greedy);
  }
  BranchAndBound search(pruned);
  const auto picks = search.solve(universe, greedy_cover(pruned, universe));
  return make_requirement(pruned, picks, Solver::Exact);
}

CoverProblem cover_problem(const ObjectIdSet& relevant, std::span<const View> views,
                           std::span<const SceneObject> objects, const WitnessConfig& cfg) {
  if (relevant.empty()) {
    throw Error(ErrorKind::InvalidArgument, "relevant object set is empty");
  }
  std::vector<const SceneObject*> targets;
  for (ObjectId id : relevant) {
    auto it = std::ranges::find(objects, id, &SceneObject::object_id);
    if (it == objects.end()) {
      throw Error(ErrorKind::UnknownObjectId, "unknown object id " + std::to_string(id));
    }
    targets.push_back(&*it);
  }
  CoverProblem problem;
  problem.num_elements = targets.size();
  for (const View& v : views) {
    problem.view_ids.push_back(v.view_id);
    auto& cover = problem.covers.emplace_back();
    for (std::size_t e = 0; e < targets.size(); ++e) {
      if (witnesses(v, *targets[e], cfg)) cover.push_back(e);
    }
  }
  return problem;
}

ViewRequirement min_view_count(const ObjectIdSet& relevant, std::span<const View> views,
                               std::span<const SceneObject> objects, const WitnessConfig& cfg,
                               CoverStrategy strategy) {
  return solve_cover(cover_problem(relevant, views, objects, cfg), strategy);
}

std::vector<View> sample_views(std::span<const View> views, std::size_t stride) {
  stride = std::max<std::size_t>(stride, 1);
  std::vector<View> out;
  for (std::size_t i = 0; i < views.size(); i += stride) out.push_back(views[i]);
  return out;
}

std::size_t ViewHistogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

double ViewHistogram::percent(ViewBucket b) const noexcept {
  return percent_1dp(count(b), total());
}

void ViewHistogram::add(const ViewRequirement& req) noexcept {
  ++counts[static_cast<std::size_t>(req.bucket())];
  if (req.solvable) ++(req.solver == Solver::Exact ? exact : greedy);
}

ViewHistogram view_requirement_stats(std::span<const Instruction> instructions,
                                     const SceneSet& scenes, const WitnessConfig& cfg,
                                     const StatsOptions& options) {
  // Resolve scenes up front so reference errors surface before any work.
  std::vector<const Scene*> owners;
  owners.reserve(instructions.size());
  for (const auto& ins : instructions) owners.push_back(&require_scene(scenes, ins.scene_id));

  std::map<const Scene*, std::vector<View>> sampled;
  for (const Scene* s : owners) {
    if (!sampled.contains(s)) sampled.emplace(s, sample_views(s->views, options.stride));
  }

  std::vector<ViewRequirement> results(instructions.size());
  parallel_for(instructions.size(), options.threads, [&](std::size_t i) {
    const Scene& scene = *owners[i];
    results[i] = min_view_count(instructions[i].related_object_ids, sampled.at(&scene),
                                scene.objects, cfg);
  });

  ViewHistogram hist;
  for (const auto& r : results) hist.add(r);
  return hist;
}

}  // namespace egoview::solvability
