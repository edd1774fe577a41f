// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// Reference implementations that share no code with the library. Each is a
// slow, direct restatement of a definition.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "egoview/geometry.hpp"

namespace egoview::oracle {

struct Box {
  double x0, y0, x1, y1;
};

// Area by counting the centres of a `res` grid that fall inside the rect,
// one axis at a time.
inline std::int64_t cells_inside(double lo, double hi, double lo2, double hi2, double res) {
  const double a = std::max(lo, lo2);
  const double b = std::min(hi, hi2);
  if (!(b > a)) return 0;
  std::int64_t n = 0;
  const auto first = static_cast<std::int64_t>(std::floor(a / res)) - 1;
  const auto last = static_cast<std::int64_t>(std::ceil(b / res)) + 1;
  for (std::int64_t k = first; k <= last; ++k) {
    const double c = (static_cast<double>(k) + 0.5) * res;
    if (c >= a && c < b) ++n;
  }
  return n;
}

inline double raster_iosa(const Box& a, const Box& b, double res = 0.001) {
  const auto inf = std::numeric_limits<double>::infinity();
  const auto area = [&](const Box& r) {
    return cells_inside(r.x0, r.x1, -inf, inf, res) * cells_inside(r.y0, r.y1, -inf, inf, res);
  };
  const std::int64_t inter =
      cells_inside(a.x0, a.x1, b.x0, b.x1, res) * cells_inside(a.y0, a.y1, b.y0, b.y1, res);
  const std::int64_t smaller = std::min(area(a), area(b));
  return smaller == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(smaller);
}

// Pinhole projection written out component by component.
struct Camera {
  double fx, fy, cx, cy;
  double r[3][3];  // camera-to-world rotation
  double t[3];
};

inline Camera camera_of(const geometry::CameraIntrinsics& k, const geometry::CameraPose& p) {
  Camera c{k.fx, k.fy, k.cx, k.cy, {}, {p.translation.x(), p.translation.y(), p.translation.z()}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c.r[i][j] = p.rotation(i, j);
  return c;
}

inline std::array<double, 3> to_camera(const Camera& c, const std::array<double, 3>& w) {
  const double d[3] = {w[0] - c.t[0], w[1] - c.t[1], w[2] - c.t[2]};
  std::array<double, 3> out{};
  for (int j = 0; j < 3; ++j) out[j] = c.r[0][j] * d[0] + c.r[1][j] * d[1] + c.r[2][j] * d[2];
  return out;
}

inline std::array<double, 2> pixel(const Camera& c, const std::array<double, 3>& p_cam) {
  return {c.cx + c.fx * p_cam[0] / p_cam[2], c.cy + c.fy * p_cam[1] / p_cam[2]};
}

// World point at local box coordinates (sx, sy, sz) in [-1, 1]^3.
inline std::array<double, 3> box_point(const geometry::OrientedBox3D& b, double sx, double sy, double sz) {
  const double lx = 0.5 * b.size.x() * sx;
  const double ly = 0.5 * b.size.y() * sy;
  const double lz = 0.5 * b.size.z() * sz;
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  return {b.center.x() + c * lx - s * ly, b.center.y() + s * lx + c * ly, b.center.z() + lz};
}

struct Bounds {
  double u0 = std::numeric_limits<double>::infinity();
  double v0 = std::numeric_limits<double>::infinity();
  double u1 = -std::numeric_limits<double>::infinity();
  double v1 = -std::numeric_limits<double>::infinity();
  bool empty() const { return u0 > u1; }
  void add(const std::array<double, 2>& uv) {
    u0 = std::min(u0, uv[0]);
    u1 = std::max(u1, uv[0]);
    v0 = std::min(v0, uv[1]);
    v1 = std::max(v1, uv[1]);
  }
};

inline Bounds corner_projection(const geometry::OrientedBox3D& b, const Camera& cam) {
  Bounds out;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) out.add(pixel(cam, to_camera(cam, box_point(b, sx, sy, sz))));
  return out;
}

// Bounding rect of random samples on the part of the box surface in front of
// the near plane. Samples are drawn on faces and on edges; pairs of edge
// samples on either side of the plane are interpolated onto it, which traces
// the clipped cap outline.
inline Bounds sampled_projection(const geometry::OrientedBox3D& b, const Camera& cam, double near,
                                 std::size_t samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_int_distribution<int> pick_face(0, 5);
  std::uniform_int_distribution<int> pick_edge(0, 11);
  Bounds out;
  const auto local_face = [&](int f) -> std::array<double, 3> {
    std::array<double, 3> s{uni(rng), uni(rng), uni(rng)};
    s[f / 2] = (f % 2) ? 1.0 : -1.0;
    return s;
  };
  const auto local_edge = [&](int e, double param) -> std::array<double, 3> {
    // 12 edges: free axis e / 4, the other two fixed at ±1.
    const int free_axis = e / 4;
    const int a1 = (free_axis + 1) % 3;
    const int a2 = (free_axis + 2) % 3;
    std::array<double, 3> s{};
    s[free_axis] = param;
    s[a1] = (e & 1) ? 1.0 : -1.0;
    s[a2] = (e & 2) ? 1.0 : -1.0;
    return s;
  };
  const auto cam_point = [&](const std::array<double, 3>& s) {
    return to_camera(cam, box_point(b, s[0], s[1], s[2]));
  };
  for (std::size_t i = 0; i < samples; ++i) {
    if (i % 2 == 0) {
      const auto p = cam_point(local_face(pick_face(rng)));
      if (p[2] > near) out.add(pixel(cam, p));
      continue;
    }
    const int e = pick_edge(rng);
    const auto p = cam_point(local_edge(e, uni(rng)));
    const auto q = cam_point(local_edge(e, uni(rng)));
    if (p[2] > near) out.add(pixel(cam, p));
    if ((p[2] - near) * (q[2] - near) < 0.0) {
      const double w = (near - p[2]) / (q[2] - p[2]);
      const std::array<double, 3> m{p[0] + w * (q[0] - p[0]), p[1] + w * (q[1] - p[1]), near};
      out.add(pixel(cam, m));
    }
  }
  return out;
}

// Minimum number of sets whose union is everything, by trying every subset.
// Returns 0 when no subset covers.
inline int brute_force_cover(const std::vector<std::uint32_t>& sets, std::uint32_t universe) {
  int best = 0;
  const std::uint32_t n = static_cast<std::uint32_t>(sets.size());
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::uint32_t got = 0;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask & (1u << i)) got |= sets[i];
    if ((got & universe) != universe) continue;
    const int k = __builtin_popcount(mask);
    if (best == 0 || k < best) best = k;
  }
  return best;
}

struct PairKey {
  std::string scene, first, second;
  std::set<std::int64_t> shared;
  auto operator<=>(const PairKey&) const = default;
};

// Plain double loop over every ordered-by-id pair.
template <typename Q>
std::vector<PairKey> brute_force_pairs(const std::vector<Q>& qs) {
  std::vector<PairKey> out;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    for (std::size_t j = 0; j < qs.size(); ++j) {
      if (i == j || qs[i].scene_id != qs[j].scene_id) continue;
      if (!(qs[i].question_id < qs[j].question_id)) continue;
      const auto& a = qs[i].related_object_ids;
      const auto& b = qs[j].related_object_ids;
      std::set<std::int64_t> shared;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::inserter(shared, shared.end()));
      const bool a_in_b = std::includes(b.begin(), b.end(), a.begin(), a.end());
      const bool b_in_a = std::includes(a.begin(), a.end(), b.begin(), b.end());
      if (shared.empty() || a_in_b || b_in_a) continue;
      out.push_back({qs[i].scene_id, qs[i].question_id, qs[j].question_id, shared});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace egoview::oracle
