// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Geometry>

#include "egoview/error.hpp"

namespace egoview::geometry {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

// Projection without the near-plane check; callers guarantee z > 0.
ImagePoint pinhole(const Vec3& p_cam, const CameraIntrinsics& intr) {
  return {intr.cx + intr.fx * p_cam.x() / p_cam.z(),
          intr.cy + intr.fy * p_cam.y() / p_cam.z()};
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) invalid("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) invalid("intrinsics: image size must be positive");
  if (!(cx >= 0.0 && cx <= width) || !(cy >= 0.0 && cy <= height)) {
    invalid("intrinsics: principal point outside the image");
  }
}

void CameraPose::validate(double tolerance) const {
  if (!rotation.allFinite() || !translation.allFinite()) invalid("pose: non-finite values");
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tolerance) {
    invalid("pose: rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > tolerance) {
    invalid("pose: rotation determinant is not +1");
  }
}

CameraPose look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) invalid("look_at: view direction parallel to the up axis");
  right.normalize();
  const Vec3 down = forward.cross(right);
  CameraPose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = forward;
  pose.translation = eye;
  return pose;
}

void OrientedBox3D::validate() const {
  if (!center.allFinite() || !size.allFinite() || !std::isfinite(heading)) {
    invalid("box: non-finite values");
  }
  if (!(size.minCoeff() > 0.0)) invalid("box: size components must be positive");
}

std::array<Vec3, 8> OrientedBox3D::corners() const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const Vec3 half = size / 2.0;
  std::array<Vec3, 8> out;
  for (int k = 0; k < 8; ++k) {
    const double lx = (k & 1) ? half.x() : -half.x();
    const double ly = (k & 2) ? half.y() : -half.y();
    const double lz = (k & 4) ? half.z() : -half.z();
    out[k] = center + Vec3(c * lx - s * ly, s * lx + c * ly, lz);
  }
  return out;
}

const std::array<std::pair<int, int>, 12>& box_edges() noexcept {
  static const std::array<std::pair<int, int>, 12> edges = [] {
    std::array<std::pair<int, int>, 12> e{};
    int n = 0;
    for (int a = 0; a < 8; ++a) {
      for (int bit = 1; bit < 8; bit <<= 1) {
        if (!(a & bit)) e[n++] = {a, a | bit};
      }
    }
    return e;
  }();
  return edges;
}

ImagePoint project_point(const Vec3& point, const CameraIntrinsics& intr,
                         const CameraPose& pose) {
  const Vec3 p_cam = pose.world_to_camera(point);
  if (!(p_cam.z() > kNearPlane)) {
    throw Error(ErrorKind::BehindCamera, "point is behind the camera near plane");
  }
  return pinhole(p_cam, intr);
}

std::optional<Rect2D> project_box(const OrientedBox3D& box,
                                  const CameraIntrinsics& intr,
                                  const CameraPose& pose) {
  std::array<Vec3, 8> cam;
  const auto world = box.corners();
  for (int k = 0; k < 8; ++k) cam[k] = pose.world_to_camera(world[k]);

  constexpr double inf = std::numeric_limits<double>::infinity();
  Rect2D rect{inf, inf, -inf, -inf};
  bool any = false;
  auto include = [&](const Vec3& p_cam) {
    const ImagePoint ip = pinhole(p_cam, intr);
    rect.x_min = std::min(rect.x_min, ip.u);
    rect.y_min = std::min(rect.y_min, ip.v);
    rect.x_max = std::max(rect.x_max, ip.u);
    rect.y_max = std::max(rect.y_max, ip.v);
    any = true;
  };

  for (const Vec3& p : cam) {
    if (p.z() > kNearPlane) include(p);
  }
  if (!any) return std::nullopt;

  for (const auto& [a, b] : box_edges()) {
    const bool front_a = cam[a].z() > kNearPlane;
    const bool front_b = cam[b].z() > kNearPlane;
    if (front_a == front_b) continue;
    const double t = (kNearPlane - cam[a].z()) / (cam[b].z() - cam[a].z());
    Vec3 clipped = cam[a] + t * (cam[b] - cam[a]);
    clipped.z() = kNearPlane;
    include(clipped);
  }
  return rect;
}

double iosa(const Rect2D& a, const Rect2D& b) noexcept {
  const double smaller = std::min(a.area(), b.area());
  if (!(smaller > 0.0)) return 0.0;
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return std::clamp(w * h / smaller, 0.0, 1.0);
}

double geodesic_angle(const Mat3& a, const Mat3& b) noexcept {
  const double cos_angle = ((a.transpose() * b).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(cos_angle, -1.0, 1.0));
}

}  // namespace egoview::geometry
