// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <utility>

#include <Eigen/Core>

namespace egoview::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Points at or closer than this depth (meters, camera frame) are not projected.
inline constexpr double kNearPlane = 0.01;

struct Rect2D {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  bool valid() const noexcept { return x_min <= x_max && y_min <= y_max; }

  friend bool operator==(const Rect2D&, const Rect2D&) = default;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws Error(InvalidArgument) when fx/fy are not positive, the image
  /// size is not positive, or the principal point lies outside the image.
  void validate() const;

  /// The full image as a rectangle, [0, 0, width, height].
  Rect2D image_rect() const noexcept {
    return {0.0, 0.0, static_cast<double>(width), static_cast<double>(height)};
  }
  double image_area() const noexcept {
    return static_cast<double>(width) * static_cast<double>(height);
  }
};

/// Camera-to-world rigid transform. The camera looks along its +z axis with
/// image u to the right (+x) and v downward (+y).
struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  /// Throws Error(InvalidArgument) unless rotation is orthonormal with
  /// determinant +1 (both within `tolerance`).
  void validate(double tolerance = 1e-6) const;

  Vec3 world_to_camera(const Vec3& p_world) const {
    return rotation.transpose() * (p_world - translation);
  }
};

/// Camera-to-world pose at `eye` looking at `target`, with image "up" as close
/// to world +z as possible. `eye` and `target` must not be vertically aligned.
CameraPose look_at(const Vec3& eye, const Vec3& target);

/// Oriented box: full extents `size` around `center`, rotated by `heading`
/// radians about world +z.
struct OrientedBox3D {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  double heading = 0.0;

  void validate() const;

  /// Corner k has local offset (+-size/2) with bit 0 selecting x, bit 1 y and
  /// bit 2 z (set bit = positive half).
  std::array<Vec3, 8> corners() const;
};

/// The 12 box edges as corner index pairs (corners differing in one bit).
const std::array<std::pair<int, int>, 12>& box_edges() noexcept;

struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
};

/// Pinhole projection of a world point. Throws Error(BehindCamera) when the
/// camera-frame depth is <= kNearPlane.
ImagePoint project_point(const Vec3& point, const CameraIntrinsics& intr,
                         const CameraPose& pose);

/// Axis-aligned bounding rectangle of the box's projection. Edges crossing
/// the near plane are clipped there. The rectangle is not intersected with
/// the image. Returns nullopt when no corner lies in front of the near plane.
std::optional<Rect2D> project_box(const OrientedBox3D& box,
                                  const CameraIntrinsics& intr,
                                  const CameraPose& pose);

/// Intersection over the smaller of the two areas. Symmetric, in [0, 1], and
/// 0 when either rectangle has zero area.
double iosa(const Rect2D& a, const Rect2D& b) noexcept;

/// Rotation angle (radians, [0, pi]) of a^T b.
double geodesic_angle(const Mat3& a, const Mat3& b) noexcept;

}  // namespace egoview::geometry
