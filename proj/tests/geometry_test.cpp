// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/geometry.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <random>

#include "egoview/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace egoview::geometry {
namespace {

using testing::vga;

TEST(ProjectPoint, OpticalAxisHitsPrincipalPoint) {
  const auto p = project_point({0, 0, 2}, vga(), CameraPose{});
  EXPECT_DOUBLE_EQ(p.u, 320.0);
  EXPECT_DOUBLE_EQ(p.v, 240.0);
}

TEST(ProjectPoint, OffAxisFollowsPinhole) {
  const auto p = project_point({1, 0, 2}, vga(), CameraPose{});
  EXPECT_DOUBLE_EQ(p.u, 570.0);
  EXPECT_DOUBLE_EQ(p.v, 240.0);
}

TEST(ProjectPoint, BehindCameraThrows) {
  try {
    project_point({0, 0, -1}, vga(), CameraPose{});
    FAIL() << "expected BehindCamera";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BehindCamera);
  }
}

TEST(ProjectPoint, NearPlaneIsExclusive) {
  EXPECT_THROW(project_point({0, 0, kNearPlane}, vga(), CameraPose{}), Error);
  EXPECT_NO_THROW(project_point({0, 0, 0.011}, vga(), CameraPose{}));
}

TEST(ProjectPoint, ScaleConsistent) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xy(-3, 3), z(0.5, 20), s(0.1, 10);
  for (int i = 0; i < 500; ++i) {
    const Vec3 p{xy(rng), xy(rng), z(rng)};
    const double k = s(rng);
    const auto a = project_point(p, vga(), CameraPose{});
    const auto b = project_point(k * p, vga(), CameraPose{});
    EXPECT_NEAR(a.u, b.u, 1e-9);
    EXPECT_NEAR(a.v, b.v, 1e-9);
  }
}

TEST(ProjectPoint, RespectsTranslatedRotatedPose) {
  // Camera at (2, -3, 0.5) looking along +y: world point 4 m ahead and 1 m to
  // the right lands at u = 320 + 500 / 4.
  const auto pose = testing::facing_plus_y({2, -3, 0.5});
  const auto p = project_point({3, 1, 0.5}, vga(), pose);
  EXPECT_DOUBLE_EQ(p.u, 445.0);
  EXPECT_DOUBLE_EQ(p.v, 240.0);
  // Up in the world is up in the image.
  EXPECT_LT(project_point({2, 1, 1.5}, vga(), pose).v, 240.0);
}

TEST(ProjectBox, UnitCubeAtFiveMetres) {
  OrientedBox3D box;
  box.center = {0, 0, 5};
  const auto r = project_box(box, vga(), CameraPose{});
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->x_min, 320 - 500 * 0.5 / 4.5, 1e-3);
  EXPECT_NEAR(r->y_min, 240 - 500 * 0.5 / 4.5, 1e-3);
  EXPECT_NEAR(r->x_max, 320 + 500 * 0.5 / 4.5, 1e-3);
  EXPECT_NEAR(r->y_max, 240 + 500 * 0.5 / 4.5, 1e-3);
  EXPECT_NEAR(r->x_min, 264.444, 1e-3);
  EXPECT_NEAR(r->y_max, 295.556, 1e-3);
}

TEST(ProjectBox, AllBehindIsNotVisible) {
  OrientedBox3D box;
  box.center = {0, 0, -5};
  EXPECT_FALSE(project_box(box, vga(), CameraPose{}));
}

TEST(ProjectBox, NotClippedToImage) {
  OrientedBox3D box;
  box.center = {3, 0, 2};
  const auto r = project_box(box, vga(), CameraPose{});
  ASSERT_TRUE(r);
  EXPECT_GT(r->x_max, 640.0);
}

TEST(ProjectBox, HeadingRotatesAboutWorldUp) {
  // A 2 x 0.2 x 0.2 bar seen from above (camera looking down -z). Turning it
  // by 90 degrees swaps its image extents.
  CameraPose down;
  down.rotation << 1, 0, 0,
                   0, -1, 0,
                   0, 0, -1;
  down.translation = {0, 0, 10};
  OrientedBox3D bar;
  bar.size = {2.0, 0.2, 0.2};
  const auto flat = project_box(bar, vga(), down);
  bar.heading = std::numbers::pi / 2;
  const auto turned = project_box(bar, vga(), down);
  ASSERT_TRUE(flat && turned);
  EXPECT_GT(flat->width(), 5 * flat->height());
  EXPECT_NEAR(flat->width(), turned->height(), 1e-9);
  EXPECT_NEAR(flat->height(), turned->width(), 1e-9);
}

TEST(ProjectBox, StraddlingBoxIsClippedAtNearPlane) {
  OrientedBox3D box;
  box.center = {0.2, 0.1, 0.3};
  const auto r = project_box(box, vga(), CameraPose{});
  ASSERT_TRUE(r);
  // The clipped cap at z = 0.01 reaches x = 0.7, far outside the frame.
  EXPECT_NEAR(r->x_max, 320 + 500 * 0.7 / kNearPlane, 1e-6);
  EXPECT_NEAR(r->x_min, 320 - 500 * 0.3 / kNearPlane, 1e-6);
}

TEST(ProjectBox, ContainsEveryFrontCorner) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-2, 2), depth(-0.5, 6), sz(0.1, 2), yaw(-3.2, 3.2);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    OrientedBox3D box;
    box.center = {pos(rng), pos(rng), depth(rng)};
    box.size = {sz(rng), sz(rng), sz(rng)};
    box.heading = yaw(rng);
    const auto r = project_box(box, vga(), CameraPose{});
    for (const auto& c : box.corners()) {
      if (c.z() <= kNearPlane) continue;
      ASSERT_TRUE(r);
      const auto p = project_point(c, vga(), CameraPose{});
      const double tol = 1e-9 * std::max(1.0, std::abs(p.u) + std::abs(p.v));
      EXPECT_GE(p.u, r->x_min - tol);
      EXPECT_LE(p.u, r->x_max + tol);
      EXPECT_GE(p.v, r->y_min - tol);
      EXPECT_LE(p.v, r->y_max + tol);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(ProjectBox, StraddlingMatchesSurfaceSampling) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> off(-0.4, 0.4), sz(0.3, 1.2);
  int tested = 0;
  while (tested < 10) {
    OrientedBox3D box;
    box.size = {sz(rng), sz(rng), sz(rng)};
    box.center = {off(rng), off(rng), off(rng)};
    const auto corners = box.corners();
    const bool straddles =
        std::any_of(corners.begin(), corners.end(), [](const Vec3& c) { return c.z() <= kNearPlane; }) &&
        std::any_of(corners.begin(), corners.end(), [](const Vec3& c) { return c.z() > kNearPlane; });
    if (!straddles) continue;
    ++tested;
    const auto r = project_box(box, vga(), CameraPose{});
    ASSERT_TRUE(r);
    const auto cam = oracle::camera_of(vga(), CameraPose{});
    const auto o = oracle::sampled_projection(box, cam, kNearPlane, 100000, rng);
    EXPECT_NEAR(r->x_min, o.u0, 2.0);
    EXPECT_NEAR(r->x_max, o.u1, 2.0);
    EXPECT_NEAR(r->y_min, o.v0, 2.0);
    EXPECT_NEAR(r->y_max, o.v1, 2.0);
  }
}

TEST(Iosa, ReferenceCases) {
  EXPECT_DOUBLE_EQ(iosa({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(iosa({0, 0, 1, 1}, {5, 5, 6, 6}), 0.0);
  EXPECT_DOUBLE_EQ(iosa({0, 0, 2, 2}, {1, 1, 3, 3}), 0.25);
  EXPECT_NEAR(oracle::raster_iosa({0, 0, 2, 2}, {1, 1, 3, 3}), 0.25, 1e-9);
}

TEST(Iosa, DegenerateIsZero) {
  EXPECT_EQ(iosa({1, 1, 1, 5}, {0, 0, 10, 10}), 0.0);
  EXPECT_EQ(iosa({0, 0, 10, 10}, {2, 2, 8, 2}), 0.0);
}

TEST(Iosa, TouchingEdgesDoNotOverlap) { EXPECT_EQ(iosa({0, 0, 1, 1}, {1, 0, 2, 1}), 0.0); }

TEST(Iosa, SymmetricBoundedAndContainment) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c(-50, 50), s(0.01, 40);
  for (int i = 0; i < 2000; ++i) {
    const double ax = c(rng), ay = c(rng), bx = c(rng), by = c(rng);
    const Rect2D a{ax, ay, ax + s(rng), ay + s(rng)};
    const Rect2D b{bx, by, bx + s(rng), by + s(rng)};
    const double ab = iosa(a, b);
    EXPECT_EQ(ab, iosa(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_DOUBLE_EQ(iosa(a, a), 1.0);
    const Rect2D inner{a.x_min + 0.25 * a.width(), a.y_min + 0.25 * a.height(),
                       a.x_max - 0.25 * a.width(), a.y_max - 0.25 * a.height()};
    EXPECT_DOUBLE_EQ(iosa(a, inner), 1.0);
  }
}

TEST(Iosa, MatchesRasterOracle) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> c(0, 60), s(5, 40);
  for (int i = 0; i < 200; ++i) {
    const double ax = c(rng), ay = c(rng), bx = c(rng), by = c(rng);
    const Rect2D a{ax, ay, ax + s(rng), ay + s(rng)};
    const Rect2D b{bx, by, bx + s(rng), by + s(rng)};
    const double want = oracle::raster_iosa({a.x_min, a.y_min, a.x_max, a.y_max},
                                            {b.x_min, b.y_min, b.x_max, b.y_max});
    EXPECT_NEAR(iosa(a, b), want, 1e-3);
  }
}

TEST(CameraPose, RejectsNonRotation) {
  CameraPose p;
  p.rotation(0, 0) = 2.0;
  EXPECT_THROW(p.validate(), Error);
  p.rotation = -Mat3::Identity();  // orthogonal but a reflection
  EXPECT_THROW(p.validate(), Error);
  EXPECT_NO_THROW(testing::facing_plus_y({0, 0, 0}).validate());
}

TEST(CameraIntrinsics, Invariants) {
  auto k = vga();
  EXPECT_NO_THROW(k.validate());
  k.fx = 0;
  EXPECT_THROW(k.validate(), Error);
  k = vga();
  k.cx = 641;
  EXPECT_THROW(k.validate(), Error);
  k = vga();
  k.height = 0;
  EXPECT_THROW(k.validate(), Error);
}

TEST(OrientedBox, RejectsNonPositiveSize) {
  OrientedBox3D b;
  b.size = {1, 0, 1};
  EXPECT_THROW(b.validate(), Error);
}

TEST(LookAt, ProducesValidPoseFacingTarget) {
  const auto pose = look_at({1, 2, 1.5}, {4, -2, 0.5});
  EXPECT_NO_THROW(pose.validate());
  const auto p = project_point({4, -2, 0.5}, vga(), pose);
  EXPECT_NEAR(p.u, 320.0, 1e-9);
  EXPECT_NEAR(p.v, 240.0, 1e-9);
}

TEST(GeodesicAngle, KnownRotation) {
  const Mat3 r = Eigen::AngleAxisd(0.7, Vec3::UnitZ()).toRotationMatrix();
  EXPECT_NEAR(geodesic_angle(Mat3::Identity(), r), 0.7, 1e-12);
  EXPECT_NEAR(geodesic_angle(r, r), 0.0, 1e-7);
}

}  // namespace
}  // namespace egoview::geometry
