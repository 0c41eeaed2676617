#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"
#include "../support/silhouette.hpp"
#include "sbench/error.hpp"
#include "sbench/geometry.hpp"

using namespace sbench;
using fixtures::calib;

TEST(Disparity, Examples) {
  EXPECT_EQ(disparity({110, 0}, {100, 0}), 10.0);
  EXPECT_EQ(disparity({100, 0}, {100, 0}), 0.0);
  EXPECT_EQ(disparity({95, 0}, {100, 0}), -5.0);
}

TEST(Reproject, OnAxisAndLateral) {
  const auto c = calib(500, 320, 240, 5);
  const Point3D p = reproject({320, 240}, 10, c);
  EXPECT_EQ(p, (Point3D{0, 0, 250}));
  const Point3D q = reproject({330, 240}, 10, c);
  EXPECT_DOUBLE_EQ(q.x_mm, 5.0);
  EXPECT_DOUBLE_EQ(q.y_mm, 0.0);
  EXPECT_DOUBLE_EQ(q.z_mm, 250.0);
}

TEST(Reproject, RejectsNonPositiveDisparity) {
  const auto c = calib();
  for (double d : {0.0, -1.0}) {
    try {
      reproject({10, 10}, d, c);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NonPositiveDisparity);
    }
  }
}

TEST(Project, LeftAndRight) {
  const auto c = calib(500, 320, 240, 5);
  EXPECT_EQ(project({0, 0, 250}, c, View::Left), (Keypoint2D{320, 240}));
  EXPECT_EQ(project({0, 0, 250}, c, View::Right), (Keypoint2D{310, 240}));
  EXPECT_THROW(project({0, 0, -1}, c, View::Left), Error);
}

TEST(Project, ReprojectRoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto c = calib(200 + 800 * u(rng), 100 + 400 * u(rng), 100 + 300 * u(rng), 1 + 9 * u(rng));
    const Keypoint2D left{1000 * u(rng), 800 * u(rng)};
    const double d = 0.5 + 100 * u(rng);
    const Point3D p = reproject(left, d, c);
    const Keypoint2D l2 = project(p, c, View::Left);
    const Keypoint2D r2 = project(p, c, View::Right);
    EXPECT_NEAR(l2.u, left.u, 1e-9);
    EXPECT_NEAR(l2.v, left.v, 1e-9);
    EXPECT_NEAR(r2.u, left.u - d, 1e-9);
    EXPECT_NEAR(r2.v, left.v, 1e-9);
  }
}

TEST(SphereToBBox, OnAxisCircle) {
  const auto c = calib(500, 320, 240, 5);
  const StereoBBox b = sphere_to_bbox({0, 0, 250}, 2.5, c);
  const double radius = 500 * 2.5 / std::sqrt(250.0 * 250.0 - 2.5 * 2.5);
  EXPECT_NEAR(radius, 5.00025, 1e-6);
  EXPECT_NEAR(b.left.u_min, 320 - radius, 1e-9);
  EXPECT_NEAR(b.left.u_max, 320 + radius, 1e-9);
  EXPECT_NEAR(b.left.v_min, 240 - radius, 1e-9);
  EXPECT_NEAR(b.left.v_max, 240 + radius, 1e-9);
}

TEST(SphereToBBox, OnAxisMatchesMonteCarlo) {
  const auto c = calib(500, 320, 240, 5);
  std::mt19937_64 rng(3);
  const BBox mc = fixtures::mc_silhouette({0, 0, 250}, 2.5, c, View::Left, 1000000, rng);
  const BBox b = sphere_to_bbox({0, 0, 250}, 2.5, c).left;
  EXPECT_NEAR(mc.u_min, b.u_min, 0.01);
  EXPECT_NEAR(mc.u_max, b.u_max, 0.01);
  EXPECT_NEAR(mc.v_min, b.v_min, 0.01);
  EXPECT_NEAR(mc.v_max, b.v_max, 0.01);
}

TEST(SphereToBBox, DefaultRadius) { EXPECT_EQ(kDefaultSphereRadiusMm, 2.5); }

TEST(SphereToBBox, FartherIsSmaller) {
  const auto c = calib();
  const StereoBBox near = sphere_to_bbox({3, -2, 100}, 2.5, c);
  const StereoBBox far = sphere_to_bbox({3, -2, 200}, 2.5, c);
  EXPECT_LT(far.left.width(), near.left.width());
  EXPECT_LT(far.left.height(), near.left.height());
  EXPECT_LT(far.right.width(), near.right.width());
  EXPECT_LT(far.right.height(), near.right.height());
}

TEST(SphereToBBox, RowsAgreeAcrossViews) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto c = calib(300 + 700 * u(rng), 320, 240, 2 + 5 * u(rng));
    const double z = 20 + 480 * u(rng);
    const Point3D p{0.8 * z * (u(rng) - 0.5), 0.8 * z * (u(rng) - 0.5), z};
    const StereoBBox b = sphere_to_bbox(p, 2.5, c);
    EXPECT_NEAR(b.left.v_min, b.right.v_min, 1e-6);
    EXPECT_NEAR(b.left.v_max, b.right.v_max, 1e-6);
  }
}

TEST(SphereToBBox, MonteCarloRandomConfigurations) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    const auto c = calib(300 + 700 * u(rng), 320, 240, 2 + 5 * u(rng));
    const double z = 20 + 480 * u(rng);
    const Point3D p{0.8 * z * (u(rng) - 0.5), 0.8 * z * (u(rng) - 0.5), z};
    const StereoBBox b = sphere_to_bbox(p, 2.5, c);
    for (View view : {View::Left, View::Right}) {
      const BBox mc = fixtures::mc_silhouette(p, 2.5, c, view, 200000, rng);
      const BBox& got = view == View::Left ? b.left : b.right;
      EXPECT_NEAR(mc.u_min, got.u_min, 0.5);
      EXPECT_NEAR(mc.u_max, got.u_max, 0.5);
      EXPECT_NEAR(mc.v_min, got.v_min, 0.5);
      EXPECT_NEAR(mc.v_max, got.v_max, 0.5);
    }
  }
}

TEST(SphereToBBox, CameraInsideSphere) {
  const auto c = calib();
  EXPECT_THROW(sphere_to_bbox({0, 0, 2}, 2.5, c), Error);
  try {
    sphere_to_bbox({0, 0, 1}, 2.5, c);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CameraInsideSphere);
  }
}

TEST(Epipolar, Examples) {
  EXPECT_TRUE(epipolar_consistent({100, 50}, {90, 50}, 1));
  EXPECT_FALSE(epipolar_consistent({100, 50}, {90, 52}, 1));
  EXPECT_TRUE(epipolar_consistent({100, 50}, {90, 52}, 2));
}
