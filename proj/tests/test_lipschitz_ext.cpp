#include "doctest.h"

#include <cmath>

#include "catlab/lipschitz_ext.hpp"

using namespace catlab;

namespace {

SpacePoint e2(double x, double y) {
  static SpacePtr space = GeodesicSpace::euclidean(2);
  return make_point(space, Eigen::Vector2d(x, y));
}

// Dense grid minimum of max_j |v - c_j| / s_j over a square, then refined.
double grid_minimax(const std::vector<SpacePoint>& targets,
                    const std::vector<double>& scales, double cx, double cy,
                    double span) {
  double best = std::numeric_limits<double>::infinity();
  double bx = cx, by = cy;
  for (int stage = 0; stage < 7; ++stage) {
    const int n = 40;
    const double step = 2.0 * span / n;
    // re-center until stable so the scan can travel along diagonal valleys
    for (int pass = 0; pass < 100; ++pass) {
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
          const SpacePoint v = e2(cx - span + i * step, cy - span + j * step);
          double f = 0.0;
          for (std::size_t t = 0; t < targets.size(); ++t) {
            f = std::max(f, distance(v, targets[t]) / scales[t]);
          }
          if (f < best) {
            best = f;
            bx = v.coords[0];
            by = v.coords[1];
          }
        }
      }
      const bool stable = std::hypot(bx - cx, by - cy) <= step;
      cx = bx;
      cy = by;
      if (stable) break;
    }
    span = 2.0 * step;
  }
  return best;
}

}  // namespace

TEST_CASE("lipschitz constant") {
  const std::vector<SpacePoint> pts = {e2(0, 0), e2(1, 0), e2(2, 0)};
  CHECK(lipschitz_constant(pts, pts) == doctest::Approx(1.0));
  const std::vector<SpacePoint> constant = {e2(1, 1), e2(1, 1), e2(1, 1)};
  CHECK(lipschitz_constant(pts, constant) == doctest::Approx(0.0));
  const std::vector<SpacePoint> dup = {e2(0, 0), e2(0, 0)};
  const std::vector<SpacePoint> vals = {e2(0, 0), e2(1, 0)};
  CHECK(std::isinf(lipschitz_constant(dup, vals)));
  CHECK_THROWS_AS(lipschitz_constant(pts, dup), Error);
}

TEST_CASE("extend validates its instance") {
  ExtensionInstance inst;
  inst.domain_points = {e2(0, 0), e2(1, 0)};
  inst.z_indices = {0, 5};
  inst.f_values = {e2(0, 0), e2(0, 0)};
  inst.ball_center = e2(0, 0);
  inst.ball_radius = 1.0;
  const model::CurvatureClass cc(0.0, 0.5);
  CHECK_THROWS_AS(extend(inst, cc), Error);
  inst.z_indices = {0, 1};
  inst.f_values = {e2(0, 0), e2(5, 0)};  // outside the ball
  CHECK_THROWS_AS(extend(inst, cc), Error);
}

TEST_CASE("extension agrees on Z, stays in the ball, history monotone") {
  auto s2 = GeodesicSpace::sphere(2, 1.0);
  const SpacePoint pole = make_point(s2, Eigen::Vector3d(1, 0, 0));
  const SpacePoint origin = e2(0, 0);
  BallSampler domain(origin, 1.0);
  BallSampler target(pole, M_PI / 8.0);
  Rng rng(50);
  const model::CurvatureClass cc(1.0, 0.5);
  for (int i = 0; i < 10; ++i) {
    const ExtensionInstance inst =
        random_extension_instance(domain, target, 10, rng);
    const ExtensionResult res = extend(inst, cc);
    for (std::size_t z = 0; z < inst.z_indices.size(); ++z) {
      CHECK((res.values[inst.z_indices[z]].coords -
             inst.f_values[z].coords)
                .norm() == 0.0);
    }
    for (const auto& v : res.values) {
      CHECK(distance(v, inst.ball_center) <= inst.ball_radius + 1e-9);
    }
    for (std::size_t h = 1; h < res.lip_history.size(); ++h) {
      CHECK(res.lip_history[h] <= res.lip_history[h - 1] + 1e-12);
    }
    CHECK(res.lip_extended ==
          doctest::Approx(lipschitz_constant(inst.domain_points, res.values))
              .epsilon(1e-12));
  }
}

TEST_CASE("single unknown Euclidean extension matches the grid oracle") {
  Rng rng(60);
  const model::CurvatureClass cc(0.0, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    ExtensionInstance inst;
    const int known = 4 + rng.uniform_int(3);
    for (int i = 0; i < known + 1; ++i) {
      inst.domain_points.push_back(
          e2(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    }
    for (int i = 0; i < known; ++i) {
      inst.z_indices.push_back(i);
      inst.f_values.push_back(e2(rng.uniform(-0.5, 0.5),
                                 rng.uniform(-0.5, 0.5)));
    }
    inst.ball_center = e2(0, 0);
    inst.ball_radius = 1.0;
    const ExtensionResult res = extend(inst, cc);
    std::vector<double> scales;
    for (int i = 0; i < known; ++i) {
      scales.push_back(
          distance(inst.domain_points[known], inst.domain_points[i]));
    }
    const double oracle =
        grid_minimax(inst.f_values, scales, 0.0, 0.0, 1.0);
    double solver = 0.0;
    for (int i = 0; i < known; ++i) {
      solver = std::max(
          solver, distance(res.values[known], inst.f_values[i]) / scales[i]);
    }
    CHECK(solver == doctest::Approx(oracle).epsilon(1e-4));
  }
}

TEST_CASE("random sphere-target instances are certified") {
  auto s2 = GeodesicSpace::sphere(2, 1.0);
  const SpacePoint pole = make_point(s2, Eigen::Vector3d(1, 0, 0));
  BallSampler domain(e2(0, 0), 1.0);
  BallSampler target(pole, M_PI / 8.0);
  Rng rng(70);
  const model::CurvatureClass cc(1.0, 0.5);
  int certified = 0;
  for (int i = 0; i < 20; ++i) {
    const ExtensionInstance inst =
        random_extension_instance(domain, target, 12, rng);
    if (extend(inst, cc).certified) ++certified;
  }
  CHECK(certified >= 19);
}

TEST_CASE("instance JSON round trip") {
  BallSampler domain(e2(0, 0), 1.0);
  BallSampler target(e2(0, 0), 0.5);
  Rng rng(80);
  const ExtensionInstance inst =
      random_extension_instance(domain, target, 8, rng);
  const ExtensionInstance back =
      extension_instance_from_json(extension_instance_to_json(inst));
  CHECK(back.domain_points.size() == inst.domain_points.size());
  CHECK(back.z_indices == inst.z_indices);
  CHECK((back.ball_center.coords - inst.ball_center.coords).norm() == 0.0);
  for (std::size_t i = 0; i < inst.f_values.size(); ++i) {
    CHECK((back.f_values[i].coords - inst.f_values[i].coords).norm() <
          1e-15);
  }
}
