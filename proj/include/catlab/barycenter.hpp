#pragma once

#include <vector>

#include "catlab/measures_transport.hpp"

namespace catlab {

double frechet_objective(const SpacePoint& z, const DiscreteMeasure& mu);

struct BarycenterResult {
  SpacePoint point;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

struct BarycenterOptions {
  double gradient_tol = 1e-10;
  int max_iterations = 100000;
};

// Unique minimizer of z -> sum w_i d(z, x_i)^2 in the small-ball regime.
// Euclidean spaces use the closed-form weighted mean (zero iterations);
// everything else runs Riemannian gradient descent with Armijo backtracking
// from the chart-extrinsic mean.
BarycenterResult barycenter(const DiscreteMeasure& mu,
                            const BarycenterOptions& opts = {});

// Convex subsets whose convexity is guaranteed by construction.
struct ConvexSet {
  enum class Kind { Segment, Ball };

  Kind kind;
  SpacePoint a, b;     // segment endpoints
  SpacePoint center;   // ball
  double radius = 0.0;

  static ConvexSet segment(SpacePoint from, SpacePoint to);
  static ConvexSet ball(SpacePoint center, double radius);
};

// Nearest point of the set.
SpacePoint orthogonal_project(const ConvexSet& set, const SpacePoint& x);
double distance_to_set(const ConvexSet& set, const SpacePoint& x);

// Nested partitions of a finite ground set with a full-support base measure.
struct Filtration {
  int ground_size = 0;
  // levels[l] is the partition at level l (coarsest first); each atom is a
  // sorted list of ground-set indices.
  std::vector<std::vector<std::vector<int>>> levels;
  std::vector<double> base_weights;
};

// Validates partitions, refinement, and full support.
Filtration make_filtration(int ground_size,
                           std::vector<std::vector<std::vector<int>>> levels,
                           std::vector<double> base_weights);

// Per-element barycenter of the restriction of the image measure to the
// atom of the given level containing that element; constant on atoms.
std::vector<SpacePoint> conditional_barycenter(
    const std::vector<SpacePoint>& zmap, const Filtration& f, int level);

}  // namespace catlab
