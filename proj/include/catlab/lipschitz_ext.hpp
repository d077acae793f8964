#pragma once

#include "catlab/inequality_lab.hpp"

namespace catlab {

// A finite extension problem: f is prescribed on the points indexed by
// z_indices and maps into the closed ball around ball_center.
struct ExtensionInstance {
  std::vector<SpacePoint> domain_points;
  std::vector<int> z_indices;
  std::vector<SpacePoint> f_values;  // one per entry of z_indices
  SpacePoint ball_center;
  double ball_radius = 0.0;
};

struct ExtensionResult {
  std::vector<SpacePoint> values;  // one per domain point, exact on Z
  double lip_original = 0.0;
  double lip_extended = 0.0;
  double ratio = 0.0;
  bool certified = false;  // ratio <= C_eps
  std::vector<double> lip_history;  // accepted sweep values, nonincreasing
};

// max over pairs of d_target(v_i, v_j) / d_source(p_i, p_j); 0 for constant
// maps, +infinity when duplicate domain points carry different values.
double lipschitz_constant(const std::vector<SpacePoint>& points,
                          const std::vector<SpacePoint>& values);

struct ExtendOptions {
  int neighbor_count = 4;
  int max_sweeps = 10000;
  double improve_tol = 1e-8;
};

// Heuristic solver: block-coordinate descent (each unknown moves to the
// inverse-distance-weighted barycenter of its nearest neighbors, projected
// onto the ball), followed by per-unknown minimax refinement via smoothed
// max descent. Certification threshold is C_eps from effective_constants;
// an uncertified result is returned, never hidden.
ExtensionResult extend(const ExtensionInstance& instance,
                       const model::CurvatureClass& cc,
                       const ExtendOptions& opts = {});

// Minimizer inside the ball of v -> max_j d(v, targets_j) / scales_j,
// by projected gradient descent on a log-sum-exp smoothing with ramped
// sharpness. Used by the refinement phase and by oracle comparisons.
SpacePoint weighted_minimax_point(const std::vector<SpacePoint>& targets,
                                  const std::vector<double>& scales,
                                  const SpacePoint& init,
                                  const SpacePoint& ball_center,
                                  double ball_radius);

ExtensionInstance random_extension_instance(const BallSampler& domain_sampler,
                                            const BallSampler& target_sampler,
                                            int max_points, Rng& rng);

ExtensionInstance extension_instance_from_json(const nlohmann::json& j);
nlohmann::json extension_instance_to_json(const ExtensionInstance& inst);
nlohmann::json extension_result_to_json(const ExtensionResult& res);

}  // namespace catlab
