#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "catlab/errors.hpp"
#include "catlab/model_space.hpp"

#include "json.hpp"

namespace catlab {

struct GeodesicSpace;
using SpacePtr = std::shared_ptr<const GeodesicSpace>;

// A concrete geodesic space: Euclidean R^n, sphere S^n(kappa) embedded with
// radius 1/sqrt(kappa), hyperbolic H^n (hyperboloid model, coordinate 0
// timelike), or a finite l2-product of such. Product points concatenate the
// factor chart coordinates.
struct GeodesicSpace {
  enum class Kind { Euclidean, Sphere, Hyperbolic, Product };

  Kind kind = Kind::Euclidean;
  int dim = 0;         // intrinsic dimension of a non-product factor
  double kappa = 0.0;  // curvature of a non-product factor
  std::vector<SpacePtr> factors;

  static SpacePtr euclidean(int n);
  static SpacePtr sphere(int n, double kappa);
  static SpacePtr hyperbolic(int n, double kappa);
  static SpacePtr product(std::vector<SpacePtr> factors);

  int ambient_dim() const;
  int intrinsic_dim() const;
  // The kappa for which the space is CAT(kappa): max over factors.
  double curvature_upper_bound() const;
  model::ExtendedReal model_diameter() const;

  bool operator==(const GeodesicSpace& other) const;
};

struct SpacePoint {
  SpacePtr space;
  Eigen::VectorXd coords;
};

// Validates the chart constraint (sphere/hyperboloid equation within 1e-9)
// and returns the point with the constraint re-tightened.
SpacePoint make_point(SpacePtr space, Eigen::VectorXd coords);

// Nearest chart point for raw ambient coordinates (normalization per factor).
SpacePoint project_to_chart(SpacePtr space, const Eigen::VectorXd& raw);

bool same_space(const SpacePoint& a, const SpacePoint& b);

double distance(const SpacePoint& x, const SpacePoint& y);

// The point gamma(t) on the minimizing geodesic from x to y.
SpacePoint geodesic_point(const SpacePoint& x, const SpacePoint& y, double t);

// Angle at `vertex` between the geodesics toward x and y.
double angle_at(const SpacePoint& vertex, const SpacePoint& x,
                const SpacePoint& y);

// Tangent vector at `base` pointing to `target`, with metric norm d(base,target).
Eigen::VectorXd log_map(const SpacePoint& base, const SpacePoint& target);

// Endpoint of the geodesic from `base` with initial velocity `tangent`.
SpacePoint exp_map(const SpacePoint& base, const Eigen::VectorXd& tangent);

double tangent_inner(const SpacePoint& base, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& w);
double tangent_norm(const SpacePoint& base, const Eigen::VectorXd& v);

// Metric-orthonormal basis of the tangent space at `p` (ambient vectors).
std::vector<Eigen::VectorXd> tangent_basis(const SpacePoint& p);

class Rng;

// Draws points with d(center, p) <= radius. Direction uniform in the tangent
// space; radial density proportional to the sphere area of the model space
// M^d(kappa_max) at the intrinsic dimension d, inverted from a precomputed
// table (no rejection, so trial counts are deterministic).
class BallSampler {
 public:
  BallSampler(SpacePoint center, double radius);
  SpacePoint sample(Rng& rng) const;

  const SpacePoint& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  SpacePoint center_;
  double radius_;
  std::vector<Eigen::VectorXd> basis_;
  std::vector<double> cdf_;
};

// Deterministic sample of `count` points with d(center, p) <= radius;
// identical (seed, count) yields identical output.
std::vector<SpacePoint> sample_ball(const SpacePoint& center, double radius,
                                    std::uint64_t seed, int count);

SpacePtr space_from_json(const nlohmann::json& j);
nlohmann::json space_to_json(const GeodesicSpace& space);

}  // namespace catlab
