#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "catlab/barycenter.hpp"
#include "catlab/model_space.hpp"
#include "catlab/rng.hpp"

namespace catlab {

// Outcome of one inequality trial.
struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool passed = false; // slack >= -tol
  double tol = 0.0;
  std::string fingerprint;
};

CheckReport make_report(std::string name, double lhs, double rhs, double tol,
                        std::string fingerprint);

std::string trial_fingerprint(const std::string& name, std::uint64_t seed,
                              int index, const std::string& params = "");

// --- single-instance checks ----------------------------------------------

// d(z,gamma(t))^2 <= (1-t) d(z,x)^2 + t d(z,y)^2 - (k/2) t(1-t) d(x,y)^2
CheckReport check_uniform_convexity(const model::CurvatureClass& cc,
                                    const SpacePoint& x, const SpacePoint& y,
                                    const SpacePoint& z, double t, double tol,
                                    std::string fingerprint);

// (1 - cos_kappa d(x,y)) / sqrt(cos_kappa d(x,o) cos_kappa d(y,o) - 1/2)
double kendall_phi(const SpacePoint& x, const SpacePoint& y,
                   const SpacePoint& o, double kappa);

// Convexity of (x,y) -> kendall_phi along a pair of geodesics: compares the
// value at parameter u = (1-a)s + a t against the chord.
CheckReport check_phi_convexity(double kappa, const SpacePoint& o,
                                const SpacePoint& lambda0,
                                const SpacePoint& lambda1,
                                const SpacePoint& mu0, const SpacePoint& mu1,
                                double s, double t, double a, double tol,
                                std::string fingerprint);

// Geodesic quadruple on the unit 2-sphere cap {x in S^2 : x_1 > h}: the two
// barred geodesics share a basepoint and speed, as do the underlined ones.
struct SphereCapQuadruple {
  Eigen::Vector3d x;  // common basepoint of lambda_bar / lambda_under
  Eigen::Vector3d y;  // common basepoint of mu_bar / mu_under
  Eigen::Vector3d u_bar, u_under;  // velocities at x, equal norms
  Eigen::Vector3d v_bar, v_under;  // velocities at y, equal norms
};

// Second central finite difference at t = 0 of
//   Psi(t) = |lambda_bar(t) - mu_bar(t)|^2
//          / (2 (lambda_under_1(t) mu_under_1(t) - h_tilde^2)^{1/p}),
// p = 1/(1 - h_tilde^2); reported against lhs = 0.
CheckReport check_spcalc_psi(double h, double h_tilde,
                             const SphereCapQuadruple& quad, double step,
                             double tol, std::string fingerprint);

// int d(z,x)^2 dmu >= d(z,B(mu))^2 + (k/2) int d(B(mu),x)^2 dmu
CheckReport check_variance(const model::CurvatureClass& cc,
                           const DiscreteMeasure& mu, const SpacePoint& z,
                           double tol, std::string fingerprint);

// Registered certified-convex test functions for Jensen's inequality.
struct ConvexTestFunction {
  enum class Kind { SquaredDistanceToPoint, DistanceToSet, EuclideanAffine };

  Kind kind;
  SpacePoint anchor;                 // SquaredDistanceToPoint
  std::optional<ConvexSet> set;      // DistanceToSet
  Eigen::VectorXd affine_direction;  // EuclideanAffine
  double affine_offset = 0.0;

  double operator()(const SpacePoint& x) const;

  static ConvexTestFunction squared_distance_to(SpacePoint anchor);
  static ConvexTestFunction distance_to(ConvexSet set);
  static ConvexTestFunction affine(Eigen::VectorXd direction, double offset);
};

// phi(B(mu)) <= int phi dmu
CheckReport check_jensen(const DiscreteMeasure& mu,
                         const ConvexTestFunction& phi, double tol,
                         std::string fingerprint);

struct LipschitzCheckOutcome {
  CheckReport report;
  double ratio = 0.0;      // d(B(mu1),B(mu2)) / transport distance
  double transport = 0.0;  // W2 (kappa > 0) or W1 (kappa <= 0)
};

// d(B(mu1),B(mu2)) <= Gamma W2(mu1,mu2)   (kappa > 0)
// d(B(mu1),B(mu2)) <= W1(mu1,mu2)         (kappa <= 0)
LipschitzCheckOutcome check_barycenter_lipschitz(
    const model::CurvatureClass& cc, const DiscreteMeasure& mu1,
    const DiscreteMeasure& mu2, double tol, std::string fingerprint);

// Z_0, ..., Z_n with Z_{i-1} the conditional barycenter of Z_i.
struct MartingaleInstance {
  Filtration filtration;
  std::vector<std::vector<SpacePoint>> maps;
  SpacePoint ball_center;
  double ball_radius = 0.0;
};

// Throws if the martingale property or the ball constraint fails.
void validate_martingale(const MartingaleInstance& inst, double tol = 1e-8);

// (k/2) sum_i int d(Z_i,Z_{i-1})^2 dmu <= int d(Z_n,z)^2 dmu - int d(Z_0,z)^2 dmu
CheckReport check_pisier(const model::CurvatureClass& cc,
                         const MartingaleInstance& inst, const SpacePoint& z,
                         double tol, std::string fingerprint);

// --- randomized sweeps ----------------------------------------------------

struct SweepResult {
  std::vector<CheckReport> reports;
  // For the barycenter-Lipschitz sweep: extreme observed contraction ratios.
  double max_ratio = 0.0;
  double min_slack = std::numeric_limits<double>::infinity();

  int failures() const;
};

// Shared helpers for instance generation (documented distributions).
std::vector<double> dirichlet_weights(int n, Rng& rng);
DiscreteMeasure random_measure(const BallSampler& sampler, int max_support,
                               Rng& rng);
MartingaleInstance random_martingale(const BallSampler& sampler,
                                     int max_ground, int max_levels, Rng& rng);

SweepResult sweep_uniform_convexity(const model::CurvatureClass& cc,
                                    const SpacePoint& center, double radius,
                                    int trials, std::uint64_t seed, double tol);

SweepResult sweep_phi_convexity(const model::CurvatureClass& cc,
                                const SpacePoint& o, double r, int trials,
                                std::uint64_t seed, double tol);

SweepResult sweep_spcalc(double h, double h_tilde, int trials,
                         std::uint64_t seed, double step, double tol);

SweepResult sweep_variance(const model::CurvatureClass& cc,
                           const SpacePoint& center, double radius, int trials,
                           std::uint64_t seed, double tol, bool z_at_center);

SweepResult sweep_jensen(const model::CurvatureClass& cc,
                         const SpacePoint& center, double radius, int trials,
                         std::uint64_t seed, double tol);

SweepResult sweep_barycenter_lipschitz(const model::CurvatureClass& cc,
                                       const SpacePoint& center, double radius,
                                       int trials, std::uint64_t seed,
                                       double tol);

SweepResult sweep_pisier(const model::CurvatureClass& cc,
                         const SpacePoint& center, double radius, int trials,
                         std::uint64_t seed, double tol);

}  // namespace catlab
