#pragma once

#include <Eigen/Dense>

#include "catlab/inequality_lab.hpp"

namespace catlab {

// Row-stochastic matrix reversible relative to the probability vector pi.
struct ReversibleChain {
  Eigen::VectorXd pi;
  Eigen::MatrixXd a;

  int size() const { return static_cast<int>(pi.size()); }
};

struct ChainDiagnostics {
  bool ok = false;
  double worst_row_sum_violation = 0.0;
  double worst_reversibility_violation = 0.0;
  double worst_negative_entry = 0.0;
  double pi_sum_violation = 0.0;
};

ChainDiagnostics validate_chain(const ReversibleChain& chain,
                                double tol = 1e-12);

// (1/t) sum_{s=1}^t A^s by repeated multiplication.
Eigen::MatrixXd cesaro_average(const Eigen::MatrixXd& a, int t);

// A = D^{-1} S for symmetric nonnegative S; pi proportional to row sums of S,
// so reversibility holds by construction.
ReversibleChain random_reversible_chain(int n, Rng& rng);

struct PointConfiguration {
  std::vector<SpacePoint> points;
  SpacePoint ball_center;
  double ball_radius = 0.0;
};

struct MarkovTypeRatio {
  double ratio = 0.0;
  bool infinite = false;    // denominator 0, numerator > 0
  bool degenerate = false;  // both sides 0 (ratio 1 by convention)
};

// R = [sum pi_i (A^t)_ij d(x_i,x_j)^2] / [t sum pi_i a_ij d(x_i,x_j)^2]
MarkovTypeRatio markov_type_ratio(const PointConfiguration& config,
                                  const ReversibleChain& chain, int t);

// Barycentric witness y_i = B(sum_j (Cesaro A)_ij delta_{x_j}).
std::vector<SpacePoint> cotype_witness(const PointConfiguration& config,
                                       const ReversibleChain& chain, int t);

// sum pi_i d(x_i,y_i)^2 + t sum pi_i a_ij d(y_i,y_j)^2
//   <= N^2 sum pi_i (Cesaro A)_ij d(x_i,x_j)^2,  N = 16 Gamma^2 (2/k) + 1.
CheckReport cotype_check(const PointConfiguration& config,
                         const ReversibleChain& chain, int t,
                         const std::vector<SpacePoint>& witness,
                         const model::CurvatureClass& cc, double tol,
                         std::string fingerprint);

// For each cotype trial, the minimal N that would have sufficed.
struct CotypeSweepResult {
  SweepResult sweep;
  double max_required_n = 0.0;
};

SweepResult sweep_markov_type(const SpacePoint& center, double radius,
                              int max_points, int max_time, int trials,
                              std::uint64_t seed, double tol);

CotypeSweepResult sweep_cotype(const model::CurvatureClass& cc,
                               const SpacePoint& center, double radius,
                               int max_points, int max_time, int trials,
                               std::uint64_t seed, double tol);

nlohmann::json chain_to_json(const ReversibleChain& chain);
ReversibleChain chain_from_json(const nlohmann::json& j);

}  // namespace catlab
