#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "catlab/geom_spaces.hpp"

namespace catlab {

// Finitely supported probability measure.
struct DiscreteMeasure {
  std::vector<SpacePoint> atoms;
  std::vector<double> weights;

  const SpacePtr& space() const { return atoms.front().space; }
};

// Validates nonnegativity, normalization within 1e-12, and a common space.
DiscreteMeasure make_measure(std::vector<SpacePoint> atoms,
                             std::vector<double> weights);

DiscreteMeasure dirac(const SpacePoint& x);
DiscreteMeasure uniform_measure(std::vector<SpacePoint> atoms);

// Image measure; numerically coincident images (coordinate distance <= 1e-12)
// are merged by weight addition.
DiscreteMeasure pushforward(
    const DiscreteMeasure& mu,
    const std::function<SpacePoint(const SpacePoint&)>& map);

struct Coupling {
  DiscreteMeasure row_measure;
  DiscreteMeasure col_measure;
  Eigen::MatrixXd matrix;
};

struct CouplingDiagnostics {
  bool ok = false;
  double worst_row_violation = 0.0;
  double worst_col_violation = 0.0;
  int worst_row = -1;
  int worst_col = -1;
};

CouplingDiagnostics validate_coupling(const Coupling& plan,
                                      double tol = 1e-10);

struct TransportResult {
  double cost;  // (sum d^p pi)^{1/p}
  Coupling plan;
  Eigen::VectorXd row_duals;
  Eigen::VectorXd col_duals;
};

// Exact Wasserstein-p distance by a successive-shortest-path transportation
// solver on the dense bipartite cost matrix d(x,y)^p. The returned duals
// certify optimality: all reduced costs >= -tol and complementary slackness
// on the support of the plan.
TransportResult wasserstein(double p, const DiscreteMeasure& mu1,
                            const DiscreteMeasure& mu2);

// Max violation of the dual optimality certificate of a transport result.
double certificate_gap(const TransportResult& result, double p);

DiscreteMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const DiscreteMeasure& mu);

}  // namespace catlab
