#include "catlab/measures_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace catlab {

namespace {

constexpr double kWeightTol = 1e-12;

}  // namespace

DiscreteMeasure make_measure(std::vector<SpacePoint> atoms,
                             std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw Error("measure needs matching, nonempty atoms and weights");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw Error("negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightTol) {
    throw Error("weights must sum to 1");
  }
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (!same_space(atoms[0], atoms[i])) {
      throw IncompatibleSpaceError("measure atoms in different spaces");
    }
  }
  return DiscreteMeasure{std::move(atoms), std::move(weights)};
}

DiscreteMeasure dirac(const SpacePoint& x) { return make_measure({x}, {1.0}); }

DiscreteMeasure uniform_measure(std::vector<SpacePoint> atoms) {
  std::vector<double> w(atoms.size(), 1.0 / atoms.size());
  return make_measure(std::move(atoms), std::move(w));
}

DiscreteMeasure pushforward(
    const DiscreteMeasure& mu,
    const std::function<SpacePoint(const SpacePoint&)>& map) {
  std::vector<SpacePoint> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    SpacePoint img = map(mu.atoms[i]);
    bool merged = false;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if ((atoms[j].coords - img.coords).norm() <= 1e-12) {
        weights[j] += mu.weights[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      atoms.push_back(std::move(img));
      weights.push_back(mu.weights[i]);
    }
  }
  return DiscreteMeasure{std::move(atoms), std::move(weights)};
}

CouplingDiagnostics validate_coupling(const Coupling& plan, double tol) {
  CouplingDiagnostics diag;
  const auto m = static_cast<Eigen::Index>(plan.row_measure.atoms.size());
  const auto n = static_cast<Eigen::Index>(plan.col_measure.atoms.size());
  if (plan.matrix.rows() != m || plan.matrix.cols() != n) return diag;
  if (plan.matrix.minCoeff() < -tol) return diag;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double v = std::abs(plan.matrix.row(i).sum() - plan.row_measure.weights[i]);
    if (v > diag.worst_row_violation) {
      diag.worst_row_violation = v;
      diag.worst_row = static_cast<int>(i);
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double v = std::abs(plan.matrix.col(j).sum() - plan.col_measure.weights[j]);
    if (v > diag.worst_col_violation) {
      diag.worst_col_violation = v;
      diag.worst_col = static_cast<int>(j);
    }
  }
  diag.ok = diag.worst_row_violation <= tol && diag.worst_col_violation <= tol;
  return diag;
}

TransportResult wasserstein(double p, const DiscreteMeasure& mu1,
                            const DiscreteMeasure& mu2) {
  if (p < 1.0) throw Error("wasserstein needs p >= 1");
  if (!same_space(mu1.atoms.front(), mu2.atoms.front())) {
    throw IncompatibleSpaceError("wasserstein across different spaces");
  }
  const int m = static_cast<int>(mu1.atoms.size());
  const int n = static_cast<int>(mu2.atoms.size());

  Eigen::MatrixXd cost(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      cost(i, j) = std::pow(distance(mu1.atoms[i], mu2.atoms[j]), p);
    }
  }

  // Successive shortest paths with Johnson potentials. Nodes: rows 0..m-1,
  // cols m..m+n-1. Potentials keep every residual reduced cost >= 0.
  const int nodes = m + n;
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m, n);
  std::vector<double> pot(nodes, 0.0);
  std::vector<double> rem_supply(mu1.weights);
  std::vector<double> rem_demand(mu2.weights);

  auto remaining = [&]() {
    return std::accumulate(rem_supply.begin(), rem_supply.end(), 0.0);
  };

  while (remaining() > 1e-14) {
    std::vector<double> dist(nodes, inf);
    std::vector<int> parent(nodes, -1);
    std::vector<bool> done(nodes, false);
    for (int i = 0; i < m; ++i) {
      if (rem_supply[i] > 1e-14) dist[i] = 0.0;
    }
    int target = -1;
    while (true) {
      int cur = -1;
      double best = inf;
      for (int v = 0; v < nodes; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          cur = v;
        }
      }
      if (cur < 0) break;
      done[cur] = true;
      if (cur >= m && rem_demand[cur - m] > 1e-14) {
        target = cur;
        break;
      }
      if (cur < m) {
        const int i = cur;
        for (int j = 0; j < n; ++j) {
          const double rc =
              std::max(0.0, cost(i, j) + pot[i] - pot[m + j]);
          if (dist[i] + rc < dist[m + j]) {
            dist[m + j] = dist[i] + rc;
            parent[m + j] = i;
          }
        }
      } else {
        const int j = cur - m;
        for (int i = 0; i < m; ++i) {
          if (x(i, j) <= 0.0) continue;
          const double rc =
              std::max(0.0, -(cost(i, j) + pot[i] - pot[m + j]));
          if (dist[m + j] + rc < dist[i]) {
            dist[i] = dist[m + j] + rc;
            parent[i] = m + j;
          }
        }
      }
    }
    if (target < 0) {
      throw SolverError("transport solver: no augmenting path");
    }

    // Bottleneck along the path.
    double delta = rem_demand[target - m];
    for (int v = target; parent[v] != -1; v = parent[v]) {
      const int u = parent[v];
      if (v < m) delta = std::min(delta, x(v, u - m));  // backward arc
    }
    {
      int origin = target;
      while (parent[origin] != -1) origin = parent[origin];
      delta = std::min(delta, rem_supply[origin]);
    }

    for (int v = target; parent[v] != -1; v = parent[v]) {
      const int u = parent[v];
      if (v >= m) {
        x(u, v - m) += delta;  // forward row->col
      } else {
        x(v, u - m) -= delta;  // backward col->row
      }
    }
    {
      int origin = target;
      while (parent[origin] != -1) origin = parent[origin];
      rem_supply[origin] -= delta;
    }
    rem_demand[target - m] -= delta;

    // min(inf, dt) = dt also keeps arcs into unreached nodes feasible
    const double dt = dist[target];
    for (int v = 0; v < nodes; ++v) pot[v] += std::min(dist[v], dt);
  }

  TransportResult result;
  result.plan = Coupling{mu1, mu2, x};
  result.row_duals = Eigen::VectorXd(m);
  result.col_duals = Eigen::VectorXd(n);
  for (int i = 0; i < m; ++i) result.row_duals[i] = -pot[i];
  for (int j = 0; j < n; ++j) result.col_duals[j] = pot[m + j];
  result.cost = std::pow((cost.array() * x.array()).sum(), 1.0 / p);
  return result;
}

double certificate_gap(const TransportResult& result, double p) {
  const auto& mu1 = result.plan.row_measure;
  const auto& mu2 = result.plan.col_measure;
  double gap = 0.0;
  for (std::size_t i = 0; i < mu1.atoms.size(); ++i) {
    for (std::size_t j = 0; j < mu2.atoms.size(); ++j) {
      const double rc = std::pow(distance(mu1.atoms[i], mu2.atoms[j]), p) -
                        result.row_duals[i] - result.col_duals[j];
      gap = std::max(gap, -rc);  // dual feasibility
      gap = std::max(gap, std::abs(rc * result.plan.matrix(i, j)));  // slackness
    }
  }
  return gap;
}

DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  SpacePtr space = space_from_json(j.at("space"));
  std::vector<SpacePoint> atoms;
  for (const auto& a : j.at("atoms")) {
    Eigen::VectorXd c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i].get<double>();
    atoms.push_back(make_point(space, std::move(c)));
  }
  std::vector<double> weights = j.at("weights").get<std::vector<double>>();
  return make_measure(std::move(atoms), std::move(weights));
}

nlohmann::json measure_to_json(const DiscreteMeasure& mu) {
  nlohmann::json j;
  j["space"] = space_to_json(*mu.space());
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : mu.atoms) {
    std::vector<double> c(a.coords.data(), a.coords.data() + a.coords.size());
    j["atoms"].push_back(c);
  }
  j["weights"] = mu.weights;
  return j;
}

}  // namespace catlab
