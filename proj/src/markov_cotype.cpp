#include "catlab/markov_cotype.hpp"

#include <algorithm>
#include <cmath>

namespace catlab {

namespace {

Eigen::MatrixXd pairwise_sq_distances(const std::vector<SpacePoint>& pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = distance(pts[i], pts[j]);
      d2(i, j) = d2(j, i) = d * d;
    }
  }
  return d2;
}

}  // namespace

ChainDiagnostics validate_chain(const ReversibleChain& chain, double tol) {
  ChainDiagnostics diag;
  const int n = chain.size();
  if (chain.a.rows() != n || chain.a.cols() != n || n == 0) return diag;
  diag.worst_negative_entry =
      std::max(0.0, -std::min(chain.a.minCoeff(), chain.pi.minCoeff()));
  diag.pi_sum_violation = std::abs(chain.pi.sum() - 1.0);
  for (int i = 0; i < n; ++i) {
    diag.worst_row_sum_violation = std::max(
        diag.worst_row_sum_violation, std::abs(chain.a.row(i).sum() - 1.0));
    for (int j = 0; j < n; ++j) {
      diag.worst_reversibility_violation =
          std::max(diag.worst_reversibility_violation,
                   std::abs(chain.pi[i] * chain.a(i, j) -
                            chain.pi[j] * chain.a(j, i)));
    }
  }
  diag.ok = diag.worst_negative_entry <= tol &&
            diag.pi_sum_violation <= tol &&
            diag.worst_row_sum_violation <= tol &&
            diag.worst_reversibility_violation <= tol;
  return diag;
}

Eigen::MatrixXd cesaro_average(const Eigen::MatrixXd& a, int t) {
  if (t < 1) throw Error("cesaro_average needs t >= 1");
  if (a.rows() != a.cols()) throw Error("stochastic matrix must be square");
  Eigen::MatrixXd power = a;
  Eigen::MatrixXd sum = a;
  for (int s = 2; s <= t; ++s) {
    power = power * a;
    sum += power;
  }
  return sum / t;
}

ReversibleChain random_reversible_chain(int n, Rng& rng) {
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      s(i, j) = s(j, i) = rng.uniform();
    }
  }
  ReversibleChain chain;
  chain.pi = Eigen::VectorXd(n);
  chain.a = Eigen::MatrixXd(n, n);
  const double total = s.sum();
  for (int i = 0; i < n; ++i) {
    const double row = s.row(i).sum();
    chain.pi[i] = row / total;
    chain.a.row(i) = s.row(i) / row;
  }
  return chain;
}

MarkovTypeRatio markov_type_ratio(const PointConfiguration& config,
                                  const ReversibleChain& chain, int t) {
  const int n = chain.size();
  if (static_cast<int>(config.points.size()) != n) {
    throw Error("configuration size does not match the chain");
  }
  if (t < 1) throw Error("markov_type_ratio needs t >= 1");
  const Eigen::MatrixXd d2 = pairwise_sq_distances(config.points);
  Eigen::MatrixXd at = Eigen::MatrixXd::Identity(n, n);
  for (int s = 0; s < t; ++s) at = at * chain.a;

  double numerator = 0.0;
  double denominator = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      numerator += chain.pi[i] * at(i, j) * d2(i, j);
      denominator += chain.pi[i] * chain.a(i, j) * d2(i, j);
    }
  }
  denominator *= t;

  MarkovTypeRatio out;
  if (denominator <= 0.0) {
    if (numerator <= 0.0) {
      out.ratio = 1.0;  // both-zero convention, flagged
      out.degenerate = true;
    } else {
      out.ratio = std::numeric_limits<double>::max();
      out.infinite = true;
    }
  } else {
    out.ratio = numerator / denominator;
  }
  return out;
}

std::vector<SpacePoint> cotype_witness(const PointConfiguration& config,
                                       const ReversibleChain& chain, int t) {
  const int n = chain.size();
  if (static_cast<int>(config.points.size()) != n) {
    throw Error("configuration size does not match the chain");
  }
  const Eigen::MatrixXd avg = cesaro_average(chain.a, t);
  std::vector<SpacePoint> witness;
  witness.reserve(n);
  for (int i = 0; i < n; ++i) {
    // merge atoms with negligible weight to keep the solver support clean
    std::vector<SpacePoint> atoms;
    std::vector<double> weights;
    double kept = 0.0;
    for (int j = 0; j < n; ++j) {
      if (avg(i, j) > 1e-15) {
        atoms.push_back(config.points[j]);
        weights.push_back(avg(i, j));
        kept += avg(i, j);
      }
    }
    for (double& w : weights) w /= kept;
    witness.push_back(barycenter(make_measure(atoms, weights)).point);
  }
  return witness;
}

CheckReport cotype_check(const PointConfiguration& config,
                         const ReversibleChain& chain, int t,
                         const std::vector<SpacePoint>& witness,
                         const model::CurvatureClass& cc, double tol,
                         std::string fingerprint) {
  const int n = chain.size();
  if (static_cast<int>(witness.size()) != n) {
    throw Error("witness size does not match the chain");
  }
  const model::EffectiveConstants ec = model::effective_constants(cc);
  const double big_n = 16.0 * ec.gamma * ec.gamma * (2.0 / ec.k) + 1.0;

  const Eigen::MatrixXd dx2 = pairwise_sq_distances(config.points);
  const Eigen::MatrixXd dy2 = pairwise_sq_distances(witness);
  const Eigen::MatrixXd avg = cesaro_average(chain.a, t);

  double lhs = 0.0;
  double smoothed = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dxy = distance(config.points[i], witness[i]);
    lhs += chain.pi[i] * dxy * dxy;
    for (int j = 0; j < n; ++j) {
      lhs += t * chain.pi[i] * chain.a(i, j) * dy2(i, j);
      smoothed += chain.pi[i] * avg(i, j) * dx2(i, j);
    }
  }
  return make_report("cotype", lhs, big_n * big_n * smoothed, tol,
                     std::move(fingerprint));
}

SweepResult sweep_markov_type(const SpacePoint& center, double radius,
                              int max_points, int max_time, int trials,
                              std::uint64_t seed, double tol) {
  BallSampler sampler(center, radius);
  SweepResult out;
  out.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    const int n = 2 + rng.uniform_int(std::max(1, max_points - 1));
    const int t = 1 + rng.uniform_int(max_time);
    PointConfiguration config;
    config.ball_center = center;
    config.ball_radius = radius;
    for (int p = 0; p < n; ++p) config.points.push_back(sampler.sample(rng));
    const ReversibleChain chain = random_reversible_chain(n, rng);
    const MarkovTypeRatio r = markov_type_ratio(config, chain, t);
    std::string fp = trial_fingerprint("markov_type", seed, i);
    if (r.degenerate) fp += ":degenerate";
    // Markov type 2 with M = 1: ratio <= 1.
    auto rep = make_report(
        "markov_type",
        r.infinite ? std::numeric_limits<double>::infinity() : r.ratio, 1.0,
        tol, std::move(fp));
    out.min_slack = std::min(out.min_slack, rep.slack);
    out.reports.push_back(std::move(rep));
  }
  return out;
}

CotypeSweepResult sweep_cotype(const model::CurvatureClass& cc,
                               const SpacePoint& center, double radius,
                               int max_points, int max_time, int trials,
                               std::uint64_t seed, double tol) {
  BallSampler sampler(center, radius);
  CotypeSweepResult out;
  out.sweep.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    const int n = 2 + rng.uniform_int(std::max(1, max_points - 1));
    const int t = 1 + rng.uniform_int(max_time);
    PointConfiguration config;
    config.ball_center = center;
    config.ball_radius = radius;
    for (int p = 0; p < n; ++p) config.points.push_back(sampler.sample(rng));
    const ReversibleChain chain = random_reversible_chain(n, rng);
    const auto witness = cotype_witness(config, chain, t);
    auto rep = cotype_check(config, chain, t, witness, cc, tol,
                            trial_fingerprint("cotype", seed, i));
    const model::EffectiveConstants ec = model::effective_constants(cc);
    const double big_n = 16.0 * ec.gamma * ec.gamma * (2.0 / ec.k) + 1.0;
    const double smoothed = rep.rhs / (big_n * big_n);
    if (smoothed > 1e-15) {
      out.max_required_n =
          std::max(out.max_required_n, std::sqrt(rep.lhs / smoothed));
    }
    out.sweep.min_slack = std::min(out.sweep.min_slack, rep.slack);
    out.sweep.reports.push_back(std::move(rep));
  }
  return out;
}

nlohmann::json chain_to_json(const ReversibleChain& chain) {
  nlohmann::json j;
  j["pi"] = std::vector<double>(chain.pi.data(), chain.pi.data() + chain.pi.size());
  j["a"] = nlohmann::json::array();
  for (int i = 0; i < chain.size(); ++i) {
    j["a"].push_back(std::vector<double>(chain.a.row(i).begin(),
                                         chain.a.row(i).end()));
  }
  return j;
}

ReversibleChain chain_from_json(const nlohmann::json& j) {
  const auto pi = j.at("pi").get<std::vector<double>>();
  const int n = static_cast<int>(pi.size());
  ReversibleChain chain;
  chain.pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), n);
  chain.a = Eigen::MatrixXd(n, n);
  const auto& rows = j.at("a");
  if (static_cast<int>(rows.size()) != n) throw Error("chain matrix shape");
  for (int i = 0; i < n; ++i) {
    const auto row = rows[i].get<std::vector<double>>();
    if (static_cast<int>(row.size()) != n) throw Error("chain matrix shape");
    for (int k = 0; k < n; ++k) chain.a(i, k) = row[k];
  }
  return chain;
}

}  // namespace catlab
