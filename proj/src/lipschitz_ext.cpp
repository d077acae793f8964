#include "catlab/lipschitz_ext.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace catlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd source_distances(const std::vector<SpacePoint>& pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = distance(pts[i], pts[j]);
    }
  }
  return d;
}

double lip_from_matrix(const Eigen::MatrixXd& src,
                       const std::vector<SpacePoint>& values) {
  const int n = static_cast<int>(values.size());
  double lip = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dt = distance(values[i], values[j]);
      if (src(i, j) <= 1e-15) {
        if (dt > 1e-12) return kInf;
        continue;
      }
      lip = std::max(lip, dt / src(i, j));
    }
  }
  return lip;
}

SpacePoint clamp_to_ball(const SpacePoint& v, const SpacePoint& center,
                         double radius) {
  const double d = distance(center, v);
  if (d <= radius) return v;
  return geodesic_point(center, v, radius / d);
}

}  // namespace

double lipschitz_constant(const std::vector<SpacePoint>& points,
                          const std::vector<SpacePoint>& values) {
  if (points.size() != values.size()) {
    throw Error("lipschitz_constant: point/value count mismatch");
  }
  return lip_from_matrix(source_distances(points), values);
}

SpacePoint weighted_minimax_point(const std::vector<SpacePoint>& targets,
                                  const std::vector<double>& scales,
                                  const SpacePoint& init,
                                  const SpacePoint& ball_center,
                                  double ball_radius) {
  if (targets.empty() || targets.size() != scales.size()) {
    throw Error("weighted_minimax_point: bad target list");
  }
  const int m = static_cast<int>(targets.size());

  auto true_max = [&](const SpacePoint& v) {
    double f = 0.0;
    for (int j = 0; j < m; ++j) {
      f = std::max(f, distance(v, targets[j]) / scales[j]);
    }
    return f;
  };

  // (1/beta) log sum exp(beta f_j), gradient in the tangent space at v.
  auto smooth_eval = [&](const SpacePoint& v, double beta,
                         Eigen::VectorXd* grad) {
    std::vector<double> f(m), dist(m);
    double fmax = 0.0;
    for (int j = 0; j < m; ++j) {
      dist[j] = distance(v, targets[j]);
      f[j] = dist[j] / scales[j];
      fmax = std::max(fmax, f[j]);
    }
    double z = 0.0;
    if (grad) grad->setZero(v.coords.size());
    for (int j = 0; j < m; ++j) {
      const double w = std::exp(beta * (f[j] - fmax));
      z += w;
      if (grad && dist[j] > 1e-12) {
        // grad of d(v, c_j)/s_j is -log_map(v, c_j) / (d s_j)
        *grad += w * (-1.0 / (dist[j] * scales[j])) * log_map(v, targets[j]);
      }
    }
    if (grad) *grad /= z;
    return fmax + std::log(z) / beta;
  };

  SpacePoint v = clamp_to_ball(init, ball_center, ball_radius);
  SpacePoint best = v;
  double best_f = true_max(v);

  Eigen::VectorXd grad;
  // later stages need more iterations: steps shrink as the smoothing sharpens
  constexpr double kBetas[] = {64.0, 512.0, 4096.0, 32768.0, 262144.0};
  constexpr int kIters[] = {40, 60, 100, 160, 260};
  for (int stage = 0; stage < 5; ++stage) {
    const double beta = kBetas[stage];
    // warm-start the step: the usable step scales like 1/beta, so
    // restarting at 1.0 every iteration would cap per-stage movement
    double step = 1.0;
    for (int iter = 0; iter < kIters[stage]; ++iter) {
      const double fv = smooth_eval(v, beta, &grad);
      const double gn = tangent_norm(v, grad);
      if (gn < 1e-12) break;
      step = std::min(2.0 * step, 1.0);
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        SpacePoint cand = clamp_to_ball(exp_map(v, -step * grad), ball_center,
                                        ball_radius);
        if (smooth_eval(cand, beta, nullptr) <= fv - 1e-4 * step * gn * gn) {
          v = std::move(cand);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
      const double tf = true_max(v);
      if (tf < best_f) {
        best_f = tf;
        best = v;
      }
    }
    v = best;
  }

  // Nonsmooth polish. The smoothed descent stalls in the kinked valley of
  // the max at its smoothing offset; steepest descent for a max function
  // instead follows minus the minimum-norm element of the convex hull of
  // the epsilon-active gradients, which tracks the valley exactly.
  const auto min_norm_hull = [&](const std::vector<Eigen::VectorXd>& g,
                                 const SpacePoint& at) {
    const int k = static_cast<int>(g.size());
    Eigen::MatrixXd gram(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        gram(i, j) = gram(j, i) = tangent_inner(at, g[i], g[j]);
      }
    }
    // Caratheodory: the minimum-norm point lies in the hull of a small
    // subset, so enumerate subsets and keep the best feasible solution.
    Eigen::VectorXd best_lambda = Eigen::VectorXd::Zero(k);
    double best_sq = kInf;
    const int max_size = std::min(k, 4);
    std::vector<int> subset;
    auto consider = [&](const std::vector<int>& s) {
      const int ks = static_cast<int>(s.size());
      Eigen::MatrixXd m(ks, ks);
      for (int i = 0; i < ks; ++i) {
        for (int j = 0; j < ks; ++j) m(i, j) = gram(s[i], s[j]);
      }
      // minimize l^T m l subject to sum l = 1
      Eigen::MatrixXd kkt(ks + 1, ks + 1);
      kkt.setZero();
      kkt.topLeftCorner(ks, ks) = 2.0 * m;
      kkt.topRightCorner(ks, 1).setOnes();
      kkt.bottomLeftCorner(1, ks).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ks + 1);
      rhs[ks] = 1.0;
      const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
      if (!sol.allFinite()) return;
      const Eigen::VectorXd l = sol.head(ks);
      if (l.minCoeff() < -1e-12) return;
      const double sq = l.dot(m * l);
      if (sq < best_sq) {
        best_sq = sq;
        best_lambda.setZero();
        for (int i = 0; i < ks; ++i) best_lambda[s[i]] = l[i];
      }
    };
    std::function<void(int, int)> rec = [&](int start, int remaining) {
      if (!subset.empty()) consider(subset);
      if (remaining == 0) return;
      for (int j = start; j < k; ++j) {
        subset.push_back(j);
        rec(j + 1, remaining - 1);
        subset.pop_back();
      }
    };
    rec(0, max_size);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(g.front().size());
    for (int j = 0; j < k; ++j) p += best_lambda[j] * g[j];
    return p;
  };

  double atol = 1e-2 * std::max(best_f, 1e-6);
  double step_hint = 0.01 * std::max(ball_radius, 1e-3);
  for (int outer = 0; outer < 400 && atol > 1e-13 * std::max(best_f, 1e-6);
       ++outer) {
    std::vector<Eigen::VectorXd> g;
    for (int j = 0; j < m; ++j) {
      const double dj = distance(best, targets[j]);
      if (dj / scales[j] < best_f - atol || dj <= 1e-12) continue;
      g.push_back((-1.0 / (dj * scales[j])) * log_map(best, targets[j]));
    }
    if (g.empty()) break;
    const Eigen::VectorXd p = min_norm_hull(g, best);
    const double pn = tangent_norm(best, p);
    if (pn <= 1e-10) {
      atol *= 0.25;
      continue;
    }
    double t = std::min(2.0 * step_hint, 0.1 * std::max(ball_radius, 1e-3));
    bool moved = false;
    for (int bt = 0; bt < 50; ++bt) {
      SpacePoint cand =
          clamp_to_ball(exp_map(best, (-t / pn) * p), ball_center, ball_radius);
      const double f = true_max(cand);
      if (f < best_f - 1e-4 * t * pn) {
        best = std::move(cand);
        best_f = f;
        step_hint = t;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) atol *= 0.25;
  }
  return best;
}

ExtensionResult extend(const ExtensionInstance& instance,
                       const model::CurvatureClass& cc,
                       const ExtendOptions& opts) {
  const auto& pts = instance.domain_points;
  const int n = static_cast<int>(pts.size());
  const int nz = static_cast<int>(instance.z_indices.size());
  if (n == 0 || nz == 0) throw Error("extend: empty instance");
  if (static_cast<int>(instance.f_values.size()) != nz) {
    throw Error("extend: z_indices/f_values count mismatch");
  }
  std::vector<char> on_z(n, 0);
  for (int idx : instance.z_indices) {
    if (idx < 0 || idx >= n) throw Error("extend: z index out of range");
    if (on_z[idx]) throw Error("extend: duplicate z index");
    on_z[idx] = 1;
  }
  for (const auto& f : instance.f_values) {
    if (!same_space(f, instance.ball_center)) {
      throw IncompatibleSpaceError("extend: f value in the wrong space");
    }
    if (distance(f, instance.ball_center) > instance.ball_radius + 1e-9) {
      throw Error("extend: prescribed value outside the target ball");
    }
  }

  const Eigen::MatrixXd src = source_distances(pts);
  const ConvexSet ball =
      ConvexSet::ball(instance.ball_center, instance.ball_radius);

  ExtensionResult out;
  std::vector<SpacePoint> z_points;
  for (int zi = 0; zi < nz; ++zi) z_points.push_back(pts[instance.z_indices[zi]]);
  out.lip_original = lipschitz_constant(z_points, instance.f_values);

  // Initial guess: prescribed values on Z, the barycenter of the prescribed
  // values everywhere else.
  std::vector<SpacePoint> values;
  values.reserve(n);
  const SpacePoint fill =
      orthogonal_project(ball, barycenter(uniform_measure(instance.f_values)).point);
  for (int i = 0; i < n; ++i) values.push_back(fill);
  for (int zi = 0; zi < nz; ++zi) {
    values[instance.z_indices[zi]] = instance.f_values[zi];
  }
  std::vector<int> unknowns;
  for (int i = 0; i < n; ++i) {
    if (!on_z[i]) unknowns.push_back(i);
  }

  double lip = lip_from_matrix(src, values);
  out.lip_history.push_back(lip);

  // Phase 1: each unknown moves to the inverse-source-distance-weighted
  // barycenter of its nearest neighbors, projected onto the ball. A sweep is
  // kept only if it lowers the global constant.
  const int k = std::min(opts.neighbor_count, n - 1);
  for (int sweep = 0; sweep < opts.max_sweeps && !unknowns.empty(); ++sweep) {
    std::vector<SpacePoint> trial = values;
    for (int i : unknowns) {
      std::vector<int> order;
      for (int j = 0; j < n; ++j) {
        if (j != i && src(i, j) > 1e-15) order.push_back(j);
      }
      if (order.empty()) continue;
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return src(i, a) < src(i, b); });
      order.resize(std::min<std::size_t>(order.size(), k));
      std::vector<SpacePoint> atoms;
      std::vector<double> weights;
      double total = 0.0;
      for (int j : order) {
        atoms.push_back(trial[j]);
        weights.push_back(1.0 / src(i, j));
        total += weights.back();
      }
      for (double& w : weights) w /= total;
      trial[i] =
          orthogonal_project(ball, barycenter(make_measure(atoms, weights)).point);
    }
    const double trial_lip = lip_from_matrix(src, trial);
    if (trial_lip < lip - opts.improve_tol) {
      values = std::move(trial);
      lip = trial_lip;
      out.lip_history.push_back(lip);
    } else {
      break;
    }
  }

  // Phase 2: per-unknown minimax refinement. Each unknown is replaced by the
  // minimizer of its worst incident ratio with the other values held fixed;
  // this is exact (up to smoothing accuracy) for a single unknown.
  for (int sweep = 0; sweep < 10 && !unknowns.empty(); ++sweep) {
    bool changed = false;
    for (int i : unknowns) {
      std::vector<SpacePoint> targets;
      std::vector<double> scales;
      for (int j = 0; j < n; ++j) {
        if (j != i && src(i, j) > 1e-15) {
          targets.push_back(values[j]);
          scales.push_back(src(i, j));
        }
      }
      if (targets.empty()) continue;
      auto local = [&](const SpacePoint& v) {
        double f = 0.0;
        for (std::size_t j = 0; j < targets.size(); ++j) {
          f = std::max(f, distance(v, targets[j]) / scales[j]);
        }
        return f;
      };
      SpacePoint cand = weighted_minimax_point(
          targets, scales, values[i], instance.ball_center, instance.ball_radius);
      if (local(cand) < local(values[i]) - 1e-10) {
        values[i] = std::move(cand);
        changed = true;
      }
    }
    const double new_lip = lip_from_matrix(src, values);
    if (new_lip < lip - opts.improve_tol) {
      lip = new_lip;
      out.lip_history.push_back(lip);
    } else if (sweep > 0) {
      break;  // local refinements no longer move the global constant
    }
    if (!changed) break;
  }

  out.values = std::move(values);
  out.lip_extended = lip;
  const model::EffectiveConstants ec = model::effective_constants(cc);
  if (std::isinf(out.lip_original)) {
    out.ratio = kInf;
    out.certified = false;
  } else if (out.lip_original <= 1e-15) {
    out.ratio = out.lip_extended <= 1e-15 ? 1.0 : kInf;
    out.certified = out.lip_extended <= 1e-15;
  } else {
    out.ratio = out.lip_extended / out.lip_original;
    out.certified = out.ratio <= ec.c_ext * (1.0 + 1e-9);
  }
  return out;
}

ExtensionInstance random_extension_instance(const BallSampler& domain_sampler,
                                            const BallSampler& target_sampler,
                                            int max_points, Rng& rng) {
  if (max_points < 4) throw Error("random_extension_instance needs >= 4 points");
  const int n = 4 + rng.uniform_int(max_points - 3);
  ExtensionInstance inst;
  inst.ball_center = target_sampler.center();
  inst.ball_radius = target_sampler.radius();
  for (int i = 0; i < n; ++i) {
    inst.domain_points.push_back(domain_sampler.sample(rng));
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_int(i + 1)]);
  }
  const int nz = n / 2;
  inst.z_indices.assign(order.begin(), order.begin() + nz);
  std::sort(inst.z_indices.begin(), inst.z_indices.end());
  for (int zi = 0; zi < nz; ++zi) {
    inst.f_values.push_back(target_sampler.sample(rng));
  }
  return inst;
}

namespace {

nlohmann::json coords_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd coords_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<int>(v.size()));
}

}  // namespace

ExtensionInstance extension_instance_from_json(const nlohmann::json& j) {
  const SpacePtr domain = space_from_json(j.at("domain_space"));
  const SpacePtr target = space_from_json(j.at("target_space"));
  ExtensionInstance inst;
  for (const auto& c : j.at("domain_points")) {
    inst.domain_points.push_back(make_point(domain, coords_from_json(c)));
  }
  inst.z_indices = j.at("z_indices").get<std::vector<int>>();
  for (const auto& c : j.at("f_values")) {
    inst.f_values.push_back(make_point(target, coords_from_json(c)));
  }
  inst.ball_center = make_point(target, coords_from_json(j.at("ball_center")));
  inst.ball_radius = j.at("ball_radius").get<double>();
  return inst;
}

nlohmann::json extension_instance_to_json(const ExtensionInstance& inst) {
  nlohmann::json j;
  j["domain_space"] = space_to_json(*inst.domain_points.front().space);
  j["target_space"] = space_to_json(*inst.ball_center.space);
  j["domain_points"] = nlohmann::json::array();
  for (const auto& p : inst.domain_points) {
    j["domain_points"].push_back(coords_to_json(p.coords));
  }
  j["z_indices"] = inst.z_indices;
  j["f_values"] = nlohmann::json::array();
  for (const auto& p : inst.f_values) {
    j["f_values"].push_back(coords_to_json(p.coords));
  }
  j["ball_center"] = coords_to_json(inst.ball_center.coords);
  j["ball_radius"] = inst.ball_radius;
  return j;
}

nlohmann::json extension_result_to_json(const ExtensionResult& res) {
  nlohmann::json j;
  j["values"] = nlohmann::json::array();
  for (const auto& p : res.values) j["values"].push_back(coords_to_json(p.coords));
  j["lip_original"] = res.lip_original;
  j["lip_extended"] = res.lip_extended;
  j["ratio"] = res.ratio;
  j["certified"] = res.certified;
  j["lip_history"] = res.lip_history;
  return j;
}

}  // namespace catlab
