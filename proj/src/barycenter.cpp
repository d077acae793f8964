#include "catlab/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace catlab {

namespace {

bool all_euclidean(const GeodesicSpace& s) {
  if (s.kind == GeodesicSpace::Kind::Euclidean) return true;
  if (s.kind != GeodesicSpace::Kind::Product) return false;
  for (const auto& f : s.factors) {
    if (!all_euclidean(*f)) return false;
  }
  return true;
}

SpacePoint extrinsic_mean_init(const DiscreteMeasure& mu) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mu.atoms.front().coords.size());
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    acc += mu.weights[i] * mu.atoms[i].coords;
  }
  try {
    return project_to_chart(mu.space(), acc);
  } catch (const Error&) {
    return mu.atoms.front();  // degenerate extrinsic mean
  }
}

}  // namespace

double frechet_objective(const SpacePoint& z, const DiscreteMeasure& mu) {
  double obj = 0.0;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    const double d = distance(z, mu.atoms[i]);
    obj += mu.weights[i] * d * d;
  }
  return obj;
}

BarycenterResult barycenter(const DiscreteMeasure& mu,
                            const BarycenterOptions& opts) {
  if (all_euclidean(*mu.space())) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(mu.atoms.front().coords.size());
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
      acc += mu.weights[i] * mu.atoms[i].coords;
    }
    BarycenterResult res{SpacePoint{mu.space(), std::move(acc)}, 0.0, 0.0, 0};
    res.objective = frechet_objective(res.point, mu);
    return res;
  }

  SpacePoint z = extrinsic_mean_init(mu);

  const model::ExtendedReal dk = mu.space()->model_diameter();
  if (!dk.unbounded) {
    for (const auto& a : mu.atoms) {
      if (distance(z, a) >= dk.value / 2.0 * (1.0 - 1e-9)) {
        throw RegimeError("barycenter support outside the uniqueness regime");
      }
    }
  }

  double obj = frechet_objective(z, mu);
  const int dim = static_cast<int>(z.coords.size());
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
      g += mu.weights[i] * log_map(z, mu.atoms[i]);
    }
    const double gn = 2.0 * tangent_norm(z, g);  // Riemannian gradient norm
    if (gn <= opts.gradient_tol) {
      return BarycenterResult{z, obj, gn, iter};
    }
    if (gn < 1e-4) {
      // Armijo decrements are below double precision here; the fixed-step
      // map is a contraction in the strongly convex regime.
      z = exp_map(z, 0.25 * g);
      obj = frechet_objective(z, mu);
      continue;
    }
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      SpacePoint cand = exp_map(z, step * g);
      const double cand_obj = frechet_objective(cand, mu);
      if (cand_obj <= obj - 1e-4 * step * gn * gn / 2.0) {
        z = std::move(cand);
        obj = cand_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      throw SolverError("barycenter: line search stalled at objective " +
                        std::to_string(obj));
    }
  }
  throw SolverError("barycenter: iteration cap reached without convergence");
}

ConvexSet ConvexSet::segment(SpacePoint from, SpacePoint to) {
  if (!same_space(from, to)) {
    throw IncompatibleSpaceError("segment endpoints in different spaces");
  }
  ConvexSet c{Kind::Segment, std::move(from), std::move(to), {}, 0.0};
  return c;
}

ConvexSet ConvexSet::ball(SpacePoint center, double radius) {
  if (radius < 0.0) throw Error("negative ball radius");
  ConvexSet c{Kind::Ball, {}, {}, std::move(center), radius};
  return c;
}

SpacePoint orthogonal_project(const ConvexSet& set, const SpacePoint& x) {
  switch (set.kind) {
    case ConvexSet::Kind::Segment: {
      // t -> d(x, gamma(t))^2 is convex, so its derivative
      // -<log_{gamma(t)} x, gamma'(t)> is nondecreasing; bisect on its sign.
      // (Bisection on the derivative resolves the flat minimum far better
      // than a direct search on the nearly quadratic objective.)
      if (distance(set.a, set.b) <= 1e-15) return set.a;
      auto deriv = [&](double t) {
        const SpacePoint g = geodesic_point(set.a, set.b, t);
        const Eigen::VectorXd vel = t <= 0.5
                                        ? (log_map(g, set.b) / (1.0 - t)).eval()
                                        : (-log_map(g, set.a) / t).eval();
        return -tangent_inner(g, log_map(g, x), vel);
      };
      if (deriv(0.0) >= 0.0) return set.a;
      if (deriv(1.0) <= 0.0) return set.b;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) <= 0.0 ? lo : hi) = mid;
      }
      return geodesic_point(set.a, set.b, 0.5 * (lo + hi));
    }
    case ConvexSet::Kind::Ball: {
      const double d = distance(set.center, x);
      if (d <= set.radius) return x;
      return geodesic_point(set.center, x, set.radius / d);
    }
  }
  throw Error("unsupported convex set kind");
}

double distance_to_set(const ConvexSet& set, const SpacePoint& x) {
  return distance(x, orthogonal_project(set, x));
}

Filtration make_filtration(int ground_size,
                           std::vector<std::vector<std::vector<int>>> levels,
                           std::vector<double> base_weights) {
  if (ground_size < 1 || levels.empty() ||
      static_cast<int>(base_weights.size()) != ground_size) {
    throw Error("malformed filtration");
  }
  double sum = 0.0;
  for (double w : base_weights) {
    if (w <= 0.0) throw Error("filtration base measure must have full support");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error("filtration base measure must sum to 1");
  }
  std::vector<int> prev_atom_of;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    std::vector<int> atom_of(ground_size, -1);
    for (std::size_t a = 0; a < levels[l].size(); ++a) {
      for (int w : levels[l][a]) {
        if (w < 0 || w >= ground_size || atom_of[w] != -1) {
          throw Error("level is not a partition of the ground set");
        }
        atom_of[w] = static_cast<int>(a);
      }
    }
    for (int w = 0; w < ground_size; ++w) {
      if (atom_of[w] == -1) throw Error("partition misses a ground element");
    }
    if (l > 0) {
      // Each finer atom must stay inside one coarser atom.
      for (const auto& atom : levels[l]) {
        for (int w : atom) {
          if (prev_atom_of[w] != prev_atom_of[atom.front()]) {
            throw Error("levels are not nested");
          }
        }
      }
    }
    prev_atom_of = std::move(atom_of);
  }
  return Filtration{ground_size, std::move(levels), std::move(base_weights)};
}

std::vector<SpacePoint> conditional_barycenter(
    const std::vector<SpacePoint>& zmap, const Filtration& f, int level) {
  if (static_cast<int>(zmap.size()) != f.ground_size) {
    throw Error("zmap size does not match the filtration ground set");
  }
  if (level < 0 || level >= static_cast<int>(f.levels.size())) {
    throw Error("filtration level out of range");
  }
  std::vector<SpacePoint> out(zmap.size(), zmap.front());
  for (const auto& atom : f.levels[level]) {
    double mass = 0.0;
    for (int w : atom) mass += f.base_weights[w];
    std::vector<SpacePoint> atoms;
    std::vector<double> weights;
    for (int w : atom) {
      // merge coincident images so the solver sees a clean support
      bool merged = false;
      for (std::size_t j = 0; j < atoms.size(); ++j) {
        if ((atoms[j].coords - zmap[w].coords).norm() <= 1e-12) {
          weights[j] += f.base_weights[w] / mass;
          merged = true;
          break;
        }
      }
      if (!merged) {
        atoms.push_back(zmap[w]);
        weights.push_back(f.base_weights[w] / mass);
      }
    }
    const SpacePoint b = barycenter(make_measure(atoms, weights)).point;
    for (int w : atom) out[w] = b;
  }
  return out;
}

}  // namespace catlab
