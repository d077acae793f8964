#include "catlab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace catlab {

namespace {

Eigen::Vector3d sphere_geodesic(const Eigen::Vector3d& base,
                                const Eigen::Vector3d& vel, double t) {
  const double n = vel.norm();
  if (n < 1e-300) return base;
  Eigen::Vector3d p = std::cos(n * t) * base + std::sin(n * t) * vel / n;
  return p / p.norm();
}

}  // namespace

CheckReport make_report(std::string name, double lhs, double rhs, double tol,
                        std::string fingerprint) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tol = tol;
  r.passed = r.slack >= -tol;
  r.fingerprint = std::move(fingerprint);
  return r;
}

std::string trial_fingerprint(const std::string& name, std::uint64_t seed,
                              int index, const std::string& params) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), ":seed=%llu:trial=%06d",
                static_cast<unsigned long long>(seed), index);
  std::string fp = name + buf;
  if (!params.empty()) fp += ":" + params;
  return fp;
}

CheckReport check_uniform_convexity(const model::CurvatureClass& cc,
                                    const SpacePoint& x, const SpacePoint& y,
                                    const SpacePoint& z, double t, double tol,
                                    std::string fingerprint) {
  if (t < 0.0 || t > 1.0) throw Error("t outside [0,1]");
  const double k = model::effective_constants(cc).k;
  const SpacePoint gt = geodesic_point(x, y, t);
  const double dzg = distance(z, gt);
  const double dzx = distance(z, x);
  const double dzy = distance(z, y);
  const double dxy = distance(x, y);
  const double lhs = dzg * dzg;
  const double rhs = (1.0 - t) * dzx * dzx + t * dzy * dzy -
                     (k / 2.0) * t * (1.0 - t) * dxy * dxy;
  return make_report("uniform_convexity", lhs, rhs, tol, std::move(fingerprint));
}

double kendall_phi(const SpacePoint& x, const SpacePoint& y,
                   const SpacePoint& o, double kappa) {
  if (kappa <= 0.0) throw Error("kendall_phi requires kappa > 0");
  const double radicand = model::cos_kappa(kappa, distance(x, o)) *
                              model::cos_kappa(kappa, distance(y, o)) -
                          0.5;
  if (radicand <= 0.0) {
    throw RegimeError("kendall_phi outside the D_kappa/4 ball");
  }
  return (1.0 - model::cos_kappa(kappa, distance(x, y))) / std::sqrt(radicand);
}

CheckReport check_phi_convexity(double kappa, const SpacePoint& o,
                                const SpacePoint& lambda0,
                                const SpacePoint& lambda1,
                                const SpacePoint& mu0, const SpacePoint& mu1,
                                double s, double t, double a, double tol,
                                std::string fingerprint) {
  const double u = (1.0 - a) * s + a * t;
  auto lam = [&](double w) { return geodesic_point(lambda0, lambda1, w); };
  auto mu = [&](double w) { return geodesic_point(mu0, mu1, w); };
  const double lhs = kendall_phi(lam(u), mu(u), o, kappa);
  const double rhs = (1.0 - a) * kendall_phi(lam(s), mu(s), o, kappa) +
                     a * kendall_phi(lam(t), mu(t), o, kappa);
  return make_report("phi_convexity", lhs, rhs, tol, std::move(fingerprint));
}

CheckReport check_spcalc_psi(double h, double h_tilde,
                             const SphereCapQuadruple& quad, double step,
                             double tol, std::string fingerprint) {
  if (!(h > 0.0 && h_tilde > 0.0 && h_tilde < h)) {
    throw Error("need 0 < h_tilde < h");
  }
  const double ht2 = h_tilde * h_tilde;
  auto psi = [&](double t) {
    const Eigen::Vector3d lb = sphere_geodesic(quad.x, quad.u_bar, t);
    const Eigen::Vector3d mb = sphere_geodesic(quad.y, quad.v_bar, t);
    const Eigen::Vector3d lu = sphere_geodesic(quad.x, quad.u_under, t);
    const Eigen::Vector3d mu = sphere_geodesic(quad.y, quad.v_under, t);
    if (lb[0] <= h || mb[0] <= h || lu[0] <= h || mu[0] <= h) {
      throw RegimeError("geodesic image leaves the spherical cap");
    }
    const double radicand = lu[0] * mu[0] - ht2;
    if (radicand <= 0.0) throw RegimeError("nonpositive radicand");
    // (c (l1 m1 - h~^2))^{1/p} with c = 1 and p = 1/(1 - h~^2)
    return (lb - mb).squaredNorm() / (2.0 * std::pow(radicand, 1.0 - ht2));
  };
  const double second_diff =
      (psi(step) - 2.0 * psi(0.0) + psi(-step)) / (step * step);
  return make_report("spcalc_psi", 0.0, second_diff, tol,
                     std::move(fingerprint));
}

CheckReport check_variance(const model::CurvatureClass& cc,
                           const DiscreteMeasure& mu, const SpacePoint& z,
                           double tol, std::string fingerprint) {
  const double k = model::effective_constants(cc).k;
  const BarycenterResult b = barycenter(mu);
  const double dzb = distance(z, b.point);
  const double lhs = dzb * dzb + (k / 2.0) * frechet_objective(b.point, mu);
  const double rhs = frechet_objective(z, mu);
  return make_report("variance", lhs, rhs, tol, std::move(fingerprint));
}

double ConvexTestFunction::operator()(const SpacePoint& x) const {
  switch (kind) {
    case Kind::SquaredDistanceToPoint: {
      const double d = distance(anchor, x);
      return d * d;
    }
    case Kind::DistanceToSet:
      return distance_to_set(*set, x);
    case Kind::EuclideanAffine:
      return affine_direction.dot(x.coords) + affine_offset;
  }
  throw Error("unknown test function kind");
}

ConvexTestFunction ConvexTestFunction::squared_distance_to(SpacePoint anchor) {
  ConvexTestFunction f{Kind::SquaredDistanceToPoint, std::move(anchor), {}, {}, 0.0};
  return f;
}

ConvexTestFunction ConvexTestFunction::distance_to(ConvexSet set) {
  ConvexTestFunction f{Kind::DistanceToSet, {}, std::move(set), {}, 0.0};
  return f;
}

ConvexTestFunction ConvexTestFunction::affine(Eigen::VectorXd direction,
                                              double offset) {
  ConvexTestFunction f{Kind::EuclideanAffine, {}, {}, std::move(direction), offset};
  return f;
}

CheckReport check_jensen(const DiscreteMeasure& mu,
                         const ConvexTestFunction& phi, double tol,
                         std::string fingerprint) {
  // Distance to a convex set is convex along geodesics only in nonpositive
  // curvature (on a sphere cap it is concave transversally to the set), and
  // affine functions only make sense on a flat chart; refuse anything whose
  // convexity cannot be certified.
  const double kappa = mu.space()->curvature_upper_bound();
  if (phi.kind == ConvexTestFunction::Kind::DistanceToSet && kappa > 0.0) {
    throw RegimeError(
        "distance-to-set test functions require nonpositive curvature");
  }
  if (phi.kind == ConvexTestFunction::Kind::EuclideanAffine &&
      mu.space()->kind != GeodesicSpace::Kind::Euclidean) {
    throw RegimeError("affine test functions require a Euclidean space");
  }
  const BarycenterResult b = barycenter(mu);
  const double lhs = phi(b.point);
  double rhs = 0.0;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    rhs += mu.weights[i] * phi(mu.atoms[i]);
  }
  return make_report("jensen", lhs, rhs, tol, std::move(fingerprint));
}

LipschitzCheckOutcome check_barycenter_lipschitz(
    const model::CurvatureClass& cc, const DiscreteMeasure& mu1,
    const DiscreteMeasure& mu2, double tol, std::string fingerprint) {
  const model::EffectiveConstants ec = model::effective_constants(cc);
  const SpacePoint b1 = barycenter(mu1).point;
  const SpacePoint b2 = barycenter(mu2).point;
  const double lhs = distance(b1, b2);

  LipschitzCheckOutcome out;
  double rhs;
  if (cc.kappa > 0.0) {
    out.transport = wasserstein(2.0, mu1, mu2).cost;
    rhs = ec.gamma * out.transport;
  } else {
    out.transport = wasserstein(1.0, mu1, mu2).cost;
    rhs = out.transport;
  }
  out.ratio = out.transport > 1e-15 ? lhs / out.transport : 0.0;
  out.report = make_report("barycenter_lipschitz", lhs, rhs, tol,
                           std::move(fingerprint));
  return out;
}

void validate_martingale(const MartingaleInstance& inst, double tol) {
  const std::size_t n = inst.maps.size();
  if (n != inst.filtration.levels.size() || n < 1) {
    throw Error("martingale needs one map per filtration level");
  }
  for (const auto& level_map : inst.maps) {
    for (const auto& p : level_map) {
      if (distance(inst.ball_center, p) > inst.ball_radius + 1e-9) {
        throw RegimeError("martingale image leaves the declared ball");
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    const auto cb = conditional_barycenter(inst.maps[i], inst.filtration,
                                           static_cast<int>(i) - 1);
    for (std::size_t w = 0; w < cb.size(); ++w) {
      if (distance(cb[w], inst.maps[i - 1][w]) > tol) {
        throw Error("martingale property violated at level " +
                    std::to_string(i));
      }
    }
  }
}

CheckReport check_pisier(const model::CurvatureClass& cc,
                         const MartingaleInstance& inst, const SpacePoint& z,
                         double tol, std::string fingerprint) {
  const double k = model::effective_constants(cc).k;
  const auto& w = inst.filtration.base_weights;
  const std::size_t n = inst.maps.size();

  double increments = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t o = 0; o < w.size(); ++o) {
      const double d = distance(inst.maps[i][o], inst.maps[i - 1][o]);
      increments += w[o] * d * d;
    }
  }
  double endpoints = 0.0;
  for (std::size_t o = 0; o < w.size(); ++o) {
    const double dn = distance(inst.maps[n - 1][o], z);
    const double d0 = distance(inst.maps[0][o], z);
    endpoints += w[o] * (dn * dn - d0 * d0);
  }
  return make_report("pisier", (k / 2.0) * increments, endpoints, tol,
                     std::move(fingerprint));
}

// --- sweeps ---------------------------------------------------------------

int SweepResult::failures() const {
  int f = 0;
  for (const auto& r : reports) {
    if (!r.passed) ++f;
  }
  return f;
}

std::vector<double> dirichlet_weights(int n, Rng& rng) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& x : w) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);  // Exp(1), i.e. Dirichlet(1,...,1) after normalization
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

DiscreteMeasure random_measure(const BallSampler& sampler, int max_support,
                               Rng& rng) {
  const int n = max_support <= 2 ? 2 : 2 + rng.uniform_int(max_support - 1);
  std::vector<SpacePoint> atoms;
  atoms.reserve(n);
  for (int i = 0; i < n; ++i) atoms.push_back(sampler.sample(rng));
  return make_measure(std::move(atoms), dirichlet_weights(n, rng));
}

MartingaleInstance random_martingale(const BallSampler& sampler,
                                     int max_ground, int max_levels, Rng& rng) {
  const int ground = 2 + rng.uniform_int(std::max(1, max_ground - 1));
  const int steps = 1 + rng.uniform_int(std::max(1, max_levels));

  std::vector<std::vector<std::vector<int>>> levels;
  std::vector<int> all(ground);
  for (int i = 0; i < ground; ++i) all[i] = i;
  levels.push_back({all});
  for (int l = 1; l <= steps; ++l) {
    std::vector<std::vector<int>> next;
    for (const auto& atom : levels.back()) {
      if (atom.size() >= 2 && rng.uniform() < 0.7) {
        // split into two nonempty parts
        const int cut = 1 + rng.uniform_int(static_cast<int>(atom.size()) - 1);
        std::vector<int> shuffled = atom;
        for (int i = static_cast<int>(shuffled.size()) - 1; i > 0; --i) {
          std::swap(shuffled[i], shuffled[rng.uniform_int(i + 1)]);
        }
        std::vector<int> a(shuffled.begin(), shuffled.begin() + cut);
        std::vector<int> b(shuffled.begin() + cut, shuffled.end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        next.push_back(std::move(a));
        next.push_back(std::move(b));
      } else {
        next.push_back(atom);
      }
    }
    levels.push_back(std::move(next));
  }

  MartingaleInstance inst;
  inst.ball_center = sampler.center();
  inst.ball_radius = sampler.radius();
  inst.filtration =
      make_filtration(ground, std::move(levels), dirichlet_weights(ground, rng));

  const int n_levels = static_cast<int>(inst.filtration.levels.size());
  std::vector<SpacePoint> zn;
  zn.reserve(ground);
  for (int i = 0; i < ground; ++i) zn.push_back(sampler.sample(rng));
  inst.maps.assign(n_levels, zn);
  for (int i = n_levels - 1; i >= 1; --i) {
    inst.maps[i - 1] =
        conditional_barycenter(inst.maps[i], inst.filtration, i - 1);
  }
  return inst;
}

SweepResult sweep_uniform_convexity(const model::CurvatureClass& cc,
                                    const SpacePoint& center, double radius,
                                    int trials, std::uint64_t seed,
                                    double tol) {
  BallSampler sampler(center, radius);
  SweepResult out;
  out.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    const SpacePoint x = sampler.sample(rng);
    const SpacePoint y = sampler.sample(rng);
    const SpacePoint z = sampler.sample(rng);
    const double t = rng.uniform();
    auto rep = check_uniform_convexity(
        cc, x, y, z, t, tol, trial_fingerprint("uniform_convexity", seed, i));
    out.min_slack = std::min(out.min_slack, rep.slack);
    out.reports.push_back(std::move(rep));
  }
  return out;
}

SweepResult sweep_phi_convexity(const model::CurvatureClass& cc,
                                const SpacePoint& o, double r, int trials,
                                std::uint64_t seed, double tol) {
  if (cc.kappa <= 0.0) throw Error("phi convexity needs kappa > 0");
  const double dk = M_PI / std::sqrt(cc.kappa);
  if (!(r < dk / 4.0)) {
    throw RegimeError("phi convexity requires r < D_kappa / 4 strictly");
  }
  BallSampler sampler(o, r);
  SweepResult out;
  out.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    const SpacePoint l0 = sampler.sample(rng);
    const SpacePoint l1 = sampler.sample(rng);
    const SpacePoint m0 = sampler.sample(rng);
    const SpacePoint m1 = sampler.sample(rng);
    const double s = rng.uniform();
    const double t = rng.uniform();
    const double a_random = rng.uniform();
    const double a = (i % 2 == 0) ? 0.5 : a_random;
    auto rep = check_phi_convexity(
        cc.kappa, o, l0, l1, m0, m1, s, t, a, tol,
        trial_fingerprint("phi_convexity", seed, i));
    out.min_slack = std::min(out.min_slack, rep.slack);
    out.reports.push_back(std::move(rep));
  }
  return out;
}

SweepResult sweep_spcalc(double h, double h_tilde, int trials,
                         std::uint64_t seed, double step, double tol) {
  // The second-derivative claim needs p = 1/(1 - h_tilde^2) >= 3/2, i.e.
  // h_tilde^2 >= 1/3: one of the quadratic forms in the certificate has
  // discriminant 3 - 2p, and explicit counterexamples exist below that
  // threshold (e.g. h = 0.6, h_tilde = 0.45).
  if (!(h < 1.0 && h_tilde >= std::sqrt(1.0 / 3.0) && h_tilde < h)) {
    throw RegimeError("need sqrt(1/3) <= h_tilde < h < 1");
  }
  const double margin = 1e-3;
  const double cap_radius = std::acos(std::min(1.0 - 1e-9, h + margin));
  SpacePtr s2 = GeodesicSpace::sphere(2, 1.0);
  const SpacePoint pole =
      make_point(s2, Eigen::Vector3d(1.0, 0.0, 0.0));
  BallSampler sampler(pole, cap_radius);

  SweepResult out;
  out.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    const SpacePoint xp = sampler.sample(rng);
    SpacePoint yp = sampler.sample(rng);
    for (int guard = 0; guard < 100 && (xp.coords - yp.coords).norm() < 1e-2;
         ++guard) {
      yp = sampler.sample(rng);
    }
    SphereCapQuadruple quad;
    quad.x = xp.coords;
    quad.y = yp.coords;
    auto random_velocity_pair = [&](const SpacePoint& base,
                                    Eigen::Vector3d& bar,
                                    Eigen::Vector3d& under) {
      const auto basis = tangent_basis(base);
      const double speed = 0.1 + 0.9 * rng.uniform();
      const double a1 = 2.0 * M_PI * rng.uniform();
      const double a2 = 2.0 * M_PI * rng.uniform();
      bar = speed * (std::cos(a1) * basis[0] + std::sin(a1) * basis[1]);
      under = speed * (std::cos(a2) * basis[0] + std::sin(a2) * basis[1]);
    };
    random_velocity_pair(xp, quad.u_bar, quad.u_under);
    random_velocity_pair(yp, quad.v_bar, quad.v_under);
    auto rep = check_spcalc_psi(h, h_tilde, quad, step, tol,
                                trial_fingerprint("spcalc_psi", seed, i));
    out.min_slack = std::min(out.min_slack, rep.slack);
    out.reports.push_back(std::move(rep));
  }
  return out;
}

SweepResult sweep_variance(const model::CurvatureClass& cc,
                           const SpacePoint& center, double radius, int trials,
                           std::uint64_t seed, double tol, bool z_at_center) {
  BallSampler sampler(center, radius);
  SweepResult out;
  out.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    const DiscreteMeasure mu = random_measure(sampler, 8, rng);
    const SpacePoint z = z_at_center ? center : sampler.sample(rng);
    auto rep = check_variance(cc, mu, z, tol,
                              trial_fingerprint("variance", seed, i));
    out.min_slack = std::min(out.min_slack, rep.slack);
    out.reports.push_back(std::move(rep));
  }
  return out;
}

SweepResult sweep_jensen(const model::CurvatureClass& cc,
                         const SpacePoint& center, double radius, int trials,
                         std::uint64_t seed, double tol) {
  (void)cc;
  BallSampler sampler(center, radius);
  const bool euclidean =
      center.space->kind == GeodesicSpace::Kind::Euclidean;
  SweepResult out;
  out.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    const DiscreteMeasure mu = random_measure(sampler, 6, rng);
    const bool nonpositive = center.space->curvature_upper_bound() <= 0.0;
    ConvexTestFunction phi = [&]() {
      if (nonpositive && i % 3 == 2) {
        return ConvexTestFunction::distance_to(
            ConvexSet::segment(sampler.sample(rng), sampler.sample(rng)));
      }
      if (euclidean && i % 3 == 1) {
        Eigen::VectorXd dir(center.coords.size());
        for (Eigen::Index d = 0; d < dir.size(); ++d) dir[d] = rng.normal();
        return ConvexTestFunction::affine(std::move(dir),
                                          rng.uniform(-1.0, 1.0));
      }
      return ConvexTestFunction::squared_distance_to(sampler.sample(rng));
    }();
    auto rep =
        check_jensen(mu, phi, tol, trial_fingerprint("jensen", seed, i));
    out.min_slack = std::min(out.min_slack, rep.slack);
    out.reports.push_back(std::move(rep));
  }
  return out;
}

SweepResult sweep_barycenter_lipschitz(const model::CurvatureClass& cc,
                                       const SpacePoint& center, double radius,
                                       int trials, std::uint64_t seed,
                                       double tol) {
  BallSampler sampler(center, radius);
  SweepResult out;
  out.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    DiscreteMeasure mu1 = [&]() {
      if (i % 50 != 0) return random_measure(sampler, 6, rng);
      return dirac(sampler.sample(rng));
    }();
    DiscreteMeasure mu2 = [&]() {
      if (i % 50 != 0) return random_measure(sampler, 6, rng);
      SpacePoint y = sampler.sample(rng);
      for (int guard = 0;
           guard < 100 && distance(mu1.atoms.front(), y) < 1e-6; ++guard) {
        y = sampler.sample(rng);
      }
      return dirac(y);
    }();
    auto outcome = check_barycenter_lipschitz(
        cc, mu1, mu2, tol,
        trial_fingerprint("barycenter_lipschitz", seed, i));
    out.max_ratio = std::max(out.max_ratio, outcome.ratio);
    out.min_slack = std::min(out.min_slack, outcome.report.slack);
    out.reports.push_back(std::move(outcome.report));
  }
  return out;
}

SweepResult sweep_pisier(const model::CurvatureClass& cc,
                         const SpacePoint& center, double radius, int trials,
                         std::uint64_t seed, double tol) {
  BallSampler sampler(center, radius);
  SweepResult out;
  out.reports.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(seed, i);
    const MartingaleInstance inst = random_martingale(sampler, 16, 4, rng);
    const SpacePoint z = sampler.sample(rng);
    auto rep = check_pisier(cc, inst, z, tol,
                            trial_fingerprint("pisier", seed, i));
    out.min_slack = std::min(out.min_slack, rep.slack);
    out.reports.push_back(std::move(rep));
  }
  return out;
}

}  // namespace catlab
