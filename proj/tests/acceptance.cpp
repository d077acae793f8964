// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "catlab/lipschitz_ext.hpp"
#include "catlab/markov_cotype.hpp"
#include "catlab/report_io.hpp"

using namespace catlab;

namespace {

int g_failures = 0;

void report(int index, const char* label, bool ok, const std::string& detail) {
  std::printf("criterion %2d %-28s %s%s%s\n", index, label,
              ok ? "PASS" : "FAIL", detail.empty() ? "" : "  ",
              detail.c_str());
  if (!ok) ++g_failures;
}

SpacePoint sphere_pole() {
  static SpacePtr s2 = GeodesicSpace::sphere(2, 1.0);
  return make_point(s2, Eigen::Vector3d(1, 0, 0));
}

SpacePoint euclidean_origin(int dim = 2) {
  return make_point(GeodesicSpace::euclidean(dim),
                    Eigen::VectorXd::Zero(dim).eval());
}

SpacePoint hyperbolic_base() {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
  c[0] = 1.0;
  return make_point(GeodesicSpace::hyperbolic(2, -1.0), c);
}

double max_abs_slack(const SweepResult& s) {
  double m = 0.0;
  for (const auto& r : s.reports) m = std::max(m, std::abs(r.slack));
  return m;
}

// --- 1: closed-form constants on an epsilon grid -------------------------

void criterion_constants() {
  bool ok = true;
  std::ostringstream detail;
  for (int i = 1; i <= 100; ++i) {
    const double eps = i / 101.0;
    const model::EffectiveConstants ec =
        model::effective_constants({1.0, eps});
    const double k_ref = (M_PI - eps * M_PI) * std::tan(eps * M_PI / 2.0);
    const double g_ref =
        M_PI / (2.0 * std::sqrt(2.0) *
                std::pow(std::cos((1.0 - eps) * M_PI / 2.0), 0.25));
    const double c_ref = g_ref * (16.0 * g_ref * g_ref * (2.0 / k_ref) + 1.0);
    ok = ok && std::abs(ec.k - k_ref) <= 1e-12 * std::max(1.0, k_ref);
    ok = ok && std::abs(ec.gamma - g_ref) <= 1e-12 * g_ref;
    ok = ok && std::abs(ec.c_ext - c_ref) <= 1e-12 * c_ref;
  }
  const double k_limit = model::effective_constants({1.0, 0.999}).k;
  ok = ok && std::abs(k_limit - 2.0) < 0.02;
  const model::EffectiveConstants flat = model::effective_constants({0.0, 0.5});
  ok = ok && flat.k == 2.0 && flat.gamma == 1.0 && flat.c_ext == 17.0;
  detail << "k(0.999)=" << format_double(k_limit);
  report(1, "constants", ok, detail.str());
}

// --- 2: uniform convexity ------------------------------------------------

void criterion_uniform_convexity() {
  bool ok = true;
  std::ostringstream detail;
  for (double eps : {0.25, 0.5, 0.75}) {
    const model::CurvatureClass cc(1.0, eps);
    const SweepResult s = sweep_uniform_convexity(
        cc, sphere_pole(), cc.effective_diameter().value / 4.0, 100000, 2026,
        1e-9);
    ok = ok && s.failures() == 0;
    detail << "eps=" << eps << ":min_slack=" << format_double(s.min_slack)
           << " ";
  }
  const SweepResult flat = sweep_uniform_convexity(
      model::CurvatureClass(0.0, 0.5), euclidean_origin(), 1.0, 10000, 2026,
      1e-10);
  const double worst = max_abs_slack(flat);
  ok = ok && flat.failures() == 0 && worst <= 1e-10;
  detail << "euclid_max|slack|=" << format_double(worst);
  report(2, "uniform convexity", ok, detail.str());
}

// --- 3: convexity of the comparison function, plus the cap calculation ---

void criterion_phi_and_cap() {
  const model::CurvatureClass cc(1.0, 0.5);
  const SweepResult phi =
      sweep_phi_convexity(cc, sphere_pole(), 0.7, 100000, 2026, 1e-9);
  const SweepResult cap =
      sweep_spcalc(0.8, std::sqrt(0.5), 10000, 2026, 1e-4, 1e-4);
  const bool ok = phi.failures() == 0 && cap.failures() == 0;
  std::ostringstream detail;
  detail << "phi_min_slack=" << format_double(phi.min_slack)
         << " cap_min_second_diff=" << format_double(cap.min_slack);
  report(3, "comparison-function convexity", ok, detail.str());
}

// --- 4: barycenter solver vs grid oracle, product splitting --------------

SpacePoint grid_argmin(const DiscreteMeasure& mu, const SpacePoint& center,
                       double span) {
  SpacePoint best = center;
  double best_f = frechet_objective(center, mu);
  const auto basis = tangent_basis(center);
  double ca = 0.0, cb = 0.0;
  for (int stage = 0; stage < 6; ++stage) {
    const int n = 40;
    const double step = 2.0 * span / n;
    double na = ca, nb = cb;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double a = ca - span + i * step;
        const double b = cb - span + j * step;
        const SpacePoint v =
            exp_map(center, a * basis[0] + b * basis[1]);
        const double f = frechet_objective(v, mu);
        if (f < best_f) {
          best_f = f;
          best = v;
          na = a;
          nb = b;
        }
      }
    }
    ca = na;
    cb = nb;
    span = 2.0 * step;
  }
  return best;
}

void criterion_barycenter_solver() {
  bool ok = true;
  double worst_dist = 0.0, worst_split = 0.0;
  BallSampler sampler(sphere_pole(), 0.39);
  for (int inst = 0; inst < 50; ++inst) {
    Rng rng = Rng::for_trial(311, inst);
    const DiscreteMeasure mu = random_measure(sampler, 6, rng);
    const BarycenterResult r = barycenter(mu);
    ok = ok && r.gradient_norm <= 1e-10;
    const SpacePoint oracle = grid_argmin(mu, sphere_pole(), 0.4);
    worst_dist = std::max(worst_dist, distance(r.point, oracle));
  }
  ok = ok && worst_dist <= 1e-5;

  auto s2 = GeodesicSpace::sphere(2, 1.0);
  auto e2 = GeodesicSpace::euclidean(2);
  auto prod = GeodesicSpace::product({s2, e2});
  Eigen::VectorXd c(5);
  c << 1, 0, 0, 0, 0;
  BallSampler prod_sampler(make_point(prod, c), 0.35);
  for (int inst = 0; inst < 100; ++inst) {
    Rng rng = Rng::for_trial(313, inst);
    const DiscreteMeasure mu = random_measure(prod_sampler, 6, rng);
    const SpacePoint b = barycenter(mu).point;
    std::vector<SpacePoint> heads, tails;
    for (const auto& a : mu.atoms) {
      heads.push_back(make_point(s2, a.coords.head(3)));
      tails.push_back(make_point(e2, a.coords.tail(2)));
    }
    const SpacePoint bs = barycenter(make_measure(heads, mu.weights)).point;
    const SpacePoint be = barycenter(make_measure(tails, mu.weights)).point;
    Eigen::VectorXd glued(5);
    glued << bs.coords, be.coords;
    worst_split = std::max(worst_split, (b.coords - glued).norm());
  }
  ok = ok && worst_split <= 1e-8;
  std::ostringstream detail;
  detail << "oracle_dist=" << format_double(worst_dist)
         << " split_gap=" << format_double(worst_split);
  report(4, "barycenter solver", ok, detail.str());
}

// --- 5: variance inequality ----------------------------------------------

void criterion_variance() {
  bool ok = true;
  std::ostringstream detail;
  for (double eps : {0.25, 0.5, 0.75}) {
    const model::CurvatureClass cc(1.0, eps);
    const SweepResult s =
        sweep_variance(cc, sphere_pole(), cc.effective_diameter().value / 4.0,
                       10000, 2026, 1e-8, false);
    ok = ok && s.failures() == 0;
  }
  const SweepResult flat =
      sweep_variance(model::CurvatureClass(0.0, 0.5), euclidean_origin(), 1.0,
                     10000, 2026, 1e-10, false);
  const double worst = max_abs_slack(flat);
  ok = ok && flat.failures() == 0 && worst <= 1e-10;
  detail << "euclid_max|slack|=" << format_double(worst);
  report(5, "variance inequality", ok, detail.str());
}

// --- 6: barycenter contraction under transport ---------------------------

void criterion_barycenter_lipschitz() {
  bool ok = true;
  std::ostringstream detail;
  const model::CurvatureClass cc(1.0, 0.5);
  const SweepResult s = sweep_barycenter_lipschitz(
      cc, sphere_pole(), cc.effective_diameter().value / 4.0, 10000, 2026,
      1e-8);
  ok = ok && s.failures() == 0 && s.max_ratio >= 1.0 - 1e-6;
  detail << "sphere_max_ratio=" << format_double(s.max_ratio);
  for (const SpacePoint& center : {hyperbolic_base(), euclidean_origin()}) {
    const SweepResult flat = sweep_barycenter_lipschitz(
        model::CurvatureClass(center.space->curvature_upper_bound(), 0.5),
        center, 1.0, 10000, 2026, 1e-8);
    ok = ok && flat.failures() == 0 && flat.max_ratio >= 1.0 - 1e-6;
  }

  // exact solver vs exhaustive matchings on small uniform supports
  double worst_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng = Rng::for_trial(421, trial);
    const int n = 1 + rng.uniform_int(6);
    const bool on_sphere = trial % 2 == 0;
    BallSampler bs(on_sphere ? sphere_pole() : euclidean_origin(), 0.7);
    std::vector<SpacePoint> xs, ys;
    for (int i = 0; i < n; ++i) xs.push_back(bs.sample(rng));
    for (int i = 0; i < n; ++i) ys.push_back(bs.sample(rng));
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    double best = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = distance(xs[i], ys[perm[i]]);
        cost += d * d / n;
      }
      best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double solver =
        wasserstein(2.0, uniform_measure(xs), uniform_measure(ys)).cost;
    worst_gap = std::max(worst_gap, std::abs(solver - std::sqrt(best)));
  }
  ok = ok && worst_gap <= 1e-9;
  detail << " matching_gap=" << format_double(worst_gap);
  report(6, "barycenter contraction", ok, detail.str());
}

// --- 7: martingale square-function inequality ----------------------------

void criterion_pisier() {
  const model::CurvatureClass cc(1.0, 0.5);
  const SweepResult sphere = sweep_pisier(
      cc, sphere_pole(), cc.effective_diameter().value / 4.0, 1000, 2026,
      1e-7);
  const SweepResult flat =
      sweep_pisier(model::CurvatureClass(0.0, 0.5), euclidean_origin(), 1.0,
                   1000, 2026, 1e-7);
  bool ok = sphere.failures() == 0 && flat.failures() == 0;

  // one-step Euclidean martingales realize the identity case
  double worst = 0.0;
  BallSampler sampler(euclidean_origin(), 1.0);
  for (int i = 0; i < 100; ++i) {
    Rng rng = Rng::for_trial(515, i);
    const MartingaleInstance inst = random_martingale(sampler, 16, 1, rng);
    const SpacePoint z = sampler.sample(rng);
    const CheckReport r =
        check_pisier(model::CurvatureClass(0.0, 0.5), inst, z, 1e-9, "t");
    worst = std::max(worst, std::abs(r.slack));
  }
  ok = ok && worst <= 1e-9;
  std::ostringstream detail;
  detail << "one_step_max|slack|=" << format_double(worst);
  report(7, "martingale inequality", ok, detail.str());
}

// --- 8: Markov type and cotype -------------------------------------------

void criterion_markov() {
  const model::CurvatureClass cc(1.0, 0.5);
  const CotypeSweepResult sphere =
      sweep_cotype(cc, sphere_pole(), cc.effective_diameter().value / 4.0, 8,
                   16, 1000, 2026, 1e-7);
  const CotypeSweepResult hyp =
      sweep_cotype(model::CurvatureClass(-1.0, 0.5), hyperbolic_base(), 1.0, 8,
                   16, 1000, 2026, 1e-7);
  bool ok = sphere.sweep.failures() == 0 && hyp.sweep.failures() == 0;
  ok = ok && hyp.max_required_n <= 17.0;

  const SweepResult type =
      sweep_markov_type(euclidean_origin(3), 1.0, 8, 16, 1000, 2026, 1e-8);
  double max_ratio = 0.0;
  for (const auto& r : type.reports) max_ratio = std::max(max_ratio, r.lhs);
  ok = ok && type.failures() == 0 && max_ratio <= 1.0 + 1e-8;
  std::ostringstream detail;
  detail << "max_type_ratio=" << format_double(max_ratio)
         << " required_n=" << format_double(sphere.max_required_n);
  report(8, "markov type and cotype", ok, detail.str());
}

// --- 9: finite Lipschitz extension ---------------------------------------

void criterion_extension() {
  const model::CurvatureClass cc(1.0, 0.5);
  BallSampler domain(euclidean_origin(), 1.0);
  BallSampler target(sphere_pole(), cc.effective_diameter().value / 4.0);
  int certified = 0;
  bool ok = true;
  for (int i = 0; i < 200; ++i) {
    Rng rng = Rng::for_trial(616, i);
    const ExtensionInstance inst =
        random_extension_instance(domain, target, 12, rng);
    const ExtensionResult res = extend(inst, cc);
    for (std::size_t z = 0; z < inst.z_indices.size(); ++z) {
      ok = ok && (res.values[inst.z_indices[z]].coords -
                  inst.f_values[z].coords)
                         .norm() == 0.0;
    }
    for (const auto& v : res.values) {
      ok = ok && distance(v, inst.ball_center) <= inst.ball_radius + 1e-9;
    }
    if (res.certified) ++certified;
  }
  ok = ok && certified >= 190;

  // single unknown against a dense grid search on a flat target
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng = Rng::for_trial(617, trial);
    ExtensionInstance inst;
    const int known = 4 + rng.uniform_int(4);
    auto e2pt = [&](double x, double y) {
      return make_point(GeodesicSpace::euclidean(2), Eigen::Vector2d(x, y));
    };
    for (int i = 0; i < known + 1; ++i) {
      inst.domain_points.push_back(
          e2pt(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    }
    for (int i = 0; i < known; ++i) {
      inst.z_indices.push_back(i);
      inst.f_values.push_back(
          e2pt(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)));
    }
    inst.ball_center = e2pt(0, 0);
    inst.ball_radius = 1.0;
    const ExtensionResult res =
        extend(inst, model::CurvatureClass(0.0, 0.5));
    std::vector<double> scales;
    for (int i = 0; i < known; ++i) {
      scales.push_back(
          distance(inst.domain_points[known], inst.domain_points[i]));
    }
    double solver = 0.0;
    for (int i = 0; i < known; ++i) {
      solver = std::max(
          solver, distance(res.values[known], inst.f_values[i]) / scales[i]);
    }
    // staged grid refinement over the ball; each stage re-centers until
    // stable so the search can travel along diagonal valleys of the max
    double best = std::numeric_limits<double>::infinity();
    double ca = 0.0, cb = 0.0, span = 1.0;
    for (int stage = 0; stage < 8; ++stage) {
      const int n = 40;
      const double step = 2.0 * span / n;
      for (int pass = 0; pass < 100; ++pass) {
        double na = ca, nb = cb;
        for (int i = 0; i <= n; ++i) {
          for (int j = 0; j <= n; ++j) {
            const double a = ca - span + i * step;
            const double b = cb - span + j * step;
            if (a * a + b * b > 1.0) continue;
            double f = 0.0;
            for (int t = 0; t < known; ++t) {
              f = std::max(f,
                           (Eigen::Vector2d(a, b) -
                            Eigen::Vector2d(inst.f_values[t].coords))
                                   .norm() /
                               scales[t]);
            }
            if (f < best) {
              best = f;
              na = a;
              nb = b;
            }
          }
        }
        const bool stable = std::hypot(na - ca, nb - cb) <= step;
        ca = na;
        cb = nb;
        if (stable) break;
      }
      span = 2.0 * step;
    }
    worst = std::max(worst, std::abs(solver - best));
  }
  ok = ok && worst <= 1e-4;
  std::ostringstream detail;
  detail << "certified=" << certified << "/200"
         << " oracle_gap=" << format_double(worst);
  report(9, "lipschitz extension", ok, detail.str());
}

// --- 10: reproducibility -------------------------------------------------

void criterion_reproducibility() {
  const model::CurvatureClass cc(1.0, 0.5);
  std::ostringstream a, b;
  write_reports_csv(
      a, sweep_variance(cc, sphere_pole(), 0.39, 500, 777, 1e-8, false)
             .reports);
  write_reports_csv(
      b, sweep_variance(cc, sphere_pole(), 0.39, 500, 777, 1e-8, false)
             .reports);
  report(10, "reproducibility", a.str() == b.str() && !a.str().empty(), "");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_constants();
  criterion_uniform_convexity();
  criterion_phi_and_cap();
  criterion_barycenter_solver();
  criterion_variance();
  criterion_barycenter_lipschitz();
  criterion_pisier();
  criterion_markov();
  criterion_extension();
  criterion_reproducibility();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::printf("%d criteria failed (%.1f s total)\n", g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
