#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <string>

#include "CLI11.hpp"

#include "catlab/barycenter.hpp"
#include "catlab/inequality_lab.hpp"
#include "catlab/lipschitz_ext.hpp"
#include "catlab/markov_cotype.hpp"
#include "catlab/report_io.hpp"

namespace {

using namespace catlab;

nlohmann::json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return nlohmann::json::parse(is);
}

// "sphere2" / "euclidean3" / "hyperbolic2" shorthand, or a JSON file path.
SpacePtr parse_space(const std::string& name, double kappa) {
  static const std::regex shorthand("(euclidean|sphere|hyperbolic)([0-9]+)");
  std::smatch m;
  if (std::regex_match(name, m, shorthand)) {
    const int n = std::stoi(m[2]);
    if (m[1] == "euclidean") return GeodesicSpace::euclidean(n);
    if (m[1] == "sphere") return GeodesicSpace::sphere(n, kappa);
    return GeodesicSpace::hyperbolic(n, kappa < 0.0 ? kappa : -1.0);
  }
  return space_from_json(load_json(name));
}

Eigen::VectorXd base_coords(const GeodesicSpace& s) {
  switch (s.kind) {
    case GeodesicSpace::Kind::Euclidean:
      return Eigen::VectorXd::Zero(s.dim);
    case GeodesicSpace::Kind::Sphere: {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(s.dim + 1);
      c[0] = 1.0 / std::sqrt(s.kappa);
      return c;
    }
    case GeodesicSpace::Kind::Hyperbolic: {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(s.dim + 1);
      c[0] = 1.0 / std::sqrt(-s.kappa);
      return c;
    }
    case GeodesicSpace::Kind::Product: {
      Eigen::VectorXd c(s.ambient_dim());
      int off = 0;
      for (const auto& f : s.factors) {
        const Eigen::VectorXd fc = base_coords(*f);
        c.segment(off, fc.size()) = fc;
        off += static_cast<int>(fc.size());
      }
      return c;
    }
  }
  throw Error("unknown space kind");
}

SpacePoint base_point(const SpacePtr& space) {
  return make_point(space, base_coords(*space));
}

double auto_radius(const model::CurvatureClass& cc) {
  const model::ExtendedReal d = cc.effective_diameter();
  return d.unbounded ? 1.0 : d.value / 4.0;
}

SpacePoint point_from_json(const SpacePtr& space, const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return make_point(space, Eigen::Map<const Eigen::VectorXd>(
                               v.data(), static_cast<int>(v.size())));
}

std::vector<double> coords_vec(const SpacePoint& p) {
  return std::vector<double>(p.coords.data(),
                             p.coords.data() + p.coords.size());
}

int finish_sweep(const std::string& name, const SweepResult& sweep,
                 const std::string& out, const std::string& format) {
  if (!out.empty()) write_reports_file(out, sweep.reports, format);
  std::cout << summary_line(summarize(name, sweep)) << "\n";
  const int failures = sweep.failures();
  if (failures > 0) {
    int shown = 0;
    for (const auto& r : sweep.reports) {
      if (!r.passed && shown < 20) {
        std::cout << "FAIL " << r.fingerprint << " slack="
                  << format_double(r.slack) << "\n";
        ++shown;
      }
    }
    if (failures > shown) {
      std::cout << "... and " << failures - shown << " more\n";
    }
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CAT(kappa) geometry laboratory"};
  app.require_subcommand(1);

  // shared options, bound per subcommand below
  std::string space_arg = "sphere2";
  double kappa = 1.0;
  double epsilon = 0.5;
  double radius = 0.0;  // 0 = automatic
  int trials = 1000;
  std::uint64_t seed = 1;
  double tol = -1.0;  // negative = per-check default
  std::string out;
  std::string format = "csv";
  bool z_at_center = false;
  double p_exponent = 2.0;
  double cap_h = 0.8, cap_h_tilde = std::sqrt(0.5);
  int max_points = 8, max_time = 16, neighbors = 4;
  std::string measure_path, mu_path, nu_path, input_path, instance_path;

  auto add_sweep_flags = [&](CLI::App* cmd) {
    cmd->add_option("--space", space_arg, "Space name or JSON file");
    cmd->add_option("--kappa", kappa, "Curvature bound");
    cmd->add_option("--epsilon", epsilon, "Safety margin in (0,1)");
    cmd->add_option("--radius", radius, "Sampling ball radius (0 = auto)");
    cmd->add_option("--trials", trials, "Number of seeded trials");
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_option("--tol", tol, "Tolerance override");
    cmd->add_option("--out", out, "Report output path");
    cmd->add_option("--format", format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* constants_cmd = app.add_subcommand("constants", "Effective constants");
  constants_cmd->add_option("--kappa", kappa, "Curvature bound");
  constants_cmd->add_option("--epsilon", epsilon, "Safety margin in (0,1)");

  auto* bary_cmd = app.add_subcommand("barycenter", "Barycenter of a measure");
  bary_cmd->add_option("--measure", measure_path, "Measure JSON")->required();
  bary_cmd->add_option("--out", out, "Result JSON path");

  auto* wass_cmd = app.add_subcommand("wasserstein", "Exact W_p distance");
  wass_cmd->add_option("--p", p_exponent, "Exponent, 1 or 2")
      ->check(CLI::IsMember({1.0, 2.0}));
  wass_cmd->add_option("--mu", mu_path, "First measure JSON")->required();
  wass_cmd->add_option("--nu", nu_path, "Second measure JSON")->required();
  wass_cmd->add_option("--out", out, "Result JSON path");

  auto* proj_cmd = app.add_subcommand("project", "Orthogonal projection");
  proj_cmd->add_option("--input", input_path, "JSON with space, set, point")
      ->required();
  proj_cmd->add_option("--out", out, "Result JSON path");

  auto* ext_cmd = app.add_subcommand("extend", "Lipschitz extension");
  ext_cmd->add_option("--instance", instance_path, "Instance JSON")->required();
  ext_cmd->add_option("--kappa", kappa, "Target curvature bound");
  ext_cmd->add_option("--epsilon", epsilon, "Safety margin in (0,1)");
  ext_cmd->add_option("--neighbors", neighbors, "Neighbor count");
  ext_cmd->add_option("--out", out, "Result JSON path");

  auto* verify_cmd = app.add_subcommand("verify", "Run an inequality sweep");
  std::string check;
  verify_cmd
      ->add_option("check", check,
                   "convexity | phi | spcalc | variance | jensen | lipschitz "
                   "| pisier | markov-type | cotype")
      ->required()
      ->check(CLI::IsMember({"convexity", "phi", "spcalc", "variance",
                             "jensen", "lipschitz", "pisier", "markov-type",
                             "cotype"}));
  add_sweep_flags(verify_cmd);
  verify_cmd->add_flag("--z-at-center", z_at_center,
                       "Variance check: place z at the ball center");
  verify_cmd->add_option("--cap-h", cap_h, "Spherical cap height (spcalc)");
  verify_cmd->add_option("--cap-h-tilde", cap_h_tilde,
                         "Denominator height (spcalc)");
  verify_cmd->add_option("--max-points", max_points,
                         "Max configuration size (markov-type, cotype)");
  verify_cmd->add_option("--max-time", max_time,
                         "Max chain time (markov-type, cotype)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (*constants_cmd) {
      const model::CurvatureClass cc(kappa, epsilon);
      const model::EffectiveConstants ec = model::effective_constants(cc);
      std::cout << "k = " << format_double(ec.k) << "\n"
                << "gamma = " << format_double(ec.gamma) << "\n"
                << "c_ext = " << format_double(ec.c_ext) << "\n";
      const model::ExtendedReal d = cc.effective_diameter();
      std::cout << "effective_diameter = "
                << (d.unbounded ? std::string("inf") : format_double(d.value))
                << "\n";
      return 0;
    }

    if (*bary_cmd) {
      const DiscreteMeasure mu = measure_from_json(load_json(measure_path));
      const BarycenterResult r = barycenter(mu);
      nlohmann::json j;
      j["point"] = coords_vec(r.point);
      j["objective"] = r.objective;
      j["gradient_norm"] = r.gradient_norm;
      j["iterations"] = r.iterations;
      if (!out.empty()) std::ofstream(out) << j.dump(2) << "\n";
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*wass_cmd) {
      const DiscreteMeasure mu = measure_from_json(load_json(mu_path));
      const DiscreteMeasure nu = measure_from_json(load_json(nu_path));
      const TransportResult r = wasserstein(p_exponent, mu, nu);
      nlohmann::json j;
      j["cost"] = r.cost;
      j["certificate_gap"] = certificate_gap(r, p_exponent);
      nlohmann::json plan = nlohmann::json::array();
      for (int i = 0; i < r.plan.matrix.rows(); ++i) {
        plan.push_back(std::vector<double>(r.plan.matrix.row(i).begin(),
                                           r.plan.matrix.row(i).end()));
      }
      j["plan"] = plan;
      if (!out.empty()) std::ofstream(out) << j.dump(2) << "\n";
      std::cout << "cost = " << format_double(r.cost) << "\n";
      return 0;
    }

    if (*proj_cmd) {
      const nlohmann::json in = load_json(input_path);
      const SpacePtr space = space_from_json(in.at("space"));
      const SpacePoint x = point_from_json(space, in.at("point"));
      const nlohmann::json& sj = in.at("set");
      ConvexSet set =
          sj.at("kind") == "segment"
              ? ConvexSet::segment(point_from_json(space, sj.at("a")),
                                   point_from_json(space, sj.at("b")))
              : ConvexSet::ball(point_from_json(space, sj.at("center")),
                                sj.at("radius").get<double>());
      const SpacePoint proj = orthogonal_project(set, x);
      nlohmann::json j;
      j["projection"] = coords_vec(proj);
      j["distance"] = distance(x, proj);
      if (!out.empty()) std::ofstream(out) << j.dump(2) << "\n";
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*ext_cmd) {
      const ExtensionInstance inst =
          extension_instance_from_json(load_json(instance_path));
      const model::CurvatureClass cc(kappa, epsilon);
      ExtendOptions opts;
      opts.neighbor_count = neighbors;
      const ExtensionResult r = extend(inst, cc, opts);
      if (!out.empty()) {
        std::ofstream(out) << extension_result_to_json(r).dump(2) << "\n";
      }
      std::cout << "lip_original = " << format_double(r.lip_original) << "\n"
                << "lip_extended = " << format_double(r.lip_extended) << "\n"
                << "ratio = " << format_double(r.ratio) << "\n"
                << "certified = " << (r.certified ? "true" : "false") << "\n";
      return r.certified ? 0 : 1;
    }

    // verify
    const model::CurvatureClass cc(kappa, epsilon);
    auto pick_tol = [&](double fallback) { return tol >= 0.0 ? tol : fallback; };

    if (check == "spcalc") {
      const SweepResult sweep =
          sweep_spcalc(cap_h, cap_h_tilde, trials, seed, 1e-4, pick_tol(1e-4));
      return finish_sweep("spcalc_psi", sweep, out, format);
    }

    const SpacePtr space = parse_space(space_arg, kappa);
    const SpacePoint center = base_point(space);
    const double r = radius > 0.0 ? radius : auto_radius(cc);

    if (check == "convexity") {
      return finish_sweep(
          "uniform_convexity",
          sweep_uniform_convexity(cc, center, r, trials, seed, pick_tol(1e-9)),
          out, format);
    }
    if (check == "phi") {
      const double phi_r =
          radius > 0.0 ? radius : 0.7 / std::sqrt(cc.kappa);
      return finish_sweep(
          "phi_convexity",
          sweep_phi_convexity(cc, center, phi_r, trials, seed, pick_tol(1e-9)),
          out, format);
    }
    if (check == "variance") {
      return finish_sweep("variance",
                          sweep_variance(cc, center, r, trials, seed,
                                         pick_tol(1e-8), z_at_center),
                          out, format);
    }
    if (check == "jensen") {
      return finish_sweep(
          "jensen", sweep_jensen(cc, center, r, trials, seed, pick_tol(1e-8)),
          out, format);
    }
    if (check == "lipschitz") {
      return finish_sweep("barycenter_lipschitz",
                          sweep_barycenter_lipschitz(cc, center, r, trials,
                                                     seed, pick_tol(1e-8)),
                          out, format);
    }
    if (check == "pisier") {
      return finish_sweep(
          "pisier", sweep_pisier(cc, center, r, trials, seed, pick_tol(1e-7)),
          out, format);
    }
    if (check == "markov-type") {
      return finish_sweep("markov_type",
                          sweep_markov_type(center, r, max_points, max_time,
                                            trials, seed, pick_tol(1e-8)),
                          out, format);
    }
    // cotype
    const CotypeSweepResult cs = sweep_cotype(cc, center, r, max_points,
                                              max_time, trials, seed,
                                              pick_tol(1e-7));
    std::cout << "max_required_n = " << format_double(cs.max_required_n)
              << "\n";
    return finish_sweep("cotype", cs.sweep, out, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
