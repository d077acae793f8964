#include "doctest.h"

#include <cmath>

#include "catlab/markov_cotype.hpp"

using namespace catlab;

namespace {

SpacePoint e1(double x) {
  static SpacePtr space = GeodesicSpace::euclidean(1);
  Eigen::VectorXd c(1);
  c[0] = x;
  return make_point(space, c);
}

ReversibleChain swap_chain() {
  ReversibleChain chain;
  chain.pi = Eigen::Vector2d(0.5, 0.5);
  chain.a = Eigen::MatrixXd(2, 2);
  chain.a << 0, 1, 1, 0;
  return chain;
}

}  // namespace

TEST_CASE("chain validation") {
  Rng rng(2);
  for (int n : {2, 5, 8}) {
    const ReversibleChain chain = random_reversible_chain(n, rng);
    CHECK(validate_chain(chain).ok);
  }
  ReversibleChain bad = swap_chain();
  bad.pi = Eigen::Vector2d(0.7, 0.3);  // breaks detailed balance
  CHECK_FALSE(validate_chain(bad).ok);
  bad = swap_chain();
  bad.a(0, 1) = 0.9;  // row sum != 1
  CHECK_FALSE(validate_chain(bad).ok);
}

TEST_CASE("cesaro average of the two-state swap") {
  const ReversibleChain chain = swap_chain();
  const Eigen::MatrixXd avg = cesaro_average(chain.a, 2);
  CHECK(avg(0, 0) == doctest::Approx(0.5));
  CHECK(avg(0, 1) == doctest::Approx(0.5));
  CHECK(avg(1, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(cesaro_average(chain.a, 0), Error);
}

TEST_CASE("markov type ratio on the two-state swap") {
  PointConfiguration config;
  config.points = {e1(0.0), e1(2.0)};
  config.ball_center = e1(1.0);
  config.ball_radius = 1.5;
  const ReversibleChain chain = swap_chain();
  // t = 1: A^1 = A, ratio 1
  const MarkovTypeRatio r1 = markov_type_ratio(config, chain, 1);
  CHECK(r1.ratio == doctest::Approx(1.0));
  CHECK_FALSE(r1.degenerate);
  // t = 2: A^2 = I, numerator 0
  const MarkovTypeRatio r2 = markov_type_ratio(config, chain, 2);
  CHECK(r2.ratio == doctest::Approx(0.0));
  // identical points degenerate to the both-zero convention
  PointConfiguration flat;
  flat.points = {e1(1.0), e1(1.0)};
  flat.ball_center = e1(1.0);
  flat.ball_radius = 1.0;
  const MarkovTypeRatio rd = markov_type_ratio(flat, chain, 1);
  CHECK(rd.degenerate);
  CHECK(rd.ratio == doctest::Approx(1.0));
}

TEST_CASE("cotype witness of the swap is the pair of midpoints") {
  PointConfiguration config;
  config.points = {e1(0.0), e1(2.0)};
  config.ball_center = e1(1.0);
  config.ball_radius = 1.5;
  const auto witness = cotype_witness(config, swap_chain(), 2);
  CHECK(witness[0].coords[0] == doctest::Approx(1.0));
  CHECK(witness[1].coords[0] == doctest::Approx(1.0));
}

TEST_CASE("cotype check, hand-computed swap instance") {
  PointConfiguration config;
  const double d = 2.0;
  config.points = {e1(0.0), e1(d)};
  config.ball_center = e1(1.0);
  config.ball_radius = 1.5;
  const model::CurvatureClass cc(0.0, 0.5);
  const auto witness = cotype_witness(config, swap_chain(), 2);
  const CheckReport r =
      cotype_check(config, swap_chain(), 2, witness, cc, 1e-7, "t");
  // lhs: both states sit at distance d/2 from the midpoint witness and the
  // witness map is constant, so lhs = d^2/4; rhs = N^2 d^2/2 with N = 17.
  CHECK(r.lhs == doctest::Approx(d * d / 4.0));
  CHECK(r.rhs == doctest::Approx(289.0 * d * d / 2.0));
  CHECK(r.passed);
}

TEST_CASE("markov type sweep stays below one on Euclidean configurations") {
  auto e3 = GeodesicSpace::euclidean(3);
  const SpacePoint c = make_point(e3, Eigen::Vector3d::Zero().eval());
  const SweepResult s = sweep_markov_type(c, 1.0, 8, 16, 500, 7, 1e-8);
  CHECK(s.failures() == 0);
  double max_ratio = 0.0;
  for (const auto& r : s.reports) max_ratio = std::max(max_ratio, r.lhs);
  CHECK(max_ratio <= 1.0 + 1e-8);
}

TEST_CASE("cotype sweeps on sphere caps and hyperbolic balls") {
  auto s2 = GeodesicSpace::sphere(2, 1.0);
  const SpacePoint pole = make_point(s2, Eigen::Vector3d(1, 0, 0));
  const model::CurvatureClass ccs(1.0, 0.5);
  const CotypeSweepResult s =
      sweep_cotype(ccs, pole, ccs.effective_diameter().value / 4.0, 6, 8, 200,
                   7, 1e-7);
  CHECK(s.sweep.failures() == 0);
  const double n_allowed =
      16.0 * std::pow(model::effective_constants(ccs).gamma, 2) *
          (2.0 / model::effective_constants(ccs).k) +
      1.0;
  CHECK(s.max_required_n <= n_allowed);

  auto h2 = GeodesicSpace::hyperbolic(2, -1.0);
  Eigen::VectorXd hc = Eigen::VectorXd::Zero(3);
  hc[0] = 1.0;
  const CotypeSweepResult h =
      sweep_cotype(model::CurvatureClass(-1.0, 0.5), make_point(h2, hc), 1.0,
                   6, 8, 200, 7, 1e-7);
  CHECK(h.sweep.failures() == 0);
  CHECK(h.max_required_n <= 17.0);
}

TEST_CASE("chain JSON round trip") {
  Rng rng(33);
  const ReversibleChain chain = random_reversible_chain(4, rng);
  const ReversibleChain back = chain_from_json(chain_to_json(chain));
  CHECK((chain.pi - back.pi).norm() == 0.0);
  CHECK((chain.a - back.a).norm() == 0.0);
}
