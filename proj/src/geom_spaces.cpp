#include "catlab/geom_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "catlab/rng.hpp"

namespace catlab {

namespace {

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

double lorentz(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  double s = -p[0] * q[0];
  for (int i = 1; i < p.size(); ++i) s += p[i] * q[i];
  return s;
}

// Ambient slice sizes of a product, in factor order.
void factor_offsets(const GeodesicSpace& space,
                    std::vector<std::pair<const GeodesicSpace*, int>>& out,
                    int& offset) {
  if (space.kind == GeodesicSpace::Kind::Product) {
    for (const auto& f : space.factors) factor_offsets(*f, out, offset);
  } else {
    out.push_back({&space, offset});
    offset += space.ambient_dim();
  }
}

std::vector<std::pair<const GeodesicSpace*, int>> leaves(
    const GeodesicSpace& space) {
  std::vector<std::pair<const GeodesicSpace*, int>> out;
  int offset = 0;
  factor_offsets(space, out, offset);
  return out;
}

double leaf_distance(const GeodesicSpace& s, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y) {
  switch (s.kind) {
    case GeodesicSpace::Kind::Euclidean:
      return (x - y).norm();
    case GeodesicSpace::Kind::Sphere: {
      // half-angle form stays accurate near coincident and antipodal points
      const double r2 = 1.0 / s.kappa;
      return 2.0 * std::sqrt(r2) * std::atan2((x - y).norm(), (x + y).norm());
    }
    case GeodesicSpace::Kind::Hyperbolic: {
      // chordal form: cosh(d/r) = 1 + q/2 with q the squared Minkowski
      // length of x - y, so sinh(d/r) = sqrt(q (1 + q/4)) without the
      // cancellation that acosh suffers near 1
      const double r2 = -1.0 / s.kappa;
      const Eigen::VectorXd diff = x - y;
      const double q = std::max(0.0, lorentz(diff, diff) / r2);
      return std::sqrt(r2) * std::asinh(std::sqrt(q * (1.0 + q / 4.0)));
    }
    default:
      throw Error("leaf_distance on product");
  }
}

double leaf_inner(const GeodesicSpace& s, const Eigen::VectorXd& v,
                  const Eigen::VectorXd& w) {
  if (s.kind == GeodesicSpace::Kind::Hyperbolic) return lorentz(v, w);
  return v.dot(w);
}

Eigen::VectorXd leaf_log(const GeodesicSpace& s, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y) {
  switch (s.kind) {
    case GeodesicSpace::Kind::Euclidean:
      return y - x;
    case GeodesicSpace::Kind::Sphere: {
      const double radius = 1.0 / std::sqrt(s.kappa);
      const double d = leaf_distance(s, x, y);
      if (d < 1e-15) return Eigen::VectorXd::Zero(x.size());
      if (d > M_PI * radius - 1e-9) {
        throw Error("antipodal sphere points: geodesic not unique");
      }
      Eigen::VectorXd u = y - (x.dot(y) / (radius * radius)) * x;
      return (d / u.norm()) * u;
    }
    case GeodesicSpace::Kind::Hyperbolic: {
      const double r2 = -1.0 / s.kappa;
      const double d = leaf_distance(s, x, y);
      if (d < 1e-15) return Eigen::VectorXd::Zero(x.size());
      Eigen::VectorXd u = y - (-lorentz(x, y) / r2) * x;
      const double nu = std::sqrt(std::max(0.0, lorentz(u, u)));
      return (d / nu) * u;
    }
    default:
      throw Error("leaf_log on product");
  }
}

Eigen::VectorXd leaf_retighten(const GeodesicSpace& s, Eigen::VectorXd p) {
  switch (s.kind) {
    case GeodesicSpace::Kind::Euclidean:
      return p;
    case GeodesicSpace::Kind::Sphere: {
      const double radius = 1.0 / std::sqrt(s.kappa);
      const double n = p.norm();
      if (n < 1e-300) throw Error("cannot project origin onto sphere chart");
      return (radius / n) * p;
    }
    case GeodesicSpace::Kind::Hyperbolic: {
      const double radius = 1.0 / std::sqrt(-s.kappa);
      const double q = -lorentz(p, p);
      if (q <= 0.0 || p[0] <= 0.0) {
        throw Error("point not in the upper hyperboloid cone");
      }
      return (radius / std::sqrt(q)) * p;
    }
    default:
      throw Error("leaf_retighten on product");
  }
}

Eigen::VectorXd leaf_exp(const GeodesicSpace& s, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& v) {
  switch (s.kind) {
    case GeodesicSpace::Kind::Euclidean:
      return x + v;
    case GeodesicSpace::Kind::Sphere: {
      const double radius = 1.0 / std::sqrt(s.kappa);
      const double n = v.norm();
      if (n < 1e-300) return x;
      const Eigen::VectorXd u = v / n;
      return leaf_retighten(
          s, std::cos(n / radius) * x + std::sin(n / radius) * radius * u);
    }
    case GeodesicSpace::Kind::Hyperbolic: {
      const double radius = 1.0 / std::sqrt(-s.kappa);
      const double n = std::sqrt(std::max(0.0, lorentz(v, v)));
      if (n < 1e-300) return x;
      const Eigen::VectorXd u = v / n;
      return leaf_retighten(
          s, std::cosh(n / radius) * x + std::sinh(n / radius) * radius * u);
    }
    default:
      throw Error("leaf_exp on product");
  }
}

void leaf_validate(const GeodesicSpace& s, const Eigen::VectorXd& p) {
  switch (s.kind) {
    case GeodesicSpace::Kind::Euclidean:
      return;
    case GeodesicSpace::Kind::Sphere: {
      const double radius = 1.0 / std::sqrt(s.kappa);
      if (std::abs(p.norm() - radius) > 1e-9 * radius) {
        throw Error("point violates the sphere chart constraint");
      }
      return;
    }
    case GeodesicSpace::Kind::Hyperbolic: {
      const double r2 = -1.0 / s.kappa;
      if (std::abs(lorentz(p, p) + r2) > 1e-9 * r2 || p[0] <= 0.0) {
        throw Error("point violates the hyperboloid chart constraint");
      }
      return;
    }
    default:
      throw Error("leaf_validate on product");
  }
}

// Tangent projection at a chart point.
Eigen::VectorXd leaf_tangent_project(const GeodesicSpace& s,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v) {
  switch (s.kind) {
    case GeodesicSpace::Kind::Euclidean:
      return v;
    case GeodesicSpace::Kind::Sphere: {
      const double r2 = 1.0 / s.kappa;
      return v - (x.dot(v) / r2) * x;
    }
    case GeodesicSpace::Kind::Hyperbolic: {
      const double r2 = -1.0 / s.kappa;
      return v + (lorentz(x, v) / r2) * x;
    }
    default:
      throw Error("leaf_tangent_project on product");
  }
}

std::vector<Eigen::VectorXd> leaf_tangent_basis(const GeodesicSpace& s,
                                                const Eigen::VectorXd& x) {
  std::vector<Eigen::VectorXd> basis;
  const int target = s.intrinsic_dim();
  for (int i = 0; i < s.ambient_dim() && static_cast<int>(basis.size()) < target;
       ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(s.ambient_dim());
    v[i] = 1.0;
    v = leaf_tangent_project(s, x, v);
    for (const auto& b : basis) v -= leaf_inner(s, b, v) * b;
    const double n2 = leaf_inner(s, v, v);
    if (n2 > 1e-20) basis.push_back(v / std::sqrt(n2));
  }
  if (static_cast<int>(basis.size()) != target) {
    throw Error("tangent basis construction failed");
  }
  return basis;
}

double sn_kappa(double kappa, double s) {
  if (kappa > 0.0) return std::sin(std::sqrt(kappa) * s) / std::sqrt(kappa);
  if (kappa < 0.0) return std::sinh(std::sqrt(-kappa) * s) / std::sqrt(-kappa);
  return s;
}

}  // namespace

SpacePtr GeodesicSpace::euclidean(int n) {
  if (n < 1) throw Error("euclidean dimension must be >= 1");
  auto s = std::make_shared<GeodesicSpace>();
  s->kind = Kind::Euclidean;
  s->dim = n;
  return s;
}

SpacePtr GeodesicSpace::sphere(int n, double kappa) {
  if (n < 1 || kappa <= 0.0) throw Error("sphere needs n >= 1 and kappa > 0");
  auto s = std::make_shared<GeodesicSpace>();
  s->kind = Kind::Sphere;
  s->dim = n;
  s->kappa = kappa;
  return s;
}

SpacePtr GeodesicSpace::hyperbolic(int n, double kappa) {
  if (n < 1 || kappa >= 0.0) {
    throw Error("hyperbolic needs n >= 1 and kappa < 0");
  }
  auto s = std::make_shared<GeodesicSpace>();
  s->kind = Kind::Hyperbolic;
  s->dim = n;
  s->kappa = kappa;
  return s;
}

SpacePtr GeodesicSpace::product(std::vector<SpacePtr> factors) {
  if (factors.size() < 2) throw Error("product needs at least two factors");
  auto s = std::make_shared<GeodesicSpace>();
  s->kind = Kind::Product;
  s->factors = std::move(factors);
  return s;
}

int GeodesicSpace::ambient_dim() const {
  switch (kind) {
    case Kind::Euclidean:
      return dim;
    case Kind::Sphere:
    case Kind::Hyperbolic:
      return dim + 1;
    case Kind::Product: {
      int n = 0;
      for (const auto& f : factors) n += f->ambient_dim();
      return n;
    }
  }
  return 0;
}

int GeodesicSpace::intrinsic_dim() const {
  if (kind != Kind::Product) return dim;
  int n = 0;
  for (const auto& f : factors) n += f->intrinsic_dim();
  return n;
}

double GeodesicSpace::curvature_upper_bound() const {
  if (kind != Kind::Product) {
    return kind == Kind::Euclidean ? 0.0 : kappa;
  }
  double k = -std::numeric_limits<double>::infinity();
  for (const auto& f : factors) k = std::max(k, f->curvature_upper_bound());
  return k;
}

model::ExtendedReal GeodesicSpace::model_diameter() const {
  return model::diameter_of_model(curvature_upper_bound());
}

bool GeodesicSpace::operator==(const GeodesicSpace& other) const {
  if (kind != other.kind || dim != other.dim || kappa != other.kappa) {
    return false;
  }
  if (factors.size() != other.factors.size()) return false;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (!(*factors[i] == *other.factors[i])) return false;
  }
  return true;
}

SpacePoint make_point(SpacePtr space, Eigen::VectorXd coords) {
  if (!space) throw Error("null space");
  if (coords.size() != space->ambient_dim()) {
    throw Error("coordinate size does not match the space's ambient dimension");
  }
  for (const auto& [leaf, off] : leaves(*space)) {
    leaf_validate(*leaf, coords.segment(off, leaf->ambient_dim()));
  }
  return project_to_chart(std::move(space), coords);
}

SpacePoint project_to_chart(SpacePtr space, const Eigen::VectorXd& raw) {
  Eigen::VectorXd out = raw;
  for (const auto& [leaf, off] : leaves(*space)) {
    out.segment(off, leaf->ambient_dim()) =
        leaf_retighten(*leaf, raw.segment(off, leaf->ambient_dim()));
  }
  return SpacePoint{std::move(space), std::move(out)};
}

bool same_space(const SpacePoint& a, const SpacePoint& b) {
  return a.space && b.space && (a.space == b.space || *a.space == *b.space);
}

double distance(const SpacePoint& x, const SpacePoint& y) {
  if (!same_space(x, y)) {
    throw IncompatibleSpaceError("distance across different spaces");
  }
  double sq = 0.0;
  for (const auto& [leaf, off] : leaves(*x.space)) {
    const double d = leaf_distance(*leaf, x.coords.segment(off, leaf->ambient_dim()),
                                   y.coords.segment(off, leaf->ambient_dim()));
    sq += d * d;
  }
  return std::sqrt(sq);
}

Eigen::VectorXd log_map(const SpacePoint& base, const SpacePoint& target) {
  if (!same_space(base, target)) {
    throw IncompatibleSpaceError("log_map across different spaces");
  }
  Eigen::VectorXd v(base.coords.size());
  for (const auto& [leaf, off] : leaves(*base.space)) {
    const int n = leaf->ambient_dim();
    v.segment(off, n) = leaf_log(*leaf, base.coords.segment(off, n),
                                 target.coords.segment(off, n));
  }
  return v;
}

SpacePoint exp_map(const SpacePoint& base, const Eigen::VectorXd& tangent) {
  if (tangent.size() != base.coords.size()) {
    throw Error("tangent dimension mismatch");
  }
  Eigen::VectorXd out(base.coords.size());
  for (const auto& [leaf, off] : leaves(*base.space)) {
    const int n = leaf->ambient_dim();
    out.segment(off, n) =
        leaf_exp(*leaf, base.coords.segment(off, n), tangent.segment(off, n));
  }
  return SpacePoint{base.space, std::move(out)};
}

SpacePoint geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) {
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  return exp_map(x, t * log_map(x, y));
}

double tangent_inner(const SpacePoint& base, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& w) {
  double s = 0.0;
  for (const auto& [leaf, off] : leaves(*base.space)) {
    const int n = leaf->ambient_dim();
    s += leaf_inner(*leaf, v.segment(off, n), w.segment(off, n));
  }
  return s;
}

double tangent_norm(const SpacePoint& base, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, tangent_inner(base, v, v)));
}

double angle_at(const SpacePoint& vertex, const SpacePoint& x,
                const SpacePoint& y) {
  const Eigen::VectorXd u = log_map(vertex, x);
  const Eigen::VectorXd w = log_map(vertex, y);
  const double nu = tangent_norm(vertex, u);
  const double nw = tangent_norm(vertex, w);
  if (nu < 1e-14 || nw < 1e-14) {
    throw UndefinedAngleError("angle at coincident points");
  }
  return std::acos(clamp1(tangent_inner(vertex, u, w) / (nu * nw)));
}

std::vector<Eigen::VectorXd> tangent_basis(const SpacePoint& p) {
  std::vector<Eigen::VectorXd> basis;
  const int total = static_cast<int>(p.coords.size());
  for (const auto& [leaf, off] : leaves(*p.space)) {
    const int n = leaf->ambient_dim();
    for (const auto& b : leaf_tangent_basis(*leaf, p.coords.segment(off, n))) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(total);
      v.segment(off, n) = b;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

BallSampler::BallSampler(SpacePoint center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (radius < 0.0) throw Error("negative ball radius");
  const model::ExtendedReal dk = center_.space->model_diameter();
  if (!dk.unbounded && !(radius < dk.value / 2.0)) {
    throw InfeasibleError("ball sampling radius must be < D_kappa / 2");
  }
  const int d = center_.space->intrinsic_dim();
  const double kappa = center_.space->curvature_upper_bound();

  basis_ = tangent_basis(center_);

  // Radial CDF of the model ball: density proportional to sn_kappa(s)^{d-1}.
  constexpr int kGrid = 2048;
  cdf_.assign(kGrid + 1, 0.0);
  auto dens = [&](double s) { return std::pow(sn_kappa(kappa, s), d - 1); };
  for (int i = 1; i <= kGrid; ++i) {
    const double a = radius_ * (i - 1) / kGrid;
    const double b = radius_ * i / kGrid;
    cdf_[i] = cdf_[i - 1] + 0.5 * (dens(a) + dens(b)) * (b - a);
  }
}

SpacePoint BallSampler::sample(Rng& rng) const {
  const int grid = static_cast<int>(cdf_.size()) - 1;
  const double total = cdf_.back();
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(center_.coords.size());
  double norm2 = 0.0;
  for (const auto& b : basis_) {
    const double g = rng.normal();
    dir += g * b;
    norm2 += g * g;
  }
  double r;
  if (total <= 0.0 || norm2 < 1e-28) {
    r = 0.0;
  } else {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const int hi = std::min<int>(grid, static_cast<int>(it - cdf_.begin()));
    const double frac =
        (cdf_[hi] > cdf_[hi - 1]) ? (u - cdf_[hi - 1]) / (cdf_[hi] - cdf_[hi - 1])
                                  : 0.0;
    r = radius_ * (hi - 1 + frac) / grid;
  }
  r *= 1.0 - 1e-12;  // keep strictly inside against roundoff
  if (norm2 > 0.0) dir /= std::sqrt(norm2);
  return exp_map(center_, r * dir);
}

std::vector<SpacePoint> sample_ball(const SpacePoint& center, double radius,
                                    std::uint64_t seed, int count) {
  if (count < 0) throw Error("negative sample count");
  BallSampler sampler(center, radius);
  Rng rng(seed);
  std::vector<SpacePoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(sampler.sample(rng));
  return out;
}

SpacePtr space_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") {
    return GeodesicSpace::euclidean(j.at("dim").get<int>());
  }
  if (kind == "sphere") {
    return GeodesicSpace::sphere(j.at("dim").get<int>(),
                                 j.at("kappa").get<double>());
  }
  if (kind == "hyperbolic") {
    return GeodesicSpace::hyperbolic(j.at("dim").get<int>(),
                                     j.at("kappa").get<double>());
  }
  if (kind == "product") {
    std::vector<SpacePtr> factors;
    for (const auto& f : j.at("factors")) factors.push_back(space_from_json(f));
    return GeodesicSpace::product(std::move(factors));
  }
  throw Error("unknown space kind: " + kind);
}

nlohmann::json space_to_json(const GeodesicSpace& space) {
  nlohmann::json j;
  switch (space.kind) {
    case GeodesicSpace::Kind::Euclidean:
      j["kind"] = "euclidean";
      j["dim"] = space.dim;
      break;
    case GeodesicSpace::Kind::Sphere:
      j["kind"] = "sphere";
      j["dim"] = space.dim;
      j["kappa"] = space.kappa;
      break;
    case GeodesicSpace::Kind::Hyperbolic:
      j["kind"] = "hyperbolic";
      j["dim"] = space.dim;
      j["kappa"] = space.kappa;
      break;
    case GeodesicSpace::Kind::Product: {
      j["kind"] = "product";
      j["factors"] = nlohmann::json::array();
      for (const auto& f : space.factors) j["factors"].push_back(space_to_json(*f));
      break;
    }
  }
  return j;
}

}  // namespace catlab
