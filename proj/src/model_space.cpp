#include "catlab/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace catlab::model {

namespace {

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

void require_feasible_sides(double a, double b, double c, double kappa) {
  if (a < 0.0 || b < 0.0 || c < 0.0) {
    throw InfeasibleError("negative side length");
  }
  const double tol = 1e-12 * std::max({1.0, a, b, c});
  if (a > b + c + tol || b > a + c + tol || c > a + b + tol) {
    throw InfeasibleError("triangle inequality violated");
  }
  const ExtendedReal dk = diameter_of_model(kappa);
  if (!dk.unbounded && a + b + c >= 2.0 * dk.value) {
    throw InfeasibleError("perimeter >= 2 D_kappa, no comparison triangle");
  }
}

}  // namespace

ExtendedReal diameter_of_model(double kappa) {
  if (kappa <= 0.0) return ExtendedReal::infinity();
  return ExtendedReal::finite(M_PI / std::sqrt(kappa));
}

double cos_kappa(double kappa, double t) {
  if (kappa <= 0.0) {
    throw Error("cos_kappa requires kappa > 0");
  }
  return std::cos(std::sqrt(kappa) * t);
}

CurvatureClass::CurvatureClass(double kappa_, double epsilon_)
    : kappa(kappa_), epsilon(epsilon_) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error("epsilon must lie strictly inside (0,1)");
  }
}

ExtendedReal CurvatureClass::effective_diameter() const {
  const ExtendedReal dk = model_diameter();
  if (dk.unbounded) return dk;
  return ExtendedReal::finite((1.0 - epsilon) * dk.value);
}

EffectiveConstants effective_constants(const CurvatureClass& cc) {
  EffectiveConstants out{};
  if (cc.kappa <= 0.0) {
    out.k = 2.0;
    out.gamma = 1.0;
  } else {
    const double eps = cc.epsilon;
    out.k = (M_PI - eps * M_PI) * std::tan(eps * M_PI / 2.0);
    out.gamma = M_PI / (2.0 * std::sqrt(2.0) *
                        std::pow(std::cos((1.0 - eps) * M_PI / 2.0), 0.25));
  }
  out.c_ext = out.gamma * (16.0 * out.gamma * out.gamma * (2.0 / out.k) + 1.0);
  return out;
}

double model_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                      double kappa) {
  if (kappa == 0.0) {
    return (p - q).norm();
  }
  if (kappa > 0.0) {
    const double radius = 1.0 / std::sqrt(kappa);
    return radius * std::acos(clamp1(p.dot(q) * kappa));
  }
  const double radius = 1.0 / std::sqrt(-kappa);
  const double lorentz = -p.x() * q.x() + p.y() * q.y() + p.z() * q.z();
  const double c = std::max(1.0, -lorentz / (radius * radius));
  return radius * std::acosh(c);
}

ComparisonTriangle comparison_triangle(double a, double b, double c,
                                       double kappa) {
  require_feasible_sides(a, b, c, kappa);
  ComparisonTriangle tri;
  tri.side_lengths = {a, b, c};
  tri.kappa = kappa;

  // Angle at the first vertex, between the sides of lengths a and c.
  const double theta =
      (a == 0.0 || c == 0.0) ? 0.0 : comparison_angle(a, c, b, kappa);

  if (kappa == 0.0) {
    tri.vertices[0] = Eigen::Vector3d(0.0, 0.0, 0.0);
    tri.vertices[1] = Eigen::Vector3d(a, 0.0, 0.0);
    tri.vertices[2] =
        Eigen::Vector3d(c * std::cos(theta), c * std::sin(theta), 0.0);
  } else if (kappa > 0.0) {
    const double r = 1.0 / std::sqrt(kappa);
    tri.vertices[0] = Eigen::Vector3d(r, 0.0, 0.0);
    tri.vertices[1] =
        r * Eigen::Vector3d(std::cos(a / r), std::sin(a / r), 0.0);
    tri.vertices[2] =
        r * Eigen::Vector3d(std::cos(c / r), std::sin(c / r) * std::cos(theta),
                            std::sin(c / r) * std::sin(theta));
  } else {
    const double r = 1.0 / std::sqrt(-kappa);
    tri.vertices[0] = Eigen::Vector3d(r, 0.0, 0.0);
    tri.vertices[1] =
        r * Eigen::Vector3d(std::cosh(a / r), std::sinh(a / r), 0.0);
    tri.vertices[2] = r * Eigen::Vector3d(std::cosh(c / r),
                                          std::sinh(c / r) * std::cos(theta),
                                          std::sinh(c / r) * std::sin(theta));
  }
  return tri;
}

double comparison_angle(double a, double b, double opposite, double kappa) {
  if (a <= 0.0 || b <= 0.0) {
    throw UndefinedAngleError("comparison angle needs both adjacent sides > 0");
  }
  require_feasible_sides(a, b, opposite, kappa);
  double cos_angle;
  if (kappa == 0.0) {
    cos_angle = (a * a + b * b - opposite * opposite) / (2.0 * a * b);
  } else if (kappa > 0.0) {
    const double s = std::sqrt(kappa);
    cos_angle = (std::cos(s * opposite) - std::cos(s * a) * std::cos(s * b)) /
                (std::sin(s * a) * std::sin(s * b));
  } else {
    const double s = std::sqrt(-kappa);
    cos_angle = (std::cosh(s * a) * std::cosh(s * b) - std::cosh(s * opposite)) /
                (std::sinh(s * a) * std::sinh(s * b));
  }
  return std::acos(clamp1(cos_angle));
}

}  // namespace catlab::model
