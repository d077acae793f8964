#pragma once

#include <Eigen/Dense>

#include <array>
#include <limits>

#include "catlab/errors.hpp"

namespace catlab::model {

// Extended real for diameters: never used in arithmetic, only compared.
struct ExtendedReal {
  double value = 0.0;
  bool unbounded = false;

  static ExtendedReal finite(double v) { return {v, false}; }
  static ExtendedReal infinity() {
    return {std::numeric_limits<double>::max(), true};
  }

  bool less_than(double x) const { return !unbounded && value < x; }
  bool at_least(double x) const { return unbounded || value >= x; }
};

// Diameter D_kappa of the model surface: infinity for kappa <= 0,
// pi/sqrt(kappa) for kappa > 0.
ExtendedReal diameter_of_model(double kappa);

// cos_kappa(t) = cos(sqrt(kappa) * t), only defined for kappa > 0.
double cos_kappa(double kappa, double t);

// Curvature bound kappa together with the safety margin epsilon in (0,1)
// defining D_{kappa,eps} = (1 - eps) D_kappa.
struct CurvatureClass {
  double kappa;
  double epsilon;

  CurvatureClass(double kappa_, double epsilon_);

  ExtendedReal model_diameter() const { return diameter_of_model(kappa); }
  // D_{kappa,eps} as an extended real.
  ExtendedReal effective_diameter() const;
};

// Convexity modulus k, barycenter Lipschitz constant Gamma, and the
// extension constant C = Gamma (16 Gamma^2 (2/k) + 1).
struct EffectiveConstants {
  double k;
  double gamma;
  double c_ext;
};

EffectiveConstants effective_constants(const CurvatureClass& cc);

// Triangle in M^2(kappa) realizing the given side lengths. Charts:
// plane z = 0 for kappa = 0, sphere of radius 1/sqrt(kappa) for kappa > 0,
// hyperboloid (x0 timelike) of curvature kappa for kappa < 0. Placement is
// canonical: first vertex on the chart base axis, second along a fixed
// meridian, third in the upper half.
struct ComparisonTriangle {
  std::array<double, 3> side_lengths;  // d(x,y), d(y,z), d(z,x)
  std::array<Eigen::Vector3d, 3> vertices;
  double kappa;
};

ComparisonTriangle comparison_triangle(double a, double b, double c,
                                       double kappa);

// Distance between two chart points of M^2(kappa) as embedded above.
double model_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                      double kappa);

// Angle between the sides of lengths a and b, opposite side given, via the
// law of cosines of M^2(kappa).
double comparison_angle(double a, double b, double opposite, double kappa);

}  // namespace catlab::model
