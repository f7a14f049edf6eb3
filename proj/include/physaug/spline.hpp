#pragma once

#include <vector>

namespace physaug::stda {

/// Natural cubic spline (zero second derivative at both ends) through
/// strictly increasing abscissae. One knot gives a constant, two a line.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;

  const std::vector<double>& knots_x() const { return xs_; }
  const std::vector<double>& knots_y() const { return ys_; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> m_;  // second derivatives at the knots
};

/// `count` evenly spaced positions covering [first, last].
std::vector<double> linspace(double first, double last, std::size_t count);

}  // namespace physaug::stda
