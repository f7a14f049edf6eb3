#include "physaug/spline.hpp"

#include <algorithm>
#include <cmath>

#include "physaug/errors.hpp"

namespace physaug::stda {

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)), m_(xs_.size(), 0.0) {
  if (xs_.empty() || xs_.size() != ys_.size()) throw InvalidArgument("spline needs matching, non-empty knot arrays");
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw InvalidArgument("spline knots must be strictly increasing");
  }
  const std::size_t n = xs_.size();
  if (n < 3) return;

  // Thomas algorithm on the interior rows; m_[0] = m_[n-1] = 0.
  const std::size_t k = n - 2;
  std::vector<double> diag(k), upper(k), rhs(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = r + 1;
    const double h0 = xs_[i] - xs_[i - 1];
    const double h1 = xs_[i + 1] - xs_[i];
    diag[r] = 2.0 * (h0 + h1);
    upper[r] = h1;
    rhs[r] = 6.0 * ((ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0);
  }
  for (std::size_t r = 1; r < k; ++r) {
    const double lower = xs_[r + 1] - xs_[r];
    const double f = lower / diag[r - 1];
    diag[r] -= f * upper[r - 1];
    rhs[r] -= f * rhs[r - 1];
  }
  m_[k] = rhs[k - 1] / diag[k - 1];
  for (std::size_t r = k - 1; r-- > 0;) m_[r + 1] = (rhs[r] - upper[r] * m_[r + 2]) / diag[r];
}

double NaturalCubicSpline::operator()(double x) const {
  const std::size_t n = xs_.size();
  if (n == 1) return ys_[0];
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  i = std::min(i, n - 2);
  const double h = xs_[i + 1] - xs_[i];
  const double a = xs_[i + 1] - x;
  const double b = x - xs_[i];
  return m_[i] * a * a * a / (6.0 * h) + m_[i + 1] * b * b * b / (6.0 * h) + (ys_[i] / h - m_[i] * h / 6.0) * a +
         (ys_[i + 1] / h - m_[i + 1] * h / 6.0) * b;
}

std::vector<double> linspace(double first, double last, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = first;
    return out;
  }
  const double step = (last - first) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + step * static_cast<double>(i);
  out.back() = last;
  return out;
}

}  // namespace physaug::stda
