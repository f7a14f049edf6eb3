#include "physaug/stda.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "physaug/errors.hpp"
#include "physaug/rng.hpp"
#include "physaug/spline.hpp"

namespace physaug::stda {

WarpCurve WarpCurve::constant(std::size_t length, double value) {
  WarpCurve c;
  c.kind = CurveKind::Magnitude;
  c.values.assign(length, value);
  return c;
}

WarpCurve WarpCurve::identity_time(std::size_t length) {
  WarpCurve c;
  c.kind = CurveKind::Time;
  c.values.resize(length);
  for (std::size_t t = 0; t < length; ++t) c.values[t] = static_cast<double>(t);
  return c;
}

void WarpCurve::validate() const {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("warp curve holds a non-finite value");
  }
  if (kind == CurveKind::Magnitude || values.empty()) return;
  const double last = static_cast<double>(values.size() - 1);
  if (values.front() != 0.0 || values.back() != last) {
    throw InvalidArgument("time warp must start at 0 and end at T-1");
  }
  for (std::size_t t = 1; t < values.size(); ++t) {
    if (values[t] < values[t - 1]) throw InvalidArgument("time warp is not monotone at t=" + std::to_string(t));
  }
}

double sample_scale_factor(double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidArgument("sigma must be non-negative");
  if (sigma == 0.0) return 1.0;
  KeyedStream s = KeyedStream(seed).child("scale");
  return 1.0 + sigma * s.normal();
}

WarpCurve make_magnitude_curve(std::size_t length, double sigma, int knots, std::uint64_t seed) {
  if (length < 2) throw InvalidArgument("magnitude curve needs T >= 2");
  if (knots < 2) throw InvalidArgument("magnitude curve needs at least 2 knots");
  if (sigma < 0.0) throw InvalidArgument("sigma must be non-negative");

  WarpCurve c;
  c.kind = CurveKind::Magnitude;
  c.knot_positions = linspace(0.0, static_cast<double>(length - 1), static_cast<std::size_t>(knots));
  c.knot_values.resize(c.knot_positions.size());
  KeyedStream s = KeyedStream(seed).child("magnitude-knots");
  for (double& v : c.knot_values) v = 1.0 + sigma * s.normal();
  if (sigma == 0.0) {
    c.values.assign(length, 1.0);
    return c;
  }
  const NaturalCubicSpline spline(c.knot_positions, c.knot_values);
  c.values.resize(length);
  for (std::size_t t = 0; t < length; ++t) c.values[t] = spline(static_cast<double>(t));
  return c;
}

WarpCurve make_time_warp(std::size_t length, int knots, double max_speed_ratio, std::uint64_t seed) {
  if (length < 2) throw InvalidArgument("time warp needs T >= 2");
  if (knots < 1) throw InvalidArgument("time warp needs at least 1 knot");
  if (!(max_speed_ratio > 1.0)) throw InvalidArgument("max_speed_ratio must exceed 1");

  const double lo = 1.0 / max_speed_ratio;
  const double hi = max_speed_ratio;
  WarpCurve c;
  c.kind = CurveKind::Time;
  c.knot_positions = linspace(0.0, static_cast<double>(length - 1), static_cast<std::size_t>(knots));
  c.knot_values.resize(c.knot_positions.size());
  KeyedStream s = KeyedStream(seed).child("time-knots");
  for (double& v : c.knot_values) v = s.uniform(lo, hi);

  const NaturalCubicSpline spline(c.knot_positions, c.knot_values);
  std::vector<double> speed(length);
  for (std::size_t t = 0; t < length; ++t) speed[t] = std::clamp(spline(static_cast<double>(t)), lo, hi);

  // Trapezoidal integration of the speed profile.
  c.values.assign(length, 0.0);
  for (std::size_t t = 1; t < length; ++t) c.values[t] = c.values[t - 1] + 0.5 * (speed[t - 1] + speed[t]);
  const double last = static_cast<double>(length - 1);
  const double scale = last / c.values.back();
  for (double& v : c.values) v *= scale;
  c.values.front() = 0.0;
  c.values.back() = last;
  return c;
}

SignalWindow scale_magnitude(const SignalWindow& x, double alpha) {
  SignalWindow out = x;
  out.data *= alpha;
  return out;
}

SignalWindow magnitude_scale(const SignalWindow& x, double sigma, std::uint64_t seed) {
  const double alpha = sample_scale_factor(sigma, seed);
  if (alpha == 1.0) return x;
  return scale_magnitude(x, alpha);
}

SignalWindow apply_magnitude_curve(const SignalWindow& x, const WarpCurve& curve) {
  if (curve.values.size() != x.frames()) throw LengthError("magnitude curve length differs from window length");
  SignalWindow out = x;
  for (std::size_t t = 0; t < x.frames(); ++t) out.data.row(static_cast<Eigen::Index>(t)) *= curve.values[t];
  return out;
}

SignalWindow magnitude_warp(const SignalWindow& x, double sigma, int knots, std::uint64_t seed) {
  if (sigma == 0.0) return x;
  return apply_magnitude_curve(x, make_magnitude_curve(x.frames(), sigma, knots, seed));
}

Eigen::RowVectorXd interp_row(const Eigen::MatrixXd& data, double pos) {
  const double last = static_cast<double>(data.rows() - 1);
  pos = std::clamp(pos, 0.0, last);
  const auto i0 = static_cast<Eigen::Index>(std::floor(pos));
  const double frac = pos - static_cast<double>(i0);
  if (frac == 0.0) return data.row(i0);
  return (1.0 - frac) * data.row(i0) + frac * data.row(i0 + 1);
}

SignalWindow time_scale(const SignalWindow& x, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("time_scale: beta must be positive");
  if (beta == 1.0) return x;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(static_cast<double>(x.frames()) / beta)));
  SignalWindow out = x;
  out.data.resize(static_cast<Eigen::Index>(n), x.data.cols());
  for (std::size_t t = 0; t < n; ++t) {
    out.data.row(static_cast<Eigen::Index>(t)) = interp_row(x.data, static_cast<double>(t) * beta);
  }
  return out;
}

SignalWindow apply_time_warp(const SignalWindow& x, const WarpCurve& curve) {
  if (curve.kind != CurveKind::Time) throw InvalidArgument("apply_time_warp expects a time curve");
  if (curve.values.size() != x.frames()) throw LengthError("time warp length differs from window length");
  curve.validate();
  SignalWindow out = x;
  for (std::size_t t = 0; t < x.frames(); ++t) {
    out.data.row(static_cast<Eigen::Index>(t)) = interp_row(x.data, curve.values[t]);
  }
  return out;
}

SignalWindow time_warp(const SignalWindow& x, int knots, double max_speed_ratio, std::uint64_t seed) {
  if (x.frames() < 2) return x;
  return apply_time_warp(x, make_time_warp(x.frames(), knots, max_speed_ratio, seed));
}

Eigen::Matrix3d euler_zyx_matrix(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Matrix3d random_rotation(std::uint64_t seed, double range_rad) {
  KeyedStream s = KeyedStream(seed).child("rotation");
  const double yaw = s.uniform(-range_rad, range_rad);
  const double pitch = s.uniform(-range_rad, range_rad);
  const double roll = s.uniform(-range_rad, range_rad);
  return euler_zyx_matrix(yaw, pitch, roll);
}

SignalWindow rotate_by(const SignalWindow& x, const Eigen::Matrix3d& r) {
  if (x.channels() % 3 != 0) {
    throw InvalidArgument("rotate: channel count " + std::to_string(x.channels()) + " is not divisible by 3");
  }
  SignalWindow out = x;
  for (Eigen::Index g = 0; g < x.data.cols(); g += 3) {
    // Rows are samples, so R x_n for every n is X R^T.
    out.data.middleCols(g, 3) = x.data.middleCols(g, 3) * r.transpose();
  }
  return out;
}

SignalWindow rotate(const SignalWindow& x, std::uint64_t seed) {
  if (x.channels() % 3 != 0) {
    throw InvalidArgument("rotate: channel count " + std::to_string(x.channels()) + " is not divisible by 3");
  }
  return rotate_by(x, random_rotation(seed, std::numbers::pi));
}

SignalWindow jitter(const SignalWindow& x, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidArgument("jitter: sigma must be non-negative");
  if (sigma == 0.0) return x;
  SignalWindow out = x;
  const KeyedStream base = KeyedStream(seed).child("jitter");
  for (Eigen::Index t = 0; t < out.data.rows(); ++t) {
    KeyedStream s = base.child(static_cast<std::uint64_t>(t));
    for (Eigen::Index c = 0; c < out.data.cols(); ++c) out.data(t, c) += sigma * s.normal();
  }
  return out;
}

SignalWindow fit_length(const SignalWindow& x, std::size_t length) {
  if (x.frames() == length) return x;
  if (x.frames() == 0) throw InvalidArgument("fit_length: empty window");
  SignalWindow out = x;
  const auto n = static_cast<Eigen::Index>(length);
  const Eigen::Index have = x.data.rows();
  out.data.resize(n, x.data.cols());
  const Eigen::Index keep = std::min(n, have);
  out.data.topRows(keep) = x.data.topRows(keep);
  for (Eigen::Index t = keep; t < n; ++t) out.data.row(t) = x.data.row(have - 1);
  return out;
}

}  // namespace physaug::stda
