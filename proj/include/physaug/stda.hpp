#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace physaug::stda {

/// T x C window of IMU channels. Channels come in triaxial groups: accel
/// xyz then gyro xyz for each sensor.
struct SignalWindow {
  Eigen::MatrixXd data;
  double sample_rate_hz = 100.0;
  std::uint32_t label = 0;

  std::size_t frames() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t channels() const { return static_cast<std::size_t>(data.cols()); }
};

enum class CurveKind { Magnitude, Time };

/// Per-sample scale factors (Magnitude) or monotone source indices (Time).
/// The knot arrays record the control points the curve was built from.
struct WarpCurve {
  CurveKind kind = CurveKind::Magnitude;
  std::vector<double> values;
  std::vector<double> knot_positions;
  std::vector<double> knot_values;

  static WarpCurve constant(std::size_t length, double value);
  static WarpCurve identity_time(std::size_t length);
  /// Throws InvalidArgument unless a time curve is nondecreasing with endpoints 0 and T-1.
  void validate() const;
};

/// alpha ~ N(1, sigma^2). Shared by signal- and parameter-space amplitude scaling.
double sample_scale_factor(double sigma, std::uint64_t seed);

/// Natural spline through `knots` values drawn from N(1, sigma^2) placed
/// evenly on [0, T-1], evaluated at every integer t.
WarpCurve make_magnitude_curve(std::size_t length, double sigma, int knots, std::uint64_t seed);

/// Smooth monotone warp: knot speeds from U[1/r, r], natural-spline smoothed,
/// clamped to [1/r, r], integrated and rescaled so w(0) = 0 and w(T-1) = T-1.
WarpCurve make_time_warp(std::size_t length, int knots, double max_speed_ratio, std::uint64_t seed);

SignalWindow scale_magnitude(const SignalWindow& x, double alpha);
SignalWindow magnitude_scale(const SignalWindow& x, double sigma, std::uint64_t seed);

SignalWindow apply_magnitude_curve(const SignalWindow& x, const WarpCurve& curve);
SignalWindow magnitude_warp(const SignalWindow& x, double sigma, int knots, std::uint64_t seed);

/// Output length round(T / beta); sample t reads X at t * beta (clamped), linearly interpolated.
SignalWindow time_scale(const SignalWindow& x, double beta);

SignalWindow apply_time_warp(const SignalWindow& x, const WarpCurve& curve);
SignalWindow time_warp(const SignalWindow& x, int knots, double max_speed_ratio, std::uint64_t seed);

/// Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Matrix3d euler_zyx_matrix(double yaw, double pitch, double roll);
/// Per-axis angles from U[-range, range] radians.
Eigen::Matrix3d random_rotation(std::uint64_t seed, double range_rad);
SignalWindow rotate_by(const SignalWindow& x, const Eigen::Matrix3d& r);
SignalWindow rotate(const SignalWindow& x, std::uint64_t seed);

SignalWindow jitter(const SignalWindow& x, double sigma, std::uint64_t seed);

/// Crops, or pads by holding the last sample, to exactly `length` frames.
SignalWindow fit_length(const SignalWindow& x, std::size_t length);

/// Linear interpolation of row `pos` of `data`, pos clamped to [0, rows-1].
Eigen::RowVectorXd interp_row(const Eigen::MatrixXd& data, double pos);

}  // namespace physaug::stda
