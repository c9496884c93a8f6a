#pragma once

#include <span>
#include <variant>
#include <vector>

#include "speedlearn/labelpipe.hpp"
#include "speedlearn/speednet.hpp"
#include "speedlearn/types.hpp"

namespace speedlearn::nav {

inline constexpr double kGyroWeight = 0.98;

// Complementary filter for roll/pitch (gyro propagation weighted 0.98 per
// step against accelerometer tilt); heading is the integral of the z rate
// from psi0. Roll/pitch start from the first sample's accelerometer tilt.
std::vector<AttitudeState> estimate_attitude(std::span<const ImuSample> imu, double psi0,
                                             double gyro_weight = kGyroWeight);

// p' = p + dt * s * (cos psi, sin psi).
Pose2D dr_step(const Pose2D& pose, double speed, double psi, double dt);

// Rotates the gravity-free specific force to the navigation frame and
// integrates its horizontal part (trapezoidal, v(0) = 0); speed is |v|.
SpeedSeries integrate_acceleration_speed(const FeatureStream& features,
                                         std::span<const AttitudeState> att);

// Turns window-cadence predictions into one speed per IMU tick: while window
// k is being collected the last output of window k-1 is held (0 before the
// first window completes).
std::vector<double> hold_window_speeds(const SpeedSeries& predictions, std::size_t ticks,
                                       std::size_t window_len = kWindowLen);

struct ModelSpeed {
  const net::SpeedModel* model = nullptr;
};
struct IntegratedAcceleration {};
struct GroundTruthSpeed {};

using SpeedSource = std::variant<ModelSpeed, IntegratedAcceleration, GroundTruthSpeed>;

enum class HeadingSource { kGyro, kTruth };

struct NavOptions {
  pipe::TiltSource tilt = pipe::TiltSource::kTruthIfAvailable;
  HeadingSource heading = HeadingSource::kGyro;
};

struct NavSolution {
  std::vector<double> t;
  std::vector<Pose2D> poses;
  std::vector<double> speed;

  std::size_t size() const { return t.size(); }
};

NavSolution run_dr(const Drive& drive, const SpeedSource& source, double psi0, const Vec2& p0,
                   const NavOptions& options = {});

struct ErrorSummary {
  double max = 0.0;
  double at_horizon = 0.0;  // NaN when the solution is shorter than the horizon
  double at_end = 0.0;
};

struct ErrorSeries {
  std::vector<double> t;
  std::vector<double> error;
  ErrorSummary summary;
};

ErrorSeries position_error(const NavSolution& sol, const Trajectory& truth, double horizon = 60.0);

// RMSE per [b_i, b_{i+1}) span (last span closed); series must share timestamps.
std::vector<double> segment_rmse(const SpeedSeries& pred, const SpeedSeries& truth,
                                 std::span<const double> boundaries);

SpeedSeries truth_speed(const Trajectory& truth);

}  // namespace speedlearn::nav
