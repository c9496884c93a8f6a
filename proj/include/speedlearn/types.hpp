#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace speedlearn {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

inline constexpr double kGravity = 9.80665;   // m/s^2
inline constexpr double kImuPeriod = 0.01;    // 100 Hz
inline constexpr double kFixPeriod = 0.02;    // 50 Hz
inline constexpr int kWindowLen = 20;
inline constexpr int kChannels = 6;

// Body frame: x forward, y left, z up. A level, stationary accelerometer reads
// (0, 0, +g).
struct ImuSample {
  double t = 0.0;
  Vec3 f_body = Vec3::Zero();      // specific force, m/s^2
  Vec3 omega_body = Vec3::Zero();  // angular rate, rad/s
};

// Local planar East-North position, metres.
struct GnssFix {
  double t = 0.0;
  Vec2 p_nav = Vec2::Zero();
};

struct Pose2D {
  Vec2 p_nav = Vec2::Zero();
  double psi = 0.0;
};

// Pitch is positive nose-up; psi is measured from nav x (east) towards y.
struct AttitudeState {
  double roll = 0.0;
  double pitch = 0.0;
  double psi = 0.0;
};

struct TruthTick {
  double t = 0.0;
  Vec2 p_nav = Vec2::Zero();
  double psi = 0.0;
  double speed = 0.0;     // m/s
  double accel = 0.0;     // longitudinal, ds/dt
  double yaw_rate = 0.0;  // dpsi/dt
};

using Trajectory = std::vector<TruthTick>;

struct Drive {
  std::string id;
  std::vector<ImuSample> imu;
  std::vector<GnssFix> fixes;
  std::optional<Trajectory> truth;
  double duration = 0.0;
  // Set when the fix span is strictly inside the IMU span.
  bool partial_fix_coverage = false;
};

struct SpeedSeries {
  std::vector<double> t;
  std::vector<double> s;

  std::size_t size() const { return s.size(); }
};

// Gravity-removed IMU channels (3 specific force, 3 angular rate) on the IMU
// clock; this is what the speed network consumes.
struct FeatureStream {
  std::vector<double> t;
  std::vector<Vec6> x;

  std::size_t size() const { return x.size(); }
};

}  // namespace speedlearn
