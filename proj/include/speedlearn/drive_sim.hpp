#pragma once

#include <cstdint>
#include <vector>

#include "speedlearn/types.hpp"

namespace speedlearn::sim {

enum class SegmentKind { kStraight, kArc, kStop };

struct Segment {
  SegmentKind kind = SegmentKind::kStraight;
  double duration = 0.0;      // s
  double target_speed = 0.0;  // m/s, reached by a ramp at the segment start
  double radius = 0.0;        // m, signed (positive turns left); arcs only
};

inline constexpr double kMaxSpeed = 25.0;       // m/s
inline constexpr double kMaxLongAccel = 3.0;    // m/s^2, peak of the speed ramp

// The drive starts at the first segment's target speed, heading psi0, at the
// origin.
struct DriveProfile {
  std::vector<Segment> segments;
  std::uint64_t seed = 0;
  double dt = kImuPeriod;
  double psi0 = 0.0;

  double duration() const;
};

struct VibrationWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  double extra_std = 0.0;  // m/s^2, added white noise on all accelerometer axes
};

struct ImuNoiseModel {
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
  double accel_noise_std = 0.0;
  double gyro_noise_std = 0.0;
  // Road-induced vertical vibration: extra z-axis white noise whose standard
  // deviation grows linearly with speed (m/s^2 per m/s).
  double road_vibration_gain = 0.0;
  std::vector<VibrationWindow> vibration_windows;
  std::uint64_t seed = 0;

  static ImuNoiseModel noiseless() { return {}; }
};

struct RtkNoiseModel {
  double position_std = 0.02;
  std::uint64_t seed = 0;
};

// Duration of the raised-cosine ramp that changes speed by delta_speed with
// peak acceleration kMaxLongAccel.
double ramp_duration(double delta_speed);

void validate(const DriveProfile& profile);

// Ground truth on the dt grid, t = 0 .. duration inclusive.
Trajectory gen_trajectory(const DriveProfile& profile);

std::vector<ImuSample> trajectory_to_imu(const Trajectory& truth, const ImuNoiseModel& noise);

// Every second truth tick (50 Hz) plus Gaussian noise per axis.
std::vector<GnssFix> trajectory_to_fixes(const Trajectory& truth, const RtkNoiseModel& noise);

// Random city-style profile: a stop at the start, then straights, turns,
// roundabouts and stops at urban speeds until `duration` is filled.
DriveProfile random_city_profile(double duration, std::uint64_t seed, double max_speed = 18.0);

struct DriveSummary {
  double duration = 0.0;
  double distance = 0.0;
  double max_speed = 0.0;
};

DriveSummary summarize(const Trajectory& truth);

// Convenience: profile + noise models -> aligned Drive with truth attached.
Drive simulate_drive(const DriveProfile& profile, const ImuNoiseModel& imu_noise,
                     const RtkNoiseModel& rtk_noise, std::string id);

}  // namespace speedlearn::sim
