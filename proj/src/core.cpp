#include "speedlearn/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "speedlearn/error.hpp"

namespace speedlearn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyStream: return "EmptyStream";
    case ErrorCode::kNonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::kGapTooLarge: return "GapTooLarge";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kInfeasibleProfile: return "InfeasibleProfile";
    case ErrorCode::kInvalidProfile: return "InvalidProfile";
    case ErrorCode::kTooFewFixes: return "TooFewFixes";
    case ErrorCode::kNonUniformRate: return "NonUniformRate";
    case ErrorCode::kEmptySeries: return "EmptySeries";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNoLanes: return "NoLanes";
    case ErrorCode::kTooFewDrives: return "TooFewDrives";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kStreamTooShort: return "StreamTooShort";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kMissingTruth: return "MissingTruth";
    case ErrorCode::kSpanMismatch: return "SpanMismatch";
    case ErrorCode::kNegativeSpeed: return "NegativeSpeed";
    case ErrorCode::kNonPositiveDt: return "NonPositiveDt";
    case ErrorCode::kDivergence: return "Divergence";
  }
  return "Unknown";
}

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw Error(ErrorCode::kNonFinite, "wrap_angle input is not finite");
  }
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::remainder(theta, kTwoPi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

Eigen::Matrix3d body_to_nav(const AttitudeState& att) {
  using Eigen::AngleAxisd;
  // Rotation about +y (left) is nose-down, hence the sign flip on pitch.
  return (AngleAxisd(att.psi, Vec3::UnitZ()) * AngleAxisd(-att.pitch, Vec3::UnitY()) *
          AngleAxisd(att.roll, Vec3::UnitX()))
      .toRotationMatrix();
}

namespace {

template <typename Sample>
void check_stream(std::span<const Sample> samples, double period, const char* name) {
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyStream, std::string(name) + " stream is empty");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dt = samples[i].t - samples[i - 1].t;
    if (!(dt > 0.0)) {
      throw Error(ErrorCode::kNonMonotonicTime,
                  std::string(name) + " time not strictly increasing at index " +
                      std::to_string(i));
    }
    if (dt > kMaxGapPeriods * period + 1e-9) {
      throw Error(ErrorCode::kGapTooLarge, std::string(name) + " gap of " +
                                               std::to_string(dt) + " s at index " +
                                               std::to_string(i));
    }
  }
}

}  // namespace

Drive align_streams(std::span<const ImuSample> imu, std::span<const GnssFix> fixes,
                    std::string id) {
  check_stream(imu, kImuPeriod, "IMU");
  check_stream(fixes, kFixPeriod, "fix");

  const double t0 = imu.front().t;
  const double t1 = imu.back().t;
  Drive drive;
  drive.id = std::move(id);
  drive.imu.assign(imu.begin(), imu.end());
  for (const auto& fix : fixes) {
    if (fix.t >= t0 && fix.t <= t1) drive.fixes.push_back(fix);
  }
  if (drive.fixes.empty()) {
    throw Error(ErrorCode::kEmptyStream, "no fixes inside the IMU span");
  }
  drive.duration = t1 - t0;
  constexpr double kCoverageTol = 0.5 * kFixPeriod + 1e-9;
  drive.partial_fix_coverage = drive.fixes.front().t - t0 > kCoverageTol ||
                               t1 - drive.fixes.back().t > kCoverageTol;
  return drive;
}

}  // namespace speedlearn
