#pragma once

#include <span>

#include <Eigen/Core>

#include "speedlearn/types.hpp"

namespace speedlearn {

// Wraps to (-pi, pi]. Throws kNonFinite for NaN/inf input.
double wrap_angle(double theta);

// Body-to-navigation rotation for (roll, pitch nose-up, psi).
Eigen::Matrix3d body_to_nav(const AttitudeState& att);

// Maximum tolerated gap between consecutive samples, in nominal periods.
inline constexpr double kMaxGapPeriods = 5.0;

// Builds a Drive from one IMU stream and one fix stream on a shared clock.
// Fixes outside the IMU span are clipped; if what remains covers less than
// the IMU span, Drive::partial_fix_coverage is set.
Drive align_streams(std::span<const ImuSample> imu, std::span<const GnssFix> fixes,
                    std::string id = "drive");

}  // namespace speedlearn
