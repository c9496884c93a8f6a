#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "speedlearn/types.hpp"

namespace speedlearn::pipe {

using WindowInput = Eigen::Matrix<double, kWindowLen, kChannels>;
using WindowLabel = Eigen::Matrix<double, kWindowLen, 1>;

struct LabeledWindow {
  WindowInput x = WindowInput::Zero();
  WindowLabel y = WindowLabel::Zero();
  bool valid = false;
  std::string drive_id;
  std::int64_t index = 0;

  static LabeledWindow padding() { return {}; }
};

// One chronological window sequence from a single drive (or a contiguous span
// of one).
struct Lane {
  std::string drive_id;
  std::vector<LabeledWindow> windows;
};

struct WindowBatch {
  std::vector<LabeledWindow> windows;  // one per lane, fixed lane order
  std::int64_t step = 0;

  std::size_t lanes() const { return windows.size(); }
};

struct DatasetSplit {
  std::vector<Lane> train;
  std::vector<Lane> val;
  double ratio = 0.85;

  std::size_t train_windows() const;
  std::size_t val_windows() const;
};

// Derivative of each position component (central differences inside,
// one-sided at the ends) followed by the Euclidean norm.
SpeedSeries positions_to_speed(std::span<const GnssFix> fixes);

// Linear interpolation of a 50 Hz series onto the 100 Hz grid; N samples in,
// 2N-1 out, original samples kept bit-for-bit.
SpeedSeries upsample_speed(const SpeedSeries& s50);

// Resamples labels onto the IMU timestamps (linear, holding the end values)
// and clamps at zero.
SpeedSeries align_labels(const SpeedSeries& labels, std::span<const double> imu_t);

// f_out = f - R^T (0, 0, g); equal to R^T (R f - (0, 0, g)).
std::vector<Vec3> remove_gravity(std::span<const ImuSample> imu,
                                 std::span<const AttitudeState> att);

// Gravity-free specific force next to the untouched angular rate.
FeatureStream make_features(std::span<const ImuSample> imu, std::span<const AttitudeState> att);

// Non-overlapping windows of kWindowLen; the trailing remainder is dropped.
std::vector<LabeledWindow> make_windows(const std::string& drive_id, const FeatureStream& features,
                                        const SpeedSeries& labels);

// Batch k holds window k of every lane; shorter lanes are padded with invalid
// all-zero windows.
std::vector<WindowBatch> make_batches(std::span<const Lane> lanes,
                                      std::size_t max_lanes = 4);

// Fits any number of lanes into at most max_lanes by appending whole lanes,
// in order, to the currently shortest packed lane.
std::vector<Lane> pack_lanes(std::span<const Lane> lanes, std::size_t max_lanes);

// Assigns contiguous time spans to train and validation. Whole drives are used
// when that lands the train fraction in [0.80, 0.90]; otherwise every drive is
// cut chronologically at `ratio`.
DatasetSplit split_train_val(std::vector<Lane> lanes, double ratio = 0.85);

enum class TiltSource { kTruthIfAvailable, kFilter };

// Attitude used for gravity removal: complementary-filter roll/pitch (or the
// flat-road truth when requested and available) with gyro-integrated heading
// starting at psi0 (default: truth heading at t0, else 0).
std::vector<AttitudeState> pipeline_attitude(const Drive& drive, TiltSource tilt,
                                             std::optional<double> psi0 = std::nullopt);

// Drive -> labels -> features -> windows, in one lane.
Lane prepare_drive(const Drive& drive, TiltSource tilt = TiltSource::kTruthIfAvailable);

}  // namespace speedlearn::pipe
