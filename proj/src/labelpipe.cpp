#include "speedlearn/labelpipe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "speedlearn/core.hpp"
#include "speedlearn/deadreckon.hpp"
#include "speedlearn/error.hpp"

namespace speedlearn::pipe {

std::size_t DatasetSplit::train_windows() const {
  std::size_t n = 0;
  for (const auto& lane : train) n += lane.windows.size();
  return n;
}

std::size_t DatasetSplit::val_windows() const {
  std::size_t n = 0;
  for (const auto& lane : val) n += lane.windows.size();
  return n;
}

SpeedSeries positions_to_speed(std::span<const GnssFix> fixes) {
  const std::size_t n = fixes.size();
  if (n < 3) throw Error(ErrorCode::kTooFewFixes, "need at least 3 fixes, got " + std::to_string(n));
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = fixes[i].t - fixes[i - 1].t;
    if (std::abs(dt - kFixPeriod) > 0.1 * kFixPeriod) {
      throw Error(ErrorCode::kNonUniformRate,
                  "fix spacing " + std::to_string(dt) + " s at index " + std::to_string(i));
    }
  }

  SpeedSeries out;
  out.t.resize(n);
  out.s.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    const Vec2 v = (fixes[hi].p_nav - fixes[lo].p_nav) / (fixes[hi].t - fixes[lo].t);
    out.t[i] = fixes[i].t;
    out.s[i] = v.norm();
  }
  return out;
}

SpeedSeries upsample_speed(const SpeedSeries& s50) {
  const std::size_t n = s50.size();
  if (n == 0 || s50.t.size() != n) throw Error(ErrorCode::kEmptySeries, "nothing to upsample");
  SpeedSeries out;
  out.t.resize(2 * n - 1);
  out.s.resize(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out.t[2 * i] = s50.t[i];
    out.s[2 * i] = s50.s[i];
    if (i + 1 < n) {
      out.t[2 * i + 1] = 0.5 * (s50.t[i] + s50.t[i + 1]);
      out.s[2 * i + 1] = 0.5 * (s50.s[i] + s50.s[i + 1]);
    }
  }
  return out;
}

SpeedSeries align_labels(const SpeedSeries& labels, std::span<const double> imu_t) {
  if (labels.size() == 0) throw Error(ErrorCode::kEmptySeries, "no labels to align");
  SpeedSeries out;
  out.t.assign(imu_t.begin(), imu_t.end());
  out.s.resize(imu_t.size());
  const auto& lt = labels.t;
  for (std::size_t i = 0; i < imu_t.size(); ++i) {
    const double t = imu_t[i];
    double v;
    if (t <= lt.front()) {
      v = labels.s.front();
    } else if (t >= lt.back()) {
      v = labels.s.back();
    } else {
      const auto hi = static_cast<std::size_t>(std::upper_bound(lt.begin(), lt.end(), t) - lt.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - lt[lo]) / (lt[hi] - lt[lo]);
      v = w == 0.0 ? labels.s[lo] : labels.s[lo] + w * (labels.s[hi] - labels.s[lo]);
    }
    out.s[i] = std::max(v, 0.0);
  }
  return out;
}

std::vector<Vec3> remove_gravity(std::span<const ImuSample> imu,
                                 std::span<const AttitudeState> att) {
  if (imu.size() != att.size()) {
    throw Error(ErrorCode::kLengthMismatch, "attitude count " + std::to_string(att.size()) +
                                                " != IMU count " + std::to_string(imu.size()));
  }
  const Vec3 up_g(0.0, 0.0, kGravity);
  std::vector<Vec3> out(imu.size());
  for (std::size_t i = 0; i < imu.size(); ++i) {
    out[i] = imu[i].f_body - body_to_nav(att[i]).transpose() * up_g;
  }
  return out;
}

FeatureStream make_features(std::span<const ImuSample> imu, std::span<const AttitudeState> att) {
  const auto f = remove_gravity(imu, att);
  FeatureStream out;
  out.t.resize(imu.size());
  out.x.resize(imu.size());
  for (std::size_t i = 0; i < imu.size(); ++i) {
    out.t[i] = imu[i].t;
    out.x[i] << f[i], imu[i].omega_body;
  }
  return out;
}

std::vector<LabeledWindow> make_windows(const std::string& drive_id, const FeatureStream& features,
                                        const SpeedSeries& labels) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "labels " + std::to_string(labels.size()) +
                                                " vs features " + std::to_string(features.size()));
  }
  const std::size_t count = features.size() / kWindowLen;
  std::vector<LabeledWindow> out(count);
  for (std::size_t w = 0; w < count; ++w) {
    auto& win = out[w];
    for (int r = 0; r < kWindowLen; ++r) {
      const std::size_t i = w * kWindowLen + static_cast<std::size_t>(r);
      win.x.row(r) = features.x[i].transpose();
      win.y(r) = labels.s[i];
    }
    win.valid = true;
    win.drive_id = drive_id;
    win.index = static_cast<std::int64_t>(w);
  }
  return out;
}

std::vector<WindowBatch> make_batches(std::span<const Lane> lanes, std::size_t max_lanes) {
  if (lanes.empty()) throw Error(ErrorCode::kNoLanes, "no lanes to batch");
  if (lanes.size() > max_lanes) {
    throw Error(ErrorCode::kShapeMismatch, std::to_string(lanes.size()) + " lanes exceed batch size " +
                                               std::to_string(max_lanes));
  }
  std::size_t steps = 0;
  for (const auto& lane : lanes) steps = std::max(steps, lane.windows.size());

  std::vector<WindowBatch> out(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    out[k].step = static_cast<std::int64_t>(k);
    out[k].windows.reserve(lanes.size());
    for (const auto& lane : lanes) {
      out[k].windows.push_back(k < lane.windows.size() ? lane.windows[k] : LabeledWindow::padding());
    }
  }
  return out;
}

std::vector<Lane> pack_lanes(std::span<const Lane> lanes, std::size_t max_lanes) {
  if (lanes.empty()) throw Error(ErrorCode::kNoLanes, "no lanes to pack");
  if (max_lanes == 0) throw Error(ErrorCode::kInvalidConfig, "max_lanes must be >= 1");
  if (lanes.size() <= max_lanes) return {lanes.begin(), lanes.end()};
  std::vector<Lane> packed(max_lanes);
  for (const auto& lane : lanes) {
    auto target = std::min_element(packed.begin(), packed.end(), [](const Lane& a, const Lane& b) {
      return a.windows.size() < b.windows.size();
    });
    target->drive_id += target->drive_id.empty() ? lane.drive_id : "+" + lane.drive_id;
    target->windows.insert(target->windows.end(), lane.windows.begin(), lane.windows.end());
  }
  return packed;
}

DatasetSplit split_train_val(std::vector<Lane> lanes, double ratio) {
  if (lanes.size() < 2) throw Error(ErrorCode::kTooFewDrives, "need at least 2 drives to split");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::kInvalidConfig, "ratio must be in (0, 1)");

  std::vector<std::size_t> sizes;
  for (const auto& lane : lanes) sizes.push_back(lane.windows.size());
  const double total = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  if (total == 0.0) throw Error(ErrorCode::kEmptyDataset, "drives contain no windows");

  // Whole drives: the last k drives go to validation.
  std::size_t best_k = 0;
  double best_gap = 1e300;
  double best_frac = 0.0;
  double suffix = 0.0;
  for (std::size_t k = 1; k < lanes.size(); ++k) {
    suffix += static_cast<double>(sizes[lanes.size() - k]);
    const double frac = (total - suffix) / total;
    if (std::abs(frac - ratio) < best_gap) {
      best_gap = std::abs(frac - ratio);
      best_k = k;
      best_frac = frac;
    }
  }

  DatasetSplit split;
  split.ratio = ratio;
  if (best_frac >= 0.80 && best_frac <= 0.90) {
    const std::size_t n_train = lanes.size() - best_k;
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      (i < n_train ? split.train : split.val).push_back(std::move(lanes[i]));
    }
    return split;
  }

  // Otherwise cut every drive: leading part trains, trailing part validates.
  for (auto& lane : lanes) {
    const std::size_t n = lane.windows.size();
    if (n < 2) {
      if (n == 1) split.train.push_back(std::move(lane));
      continue;
    }
    auto cut = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    cut = std::clamp<std::size_t>(cut, 1, n - 1);
    Lane val{lane.drive_id, {}};
    val.windows.assign(std::make_move_iterator(lane.windows.begin() + static_cast<std::ptrdiff_t>(cut)),
                       std::make_move_iterator(lane.windows.end()));
    lane.windows.resize(cut);
    split.train.push_back(std::move(lane));
    split.val.push_back(std::move(val));
  }
  return split;
}

std::vector<AttitudeState> pipeline_attitude(const Drive& drive, TiltSource tilt,
                                             std::optional<double> psi0) {
  if (!psi0) psi0 = drive.truth && !drive.truth->empty() ? drive.truth->front().psi : 0.0;
  auto att = nav::estimate_attitude(drive.imu, *psi0);
  if (tilt == TiltSource::kTruthIfAvailable && drive.truth) {
    // Simulated drives are on a flat road.
    for (auto& a : att) a.roll = a.pitch = 0.0;
  }
  return att;
}

Lane prepare_drive(const Drive& drive, TiltSource tilt) {
  const auto s50 = positions_to_speed(drive.fixes);
  const auto s100 = upsample_speed(s50);
  std::vector<double> imu_t(drive.imu.size());
  for (std::size_t i = 0; i < drive.imu.size(); ++i) imu_t[i] = drive.imu[i].t;
  const auto labels = align_labels(s100, imu_t);
  const auto att = pipeline_attitude(drive, tilt);
  const auto features = make_features(drive.imu, att);
  return {drive.id, make_windows(drive.id, features, labels)};
}

}  // namespace speedlearn::pipe
