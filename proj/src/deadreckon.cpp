#include "speedlearn/deadreckon.hpp"

#include <cmath>
#include <limits>

#include "speedlearn/core.hpp"
#include "speedlearn/error.hpp"

namespace speedlearn::nav {

namespace {

double tilt_roll(const Vec3& f) { return std::atan2(f.y(), f.z()); }
double tilt_pitch(const Vec3& f) { return std::atan2(f.x(), std::hypot(f.y(), f.z())); }

const Trajectory& require_truth(const Drive& drive) {
  if (!drive.truth) throw Error(ErrorCode::kMissingTruth, "drive " + drive.id + " has no ground truth");
  if (drive.truth->size() != drive.imu.size()) {
    throw Error(ErrorCode::kSpanMismatch, "truth and IMU tick counts differ for " + drive.id);
  }
  return *drive.truth;
}

}  // namespace

std::vector<AttitudeState> estimate_attitude(std::span<const ImuSample> imu, double psi0,
                                             double gyro_weight) {
  if (imu.empty()) throw Error(ErrorCode::kEmptyStream, "no IMU samples for attitude estimation");
  std::vector<AttitudeState> out(imu.size());
  out[0] = {tilt_roll(imu[0].f_body), tilt_pitch(imu[0].f_body), wrap_angle(psi0)};
  double psi = psi0;
  for (std::size_t k = 1; k < imu.size(); ++k) {
    const double dt = imu[k].t - imu[k - 1].t;
    const Vec3 w = 0.5 * (imu[k].omega_body + imu[k - 1].omega_body);
    const auto& prev = out[k - 1];
    // Pitch is nose-up positive, i.e. opposite to the rate about body y (left).
    const double roll = prev.roll + w.x() * dt;
    const double pitch = prev.pitch - w.y() * dt;
    psi += w.z() * dt;
    const Vec3& f = imu[k].f_body;
    out[k].roll = wrap_angle(gyro_weight * roll + (1.0 - gyro_weight) * tilt_roll(f));
    out[k].pitch = wrap_angle(gyro_weight * pitch + (1.0 - gyro_weight) * tilt_pitch(f));
    out[k].psi = wrap_angle(psi);
  }
  return out;
}

Pose2D dr_step(const Pose2D& pose, double speed, double psi, double dt) {
  if (speed < 0.0) throw Error(ErrorCode::kNegativeSpeed, "speed " + std::to_string(speed));
  if (!(dt > 0.0)) throw Error(ErrorCode::kNonPositiveDt, "dt " + std::to_string(dt));
  return {pose.p_nav + dt * speed * Vec2(std::cos(psi), std::sin(psi)), psi};
}

SpeedSeries integrate_acceleration_speed(const FeatureStream& features,
                                         std::span<const AttitudeState> att) {
  if (features.size() != att.size()) {
    throw Error(ErrorCode::kLengthMismatch, "attitude count does not match feature count");
  }
  SpeedSeries out;
  out.t = features.t;
  out.s.resize(features.size());
  Vec2 v = Vec2::Zero();
  Vec2 a_prev = Vec2::Zero();
  for (std::size_t k = 0; k < features.size(); ++k) {
    const Vec3 a_nav = body_to_nav(att[k]) * features.x[k].head<3>();
    const Vec2 a = a_nav.head<2>();
    if (k > 0) v += 0.5 * (a + a_prev) * (features.t[k] - features.t[k - 1]);
    a_prev = a;
    out.s[k] = v.norm();
  }
  return out;
}

std::vector<double> hold_window_speeds(const SpeedSeries& predictions, std::size_t ticks,
                                       std::size_t window_len) {
  std::vector<double> out(ticks, 0.0);
  for (std::size_t j = 0; j < ticks; ++j) {
    const std::size_t k = j / window_len;
    if (k == 0) continue;
    const std::size_t src = std::min(k * window_len, predictions.size());
    if (src > 0) out[j] = predictions.s[src - 1];
  }
  return out;
}

NavSolution run_dr(const Drive& drive, const SpeedSource& source, double psi0, const Vec2& p0,
                   const NavOptions& options) {
  if (drive.imu.empty()) throw Error(ErrorCode::kStreamTooShort, "drive has no IMU samples");
  const std::size_t n = drive.imu.size();
  const auto att = pipe::pipeline_attitude(drive, options.tilt, psi0);

  std::vector<double> heading(n);
  if (options.heading == HeadingSource::kTruth) {
    const auto& truth = require_truth(drive);
    for (std::size_t k = 0; k < n; ++k) heading[k] = truth[k].psi;
  } else {
    for (std::size_t k = 0; k < n; ++k) heading[k] = att[k].psi;
  }

  std::vector<double> speed;
  if (std::holds_alternative<GroundTruthSpeed>(source)) {
    const auto& truth = require_truth(drive);
    speed.resize(n);
    for (std::size_t k = 0; k < n; ++k) speed[k] = truth[k].speed;
  } else {
    const FeatureStream features = pipe::make_features(drive.imu, att);
    if (std::holds_alternative<IntegratedAcceleration>(source)) {
      speed = integrate_acceleration_speed(features, att).s;
    } else {
      const auto* model = std::get<ModelSpeed>(source).model;
      if (!model) throw Error(ErrorCode::kInvalidConfig, "model speed source without a model");
      const auto pred = net::predict_stream(*model, features);
      speed = hold_window_speeds(pred, n, static_cast<std::size_t>(model->config.window_len));
    }
  }

  NavSolution sol;
  sol.t.resize(n);
  sol.poses.resize(n);
  sol.speed = speed;
  // Displacement is accumulated from the origin and p0 added per tick, so a
  // shifted start shifts the path without changing its rounding.
  Pose2D rel{Vec2::Zero(), heading[0]};
  sol.t[0] = drive.imu[0].t;
  sol.poses[0] = {p0, heading[0]};
  for (std::size_t k = 1; k < n; ++k) {
    sol.t[k] = drive.imu[k].t;
    rel = dr_step(rel, speed[k], heading[k], sol.t[k] - sol.t[k - 1]);
    sol.poses[k] = {p0 + rel.p_nav, rel.psi};
  }
  return sol;
}

ErrorSeries position_error(const NavSolution& sol, const Trajectory& truth, double horizon) {
  if (sol.size() == 0 || truth.size() < sol.size()) {
    throw Error(ErrorCode::kSpanMismatch, "truth does not cover the solution");
  }
  ErrorSeries out;
  out.t = sol.t;
  out.error.resize(sol.size());
  out.summary.at_horizon = std::numeric_limits<double>::quiet_NaN();
  const double t0 = sol.t.front();
  for (std::size_t k = 0; k < sol.size(); ++k) {
    if (std::abs(truth[k].t - sol.t[k]) > 1e-9) {
      throw Error(ErrorCode::kSpanMismatch, "truth timestamp mismatch at tick " + std::to_string(k));
    }
    const double e = (sol.poses[k].p_nav - truth[k].p_nav).norm();
    out.error[k] = e;
    out.summary.max = std::max(out.summary.max, e);
    if (std::isnan(out.summary.at_horizon) && sol.t[k] - t0 >= horizon - 1e-9) {
      out.summary.at_horizon = e;
    }
  }
  out.summary.at_end = out.error.back();
  return out;
}

std::vector<double> segment_rmse(const SpeedSeries& pred, const SpeedSeries& truth,
                                 std::span<const double> boundaries) {
  if (pred.size() != truth.size() || pred.size() == 0) {
    throw Error(ErrorCode::kSpanMismatch, "series lengths differ or are empty");
  }
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (std::abs(pred.t[k] - truth.t[k]) > 1e-9) {
      throw Error(ErrorCode::kSpanMismatch, "series timestamps differ at " + std::to_string(k));
    }
  }
  if (boundaries.size() < 2) throw Error(ErrorCode::kSpanMismatch, "need at least two boundaries");
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if ((i > 0 && !(boundaries[i] > boundaries[i - 1])) ||
        boundaries[i] < pred.t.front() - 1e-9 || boundaries[i] > pred.t.back() + 1e-9) {
      throw Error(ErrorCode::kSpanMismatch, "boundaries must increase within the series span");
    }
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    const bool last = i + 2 == boundaries.size();
    double sse = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      const double t = pred.t[k];
      if (t < boundaries[i] || t > boundaries[i + 1] || (!last && t == boundaries[i + 1])) continue;
      const double e = pred.s[k] - truth.s[k];
      sse += e * e;
      ++n;
    }
    out.push_back(n == 0 ? std::numeric_limits<double>::quiet_NaN()
                         : std::sqrt(sse / static_cast<double>(n)));
  }
  return out;
}

SpeedSeries truth_speed(const Trajectory& truth) {
  SpeedSeries s;
  for (const auto& tick : truth) {
    s.t.push_back(tick.t);
    s.s.push_back(tick.speed);
  }
  return s;
}

}  // namespace speedlearn::nav
