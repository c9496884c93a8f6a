#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "speedlearn/drive_sim.hpp"
#include "speedlearn/labelpipe.hpp"
#include "speedlearn/speednet.hpp"
#include "speedlearn/types.hpp"

namespace speedlearn::testing {

inline constexpr double kPi = 3.14159265358979323846;

inline sim::Segment straight(double duration, double speed) {
  return {sim::SegmentKind::kStraight, duration, speed, 0.0};
}
inline sim::Segment arc(double duration, double speed, double radius) {
  return {sim::SegmentKind::kArc, duration, speed, radius};
}
inline sim::Segment stop(double duration) { return {sim::SegmentKind::kStop, duration, 0.0, 0.0}; }

inline sim::DriveProfile profile(std::vector<sim::Segment> segs, double psi0 = 0.0) {
  sim::DriveProfile p;
  p.segments = std::move(segs);
  p.psi0 = psi0;
  return p;
}

// Stationary, level IMU stream with constant readings.
inline std::vector<ImuSample> constant_imu(std::size_t n, const Vec3& f, const Vec3& w = Vec3::Zero()) {
  std::vector<ImuSample> imu(n);
  for (std::size_t k = 0; k < n; ++k) imu[k] = {static_cast<double>(k) * kImuPeriod, f, w};
  return imu;
}

inline std::vector<GnssFix> fixes_from(std::size_t n, const std::function<Vec2(double)>& p) {
  std::vector<GnssFix> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * kFixPeriod;
    out[k] = {t, p(t)};
  }
  return out;
}

inline pipe::LabeledWindow random_window(std::mt19937_64& rng, const std::string& id, std::int64_t index,
                                         double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  pipe::LabeledWindow w;
  for (int r = 0; r < kWindowLen; ++r) {
    for (int c = 0; c < kChannels; ++c) w.x(r, c) = n(rng);
    w.y(r) = u(rng);
  }
  w.valid = true;
  w.drive_id = id;
  w.index = index;
  return w;
}

inline pipe::Lane random_lane(std::mt19937_64& rng, const std::string& id, std::size_t windows) {
  pipe::Lane lane{id, {}};
  for (std::size_t k = 0; k < windows; ++k) {
    lane.windows.push_back(random_window(rng, id, static_cast<std::int64_t>(k)));
  }
  return lane;
}

// Model with every parameter drawn from N(0, scale^2).
inline net::SpeedModel random_model(const net::ModelConfig& cfg, std::mt19937_64& rng, double scale = 0.5) {
  net::SpeedModel m = net::SpeedModel::zeros(cfg);
  std::normal_distribution<double> n(0.0, scale);
  for (auto span : m.parameters()) {
    for (double& v : span) v = n(rng);
  }
  return m;
}

inline net::RecurrentState random_state(const net::ModelConfig& cfg, std::size_t lanes,
                                        std::mt19937_64& rng) {
  auto s = net::RecurrentState::zeros(cfg, lanes);
  std::normal_distribution<double> n(0.0, 0.3);
  for (auto& lane : s.lanes) {
    for (auto* st : {&lane.l1, &lane.l2, &lane.l3}) {
      for (Eigen::Index i = 0; i < st->h.size(); ++i) {
        st->h(i) = n(rng);
        st->c(i) = n(rng);
      }
    }
  }
  return s;
}

inline std::vector<double> flatten(const net::SpeedModel& m) {
  std::vector<double> out;
  for (auto span : m.parameters()) out.insert(out.end(), span.begin(), span.end());
  return out;
}

}  // namespace speedlearn::testing
