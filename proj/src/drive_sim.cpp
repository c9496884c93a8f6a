#include "speedlearn/drive_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "speedlearn/core.hpp"
#include "speedlearn/error.hpp"

namespace speedlearn::sim {

namespace {

constexpr double kPi = std::numbers::pi;

// Segment with its resolved start state.
struct PlannedSegment {
  SegmentKind kind;
  double t0, t1;
  double s0, s1;
  double ramp;
  double radius;
  double psi0;
};

struct Kinematics {
  double speed, accel, psi, yaw_rate;
};

// Distance travelled since the segment start.
double travelled(const PlannedSegment& seg, double tau) {
  const double ds = seg.s1 - seg.s0;
  if (seg.ramp <= 0.0) return seg.s1 * tau;
  if (tau <= seg.ramp) {
    return seg.s0 * tau + 0.5 * ds * (tau - seg.ramp / kPi * std::sin(kPi * tau / seg.ramp));
  }
  return seg.s0 * seg.ramp + 0.5 * ds * seg.ramp + seg.s1 * (tau - seg.ramp);
}

Kinematics evaluate(const PlannedSegment& seg, double t) {
  const double tau = t - seg.t0;
  Kinematics k{};
  if (seg.ramp > 0.0 && tau < seg.ramp) {
    const double ds = seg.s1 - seg.s0;
    const double phase = kPi * tau / seg.ramp;
    k.speed = seg.s0 + 0.5 * ds * (1.0 - std::cos(phase));
    k.accel = 0.5 * ds * kPi / seg.ramp * std::sin(phase);
  } else {
    k.speed = seg.s1;
    k.accel = 0.0;
  }
  k.speed = std::max(k.speed, 0.0);
  if (seg.kind == SegmentKind::kArc) {
    k.psi = seg.psi0 + travelled(seg, tau) / seg.radius;
    k.yaw_rate = k.speed / seg.radius;
  } else {
    k.psi = seg.psi0;
    k.yaw_rate = 0.0;
  }
  return k;
}

std::vector<PlannedSegment> plan(const DriveProfile& profile) {
  std::vector<PlannedSegment> out;
  double t = 0.0;
  double speed = profile.segments.front().target_speed;
  double psi = profile.psi0;
  for (const auto& s : profile.segments) {
    PlannedSegment p{s.kind, t, t + s.duration, speed, s.target_speed,
                     ramp_duration(s.target_speed - speed), s.radius, psi};
    out.push_back(p);
    t = p.t1;
    speed = s.target_speed;
    if (s.kind == SegmentKind::kArc) psi += travelled(p, s.duration) / s.radius;
  }
  return out;
}

std::size_t find_segment(const std::vector<PlannedSegment>& segs, double t) {
  auto it = std::upper_bound(segs.begin(), segs.end(), t,
                             [](double v, const PlannedSegment& s) { return v < s.t1; });
  if (it == segs.end()) return segs.size() - 1;
  return static_cast<std::size_t>(it - segs.begin());
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 5> kGlNodes = {0.0, -0.5384693101056831, 0.5384693101056831,
                                            -0.9061798459386640, 0.9061798459386640};
constexpr std::array<double, 5> kGlWeights = {0.5688888888888889, 0.4786286704993665,
                                              0.4786286704993665, 0.2369268850561891,
                                              0.2369268850561891};

Vec2 integrate_velocity(const PlannedSegment& seg, double a, double b) {
  Vec2 acc = Vec2::Zero();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    const Kinematics k = evaluate(seg, mid + half * kGlNodes[i]);
    acc += kGlWeights[i] * k.speed * Vec2(std::cos(k.psi), std::sin(k.psi));
  }
  return half * acc;
}

// Displacement over [a, b], split at segment and ramp boundaries so that each
// quadrature piece has a smooth integrand.
Vec2 displacement(const std::vector<PlannedSegment>& segs, double a, double b) {
  Vec2 d = Vec2::Zero();
  std::size_t i = find_segment(segs, a);
  double lo = a;
  while (lo < b) {
    const auto& seg = segs[i];
    const double seg_end = (i + 1 == segs.size()) ? b : std::min(seg.t1, b);
    const double ramp_end = seg.t0 + seg.ramp;
    if (seg.ramp > 0.0 && lo < ramp_end && ramp_end < seg_end) {
      d += integrate_velocity(seg, lo, ramp_end);
      lo = ramp_end;
    }
    if (seg_end > lo) d += integrate_velocity(seg, lo, seg_end);
    lo = seg_end;
    if (i + 1 < segs.size()) ++i;
  }
  return d;
}

}  // namespace

double DriveProfile::duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

double ramp_duration(double delta_speed) {
  return kPi * std::abs(delta_speed) / (2.0 * kMaxLongAccel);
}

void validate(const DriveProfile& profile) {
  if (profile.segments.empty()) throw Error(ErrorCode::kInvalidProfile, "no segments");
  if (!(profile.dt > 0.0)) throw Error(ErrorCode::kInvalidProfile, "dt must be positive");
  double speed = profile.segments.front().target_speed;
  for (std::size_t i = 0; i < profile.segments.size(); ++i) {
    const auto& s = profile.segments[i];
    const std::string where = "segment " + std::to_string(i);
    if (!(s.duration > 0.0)) throw Error(ErrorCode::kInvalidProfile, where + ": duration <= 0");
    if (!(s.target_speed >= 0.0 && s.target_speed <= kMaxSpeed)) {
      throw Error(ErrorCode::kInvalidProfile, where + ": speed outside [0, 25] m/s");
    }
    if (s.kind == SegmentKind::kArc && (s.radius == 0.0 || !std::isfinite(s.radius))) {
      throw Error(ErrorCode::kInvalidProfile, where + ": arc radius must be non-zero");
    }
    if (s.kind == SegmentKind::kStop && s.target_speed != 0.0) {
      throw Error(ErrorCode::kInvalidProfile, where + ": stop must target 0 m/s");
    }
    if (ramp_duration(s.target_speed - speed) > s.duration + 1e-12) {
      throw Error(ErrorCode::kInfeasibleProfile,
                  where + ": speed change does not fit in the segment duration");
    }
    speed = s.target_speed;
  }
}

Trajectory gen_trajectory(const DriveProfile& profile) {
  validate(profile);
  const auto segs = plan(profile);
  const double total = profile.duration();
  const auto n = static_cast<std::size_t>(std::floor(total / profile.dt + 1e-9)) + 1;

  Trajectory out;
  out.reserve(n);
  Vec2 p = Vec2::Zero();
  double t_prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * profile.dt;
    if (k > 0) p += displacement(segs, t_prev, t);
    const Kinematics kin = evaluate(segs[find_segment(segs, t)], t);
    out.push_back({t, p, wrap_angle(kin.psi), kin.speed, kin.accel, kin.yaw_rate});
    t_prev = t;
  }
  return out;
}

std::vector<ImuSample> trajectory_to_imu(const Trajectory& truth, const ImuNoiseModel& noise) {
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ImuSample> out;
  out.reserve(truth.size());
  for (const auto& tick : truth) {
    ImuSample s;
    s.t = tick.t;
    // Flat road: forward specific force is the speed derivative, lateral is
    // centripetal.
    s.f_body = Vec3(tick.accel, tick.speed * tick.yaw_rate, kGravity);
    s.omega_body = Vec3(0.0, 0.0, tick.yaw_rate);

    double window_std = 0.0;
    for (const auto& w : noise.vibration_windows) {
      if (tick.t >= w.t_start && tick.t < w.t_end) window_std = std::max(window_std, w.extra_std);
    }
    const double road_std = noise.road_vibration_gain * tick.speed;

    std::array<double, 10> z{};
    for (auto& v : z) v = normal(rng);
    const Vec3 accel_noise = noise.accel_noise_std * Vec3(z[0], z[1], z[2]);
    const Vec3 gyro_noise = noise.gyro_noise_std * Vec3(z[3], z[4], z[5]);
    const Vec3 window_noise = window_std * Vec3(z[7], z[8], z[9]);
    s.f_body += noise.accel_bias + accel_noise + window_noise;
    s.f_body.z() += road_std * z[6];
    s.omega_body += noise.gyro_bias + gyro_noise;
    out.push_back(s);
  }
  return out;
}

std::vector<GnssFix> trajectory_to_fixes(const Trajectory& truth, const RtkNoiseModel& noise) {
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<GnssFix> out;
  out.reserve(truth.size() / 2 + 1);
  for (std::size_t k = 0; k < truth.size(); k += 2) {
    const double nx = normal(rng);
    const double ny = normal(rng);
    out.push_back({truth[k].t, truth[k].p_nav + noise.position_std * Vec2(nx, ny)});
  }
  return out;
}

DriveProfile random_city_profile(double duration, std::uint64_t seed, double max_speed) {
  if (!(duration > 0.0)) throw Error(ErrorCode::kInvalidProfile, "duration must be positive");
  max_speed = std::clamp(max_speed, 1.0, kMaxSpeed);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  DriveProfile profile;
  profile.seed = seed;
  profile.psi0 = wrap_angle(uniform(-kPi, kPi));

  double elapsed = 0.0;
  double speed = 0.0;
  auto push = [&](Segment seg) {
    const double remaining = duration - elapsed;
    if (seg.duration >= remaining) {
      seg.duration = remaining;
      if (ramp_duration(seg.target_speed - speed) > seg.duration) {
        seg.target_speed = speed;
        if (seg.kind == SegmentKind::kStop && speed != 0.0) seg.kind = SegmentKind::kStraight;
      }
    }
    profile.segments.push_back(seg);
    elapsed += seg.duration;
    speed = seg.target_speed;
  };

  push({SegmentKind::kStop, uniform(5.0, 12.0), 0.0, 0.0});
  while (duration - elapsed > 1e-9) {
    const double u = uniform(0.0, 1.0);
    const bool after_stop = speed == 0.0;
    if (after_stop || u < 0.45) {
      const double target = uniform(std::min(5.0, max_speed), max_speed);
      push({SegmentKind::kStraight, ramp_duration(target - speed) + uniform(4.0, 25.0), target,
            0.0});
    } else if (u < 0.80) {
      const double radius = uniform(10.0, 45.0) * (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      const double target =
          std::min(uniform(4.0, 12.0), std::min(max_speed, std::sqrt(3.5 * std::abs(radius))));
      const double angle = uniform(kPi / 6.0, kPi / 2.0);
      push({SegmentKind::kArc, ramp_duration(target - speed) + angle * std::abs(radius) / target,
            target, radius});
    } else if (u < 0.88) {
      // Roundabout: counter-clockwise, most of a full turn.
      const double radius = uniform(12.0, 25.0);
      const double target = std::min(uniform(5.0, 8.0), std::sqrt(3.5 * radius));
      const double angle = uniform(kPi, 1.75 * kPi);
      push({SegmentKind::kArc, ramp_duration(target - speed) + angle * radius / target, target,
            radius});
    } else {
      push({SegmentKind::kStop, ramp_duration(speed) + uniform(2.0, 12.0), 0.0, 0.0});
    }
  }
  return profile;
}

DriveSummary summarize(const Trajectory& truth) {
  DriveSummary s;
  if (truth.empty()) return s;
  s.duration = truth.back().t - truth.front().t;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    s.max_speed = std::max(s.max_speed, truth[k].speed);
    if (k > 0) s.distance += (truth[k].p_nav - truth[k - 1].p_nav).norm();
  }
  return s;
}

Drive simulate_drive(const DriveProfile& profile, const ImuNoiseModel& imu_noise,
                     const RtkNoiseModel& rtk_noise, std::string id) {
  Trajectory truth = gen_trajectory(profile);
  const auto imu = trajectory_to_imu(truth, imu_noise);
  const auto fixes = trajectory_to_fixes(truth, rtk_noise);
  Drive drive = align_streams(imu, fixes, std::move(id));
  drive.truth = std::move(truth);
  return drive;
}

}  // namespace speedlearn::sim
