#include "speedlearn/pipeline.hpp"

#include <cstdio>

#include "speedlearn/error.hpp"

namespace speedlearn::run {

namespace {

Drive make_drive(const cfg::RunConfig& c, const std::string& id, double duration, std::uint64_t stream,
                 const std::vector<sim::VibrationWindow>& windows) {
  sim::DriveProfile profile;
  if (c.sim.segments.empty()) {
    profile = sim::random_city_profile(duration, cfg::derive_seed(c.sim.seed, stream), c.sim.max_speed);
  } else {
    profile.segments = c.sim.segments;
    profile.psi0 = c.sim.psi0;
  }
  sim::ImuNoiseModel imu = c.sim.imu;
  imu.vibration_windows = windows;
  imu.seed = cfg::derive_seed(c.sim.seed, stream + 1);
  sim::RtkNoiseModel rtk;
  rtk.position_std = c.sim.rtk_position_std;
  rtk.seed = cfg::derive_seed(c.sim.seed, stream + 2);
  return sim::simulate_drive(profile, imu, rtk, id);
}

}  // namespace

std::vector<Drive> simulate_training_drives(const cfg::RunConfig& config) {
  std::vector<Drive> out;
  for (int d = 0; d < config.sim.drives; ++d) {
    char id[32];
    std::snprintf(id, sizeof(id), "drive_%02d", d);
    out.push_back(make_drive(config, id, config.sim.duration, 100 + 10 * static_cast<std::uint64_t>(d),
                             config.sim.imu.vibration_windows));
  }
  return out;
}

std::optional<Drive> simulate_heldout(const cfg::RunConfig& config) {
  if (config.sim.heldout_duration <= 0.0) return std::nullopt;
  return make_drive(config, "heldout", config.sim.heldout_duration, 9000,
                    config.sim.heldout_vibration_windows);
}

pipe::DatasetSplit prepare_dataset(std::span<const Drive> drives, const cfg::RunConfig& config) {
  std::vector<pipe::Lane> lanes;
  for (const auto& d : drives) lanes.push_back(pipe::prepare_drive(d, config.pipe.tilt));
  return pipe::split_train_val(std::move(lanes), config.pipe.split_ratio);
}

nav::NavSolution navigate(const Drive& drive, cfg::NavMode mode, const net::SpeedModel* model,
                          const cfg::RunConfig& config) {
  nav::SpeedSource source = nav::IntegratedAcceleration{};
  if (mode == cfg::NavMode::kAided) {
    if (!model) throw Error(ErrorCode::kInvalidConfig, "aided mode needs a model");
    source = nav::ModelSpeed{model};
  }
  if (mode == cfg::NavMode::kTruth) source = nav::GroundTruthSpeed{};
  nav::NavOptions options;
  options.tilt = config.pipe.tilt;
  options.heading = config.nav.truth_heading || mode == cfg::NavMode::kTruth ? nav::HeadingSource::kTruth
                                                                               : nav::HeadingSource::kGyro;
  double psi0 = 0.0;
  Vec2 p0 = Vec2::Zero();
  if (drive.truth && !drive.truth->empty()) {
    psi0 = drive.truth->front().psi;
    p0 = drive.truth->front().p_nav;
  }
  return nav::run_dr(drive, source, psi0, p0, options);
}

std::string mode_name(cfg::NavMode mode) {
  switch (mode) {
    case cfg::NavMode::kPlain:
      return "plain";
    case cfg::NavMode::kAided:
      return "aided";
    case cfg::NavMode::kTruth:
      return "truth";
  }
  return "aided";
}

}  // namespace speedlearn::run
