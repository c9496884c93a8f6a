#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "speedlearn/drive_sim.hpp"
#include "speedlearn/labelpipe.hpp"
#include "speedlearn/speednet.hpp"

namespace speedlearn::cfg {

struct SimSection {
  int drives = 4;
  double duration = 600.0;          // s per training drive
  double heldout_duration = 240.0;  // s, 0 disables the held-out drive
  double max_speed = 18.0;
  std::uint64_t seed = 1;
  // Explicit profile; when empty every drive gets a random city profile.
  std::vector<sim::Segment> segments;
  double psi0 = 0.0;  // heading of explicit profiles
  sim::ImuNoiseModel imu;
  std::vector<sim::VibrationWindow> heldout_vibration_windows;
  double rtk_position_std = 0.02;
};

struct PipeSection {
  double split_ratio = 0.85;
  pipe::TiltSource tilt = pipe::TiltSource::kTruthIfAvailable;
};

enum class NavMode { kPlain, kAided, kTruth };

struct NavSection {
  NavMode mode = NavMode::kAided;
  bool truth_heading = false;
  double horizon = 60.0;
  std::vector<double> segment_boundaries;  // s, for per-span speed RMSE
};

struct RunConfig {
  SimSection sim;
  PipeSection pipe;
  net::ModelConfig model;
  net::TrainConfig train;
  NavSection nav;

  RunConfig();
  // Throws Error(kInvalidConfig) naming the offending key.
  void validate() const;
  // Reseeds every random stream from one value.
  void apply_seed(std::uint64_t seed);
};

// Parses an INI document with sections [sim] [pipe] [model] [train] [nav].
// Unknown sections or keys are rejected; omitted keys keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Every key with its resolved value, in a form parse_config accepts.
std::string resolved_config(const RunConfig& config);
void write_resolved_config(const std::filesystem::path& path, const RunConfig& config);

struct KeyDoc {
  std::string section;
  std::string key;
  std::string description;
};
std::vector<KeyDoc> documented_keys();
std::string config_help();

// Deterministic per-stream seeds derived from the run seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace speedlearn::cfg
