#include "speedlearn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "speedlearn/error.hpp"
#include "speedlearn/formats.hpp"

namespace speedlearn::cfg {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, key + ": " + why);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto s = trim(v);
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || end != s.data() + s.size()) bad(key, "expected a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto s = trim(v);
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || end != s.data() + s.size()) bad(key, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto s = trim(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad(key, "expected true/false, got '" + v + "'");
}

Vec3 to_vec3(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 3) bad(key, "expected three comma-separated numbers");
  return {to_double(key, parts[0]), to_double(key, parts[1]), to_double(key, parts[2])};
}

std::string vec3_text(const Vec3& v) {
  return io::format_double(v.x()) + "," + io::format_double(v.y()) + "," + io::format_double(v.z());
}

std::vector<sim::VibrationWindow> to_windows(const std::string& key, const std::string& v) {
  std::vector<sim::VibrationWindow> out;
  for (const auto& item : split(v, ';')) {
    const auto f = split(item, ':');
    if (f.size() != 3) bad(key, "expected t_start:t_end:extra_std entries separated by ';'");
    out.push_back({to_double(key, f[0]), to_double(key, f[1]), to_double(key, f[2])});
  }
  return out;
}

std::string windows_text(const std::vector<sim::VibrationWindow>& ws) {
  std::string s;
  for (const auto& w : ws) {
    if (!s.empty()) s += ";";
    s += io::format_double(w.t_start) + ":" + io::format_double(w.t_end) + ":" +
         io::format_double(w.extra_std);
  }
  return s;
}

std::vector<sim::Segment> to_segments(const std::string& key, const std::string& v) {
  std::vector<sim::Segment> out;
  for (const auto& item : split(v, ';')) {
    const auto f = split(item, ':');
    if (f.size() != 4) bad(key, "expected kind:duration:speed:radius entries separated by ';'");
    sim::Segment seg;
    if (f[0] == "straight") {
      seg.kind = sim::SegmentKind::kStraight;
    } else if (f[0] == "arc") {
      seg.kind = sim::SegmentKind::kArc;
    } else if (f[0] == "stop") {
      seg.kind = sim::SegmentKind::kStop;
    } else {
      bad(key, "unknown segment kind '" + f[0] + "'");
    }
    seg.duration = to_double(key, f[1]);
    seg.target_speed = to_double(key, f[2]);
    seg.radius = to_double(key, f[3]);
    out.push_back(seg);
  }
  return out;
}

std::string segments_text(const std::vector<sim::Segment>& segs) {
  std::string s;
  for (const auto& seg : segs) {
    if (!s.empty()) s += ";";
    s += seg.kind == sim::SegmentKind::kStraight ? "straight"
         : seg.kind == sim::SegmentKind::kArc    ? "arc"
                                                 : "stop";
    s += ":" + io::format_double(seg.duration) + ":" + io::format_double(seg.target_speed) + ":" +
         io::format_double(seg.radius);
  }
  return s;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + io::format_double(x);
  return s;
}

struct KeySpec {
  std::string section;
  std::string key;
  std::string description;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SL_NUM(SEC, KEY, FIELD, DESC)                                                       \
  KeySpec {                                                                                 \
    SEC, KEY, DESC, [](RunConfig& c, const std::string& v) { c.FIELD = to_double(SEC "." KEY, v); }, \
        [](const RunConfig& c) { return io::format_double(c.FIELD); }                       \
  }
#define SL_INT(SEC, KEY, FIELD, TYPE, DESC)                                                    \
  KeySpec {                                                                                    \
    SEC, KEY, DESC,                                                                            \
        [](RunConfig& c, const std::string& v) { c.FIELD = to_int<TYPE>(SEC "." KEY, v); },    \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                             \
  }

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      SL_INT("sim", "drives", sim.drives, int, "number of training drives to simulate"),
      SL_NUM("sim", "duration", sim.duration, "duration of each training drive, s (> 0)"),
      SL_NUM("sim", "heldout_duration", sim.heldout_duration,
             "duration of the held-out navigation drive, s (0 disables it)"),
      SL_NUM("sim", "max_speed", sim.max_speed, "upper speed of random profiles, m/s (<= 25)"),
      SL_INT("sim", "seed", sim.seed, std::uint64_t, "run seed; every stream seed derives from it"),
      KeySpec{"sim", "segments",
              "explicit profile 'kind:duration:speed:radius;...' (kind straight|arc|stop); "
              "empty = random city profiles",
              [](RunConfig& c, const std::string& v) { c.sim.segments = to_segments("sim.segments", v); },
              [](const RunConfig& c) { return segments_text(c.sim.segments); }},
      SL_NUM("sim", "psi0", sim.psi0, "initial heading of an explicit profile, rad"),
      KeySpec{"sim", "accel_bias", "constant accelerometer bias x,y,z, m/s^2",
              [](RunConfig& c, const std::string& v) { c.sim.imu.accel_bias = to_vec3("sim.accel_bias", v); },
              [](const RunConfig& c) { return vec3_text(c.sim.imu.accel_bias); }},
      KeySpec{"sim", "gyro_bias", "constant gyro bias x,y,z, rad/s",
              [](RunConfig& c, const std::string& v) { c.sim.imu.gyro_bias = to_vec3("sim.gyro_bias", v); },
              [](const RunConfig& c) { return vec3_text(c.sim.imu.gyro_bias); }},
      SL_NUM("sim", "accel_noise_std", sim.imu.accel_noise_std, "accelerometer white noise, m/s^2"),
      SL_NUM("sim", "gyro_noise_std", sim.imu.gyro_noise_std, "gyro white noise, rad/s"),
      SL_NUM("sim", "road_vibration_gain", sim.imu.road_vibration_gain,
             "vertical vibration std per unit speed, (m/s^2)/(m/s)"),
      KeySpec{"sim", "vibration_windows",
              "extra accelerometer noise on training drives 't_start:t_end:std;...'",
              [](RunConfig& c, const std::string& v) {
                c.sim.imu.vibration_windows = to_windows("sim.vibration_windows", v);
              },
              [](const RunConfig& c) { return windows_text(c.sim.imu.vibration_windows); }},
      KeySpec{"sim", "heldout_vibration_windows",
              "extra accelerometer noise on the held-out drive 't_start:t_end:std;...'",
              [](RunConfig& c, const std::string& v) {
                c.sim.heldout_vibration_windows = to_windows("sim.heldout_vibration_windows", v);
              },
              [](const RunConfig& c) { return windows_text(c.sim.heldout_vibration_windows); }},
      SL_NUM("sim", "rtk_position_std", sim.rtk_position_std, "fix noise per axis, m"),

      SL_NUM("pipe", "split_ratio", pipe.split_ratio, "train fraction of all windows"),
      KeySpec{"pipe", "tilt_source",
              "roll/pitch for gravity removal: truth (flat-road truth when available) | filter",
              [](RunConfig& c, const std::string& v) {
                const auto s = trim(v);
                if (s == "truth") {
                  c.pipe.tilt = pipe::TiltSource::kTruthIfAvailable;
                } else if (s == "filter") {
                  c.pipe.tilt = pipe::TiltSource::kFilter;
                } else {
                  bad("pipe.tilt_source", "expected truth or filter");
                }
              },
              [](const RunConfig& c) {
                return std::string(c.pipe.tilt == pipe::TiltSource::kFilter ? "filter" : "truth");
              }},

      SL_INT("model", "h1", model.h1, int, "hidden size of the unidirectional LSTM"),
      SL_INT("model", "h2", model.h2, int, "per-direction hidden size of the first bi-LSTM"),
      SL_INT("model", "h3", model.h3, int, "per-direction hidden size of the second bi-LSTM"),
      SL_INT("model", "seed", model.seed, std::uint64_t, "weight initialisation seed"),

      SL_INT("train", "epochs", train.epochs, int, "training epochs"),
      SL_INT("train", "batch_lanes", train.batch_lanes, std::size_t,
             "parallel drive lanes per batch"),
      SL_NUM("train", "learning_rate", train.learning_rate, "Adam step size"),
      SL_NUM("train", "beta1", train.beta1, "Adam first-moment decay"),
      SL_NUM("train", "beta2", train.beta2, "Adam second-moment decay"),
      SL_NUM("train", "epsilon", train.epsilon, "Adam denominator guard"),
      SL_NUM("train", "clip_norm", train.clip_norm, "global gradient-norm clip"),
      SL_INT("train", "patience", train.patience, int,
             "early stop after this many epochs without validation gain (0 = off)"),
      SL_NUM("train", "min_delta", train.min_delta, "smallest validation RMSE gain that counts, m/s"),
      KeySpec{"train", "restore_best", "return the best-validation weights when early stopping",
              [](RunConfig& c, const std::string& v) { c.train.restore_best = to_bool("train.restore_best", v); },
              [](const RunConfig& c) { return std::string(c.train.restore_best ? "true" : "false"); }},

      KeySpec{"nav", "mode", "speed source: plain (integrated acceleration) | aided (model) | truth",
              [](RunConfig& c, const std::string& v) {
                const auto s = trim(v);
                if (s == "plain") {
                  c.nav.mode = NavMode::kPlain;
                } else if (s == "aided") {
                  c.nav.mode = NavMode::kAided;
                } else if (s == "truth") {
                  c.nav.mode = NavMode::kTruth;
                } else {
                  bad("nav.mode", "expected plain, aided or truth");
                }
              },
              [](const RunConfig& c) {
                return std::string(c.nav.mode == NavMode::kPlain   ? "plain"
                                   : c.nav.mode == NavMode::kAided ? "aided"
                                                                   : "truth");
              }},
      KeySpec{"nav", "truth_heading", "use ground-truth heading instead of gyro integration",
              [](RunConfig& c, const std::string& v) { c.nav.truth_heading = to_bool("nav.truth_heading", v); },
              [](const RunConfig& c) { return std::string(c.nav.truth_heading ? "true" : "false"); }},
      SL_NUM("nav", "horizon", nav.horizon, "time after start at which the error is reported, s"),
      KeySpec{"nav", "segment_boundaries", "span boundaries for per-span speed RMSE, s (comma list)",
              [](RunConfig& c, const std::string& v) {
                c.nav.segment_boundaries = to_list("nav.segment_boundaries", v);
              },
              [](const RunConfig& c) { return list_text(c.nav.segment_boundaries); }},
  };
  return keys;
}

#undef SL_NUM
#undef SL_INT

}  // namespace

RunConfig::RunConfig() {
  // Calibrated so the default desk-scale run shows both effects the model is
  // meant to address: plain integration drifting by hundreds of metres within
  // four minutes, and degraded speed estimates on a rough stretch of road.
  sim.imu.accel_bias = Vec3(0.15, -0.09, 0.06);
  sim.imu.gyro_bias = Vec3(0.0, 0.0, 2e-4);
  sim.imu.accel_noise_std = 0.05;
  sim.imu.gyro_noise_std = 0.002;
  sim.imu.road_vibration_gain = 0.03;
  sim.imu.vibration_windows = {{150.0, 190.0, 0.8}, {420.0, 450.0, 0.8}};
  sim.heldout_vibration_windows = {{110.0, 150.0, 0.8}};
  nav.segment_boundaries = {0.0, 110.0, 150.0, 233.0};
}

void RunConfig::validate() const {
  if (sim.drives < 1) bad("sim.drives", "must be >= 1");
  if (!(sim.duration > 0.0)) bad("sim.duration", "must be > 0");
  if (!(sim.heldout_duration >= 0.0)) bad("sim.heldout_duration", "must be >= 0");
  if (!(sim.max_speed > 0.0 && sim.max_speed <= sim::kMaxSpeed)) bad("sim.max_speed", "must be in (0, 25]");
  if (!(sim.imu.accel_noise_std >= 0.0)) bad("sim.accel_noise_std", "must be >= 0");
  if (!(sim.imu.gyro_noise_std >= 0.0)) bad("sim.gyro_noise_std", "must be >= 0");
  if (!(sim.imu.road_vibration_gain >= 0.0)) bad("sim.road_vibration_gain", "must be >= 0");
  if (!(sim.rtk_position_std >= 0.0)) bad("sim.rtk_position_std", "must be >= 0");
  auto check_windows = [](const std::vector<sim::VibrationWindow>& ws, double duration,
                          const char* key) {
    for (const auto& w : ws) {
      if (!(w.t_start >= 0.0 && w.t_end > w.t_start && w.t_end <= duration && w.extra_std >= 0.0)) {
        bad(key, "windows must satisfy 0 <= start < end <= drive duration and std >= 0 "
                 "(override the window list, possibly empty, for shorter drives)");
      }
    }
  };
  if (!sim.segments.empty()) {
    sim::DriveProfile p;
    p.segments = sim.segments;
    try {
      sim::validate(p);
    } catch (const Error& e) {
      bad("sim.segments", e.what());
    }
  }
  check_windows(sim.imu.vibration_windows, sim.duration, "sim.vibration_windows");
  if (sim.heldout_duration > 0.0) {
    check_windows(sim.heldout_vibration_windows, sim.heldout_duration, "sim.heldout_vibration_windows");
  }
  if (!(pipe.split_ratio > 0.0 && pipe.split_ratio < 1.0)) bad("pipe.split_ratio", "must be in (0, 1)");
  try {
    model.validate();
    train.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  if (!(nav.horizon > 0.0)) bad("nav.horizon", "must be > 0");
  for (std::size_t i = 1; i < nav.segment_boundaries.size(); ++i) {
    if (!(nav.segment_boundaries[i] > nav.segment_boundaries[i - 1])) {
      bad("nav.segment_boundaries", "must be increasing");
    }
  }
}

void RunConfig::apply_seed(std::uint64_t seed) {
  sim.seed = seed;
  model.seed = derive_seed(seed, 0x6d6f64656cULL);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finaliser over the combined value.
  std::uint64_t z = base * 0x9e3779b97f4a7c15ULL + stream + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  const auto& keys = registry();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      bad(section, "keys must live inside a [section]");
    }
    if (std::none_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.section == section; })) {
      bad(section, "unknown config section");
    }
    for (const auto& [key, value] : body) {
      auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) {
        return k.section == section && k.key == key;
      });
      if (it == keys.end()) bad(section + "." + key, "unknown config key");
      it->set(c, value.data());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string resolved_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : registry()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.key + " = " + k.get(config) + "\n";
  }
  return out;
}

void write_resolved_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << resolved_config(config);
}

std::vector<KeyDoc> documented_keys() {
  std::vector<KeyDoc> out;
  for (const auto& k : registry()) out.push_back({k.section, k.key, k.description});
  return out;
}

std::string config_help() {
  const RunConfig defaults;
  std::string out = "Config keys (section.key [default]: meaning):\n";
  for (const auto& k : registry()) {
    out += "  " + k.section + "." + k.key + " [" + k.get(defaults) + "]: " + k.description + "\n";
  }
  return out;
}

}  // namespace speedlearn::cfg
