// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//
// Usage: acceptance [--out DIR] [N ...]
// With no numbers every criterion runs. Exit status is 1 if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "../common/gradcheck.hpp"
#include "../unit/support.hpp"
#include "speedlearn/config.hpp"
#include "speedlearn/deadreckon.hpp"
#include "speedlearn/error.hpp"
#include "speedlearn/formats.hpp"
#include "speedlearn/lstm.hpp"
#include "speedlearn/pipeline.hpp"

namespace fs = std::filesystem;
using namespace speedlearn;
using namespace speedlearn::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> flat(const net::SpeedModel& m) { return flatten(m); }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path g_out = fs::temp_directory_path() / "speedlearn_acceptance";

// ---- 1: analytic gradients against central differences --------------------

Outcome gradient_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t params = 0;
  const int configs = 12;
  for (int i = 0; i < configs; ++i) {
    const auto c = random_grad_case(1000 + static_cast<std::uint64_t>(i));
    const auto r = gradient_check(c.model, c.batch, c.state, 1e-6);
    worst = std::max(worst, r.max_rel);
    params += r.checked;
    o.check(r.checked == c.model.parameter_count(), "every parameter checked");
  }
  const double secs = seconds_since(t0);
  o.check(worst < 1e-5, "max relative error < 1e-5");
  o.check(secs < 60.0, "runtime < 1 min");
  o.note(std::to_string(configs) + " configs, " + std::to_string(params) + " parameters, max rel error " +
         fmt("%.2e", worst) + ", " + fmt("%.1f", secs) + " s");
  return o;
}

// ---- 2: parameter count ----------------------------------------------------

Outcome parameter_count() {
  Outcome o;
  const net::ModelConfig def;
  const auto n = net::parameter_count(def);
  o.check(n == 12889, "default count 12889");
  o.check(net::init_model(def).parameter_count() == n, "built model matches formula");
  const double rel = std::abs(static_cast<double>(n) - 12860.0) / 12860.0;
  o.check(rel <= 0.01, "within 1% of 12860");
  std::size_t configs = 0;
  for (int h1 = 1; h1 <= 8; ++h1) {
    for (int h2 = 1; h2 <= 8; ++h2) {
      for (int h3 = 1; h3 <= 8; ++h3) {
        net::ModelConfig cfg;
        cfg.h1 = h1;
        cfg.h2 = h2;
        cfg.h3 = h3;
        const auto m = net::SpeedModel::zeros(cfg);
        std::size_t stored = 0;
        for (auto span : m.parameters()) stored += span.size();
        if (stored != net::parameter_count(cfg)) {
          o.check(false, "enumeration at (" + std::to_string(h1) + "," + std::to_string(h2) + "," +
                             std::to_string(h3) + ")");
        }
        ++configs;
      }
    }
  }
  o.note("default " + std::to_string(n) + " (" + fmt("%.2f", 100 * rel) + "% from 12860), formula = enumeration on " +
         std::to_string(configs) + " configs");
  return o;
}

// ---- 3: masking --------------------------------------------------------------

Outcome masking() {
  Outcome o;
  std::mt19937_64 rng(3);
  int cases = 0;
  for (int trial = 0; trial < 5; ++trial) {
    net::ModelConfig cfg;
    cfg.h1 = 2 + trial % 3;
    cfg.h2 = 3;
    cfg.h3 = 2 + trial % 2;
    const auto m = random_model(cfg, rng);
    const auto w0 = random_window(rng, "a", 0), w1 = random_window(rng, "b", 0);
    const auto s = random_state(cfg, 2, rng);
    const auto base = net::backward(m, {{w0, w1}, 0}, s);
    auto s_more = s;
    s_more.lanes.insert(s_more.lanes.begin(), random_state(cfg, 1, rng).lanes[0]);
    s_more.lanes.push_back(random_state(cfg, 1, rng).lanes[0]);
    const auto more = net::backward(
        m, {{pipe::LabeledWindow::padding(), w0, w1, pipe::LabeledWindow::padding()}, 0}, s_more);
    o.check(std::memcmp(&base.loss, &more.loss, sizeof(double)) == 0, "loss unchanged by padded lanes");
    o.check(same_bits(flat(base.gradient), flat(more.gradient)), "gradient unchanged by padded lanes");
    ++cases;
  }
  Eigen::MatrixXd p(1, 1), y(1, 1);
  p << 3.0;
  y << 1.0;
  const double unit = net::masked_mse(p, y, {true});
  o.check(unit == 2.0, "N = 1, error 2 gives loss 2.0");
  o.note(std::to_string(cases) + " padded cases bit-identical, unit loss " + fmt("%.17g", unit));
  return o;
}

// ---- 4: stateful equivalence -------------------------------------------------

Outcome stateful_equivalence() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.7);
  auto wts = net::LstmWeights::zeros(6, 19);
  for (auto* m : {&wts.w, &wts.u}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = n(rng);
  }
  for (Eigen::Index i = 0; i < wts.b.size(); ++i) wts.b(i) = n(rng);
  Eigen::MatrixXd x(6, 40);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  auto whole = net::LstmState::zeros(19);
  const Eigen::MatrixXd h_all = net::lstm_forward(wts, x, whole);
  auto split = net::LstmState::zeros(19);
  const Eigen::MatrixXd h_a = net::lstm_forward(wts, x.leftCols(20), split);
  const Eigen::MatrixXd h_b = net::lstm_forward(wts, x.rightCols(20), split);
  const double lstm_diff = std::max({(h_all.leftCols(20) - h_a).cwiseAbs().maxCoeff(),
                                     (h_all.rightCols(20) - h_b).cwiseAbs().maxCoeff(),
                                     (whole.c - split.c).cwiseAbs().maxCoeff()});
  o.check(lstm_diff <= 1e-12, "40-step call equals two 20-step calls");

  net::ModelConfig cfg;
  cfg.seed = 3;
  const auto model = net::init_model(cfg);
  const auto lane = random_lane(rng, "s", 15);
  FeatureStream fs;
  for (const auto& w : lane.windows) {
    for (int r = 0; r < kWindowLen; ++r) {
      fs.t.push_back(static_cast<double>(fs.t.size()) * kImuPeriod);
      fs.x.push_back(w.x.row(r).transpose());
    }
  }
  const auto streamed = net::predict_stream(model, fs);
  auto state = net::RecurrentState::zeros(cfg, 1);
  double stream_diff = 0.0;
  for (std::size_t k = 0; k < lane.windows.size(); ++k) {
    auto fw = net::forward(model, {{lane.windows[k]}, static_cast<std::int64_t>(k)}, state);
    for (int t = 0; t < kWindowLen; ++t) {
      const double batched = std::max(fw.predictions(0, t), 0.0);
      stream_diff = std::max(stream_diff, std::abs(batched - streamed.s[k * kWindowLen + static_cast<std::size_t>(t)]));
    }
    state = std::move(fw.state);
  }
  o.check(streamed.size() == lane.windows.size() * kWindowLen, "stream covers every window");
  o.check(stream_diff <= 1e-12, "predict_stream equals batched forward");
  o.note("LSTM split diff " + fmt("%.1e", lstm_diff) + ", stream diff " + fmt("%.1e", stream_diff));
  return o;
}

// ---- 5: label pipeline -------------------------------------------------------

Outcome label_pipeline() {
  Outcome o;
  const double r = 20.0, w = 0.5;
  const auto fixes = fixes_from(3000, [&](double t) { return Vec2(r * std::cos(w * t), r * std::sin(w * t)); });
  const auto s = pipe::positions_to_speed(fixes);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) worst = std::max(worst, std::abs(s.s[k] - 10.0));
  o.check(worst <= 1e-3, "interior circle speed within 1e-3 m/s");
  const auto up = pipe::upsample_speed(s);
  o.check(up.size() == 2 * s.size() - 1, "upsampled count 2n-1");
  bool preserved = true;
  for (std::size_t k = 0; k < s.size(); ++k) preserved &= std::memcmp(&up.s[2 * k], &s.s[k], sizeof(double)) == 0;
  o.check(preserved, "upsampling keeps original samples bit-exact");
  o.note("max interior speed error " + fmt("%.2e", worst) + " m/s over " + std::to_string(s.size()) + " fixes");
  return o;
}

// ---- 6: dead reckoning with true speed and heading --------------------------

Outcome dr_integration() {
  Outcome o;
  const auto noiseless = [](const sim::DriveProfile& p) {
    return sim::simulate_drive(p, sim::ImuNoiseModel::noiseless(), {0.0, 0}, "n");
  };
  const Drive d = noiseless(sim::random_city_profile(240.0, 12));
  nav::NavOptions opt;
  opt.heading = nav::HeadingSource::kTruth;
  const auto sol = nav::run_dr(d, nav::GroundTruthSpeed{}, d.truth->front().psi, d.truth->front().p_nav, opt);
  const auto err = nav::position_error(sol, *d.truth);
  o.check(err.summary.at_end < 0.5, "4-minute final error < 0.5 m");

  const double radius = 20.0, period = 12.56, speed = 2 * kPi * radius / period;
  const Drive c = noiseless(profile({arc(period, speed, radius)}));
  const auto circle = nav::run_dr(c, nav::GroundTruthSpeed{}, 0.0, Vec2::Zero());
  const double closure = circle.poses.back().p_nav.norm();
  o.check(closure < 0.2, "circle closes within 0.2 m");
  o.note("4-minute end error " + fmt("%.4f", err.summary.at_end) + " m, circle closure " + fmt("%.4f", closure) + " m");
  return o;
}

// ---- 7: plain dead reckoning under accelerometer bias ------------------------

Outcome plain_divergence() {
  Outcome o;
  auto noise = sim::ImuNoiseModel::noiseless();
  noise.accel_bias = Vec3(0.05, 0, 0);
  const Drive d = sim::simulate_drive(profile({stop(60.0)}), noise, {0.0, 0}, "still");
  const auto sol = nav::run_dr(d, nav::IntegratedAcceleration{}, 0.0, Vec2::Zero());
  const auto err = nav::position_error(sol, *d.truth, 60.0);
  const double speed_err = sol.speed.back();
  o.check(std::abs(speed_err - 3.0) <= 0.01, "speed error 3.0 +- 0.01 m/s");
  o.check(std::abs(err.summary.at_horizon - 90.0) <= 1.0, "position error 90 +- 1 m");
  o.note("speed error " + fmt("%.4f", speed_err) + " m/s, position error " + fmt("%.3f", err.summary.at_horizon) + " m at 60 s");
  return o;
}

// ---- 8: end-to-end synthetic run ---------------------------------------------

Outcome end_to_end() {
  Outcome o;
  const auto t0 = Clock::now();
  cfg::RunConfig c;
  c.train.patience = 30;
  c.train.restore_best = true;
  const auto drives = run::simulate_training_drives(c);
  const auto heldout = run::simulate_heldout(c);
  const auto split = run::prepare_dataset(drives, c);
  const auto dir = g_out / "end_to_end";
  fs::create_directories(dir);
  std::ofstream history(dir / "history.csv");
  history << "epoch,train_rmse[m/s],val_rmse[m/s]\n";
  const auto result = net::train(net::init_model(c.model), split, c.train, [&](const net::EpochRecord& r) {
    history << r.epoch << ',' << io::format_double(r.train_rmse) << ',' << io::format_double(r.val_rmse) << '\n';
    history.flush();
  });
  net::save_weights(result.model, dir / "model.spdnet");
  const double val = result.returned().val_rmse;

  const auto aided = nav::position_error(run::navigate(*heldout, cfg::NavMode::kAided, &result.model, c),
                                         *heldout->truth, c.nav.horizon);
  const auto plain = nav::position_error(run::navigate(*heldout, cfg::NavMode::kPlain, nullptr, c),
                                         *heldout->truth, c.nav.horizon);
  const double secs = seconds_since(t0);
  const double ratio = plain.summary.at_end / aided.summary.at_end;

  o.check(val <= 1.2, "validation RMSE <= 1.2 m/s");
  o.check(aided.summary.at_horizon <= 20.0, "aided error at 60 s <= 20 m");
  o.check(ratio >= 5.0, "aided end error 5x smaller than plain");
  o.check(secs <= 1800.0, "runtime <= 30 min");
  o.note(std::to_string(drives.size()) + " x " + fmt("%.0f", c.sim.duration) + " s drives, " +
         std::to_string(result.history.size()) + " epochs (weights from " + std::to_string(result.returned_epoch) +
         "), val RMSE " + fmt("%.3f", val) + " m/s, aided " + fmt("%.2f", aided.summary.at_horizon) +
         " m at 60 s, end error plain " + fmt("%.1f", plain.summary.at_end) + " m vs aided " +
         fmt("%.1f", aided.summary.at_end) + " m (ratio " + fmt("%.2f", ratio) + "), " + fmt("%.0f", secs) + " s");
  return o;
}

// ---- 9: weight files ----------------------------------------------------------

Outcome serialization() {
  Outcome o;
  net::ModelConfig cfg;
  cfg.seed = 99;
  std::mt19937_64 rng(9);
  const auto m = random_model(cfg, rng);
  fs::create_directories(g_out);
  const auto path = g_out / "weights.spdnet";
  net::save_weights(m, path);
  o.check(same_bits(flat(m), flat(net::load_weights(path, cfg))), "round trip bit-exact");

  const std::string good = read_bytes(path);
  std::size_t rejected = 0, tried = 0;
  std::mt19937_64 pick(10);
  for (int i = 0; i < 32; ++i) {
    std::string bad = good;
    const std::size_t at = pick() % bad.size();
    bad[at] = static_cast<char>(bad[at] ^ static_cast<char>(1u << (pick() % 8)));
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bad;
    ++tried;
    try {
      net::load_weights(path);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kChecksumMismatch) ++rejected;
    }
  }
  std::ofstream(path, std::ios::binary | std::ios::trunc) << good.substr(0, good.size() - 7);
  ++tried;
  try {
    net::load_weights(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kChecksumMismatch) ++rejected;
  }
  o.check(rejected == tried, "every corrupted file rejected by checksum");
  o.note("bit-exact round trip of " + std::to_string(m.parameter_count()) + " parameters, " +
         std::to_string(rejected) + "/" + std::to_string(tried) + " corrupted files rejected");
  return o;
}

// ---- 10: determinism ------------------------------------------------------------

// A reduced-scale run writing dataset, weights and navigation output.
std::map<std::string, std::string> pipeline_artifacts(const fs::path& dir) {
  cfg::RunConfig c;
  c.apply_seed(77);
  c.sim.drives = 2;
  c.sim.duration = 90.0;
  c.sim.heldout_duration = 60.0;
  c.sim.imu.vibration_windows = {{30.0, 40.0, 0.8}};
  c.sim.heldout_vibration_windows = {{20.0, 30.0, 0.8}};
  c.train.epochs = 3;
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto drives = run::simulate_training_drives(c);
  const auto heldout = run::simulate_heldout(c);
  for (const auto& d : drives) io::write_drive(dir, d);
  const auto split = run::prepare_dataset(drives, c);
  io::write_dataset(dir / "train.spds", split.train);
  io::write_dataset(dir / "val.spds", split.val);
  const auto result = net::train(net::init_model(c.model), split, c.train);
  net::save_weights(result.model, dir / "model.spdnet");
  for (auto mode : {cfg::NavMode::kPlain, cfg::NavMode::kAided}) {
    const auto sol = run::navigate(*heldout, mode, &result.model, c);
    std::ofstream out(dir / ("nav_" + run::mode_name(mode) + ".csv"));
    for (std::size_t k = 0; k < sol.size(); ++k) {
      out << io::format_double(sol.t[k]) << ',' << io::format_double(sol.poses[k].p_nav.x()) << ','
          << io::format_double(sol.poses[k].p_nav.y()) << ',' << io::format_double(sol.speed[k]) << '\n';
    }
  }
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = read_bytes(e.path());
  return files;
}

Outcome determinism() {
  Outcome o;
  const auto a = pipeline_artifacts(g_out / "determinism_a");
  const auto b = pipeline_artifacts(g_out / "determinism_b");
  o.check(a.size() == b.size(), "same file set");
  std::size_t same = 0;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it != b.end() && it->second == bytes) {
      ++same;
    } else {
      o.check(false, name + " identical");
    }
  }
  for (const char* key : {"train.spds", "val.spds", "model.spdnet", "nav_aided.csv", "nav_plain.csv"}) {
    o.check(a.count(key) == 1, std::string(key) + " written");
  }
  o.note(std::to_string(same) + "/" + std::to_string(a.size()) +
         " files byte-identical (drives, datasets, weights, navigation; reduced scale)");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "gradient oracle", gradient_oracle},
      {2, "parameter count", parameter_count},
      {3, "masking", masking},
      {4, "stateful equivalence", stateful_equivalence},
      {5, "label pipeline oracle", label_pipeline},
      {6, "dead-reckoning integration oracle", dr_integration},
      {7, "plain dead-reckoning divergence", plain_divergence},
      {8, "end-to-end synthetic run", end_to_end},
      {9, "serialization", serialization},
      {10, "determinism", determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      g_out = argv[++i];
    } else {
      wanted.insert(std::stoi(arg));
    }
  }
  bool ok = true;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    ok &= r.pass;
    std::cout << "criterion " << c.id << " (" << c.name << "): " << (r.pass ? "PASS" : "FAIL") << " | "
              << r.detail << std::endl;
  }
  return ok ? 0 : 1;
}
