#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "speedlearn/plot.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "speedlearn_cli";

const char* kSmallConfig =
    "[sim]\n"
    "drives = 2\n"
    "duration = 60\n"
    "vibration_windows = 20:30:0.8\n"
    "heldout_duration = 40\n"
    "heldout_vibration_windows = 10:20:0.8\n"
    "[train]\n"
    "epochs = 1\n"
    "[nav]\n"
    "segment_boundaries = 0,20,40\n";

fs::path fresh_dir(const std::string& name) {
  const auto dir = kRoot / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "run.ini";
  std::ofstream(p) << text;
  return p;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct Run {
  int code;
  std::string output;
};

Run run(const std::string& args) {
  const auto log = kRoot / "last_output.txt";
  const std::string cmd = "SPEEDLEARN_LOG=quiet \"" SPEEDLEARN_CLI "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text(log)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, HelpDocumentsConfigKeys) {
  fs::create_directories(kRoot);
  const auto r = run("simulate --help");
  EXPECT_EQ(r.code, 0);
  for (const char* key : {"sim.drives", "sim.accel_bias", "train.epochs", "train.learning_rate", "model.h1",
                          "nav.mode", "pipe.split_ratio"}) {
    EXPECT_NE(r.output.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(run("bogus-command").code, 2);
}

TEST(Cli, InvalidConfigExitsTwo) {
  const auto dir = fresh_dir("invalid");
  const auto cfg = write_config(dir, "[sim]\nduration = 0\n");
  const auto r = run("simulate --config " + q(cfg) + " --out " + q(dir / "o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("duration"), std::string::npos) << r.output;
  const auto unknown = write_config(dir, "[sim]\nwarp = 9\n");
  EXPECT_EQ(run("simulate --config " + q(unknown) + " --out " + q(dir / "o")).code, 2);
}

TEST(Cli, FullPipelineIsDeterministic) {
  std::vector<fs::path> outs;
  for (const char* name : {"det_a", "det_b"}) {
    const auto dir = fresh_dir(name);
    const auto cfg = write_config(dir, kSmallConfig);
    const auto o = dir / "o";
    ASSERT_EQ(run("simulate --config " + q(cfg) + " --seed 5 --out " + q(o)).code, 0);
    ASSERT_EQ(run("prepare --config " + q(cfg) + " --drives " + q(o / "drives") + " --out " + q(o / "ds")).code, 0);
    ASSERT_EQ(run("train --config " + q(cfg) + " --seed 5 --dataset " + q(o / "ds") + " --out " + q(o / "m")).code,
              0);
    ASSERT_EQ(run("nav --config " + q(cfg) + " --model " + q(o / "m" / "model.spdnet") + " --drives " +
                  q(o / "heldout") + " --mode aided --out " + q(o / "nav"))
                  .code,
              0);
    ASSERT_EQ(run("evaluate --config " + q(cfg) + " --model " + q(o / "m" / "model.spdnet") + " --drives " +
                  q(o / "heldout") + " --out " + q(o / "ev"))
                  .code,
              0);
    outs.push_back(o);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(outs[0])) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), outs[0]);
    ASSERT_TRUE(fs::exists(outs[1] / rel)) << rel;
    EXPECT_EQ(read_text(entry.path()), read_text(outs[1] / rel)) << rel;
    ++compared;
  }
  EXPECT_GE(compared, 10u);
  // One epoch in, one finite history row out.
  const auto hist = speedlearn::plot::read_table(outs[0] / "m" / "history.csv");
  const std::string hist_text = read_text(outs[0] / "m" / "history.csv");
  EXPECT_EQ(hist_text.substr(0, hist_text.find('\n')), "epoch,train_loss[m^2/s^2],train_rmse[m/s],val_rmse[m/s]");
  ASSERT_EQ(hist.rows(), 1u);
  for (const auto& col : hist.columns) EXPECT_TRUE(std::isfinite(col[0]));
  EXPECT_TRUE(fs::exists(outs[0] / "resolved_config.ini"));
}

TEST(Cli, DivergenceExitsFour) {
  const auto dir = fresh_dir("diverge");
  const auto fixed = write_config(dir, "[sim]\ndrives = 2\nduration = 60\nvibration_windows =\nheldout_duration = 40\n"
                                       "heldout_vibration_windows = 10:20:0.8\n"
                                       "[train]\nepochs = 3\nlearning_rate = 1000\n");
  const auto o = dir / "o";
  ASSERT_EQ(run("simulate --config " + q(fixed) + " --out " + q(o)).code, 0);
  ASSERT_EQ(run("prepare --config " + q(fixed) + " --drives " + q(o / "drives") + " --out " + q(o / "ds")).code, 0);
  const auto r = run("train --config " + q(fixed) + " --dataset " + q(o / "ds") + " --out " + q(o / "m"));
  EXPECT_EQ(r.code, 4) << r.output;
}

TEST(Cli, NavModes) {
  const auto dir = fresh_dir("nav");
  const auto cfg = write_config(dir,
                                "[sim]\ndrives = 1\nduration = 30\nvibration_windows =\nheldout_duration = 240\n"
                                "accel_bias = 0,0,0\ngyro_bias = 0,0,0\naccel_noise_std = 0\n"
                                "gyro_noise_std = 0\nroad_vibration_gain = 0\n"
                                "heldout_vibration_windows = 10:20:0\n");
  const auto o = dir / "o";
  ASSERT_EQ(run("simulate --config " + q(cfg) + " --out " + q(o)).code, 0);
  EXPECT_EQ(run("nav --config " + q(cfg) + " --drives " + q(o / "heldout") + " --mode aided --out " + q(o / "n")).code,
            2);
  ASSERT_EQ(run("nav --config " + q(cfg) + " --drives " + q(o / "heldout") + " --mode truth --out " + q(o / "n")).code,
            0);
  const auto err = speedlearn::plot::read_table(o / "n" / "error_truth_heldout.csv");
  const auto& e = err.columns[err.column("error")];
  EXPECT_LT(e.back(), 0.5);
  EXPECT_NEAR(err.columns[0].back(), 240.0, 1e-9);
}

TEST(Cli, PlotWritesSvgAndTable) {
  const auto dir = fresh_dir("plot");
  std::ofstream(dir / "speed.csv") << "t[s],gt[m/s],model[m/s],dr[m/s]\n0,1,1.5,0.5\n0.01,2,2.5,3\n";
  ASSERT_EQ(run("plot --kind speed --inputs " + q(dir / "speed.csv") + " --out " + q(dir / "p")).code, 0);
  const std::string svg = read_text(dir / "p" / "speed.svg");
  EXPECT_NE(svg.find("[m/s]"), std::string::npos);
  EXPECT_NE(svg.find("[s]"), std::string::npos);
  for (const char* curve : {">gt<", ">model<", ">dr<"}) EXPECT_NE(svg.find(curve), std::string::npos) << curve;
  EXPECT_NE(read_text(dir / "p" / "speed.txt").find("0.01,2.5"), std::string::npos);
  std::ofstream(dir / "empty.csv").flush();
  EXPECT_EQ(run("plot --kind error --inputs " + q(dir / "empty.csv") + " --out " + q(dir / "p")).code, 3);
}

TEST(Cli, SimulatesFourFortyMinuteDrives) {
  const auto dir = fresh_dir("long");
  const auto cfg = write_config(dir, "[sim]\nduration = 2400\nheldout_duration = 0\n");
  const auto r = run("simulate --config " + q(cfg) + " --out " + q(dir / "o"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("training drives: 4, total 160.0 min"), std::string::npos) << r.output;
  for (int d = 0; d < 4; ++d) {
    const std::string id = "drive_0" + std::to_string(d);
    for (const char* suffix : {"_imu.csv", "_fixes.csv", "_truth.csv"}) {
      EXPECT_TRUE(fs::exists(dir / "o" / "drives" / (id + suffix))) << id << suffix;
    }
  }
  EXPECT_FALSE(fs::exists(dir / "o" / "heldout"));
}

TEST(Cli, DefaultTrainingRunsTwoHundredEpochs) {
  const auto dir = fresh_dir("default_epochs");
  // Tiny drives, untouched [train] section.
  const auto cfg = write_config(dir, "[sim]\ndrives = 2\nduration = 12\nvibration_windows =\nheldout_duration = 0\n");
  const auto o = dir / "o";
  ASSERT_EQ(run("simulate --config " + q(cfg) + " --out " + q(o)).code, 0);
  ASSERT_EQ(run("prepare --config " + q(cfg) + " --drives " + q(o / "drives") + " --out " + q(o / "ds")).code, 0);
  const auto r = run("train --config " + q(cfg) + " --dataset " + q(o / "ds") + " --out " + q(o / "m"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(speedlearn::plot::read_table(o / "m" / "history.csv").rows(), 200u);
  EXPECT_NE(r.output.find("final train RMSE"), std::string::npos);
}

TEST(Cli, PlainModeMatchesClosedFormUnderBias) {
  const auto dir = fresh_dir("plain_bias");
  const auto cfg = write_config(dir,
                                "[sim]\ndrives = 1\nsegments = stop:70:0:0\nvibration_windows =\n"
                                "heldout_vibration_windows =\naccel_bias = 0.05,0,0\ngyro_bias = 0,0,0\n"
                                "accel_noise_std = 0\ngyro_noise_std = 0\nroad_vibration_gain = 0\n"
                                "[nav]\nmode = plain\n");
  const auto o = dir / "o";
  ASSERT_EQ(run("simulate --config " + q(cfg) + " --out " + q(o)).code, 0);
  const auto r = run("nav --config " + q(cfg) + " --drives " + q(o / "heldout") + " --out " + q(o / "n"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto err = speedlearn::plot::read_table(o / "n" / "error_plain_heldout.csv");
  const auto& t = err.columns[0];
  const auto& e = err.columns[err.column("error")];
  const auto at60 = static_cast<std::size_t>(std::lround(60.0 / 0.01));
  EXPECT_NEAR(t[at60], 60.0, 1e-9);
  EXPECT_NEAR(e[at60], 90.0, 1.0);
  EXPECT_NE(r.output.find("error at 60 s 90."), std::string::npos) << r.output;
}
