// speedlearn: simulate drives, build window datasets, train the speed model,
// evaluate it, run plain/aided dead reckoning and plot the results.
//
// Exit codes: 0 ok, 2 configuration/usage error, 3 I/O or input-data error,
// 4 numeric divergence during training.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "speedlearn/config.hpp"
#include "speedlearn/deadreckon.hpp"
#include "speedlearn/drive_sim.hpp"
#include "speedlearn/error.hpp"
#include "speedlearn/formats.hpp"
#include "speedlearn/labelpipe.hpp"
#include "speedlearn/pipeline.hpp"
#include "speedlearn/plot.hpp"
#include "speedlearn/speednet.hpp"

namespace fs = std::filesystem;
using namespace speedlearn;

namespace {

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("SPEEDLEARN_LOG");
  if (!env) return LogLevel::kInfo;
  const std::string v(env);
  if (v == "quiet" || v == "0") return LogLevel::kQuiet;
  if (v == "debug" || v == "2") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(log_level())) std::cerr << msg << '\n';
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidProfile:
    case ErrorCode::kInfeasibleProfile:
      return 2;
    case ErrorCode::kDivergence:
      return 4;
    default:
      return 3;
  }
}

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> drives;
  std::string dataset;
  std::string model;
  std::string mode;
  std::vector<std::string> inputs;
  std::string kind = "speed";
  std::string name;
};

cfg::RunConfig resolve(const Options& opt) {
  cfg::RunConfig c = opt.config.empty() ? cfg::RunConfig{} : cfg::load_config(opt.config);
  if (opt.seed) c.apply_seed(*opt.seed);
  if (!opt.mode.empty()) {
    if (opt.mode == "plain") {
      c.nav.mode = cfg::NavMode::kPlain;
    } else if (opt.mode == "aided") {
      c.nav.mode = cfg::NavMode::kAided;
    } else if (opt.mode == "truth") {
      c.nav.mode = cfg::NavMode::kTruth;
    } else {
      throw Error(ErrorCode::kInvalidConfig, "--mode must be plain, aided or truth");
    }
  }
  c.validate();
  return c;
}

fs::path prepare_out(const Options& opt, const cfg::RunConfig& c) {
  const fs::path out(opt.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + out.string());
  cfg::write_resolved_config(out / "resolved_config.ini", c);
  return out;
}

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

std::vector<Drive> load_drives(const std::vector<std::string>& inputs) {
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  std::vector<Drive> drives;
  for (const auto& p : io::find_drives(paths)) drives.push_back(io::read_drive(p));
  if (drives.empty()) throw Error(ErrorCode::kIoFailure, "no drives found in --drives");
  return drives;
}

// ---- subcommands ---------------------------------------------------------

int cmd_simulate(const Options& opt) {
  const auto c = resolve(opt);
  const auto out = prepare_out(opt, c);

  auto report = [&](const Drive& drive, const fs::path& dir) {
    io::write_drive(dir, drive);
    const auto s = sim::summarize(*drive.truth);
    std::cout << drive.id << ": duration " << fmt(s.duration, 1) << " s, distance " << fmt(s.distance, 1)
              << " m, max speed " << fmt(s.max_speed, 2) << " m/s\n";
    return s.duration;
  };
  double total = 0.0;
  for (const auto& d : run::simulate_training_drives(c)) total += report(d, out / "drives");
  std::cout << "training drives: " << c.sim.drives << ", total " << fmt(total / 60.0, 1) << " min\n";
  if (const auto heldout = run::simulate_heldout(c)) report(*heldout, out / "heldout");
  return 0;
}

int cmd_prepare(const Options& opt) {
  const auto c = resolve(opt);
  const auto drives = load_drives(opt.drives);
  const auto out = prepare_out(opt, c);
  for (const auto& d : drives) log(LogLevel::kDebug, d.id + ": " + std::to_string(d.imu.size()) + " ticks");
  const auto split = run::prepare_dataset(drives, c);
  io::write_dataset(out / "train.spds", split.train);
  io::write_dataset(out / "val.spds", split.val);
  const double frac = static_cast<double>(split.train_windows()) /
                      static_cast<double>(split.train_windows() + split.val_windows());
  std::cout << "windows: train " << split.train_windows() << " (" << split.train.size()
            << " lanes), val " << split.val_windows() << " (" << split.val.size()
            << " lanes), train fraction " << fmt(frac) << "\n";
  return 0;
}

int cmd_train(const Options& opt) {
  const auto c = resolve(opt);
  if (opt.dataset.empty()) throw Error(ErrorCode::kInvalidConfig, "--dataset is required");
  pipe::DatasetSplit split;
  split.train = io::read_dataset(fs::path(opt.dataset) / "train.spds");
  const fs::path val_path = fs::path(opt.dataset) / "val.spds";
  if (fs::exists(val_path)) split.val = io::read_dataset(val_path);
  split.ratio = c.pipe.split_ratio;
  const auto out = prepare_out(opt, c);

  std::ofstream history(out / "history.csv", std::ios::trunc);
  if (!history) throw Error(ErrorCode::kIoFailure, "cannot write history.csv");
  history << "epoch,train_loss[m^2/s^2],train_rmse[m/s],val_rmse[m/s]\n";
  const auto model = net::init_model(c.model);
  log(LogLevel::kInfo, "training " + std::to_string(model.parameter_count()) + " parameters");
  const auto result = net::train(model, split, c.train, [&](const net::EpochRecord& r) {
    history << r.epoch << ',' << io::format_double(r.train_loss) << ','
            << io::format_double(r.train_rmse) << ',' << io::format_double(r.val_rmse) << '\n';
    history.flush();
    log(LogLevel::kInfo, "epoch " + std::to_string(r.epoch) + ": train RMSE " + fmt(r.train_rmse) +
                             " m/s, val RMSE " + fmt(r.val_rmse) + " m/s");
  });
  net::save_weights(result.model, out / "model.spdnet");
  const auto& last = result.returned();
  std::cout << "epochs run: " << result.history.size() << (result.stopped_early ? " (early stop)" : "")
            << ", weights from epoch " << result.returned_epoch << "\n";
  std::cout << "final train RMSE " << fmt(last.train_rmse) << " m/s, val RMSE "
            << fmt(last.val_rmse) << " m/s\n";
  return 0;
}

int cmd_evaluate(const Options& opt) {
  const auto c = resolve(opt);
  if (opt.model.empty()) throw Error(ErrorCode::kInvalidConfig, "--model is required");
  const auto model = net::load_weights(opt.model, c.model);
  const auto drives = load_drives(opt.drives);
  const auto out = prepare_out(opt, c);

  for (const auto& d : drives) {
    const auto att = pipe::pipeline_attitude(d, c.pipe.tilt);
    const auto features = pipe::make_features(d.imu, att);
    const auto pred = net::predict_stream(model, features);
    const auto dr = nav::integrate_acceleration_speed(features, att);
    SpeedSeries ref;
    if (d.truth) {
      ref = nav::truth_speed(*d.truth);
    } else {
      std::vector<double> t(d.imu.size());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = d.imu[i].t;
      ref = pipe::align_labels(pipe::upsample_speed(pipe::positions_to_speed(d.fixes)), t);
    }
    SpeedSeries ref_cut{{ref.t.begin(), ref.t.begin() + static_cast<std::ptrdiff_t>(pred.size())},
                        {ref.s.begin(), ref.s.begin() + static_cast<std::ptrdiff_t>(pred.size())}};

    std::ofstream csv(out / ("speed_" + d.id + ".csv"), std::ios::trunc);
    if (!csv) throw Error(ErrorCode::kIoFailure, "cannot write speed file");
    csv << "t[s],gt[m/s],model[m/s],dr[m/s]\n";
    for (std::size_t k = 0; k < pred.size(); ++k) {
      csv << io::format_double(pred.t[k]) << ',' << io::format_double(ref.s[k]) << ','
          << io::format_double(pred.s[k]) << ',' << io::format_double(dr.s[k]) << '\n';
    }
    const double t0 = pred.t.front(), t1 = pred.t.back();
    const std::vector<double> whole = {t0, t1};
    std::cout << d.id << ": model speed RMSE " << fmt(nav::segment_rmse(pred, ref_cut, whole)[0])
              << " m/s over " << fmt(t1 - t0, 1) << " s\n";
    std::vector<double> bounds;
    for (double b : c.nav.segment_boundaries) {
      if (b >= t0 - 1e-9 && b <= t1 + 1e-9) bounds.push_back(b);
    }
    if (bounds.size() >= 2) {
      const auto seg = nav::segment_rmse(pred, ref_cut, bounds);
      for (std::size_t i = 0; i < seg.size(); ++i) {
        std::cout << "  RMSE(" << fmt(bounds[i], 0) << " s < t < " << fmt(bounds[i + 1], 0)
                  << " s) = " << fmt(seg[i]) << " m/s\n";
      }
    }
  }
  return 0;
}

int cmd_nav(const Options& opt) {
  const auto c = resolve(opt);
  std::optional<net::SpeedModel> model;
  if (c.nav.mode == cfg::NavMode::kAided) {
    if (opt.model.empty()) throw Error(ErrorCode::kInvalidConfig, "aided mode needs --model");
    model = net::load_weights(opt.model, c.model);
  }
  const auto drives = load_drives(opt.drives);
  const auto out = prepare_out(opt, c);
  const std::string mode = run::mode_name(c.nav.mode);
  for (const auto& d : drives) {
    const auto sol = run::navigate(d, c.nav.mode, model ? &*model : nullptr, c);
    std::ofstream traj(out / ("nav_" + mode + "_" + d.id + ".csv"), std::ios::trunc);
    if (!traj) throw Error(ErrorCode::kIoFailure, "cannot write trajectory");
    traj << "t[s],px[m],py[m],psi[rad],speed[m/s]\n";
    for (std::size_t k = 0; k < sol.size(); ++k) {
      traj << io::format_double(sol.t[k]) << ',' << io::format_double(sol.poses[k].p_nav.x()) << ','
           << io::format_double(sol.poses[k].p_nav.y()) << ','
           << io::format_double(sol.poses[k].psi) << ',' << io::format_double(sol.speed[k]) << '\n';
    }
    if (!d.truth) {
      std::cout << d.id << ": no ground truth, error not computed\n";
      continue;
    }
    const auto err = nav::position_error(sol, *d.truth, c.nav.horizon);
    std::ofstream ecsv(out / ("error_" + mode + "_" + d.id + ".csv"), std::ios::trunc);
    if (!ecsv) throw Error(ErrorCode::kIoFailure, "cannot write error series");
    ecsv << "t[s],error[m]\n";
    for (std::size_t k = 0; k < err.t.size(); ++k) {
      ecsv << io::format_double(err.t[k]) << ',' << io::format_double(err.error[k]) << '\n';
    }
    const std::string at_h = std::isnan(err.summary.at_horizon) ? "n/a (drive too short)"
                                                                 : fmt(err.summary.at_horizon, 2) + " m";
    std::cout << d.id << " (" << mode << "): error at " << fmt(c.nav.horizon, 0) << " s " << at_h
              << ", at end " << fmt(err.summary.at_end, 2) << " m, max " << fmt(err.summary.max, 2)
              << " m\n";
  }
  return 0;
}

int cmd_plot(const Options& opt) {
  if (opt.inputs.empty()) throw Error(ErrorCode::kInvalidConfig, "--inputs is required");
  plot::Figure fig;
  if (opt.kind == "trajectory") {
    fig = {"Trajectory", "east [m]", "north [m]", {}, true};
  } else if (opt.kind == "error") {
    fig = {"Position error vs. time", "time [s]", "position error [m]", {}, false};
  } else if (opt.kind == "speed") {
    fig = {"Speed vs. time", "time [s]", "speed [m/s]", {}, false};
  } else {
    throw Error(ErrorCode::kInvalidConfig, "--kind must be speed, trajectory or error");
  }
  for (const auto& in : opt.inputs) {
    const auto table = plot::read_table(in);
    const std::string stem = fs::path(in).stem().string();
    if (opt.kind == "trajectory") {
      fig.series.push_back({stem, table.columns[table.column("px")], table.columns[table.column("py")]});
      continue;
    }
    for (std::size_t col = 1; col < table.header.size(); ++col) {
      std::string name = table.header[col].substr(0, table.header[col].find('['));
      if (opt.inputs.size() > 1) name = stem + ":" + name;
      fig.series.push_back({name, table.columns[0], table.columns[col]});
    }
  }
  const fs::path out(opt.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + out.string());
  const std::string name = opt.name.empty() ? opt.kind : opt.name;
  std::ofstream svg(out / (name + ".svg"), std::ios::trunc);
  std::ofstream txt(out / (name + ".txt"), std::ios::trunc);
  if (!svg || !txt) throw Error(ErrorCode::kIoFailure, "cannot write plot files");
  svg << plot::render_svg(fig);
  txt << plot::render_table(fig);
  std::cout << "wrote " << (out / (name + ".svg")).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn car speed from IMU windows and use it for dead reckoning"};
  app.require_subcommand(1);
  Options opt;
  const std::string keys = cfg::config_help();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "INI run config (see key list below)");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "override sim.seed (and derived seeds)");
    sub->footer(keys);
  };

  auto* simulate = app.add_subcommand("simulate", "simulate training drives and a held-out drive");
  add_common(simulate);

  auto* prepare = app.add_subcommand("prepare", "turn drives into train/val window datasets");
  add_common(prepare);
  prepare->add_option("--drives", opt.drives, "drive prefixes, IMU files or directories")->required();

  auto* train = app.add_subcommand("train", "train the speed model on a prepared dataset");
  add_common(train);
  train->add_option("--dataset", opt.dataset, "directory holding train.spds/val.spds")->required();

  auto* evaluate = app.add_subcommand("evaluate", "compare model speed with ground truth");
  add_common(evaluate);
  evaluate->add_option("--drives", opt.drives, "drives to evaluate")->required();
  evaluate->add_option("--model", opt.model, "weight file")->required();

  auto* navc = app.add_subcommand("nav", "run 2-D dead reckoning on drives");
  add_common(navc);
  navc->add_option("--drives", opt.drives, "drives to navigate")->required();
  navc->add_option("--model", opt.model, "weight file (aided mode)");
  navc->add_option("--mode", opt.mode, "plain | aided | truth")
      ->check(CLI::IsMember({"plain", "aided", "truth"}));

  auto* plotc = app.add_subcommand("plot", "plot speed, trajectory or error series to SVG");
  plotc->add_option("--inputs", opt.inputs, "CSV series files")->required();
  plotc->add_option("--kind", opt.kind, "speed | trajectory | error")->capture_default_str();
  plotc->add_option("--out", opt.out, "output directory")->capture_default_str();
  plotc->add_option("--name", opt.name, "output file stem (default: kind)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(opt);
    if (*prepare) return cmd_prepare(opt);
    if (*train) return cmd_train(opt);
    if (*evaluate) return cmd_evaluate(opt);
    if (*navc) return cmd_nav(opt);
    if (*plotc) return cmd_plot(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
