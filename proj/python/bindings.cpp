#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "speedlearn/config.hpp"
#include "speedlearn/core.hpp"
#include "speedlearn/error.hpp"
#include "speedlearn/formats.hpp"
#include "speedlearn/pipeline.hpp"

namespace py = pybind11;
using namespace speedlearn;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace {

template <typename T, typename F>
RowMatrix rows_of(const std::vector<T>& items, int cols, F get) {
  RowMatrix m(static_cast<Eigen::Index>(items.size()), cols);
  for (std::size_t k = 0; k < items.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = get(items[k]).transpose();
  return m;
}

template <typename T, typename F>
Eigen::VectorXd column_of(const std::vector<T>& items, F get) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t k = 0; k < items.size(); ++k) v(static_cast<Eigen::Index>(k)) = get(items[k]);
  return v;
}

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

py::object truth_or_none(const Drive& d, const std::function<py::object(const Trajectory&)>& f) {
  return d.truth ? f(*d.truth) : py::none();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Car speed from IMU windows and 2-D dead reckoning";

  py::register_exception<Error>(m, "SpeedlearnError", PyExc_RuntimeError);

  m.def("wrap_angle", &wrap_angle, py::arg("angle"), "Wrap an angle in radians to (-pi, pi].");
  m.def(
      "parameter_count",
      [](int h1, int h2, int h3) {
        net::ModelConfig c;
        c.h1 = h1;
        c.h2 = h2;
        c.h3 = h3;
        return net::parameter_count(c);
      },
      py::arg("h1") = 19, py::arg("h2") = 16, py::arg("h3") = 16);
  m.def("config_help", &cfg::config_help);
  m.def(
      "resolve_config", [](const std::string& text) { return cfg::resolved_config(cfg::parse_config(text)); },
      py::arg("text") = "", "Parse an INI run config and return every key with its resolved value.");

  py::class_<Drive>(m, "Drive")
      .def_readonly("id", &Drive::id)
      .def_readonly("duration", &Drive::duration)
      .def_property_readonly("t", [](const Drive& d) { return column_of(d.imu, [](const ImuSample& s) { return s.t; }); })
      .def_property_readonly("f_body", [](const Drive& d) {
        return rows_of(d.imu, 3, [](const ImuSample& s) { return s.f_body; });
      })
      .def_property_readonly("omega_body", [](const Drive& d) {
        return rows_of(d.imu, 3, [](const ImuSample& s) { return s.omega_body; });
      })
      .def_property_readonly("fix_t", [](const Drive& d) { return column_of(d.fixes, [](const GnssFix& f) { return f.t; }); })
      .def_property_readonly("fix_p", [](const Drive& d) {
        return rows_of(d.fixes, 2, [](const GnssFix& f) { return f.p_nav; });
      })
      .def_property_readonly("truth_p", [](const Drive& d) {
        return truth_or_none(d, [](const Trajectory& tr) {
          return py::cast(rows_of(tr, 2, [](const TruthTick& k) { return k.p_nav; }));
        });
      })
      .def_property_readonly("truth_psi", [](const Drive& d) {
        return truth_or_none(d, [](const Trajectory& tr) {
          return py::cast(column_of(tr, [](const TruthTick& k) { return k.psi; }));
        });
      })
      .def_property_readonly("truth_speed", [](const Drive& d) {
        return truth_or_none(d, [](const Trajectory& tr) {
          return py::cast(column_of(tr, [](const TruthTick& k) { return k.speed; }));
        });
      })
      .def("write", [](const Drive& d, const std::filesystem::path& dir) { io::write_drive(dir, d); }, py::arg("directory"))
      .def_static("read", &io::read_drive, py::arg("path"))
      .def("__repr__", [](const Drive& d) {
        return "<Drive " + d.id + ": " + std::to_string(d.imu.size()) + " IMU samples>";
      });

  m.def(
      "simulate_drive",
      [](double duration, std::uint64_t seed, bool noiseless, const std::string& id) {
        cfg::RunConfig c;
        sim::ImuNoiseModel imu = noiseless ? sim::ImuNoiseModel::noiseless() : c.sim.imu;
        imu.vibration_windows.clear();
        imu.seed = cfg::derive_seed(seed, 1);
        sim::RtkNoiseModel rtk{noiseless ? 0.0 : c.sim.rtk_position_std, cfg::derive_seed(seed, 2)};
        return sim::simulate_drive(sim::random_city_profile(duration, cfg::derive_seed(seed, 0), c.sim.max_speed),
                                   imu, rtk, id);
      },
      py::arg("duration"), py::arg("seed") = 1, py::arg("noiseless") = false, py::arg("id") = "drive",
      "Random city drive with default sensor noise (or none).");
  m.def(
      "simulate_run",
      [](const std::string& text) {
        const auto c = cfg::parse_config(text);
        return py::make_tuple(run::simulate_training_drives(c), run::simulate_heldout(c));
      },
      py::arg("config") = "", "Training drives and held-out drive for an INI run config.");

  m.def(
      "positions_to_speed",
      [](const Eigen::VectorXd& t, const RowMatrix& p) {
        if (p.cols() != 2 || p.rows() != t.size()) throw Error(ErrorCode::kLengthMismatch, "expected t (N,) and p (N, 2)");
        std::vector<GnssFix> fixes(static_cast<std::size_t>(t.size()));
        for (Eigen::Index k = 0; k < t.size(); ++k) fixes[static_cast<std::size_t>(k)] = {t(k), p.row(k).transpose()};
        const auto s = pipe::positions_to_speed(fixes);
        return py::make_tuple(vec(s.t), vec(s.s));
      },
      py::arg("t"), py::arg("p"), "Speed from 50 Hz positions by central differences.");

  py::class_<net::SpeedModel>(m, "SpeedModel")
      .def_property_readonly("parameter_count", &net::SpeedModel::parameter_count)
      .def_property_readonly("sizes", [](const net::SpeedModel& s) {
        return py::make_tuple(s.config.h1, s.config.h2, s.config.h3);
      })
      .def("save", [](const net::SpeedModel& s, const std::filesystem::path& p) { net::save_weights(s, p); },
           py::arg("path"))
      .def_static("load", [](const std::filesystem::path& p) { return net::load_weights(p); }, py::arg("path"))
      .def(
          "predict",
          [](const net::SpeedModel& s, const Drive& d) {
            const auto att = pipe::pipeline_attitude(d, pipe::TiltSource::kTruthIfAvailable);
            const auto pred = net::predict_stream(s, pipe::make_features(d.imu, att));
            return py::make_tuple(vec(pred.t), vec(pred.s));
          },
          py::arg("drive"), "Streamed speed predictions (t, speed) for whole windows of a drive.");

  m.def(
      "init_model",
      [](int h1, int h2, int h3, std::uint64_t seed) {
        net::ModelConfig c;
        c.h1 = h1;
        c.h2 = h2;
        c.h3 = h3;
        c.seed = seed;
        return net::init_model(c);
      },
      py::arg("h1") = 19, py::arg("h2") = 16, py::arg("h3") = 16, py::arg("seed") = 1);
  m.def(
      "train",
      [](const std::vector<Drive>& drives, const std::string& text) {
        const auto c = cfg::parse_config(text);
        const auto split = run::prepare_dataset(drives, c);
        py::list history;
        net::TrainResult result = [&] {
          py::gil_scoped_release release;
          return net::train(net::init_model(c.model), split, c.train);
        }();
        for (const auto& r : result.history) history.append(py::make_tuple(r.epoch, r.train_rmse, r.val_rmse));
        return py::make_tuple(result.model, history);
      },
      py::arg("drives"), py::arg("config") = "",
      "Train on drives split per the config. Returns (model, [(epoch, train_rmse, val_rmse), ...]).");

  m.def(
      "navigate",
      [](const Drive& d, const std::string& mode, const net::SpeedModel* model, const std::string& text) {
        const auto c = cfg::parse_config(text);
        cfg::NavMode nm;
        if (mode == "plain") {
          nm = cfg::NavMode::kPlain;
        } else if (mode == "aided") {
          nm = cfg::NavMode::kAided;
        } else if (mode == "truth") {
          nm = cfg::NavMode::kTruth;
        } else {
          throw Error(ErrorCode::kInvalidConfig, "mode must be plain, aided or truth");
        }
        const auto sol = run::navigate(d, nm, model, c);
        py::dict out;
        out["t"] = vec(sol.t);
        out["p"] = rows_of(sol.poses, 2, [](const Pose2D& p) { return p.p_nav; });
        out["psi"] = column_of(sol.poses, [](const Pose2D& p) { return p.psi; });
        out["speed"] = vec(sol.speed);
        if (d.truth) out["error"] = vec(nav::position_error(sol, *d.truth, c.nav.horizon).error);
        return out;
      },
      py::arg("drive"), py::arg("mode") = "plain", py::arg("model") = nullptr, py::arg("config") = "",
      "2-D dead reckoning from the drive's true initial pose.");
}
