#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "speedlearn/labelpipe.hpp"
#include "speedlearn/lstm.hpp"
#include "speedlearn/types.hpp"

namespace speedlearn::net {

// One unidirectional LSTM, two bidirectional LSTMs, one dense output per step.
struct ModelConfig {
  int h1 = 19;
  int h2 = 16;  // per direction
  int h3 = 16;  // per direction
  int input_channels = kChannels;
  int window_len = kWindowLen;
  std::uint64_t seed = 0;

  void validate() const;
  bool same_shape(const ModelConfig& other) const;
};

// 4h(i + h + 1): four gates, input and recurrent matrices, one bias.
std::size_t lstm_parameter_count(int input, int hidden);
std::size_t parameter_count(const ModelConfig& config);

struct SpeedModel {
  ModelConfig config;
  LstmWeights l1;
  LstmWeights l2_fwd, l2_bwd;
  LstmWeights l3_fwd, l3_bwd;
  Eigen::VectorXd dense_w;  // 2*h3
  double dense_b = 0.0;

  // All-zero model with the shapes of `config`; also the gradient container.
  static SpeedModel zeros(const ModelConfig& config);

  // Every trainable buffer in declaration order.
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
  std::size_t parameter_count() const;
};

// Uniform in [-k, k] with k = 1/sqrt(fan-in) of each matrix; biases use the
// recurrent fan-in (dense bias: the dense fan-in).
SpeedModel init_model(const ModelConfig& config);

// Carried (h, c) per lane for the layers whose state runs forward in time.
// Backward directions restart from zero in every window.
struct LaneState {
  LstmState l1, l2, l3;
};

struct RecurrentState {
  std::vector<LaneState> lanes;

  static RecurrentState zeros(const ModelConfig& config, std::size_t lanes);
};

// Predictions for a single lane; x is window_len x input_channels.
Eigen::VectorXd forward_lane(const SpeedModel& model, const Eigen::MatrixXd& x, LaneState& state);

struct ForwardResult {
  Eigen::MatrixXd predictions;  // lanes x window_len; zero rows for padding
  RecurrentState state;
};

// Padded lanes keep their incoming state.
ForwardResult forward(const SpeedModel& model, const pipe::WindowBatch& batch,
                      const RecurrentState& state);

// L = 1/(2N) * sum over valid entries of (label - pred)^2, N = valid entries.
double masked_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& label,
                  const std::vector<bool>& valid);

struct GradientResult {
  double loss = 0.0;
  SpeedModel gradient;
  Eigen::MatrixXd predictions;
  RecurrentState state;
};

// Exact gradient of masked_mse through the window; the incoming state is a
// constant (truncated BPTT at window edges).
GradientResult backward(const SpeedModel& model, const pipe::WindowBatch& batch,
                        const RecurrentState& state);

Eigen::MatrixXd batch_labels(const pipe::WindowBatch& batch);
std::vector<bool> batch_valid(const pipe::WindowBatch& batch);

struct TrainConfig {
  int epochs = 200;
  std::size_t batch_lanes = 4;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
  // Early stopping on validation RMSE; 0 disables.
  int patience = 0;
  double min_delta = 1e-3;
  // When early stopping is enabled, return the best-validation weights.
  bool restore_best = true;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_rmse = 0.0;
  double val_rmse = 0.0;
};

struct TrainResult {
  SpeedModel model;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  bool stopped_early = false;
  int returned_epoch = 0;  // epoch whose weights are in `model`

  const EpochRecord& returned() const { return history.at(static_cast<std::size_t>(returned_epoch - 1)); }
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Training aborts with kDivergence when a batch loss is non-finite or exceeds
// this multiple of the loss of always predicting 0 on the training labels
// (floored at 1 m^2/s^2).
inline constexpr double kDivergenceFactor = 1e3;
double divergence_threshold(std::span<const pipe::Lane> train_lanes);

// Stateful chronological training: states reset at every epoch start and
// carried lane-wise across batches; Adam with global-norm gradient clipping.
TrainResult train(SpeedModel model, const pipe::DatasetSplit& split, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Plain root-mean-square error of clamped predictions over valid entries.
// Each lane runs from a zero state; windows before score_from[lane] only warm
// the state up and are not scored (empty span: score everything).
double evaluate_rmse(const SpeedModel& model, std::span<const pipe::Lane> lanes,
                     std::span<const std::size_t> score_from = {});

// Validation lanes for scoring: a span that continues a training span of the
// same drive is prefixed with those training windows as warm-up.
struct EvalLanes {
  std::vector<pipe::Lane> lanes;
  std::vector<std::size_t> score_from;
};
EvalLanes continuous_eval_lanes(const pipe::DatasetSplit& split);

class AdamOptimizer {
 public:
  AdamOptimizer(const ModelConfig& config, double lr, double beta1, double beta2, double epsilon);

  // Returns the pre-clipping global gradient norm.
  double step(SpeedModel& model, const SpeedModel& gradient, double clip_norm);

 private:
  SpeedModel m_;
  SpeedModel v_;
  double lr_, beta1_, beta2_, epsilon_;
  std::int64_t t_ = 0;
};

// Window-at-a-time streaming inference. A window's 20 outputs become available
// once its last sample has been pushed.
class StreamPredictor {
 public:
  explicit StreamPredictor(const SpeedModel& model);

  // Returns kWindowLen clamped predictions when a window completes, else empty.
  std::vector<double> push(const Vec6& sample);
  std::size_t pending() const { return filled_; }
  void reset();

 private:
  const SpeedModel* model_;
  LaneState state_;
  Eigen::MatrixXd buffer_;
  std::size_t filled_ = 0;
};

// Predictions for every sample of complete windows; the trailing remainder
// produces nothing.
SpeedSeries predict_stream(const SpeedModel& model, const FeatureStream& features);

// Binary weight file: "SPDNET1\0", config, parameter count, little-endian f64
// parameters in declaration order, CRC-32 of all preceding bytes.
void save_weights(const SpeedModel& model, const std::filesystem::path& path);
SpeedModel load_weights(const std::filesystem::path& path,
                        const std::optional<ModelConfig>& expected = std::nullopt);

}  // namespace speedlearn::net
