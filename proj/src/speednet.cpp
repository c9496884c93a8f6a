#include "speedlearn/speednet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "binary_io.hpp"
#include "speedlearn/error.hpp"

namespace speedlearn::net {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'D', 'N', 'E', 'T', '1', '\0'};

struct LaneTrace {
  LstmTrace l1, l2f, l2b, l3f, l3b;
  Eigen::MatrixXd h3;
};

Eigen::MatrixXd reverse_steps(const Eigen::MatrixXd& m) { return m.rowwise().reverse(); }

Eigen::MatrixXd bidirectional(const LstmWeights& fwd, const LstmWeights& bwd,
                              const Eigen::MatrixXd& x, LstmState& carried, LstmTrace* tf,
                              LstmTrace* tb) {
  const Eigen::MatrixXd hf = lstm_forward(fwd, x, carried, tf);
  LstmState fresh = LstmState::zeros(bwd.hidden());
  const Eigen::MatrixXd hb = reverse_steps(lstm_forward(bwd, reverse_steps(x), fresh, tb));
  Eigen::MatrixXd out(hf.rows() + hb.rows(), x.cols());
  out << hf, hb;
  return out;
}

Eigen::MatrixXd bidirectional_backward(const LstmWeights& fwd, const LstmWeights& bwd,
                                       const LstmTrace& tf, const LstmTrace& tb,
                                       const Eigen::MatrixXd& d_out, LstmWeights& gf,
                                       LstmWeights& gb) {
  const int h = fwd.hidden();
  Eigen::MatrixXd dx = lstm_backward(fwd, tf, d_out.topRows(h), gf);
  dx += reverse_steps(lstm_backward(bwd, tb, reverse_steps(d_out.bottomRows(h)), gb));
  return dx;
}

Eigen::VectorXd run_lane(const SpeedModel& m, const Eigen::MatrixXd& x, LaneState& st,
                         LaneTrace* tr) {
  const Eigen::MatrixXd xt = x.transpose();
  const Eigen::MatrixXd h1 = lstm_forward(m.l1, xt, st.l1, tr ? &tr->l1 : nullptr);
  const Eigen::MatrixXd h2 = bidirectional(m.l2_fwd, m.l2_bwd, h1, st.l2, tr ? &tr->l2f : nullptr,
                                           tr ? &tr->l2b : nullptr);
  Eigen::MatrixXd h3 = bidirectional(m.l3_fwd, m.l3_bwd, h2, st.l3, tr ? &tr->l3f : nullptr,
                                     tr ? &tr->l3b : nullptr);
  Eigen::VectorXd y = h3.transpose() * m.dense_w;
  y.array() += m.dense_b;
  if (tr) tr->h3 = std::move(h3);
  return y;
}

void backward_lane(const SpeedModel& m, const LaneTrace& tr, const Eigen::VectorXd& dy,
                   SpeedModel& g) {
  g.dense_w.noalias() += tr.h3 * dy;
  g.dense_b += dy.sum();
  const Eigen::MatrixXd dh3 = m.dense_w * dy.transpose();
  const Eigen::MatrixXd dh2 =
      bidirectional_backward(m.l3_fwd, m.l3_bwd, tr.l3f, tr.l3b, dh3, g.l3_fwd, g.l3_bwd);
  const Eigen::MatrixXd dh1 =
      bidirectional_backward(m.l2_fwd, m.l2_bwd, tr.l2f, tr.l2b, dh2, g.l2_fwd, g.l2_bwd);
  lstm_backward(m.l1, tr.l1, dh1, g.l1);
}

void check_batch(const SpeedModel& model, const pipe::WindowBatch& batch,
                 const RecurrentState& state) {
  if (batch.lanes() != state.lanes.size()) {
    throw Error(ErrorCode::kShapeMismatch, "batch has " + std::to_string(batch.lanes()) +
                                               " lanes, state has " +
                                               std::to_string(state.lanes.size()));
  }
  if (model.config.window_len != kWindowLen || model.config.input_channels != kChannels) {
    throw Error(ErrorCode::kShapeMismatch, "model input shape does not match window shape");
  }
}

void fill_uniform(std::span<double> values, double k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-k, k);
  for (double& v : values) v = dist(rng);
}

std::span<double> span_of(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> span_of(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

// ---- configuration -------------------------------------------------------

void ModelConfig::validate() const {
  if (h1 < 1 || h2 < 1 || h3 < 1 || input_channels < 1 || window_len < 1) {
    throw Error(ErrorCode::kInvalidConfig, "all model sizes must be >= 1");
  }
}

bool ModelConfig::same_shape(const ModelConfig& o) const {
  return h1 == o.h1 && h2 == o.h2 && h3 == o.h3 && input_channels == o.input_channels &&
         window_len == o.window_len;
}

std::size_t lstm_parameter_count(int input, int hidden) {
  const auto h = static_cast<std::size_t>(hidden);
  return 4 * h * (static_cast<std::size_t>(input) + h + 1);
}

std::size_t parameter_count(const ModelConfig& c) {
  return lstm_parameter_count(c.input_channels, c.h1) + 2 * lstm_parameter_count(c.h1, c.h2) +
         2 * lstm_parameter_count(2 * c.h2, c.h3) + static_cast<std::size_t>(2 * c.h3 + 1);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::kInvalidConfig, "epochs must be >= 1");
  if (batch_lanes < 1) throw Error(ErrorCode::kInvalidConfig, "batch_lanes must be >= 1");
  if (!(learning_rate > 0.0) || !(epsilon > 0.0) || !(clip_norm > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "learning_rate, epsilon and clip_norm must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "Adam betas must lie in [0, 1)");
  }
  if (patience < 0) throw Error(ErrorCode::kInvalidConfig, "patience must be >= 0");
}

// ---- model ---------------------------------------------------------------

SpeedModel SpeedModel::zeros(const ModelConfig& c) {
  c.validate();
  SpeedModel m;
  m.config = c;
  m.l1 = LstmWeights::zeros(c.input_channels, c.h1);
  m.l2_fwd = LstmWeights::zeros(c.h1, c.h2);
  m.l2_bwd = LstmWeights::zeros(c.h1, c.h2);
  m.l3_fwd = LstmWeights::zeros(2 * c.h2, c.h3);
  m.l3_bwd = LstmWeights::zeros(2 * c.h2, c.h3);
  m.dense_w = Eigen::VectorXd::Zero(2 * c.h3);
  m.dense_b = 0.0;
  return m;
}

std::vector<std::span<double>> SpeedModel::parameters() {
  std::vector<std::span<double>> out;
  for (LstmWeights* l : {&l1, &l2_fwd, &l2_bwd, &l3_fwd, &l3_bwd}) {
    out.push_back(span_of(l->w));
    out.push_back(span_of(l->u));
    out.push_back(span_of(l->b));
  }
  out.push_back(span_of(dense_w));
  out.emplace_back(&dense_b, 1);
  return out;
}

std::vector<std::span<const double>> SpeedModel::parameters() const {
  auto mutable_spans = const_cast<SpeedModel*>(this)->parameters();
  return {mutable_spans.begin(), mutable_spans.end()};
}

std::size_t SpeedModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& s : parameters()) n += s.size();
  return n;
}

SpeedModel init_model(const ModelConfig& config) {
  SpeedModel m = SpeedModel::zeros(config);
  std::mt19937_64 rng(config.seed);
  for (LstmWeights* l : {&m.l1, &m.l2_fwd, &m.l2_bwd, &m.l3_fwd, &m.l3_bwd}) {
    fill_uniform(span_of(l->w), 1.0 / std::sqrt(static_cast<double>(l->input())), rng);
    fill_uniform(span_of(l->u), 1.0 / std::sqrt(static_cast<double>(l->hidden())), rng);
    fill_uniform(span_of(l->b), 1.0 / std::sqrt(static_cast<double>(l->hidden())), rng);
  }
  const double k = 1.0 / std::sqrt(static_cast<double>(m.dense_w.size()));
  fill_uniform(span_of(m.dense_w), k, rng);
  fill_uniform({&m.dense_b, 1}, k, rng);
  return m;
}

RecurrentState RecurrentState::zeros(const ModelConfig& c, std::size_t lanes) {
  RecurrentState s;
  s.lanes.assign(lanes, LaneState{LstmState::zeros(c.h1), LstmState::zeros(c.h2),
                                  LstmState::zeros(c.h3)});
  return s;
}

// ---- forward / loss / backward ------------------------------------------

Eigen::VectorXd forward_lane(const SpeedModel& model, const Eigen::MatrixXd& x, LaneState& state) {
  if (x.cols() != model.config.input_channels) {
    throw Error(ErrorCode::kShapeMismatch, "input has " + std::to_string(x.cols()) + " channels");
  }
  return run_lane(model, x, state, nullptr);
}

ForwardResult forward(const SpeedModel& model, const pipe::WindowBatch& batch,
                      const RecurrentState& state) {
  check_batch(model, batch, state);
  ForwardResult out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(batch.lanes()), kWindowLen),
                    state};
  for (std::size_t b = 0; b < batch.lanes(); ++b) {
    const auto& win = batch.windows[b];
    if (!win.valid) continue;
    out.predictions.row(static_cast<Eigen::Index>(b)) =
        run_lane(model, win.x, out.state.lanes[b], nullptr).transpose();
  }
  return out;
}

double masked_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& label,
                  const std::vector<bool>& valid) {
  if (pred.rows() != label.rows() || pred.cols() != label.cols() ||
      static_cast<std::size_t>(pred.rows()) != valid.size()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction, label and mask shapes disagree");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (Eigen::Index b = 0; b < pred.rows(); ++b) {
    if (!valid[static_cast<std::size_t>(b)]) continue;
    for (Eigen::Index t = 0; t < pred.cols(); ++t) {
      const double e = label(b, t) - pred(b, t);
      sum += e * e;
    }
    n += static_cast<std::size_t>(pred.cols());
  }
  return n == 0 ? 0.0 : sum / (2.0 * static_cast<double>(n));
}

Eigen::MatrixXd batch_labels(const pipe::WindowBatch& batch) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(batch.lanes()), kWindowLen);
  for (std::size_t b = 0; b < batch.lanes(); ++b) {
    y.row(static_cast<Eigen::Index>(b)) = batch.windows[b].y.transpose();
  }
  return y;
}

std::vector<bool> batch_valid(const pipe::WindowBatch& batch) {
  std::vector<bool> v;
  for (const auto& w : batch.windows) v.push_back(w.valid);
  return v;
}

GradientResult backward(const SpeedModel& model, const pipe::WindowBatch& batch,
                        const RecurrentState& state) {
  check_batch(model, batch, state);
  GradientResult out{0.0, SpeedModel::zeros(model.config),
                     Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(batch.lanes()), kWindowLen),
                     state};
  std::vector<LaneTrace> traces(batch.lanes());
  std::size_t valid_lanes = 0;
  for (std::size_t b = 0; b < batch.lanes(); ++b) {
    const auto& win = batch.windows[b];
    if (!win.valid) continue;
    ++valid_lanes;
    out.predictions.row(static_cast<Eigen::Index>(b)) =
        run_lane(model, win.x, out.state.lanes[b], &traces[b]).transpose();
  }
  const Eigen::MatrixXd labels = batch_labels(batch);
  out.loss = masked_mse(out.predictions, labels, batch_valid(batch));
  if (valid_lanes == 0) return out;

  const double n = static_cast<double>(valid_lanes * kWindowLen);
  for (std::size_t b = 0; b < batch.lanes(); ++b) {
    if (!batch.windows[b].valid) continue;
    const auto row = static_cast<Eigen::Index>(b);
    const Eigen::VectorXd dy = (out.predictions.row(row) - labels.row(row)).transpose() / n;
    backward_lane(model, traces[b], dy, out.gradient);
  }
  return out;
}

// ---- optimisation --------------------------------------------------------

AdamOptimizer::AdamOptimizer(const ModelConfig& config, double lr, double beta1, double beta2,
                             double epsilon)
    : m_(SpeedModel::zeros(config)),
      v_(SpeedModel::zeros(config)),
      lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {}

double AdamOptimizer::step(SpeedModel& model, const SpeedModel& gradient, double clip_norm) {
  const auto params = model.parameters();
  const auto grads = gradient.parameters();
  const auto ms = m_.parameters();
  const auto vs = v_.parameters();

  double sq = 0.0;
  for (const auto& g : grads) {
    for (double x : g) sq += x * x;
  }
  const double norm = std::sqrt(sq);
  const double scale = norm > clip_norm ? clip_norm / norm : 1.0;

  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t s = 0; s < params.size(); ++s) {
    for (std::size_t i = 0; i < params[s].size(); ++i) {
      const double g = grads[s][i] * scale;
      ms[s][i] = beta1_ * ms[s][i] + (1.0 - beta1_) * g;
      vs[s][i] = beta2_ * vs[s][i] + (1.0 - beta2_) * g * g;
      params[s][i] -= lr_ * (ms[s][i] / c1) / (std::sqrt(vs[s][i] / c2) + epsilon_);
    }
  }
  return norm;
}

namespace {

struct ErrorSums {
  double sse = 0.0;
  std::size_t n = 0;

  void add(const Eigen::MatrixXd& pred, const pipe::WindowBatch& batch) {
    for (std::size_t b = 0; b < batch.lanes(); ++b) {
      const auto& win = batch.windows[b];
      if (!win.valid) continue;
      for (int t = 0; t < kWindowLen; ++t) {
        const double e = std::max(pred(static_cast<Eigen::Index>(b), t), 0.0) - win.y(t);
        sse += e * e;
      }
      n += kWindowLen;
    }
  }
  double rmse() const { return n == 0 ? 0.0 : std::sqrt(sse / static_cast<double>(n)); }
};

}  // namespace

double evaluate_rmse(const SpeedModel& model, std::span<const pipe::Lane> lanes,
                     std::span<const std::size_t> score_from) {
  if (!score_from.empty() && score_from.size() != lanes.size()) {
    throw Error(ErrorCode::kShapeMismatch, "score_from needs one entry per lane");
  }
  double sse = 0.0;
  std::size_t n = 0;
  for (std::size_t l = 0; l < lanes.size(); ++l) {
    LaneState state = RecurrentState::zeros(model.config, 1).lanes.front();
    const std::size_t first = score_from.empty() ? 0 : score_from[l];
    const auto& windows = lanes[l].windows;
    for (std::size_t k = 0; k < windows.size(); ++k) {
      if (!windows[k].valid) continue;
      const Eigen::VectorXd y = run_lane(model, windows[k].x, state, nullptr);
      if (k < first) continue;
      for (int t = 0; t < kWindowLen; ++t) {
        const double e = std::max(y(t), 0.0) - windows[k].y(t);
        sse += e * e;
      }
      n += kWindowLen;
    }
  }
  return n == 0 ? 0.0 : std::sqrt(sse / static_cast<double>(n));
}

EvalLanes continuous_eval_lanes(const pipe::DatasetSplit& split) {
  EvalLanes out;
  for (const auto& val : split.val) {
    pipe::Lane lane{val.drive_id, {}};
    if (!val.windows.empty()) {
      for (const auto& tr : split.train) {
        if (tr.drive_id == val.drive_id && !tr.windows.empty() &&
            tr.windows.back().index + 1 == val.windows.front().index) {
          lane.windows = tr.windows;
          break;
        }
      }
    }
    out.score_from.push_back(lane.windows.size());
    lane.windows.insert(lane.windows.end(), val.windows.begin(), val.windows.end());
    out.lanes.push_back(std::move(lane));
  }
  return out;
}

double divergence_threshold(std::span<const pipe::Lane> train_lanes) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& lane : train_lanes) {
    for (const auto& w : lane.windows) {
      if (!w.valid) continue;
      sum += w.y.squaredNorm();
      n += static_cast<std::size_t>(w.y.size());
    }
  }
  const double zero_loss = n == 0 ? 0.0 : sum / (2.0 * static_cast<double>(n));
  return kDivergenceFactor * std::max(zero_loss, 1.0);
}

TrainResult train(SpeedModel model, const pipe::DatasetSplit& split, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (split.train_windows() == 0) throw Error(ErrorCode::kEmptyDataset, "no training windows");

  const auto train_lanes = pipe::pack_lanes(split.train, cfg.batch_lanes);
  const auto train_batches = pipe::make_batches(train_lanes, cfg.batch_lanes);
  const bool has_val = split.val_windows() > 0;
  const EvalLanes val_eval = continuous_eval_lanes(split);
  const double diverged_above = divergence_threshold(split.train);

  TrainResult result{model, {}, 0, false, 0};
  AdamOptimizer adam(model.config, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
  double best_val = 1e300;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    RecurrentState state = RecurrentState::zeros(model.config, train_lanes.size());
    ErrorSums sums;
    double loss_sum = 0.0;
    std::size_t loss_n = 0;
    for (const auto& batch : train_batches) {
      GradientResult gr = backward(model, batch, state);
      if (!std::isfinite(gr.loss) || gr.loss > diverged_above) {
        throw Error(ErrorCode::kDivergence,
                    "loss diverged in epoch " + std::to_string(epoch) + " at batch " +
                        std::to_string(batch.step) + " (loss " + std::to_string(gr.loss) + ")");
      }
      const std::size_t before = sums.n;
      sums.add(gr.predictions, batch);
      loss_sum += gr.loss * static_cast<double>(sums.n - before);
      loss_n += sums.n - before;
      adam.step(model, gr.gradient, cfg.clip_norm);
      state = std::move(gr.state);
    }

    EpochRecord rec{epoch, loss_n == 0 ? 0.0 : loss_sum / static_cast<double>(loss_n),
                    sums.rmse(),
                    has_val ? evaluate_rmse(model, val_eval.lanes, val_eval.score_from) : 0.0};
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    const double monitored = has_val ? rec.val_rmse : rec.train_rmse;
    if (monitored < best_val - cfg.min_delta) {
      best_val = monitored;
      result.best_epoch = epoch;
      since_best = 0;
      if (cfg.patience > 0 && cfg.restore_best) result.model = model;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      result.stopped_early = true;
      break;
    }
  }
  if (cfg.patience == 0 || !cfg.restore_best) {
    result.model = std::move(model);
    result.returned_epoch = static_cast<int>(result.history.size());
  } else {
    result.returned_epoch = result.best_epoch;
  }
  return result;
}

// ---- streaming -----------------------------------------------------------

StreamPredictor::StreamPredictor(const SpeedModel& model)
    : model_(&model),
      state_(RecurrentState::zeros(model.config, 1).lanes.front()),
      buffer_(model.config.window_len, model.config.input_channels) {}

std::vector<double> StreamPredictor::push(const Vec6& sample) {
  buffer_.row(static_cast<Eigen::Index>(filled_)) = sample.transpose();
  if (++filled_ < static_cast<std::size_t>(buffer_.rows())) return {};
  filled_ = 0;
  const Eigen::VectorXd y = run_lane(*model_, buffer_, state_, nullptr);
  std::vector<double> out(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(i)] = std::max(y(i), 0.0);
  return out;
}

void StreamPredictor::reset() {
  state_ = RecurrentState::zeros(model_->config, 1).lanes.front();
  filled_ = 0;
}

SpeedSeries predict_stream(const SpeedModel& model, const FeatureStream& features) {
  const auto len = static_cast<std::size_t>(model.config.window_len);
  if (features.size() < len) {
    throw Error(ErrorCode::kStreamTooShort, "stream has " + std::to_string(features.size()) +
                                                " samples, need " + std::to_string(len));
  }
  StreamPredictor predictor(model);
  SpeedSeries out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto y = predictor.push(features.x[i]);
    if (y.empty()) continue;
    const std::size_t first = i + 1 - y.size();
    for (std::size_t k = 0; k < y.size(); ++k) {
      out.t.push_back(features.t[first + k]);
      out.s.push_back(y[k]);
    }
  }
  return out;
}

// ---- serialization -------------------------------------------------------

void save_weights(const SpeedModel& model, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.raw(kMagic, sizeof(kMagic));
  const auto& c = model.config;
  for (int v : {c.h1, c.h2, c.h3, c.input_channels, c.window_len}) w.put<std::int32_t>(v);
  w.put<std::uint64_t>(c.seed);
  w.put<std::uint64_t>(model.parameter_count());
  for (const auto& s : model.parameters()) w.raw(s.data(), s.size_bytes());
  const std::uint32_t crc = detail::crc32(w.bytes().data(), w.bytes().size());
  w.put<std::uint32_t>(crc);
  detail::write_file(path, w.bytes());
}

SpeedModel load_weights(const std::filesystem::path& path, const std::optional<ModelConfig>& expected) {
  const auto bytes = detail::read_file(path);
  if (bytes.size() < sizeof(kMagic) + 4) {
    throw Error(ErrorCode::kChecksumMismatch, path.string() + " is too short to be a weight file");
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (detail::crc32(bytes.data(), body) != stored) {
    throw Error(ErrorCode::kChecksumMismatch, path.string() + " failed its CRC-32 check");
  }

  detail::ByteReader r(bytes.data(), body, ErrorCode::kChecksumMismatch);
  char magic[sizeof(kMagic)];
  r.raw(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw Error(ErrorCode::kIoFailure, path.string() + " is not a speed model weight file");
  }
  ModelConfig c;
  c.h1 = r.get<std::int32_t>();
  c.h2 = r.get<std::int32_t>();
  c.h3 = r.get<std::int32_t>();
  c.input_channels = r.get<std::int32_t>();
  c.window_len = r.get<std::int32_t>();
  c.seed = r.get<std::uint64_t>();
  if (expected && !expected->same_shape(c)) {
    throw Error(ErrorCode::kConfigMismatch,
                "file holds h=(" + std::to_string(c.h1) + "," + std::to_string(c.h2) + "," +
                    std::to_string(c.h3) + "), expected (" + std::to_string(expected->h1) + "," +
                    std::to_string(expected->h2) + "," + std::to_string(expected->h3) + ")");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigMismatch, e.what());
  }
  const auto count = r.get<std::uint64_t>();
  if (count != parameter_count(c)) {
    throw Error(ErrorCode::kConfigMismatch, "parameter count does not match stored config");
  }
  SpeedModel m = SpeedModel::zeros(c);
  for (const auto& s : m.parameters()) r.raw(s.data(), s.size_bytes());
  if (r.remaining() != 0) throw Error(ErrorCode::kChecksumMismatch, "trailing bytes in weight file");
  return m;
}

}  // namespace speedlearn::net
