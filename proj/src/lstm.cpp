#include "speedlearn/lstm.hpp"

namespace speedlearn::net {

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) { return 1.0 / (1.0 + (-z).exp()); }

}  // namespace

LstmWeights LstmWeights::zeros(int input, int hidden) {
  return {Eigen::MatrixXd::Zero(4 * hidden, input), Eigen::MatrixXd::Zero(4 * hidden, hidden),
          Eigen::VectorXd::Zero(4 * hidden)};
}

LstmState LstmState::zeros(int hidden) {
  return {Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(hidden)};
}

Eigen::MatrixXd lstm_forward(const LstmWeights& wts, const Eigen::MatrixXd& x, LstmState& state,
                             LstmTrace* trace) {
  const int h = wts.hidden();
  const auto steps = x.cols();
  Eigen::MatrixXd zx = wts.w * x;
  zx.colwise() += wts.b;

  Eigen::MatrixXd out(h, steps);
  if (trace) {
    trace->x = x;
    trace->h_prev.resize(h, steps);
    trace->c_prev.resize(h, steps);
    trace->i.resize(h, steps);
    trace->f.resize(h, steps);
    trace->g.resize(h, steps);
    trace->o.resize(h, steps);
    trace->tanh_c.resize(h, steps);
  }
  Eigen::VectorXd z(4 * h);
  for (Eigen::Index t = 0; t < steps; ++t) {
    z.noalias() = zx.col(t);
    z.noalias() += wts.u * state.h;
    const Eigen::ArrayXd i = sigmoid(z.segment(0, h).array());
    const Eigen::ArrayXd f = sigmoid(z.segment(h, h).array());
    const Eigen::ArrayXd g = z.segment(2 * h, h).array().tanh();
    const Eigen::ArrayXd o = sigmoid(z.segment(3 * h, h).array());
    if (trace) {
      trace->h_prev.col(t) = state.h;
      trace->c_prev.col(t) = state.c;
    }
    state.c = (f * state.c.array() + i * g).matrix();
    const Eigen::ArrayXd tc = state.c.array().tanh();
    state.h = (o * tc).matrix();
    out.col(t) = state.h;
    if (trace) {
      trace->i.col(t) = i.matrix();
      trace->f.col(t) = f.matrix();
      trace->g.col(t) = g.matrix();
      trace->o.col(t) = o.matrix();
      trace->tanh_c.col(t) = tc.matrix();
    }
  }
  return out;
}

Eigen::MatrixXd lstm_backward(const LstmWeights& wts, const LstmTrace& trace,
                              const Eigen::MatrixXd& d_out, LstmWeights& grad) {
  const int h = wts.hidden();
  const auto steps = d_out.cols();
  Eigen::MatrixXd dz(4 * h, steps);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h);
  Eigen::ArrayXd dc_next = Eigen::ArrayXd::Zero(h);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Eigen::ArrayXd dh = (d_out.col(t) + dh_next).array();
    const auto i = trace.i.col(t).array();
    const auto f = trace.f.col(t).array();
    const auto g = trace.g.col(t).array();
    const auto o = trace.o.col(t).array();
    const auto tc = trace.tanh_c.col(t).array();

    const Eigen::ArrayXd dc = dh * o * (1.0 - tc.square()) + dc_next;
    dz.col(t).segment(0, h) = (dc * g * i * (1.0 - i)).matrix();
    dz.col(t).segment(h, h) = (dc * trace.c_prev.col(t).array() * f * (1.0 - f)).matrix();
    dz.col(t).segment(2 * h, h) = (dc * i * (1.0 - g.square())).matrix();
    dz.col(t).segment(3 * h, h) = (dh * tc * o * (1.0 - o)).matrix();
    dc_next = dc * f;
    dh_next.noalias() = wts.u.transpose() * dz.col(t);
  }
  grad.w.noalias() += dz * trace.x.transpose();
  grad.u.noalias() += dz * trace.h_prev.transpose();
  grad.b.noalias() += dz.rowwise().sum();
  return wts.w.transpose() * dz;
}

}  // namespace speedlearn::net
