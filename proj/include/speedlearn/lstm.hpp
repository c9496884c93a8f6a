#pragma once

#include <Eigen/Core>

namespace speedlearn::net {

// Gate rows are stacked [input; forget; cell; output], one bias vector.
struct LstmWeights {
  Eigen::MatrixXd w;  // 4h x in
  Eigen::MatrixXd u;  // 4h x h
  Eigen::VectorXd b;  // 4h

  static LstmWeights zeros(int input, int hidden);
  int input() const { return static_cast<int>(w.cols()); }
  int hidden() const { return static_cast<int>(u.cols()); }
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;

  static LstmState zeros(int hidden);
};

// Everything backward() needs from one forward call.
struct LstmTrace {
  Eigen::MatrixXd x;       // in x T
  Eigen::MatrixXd h_prev;  // h x T
  Eigen::MatrixXd c_prev;
  Eigen::MatrixXd i, f, g, o;
  Eigen::MatrixXd tanh_c;
};

// Runs the cell over the columns of `x` (one column per step), starting from
// and updating `state`. Returns the hidden outputs, h x T.
Eigen::MatrixXd lstm_forward(const LstmWeights& wts, const Eigen::MatrixXd& x, LstmState& state,
                             LstmTrace* trace = nullptr);

// Backpropagation through the steps of one traced call. The state the call
// started from is treated as a constant. Accumulates into `grad`, returns
// d loss / d x.
Eigen::MatrixXd lstm_backward(const LstmWeights& wts, const LstmTrace& trace,
                              const Eigen::MatrixXd& d_out, LstmWeights& grad);

}  // namespace speedlearn::net
