#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccast/matrix.hpp"

namespace ccast {

// The recurrent cell comes in two flavours. `standard` is the usual gated
// update (input gate scales the candidate, output gate scales tanh of the
// cell). `reduced` drops the input gate from the cell update and the output
// gate from the hidden state: c = f*c_prev + g, h = tanh(c). The reduced form
// is kept selectable because it changes training dynamics in ways worth
// comparing; both share the same parameter set.
enum class CellForm { standard, reduced };

std::string to_string(CellForm form);
CellForm cell_form_from_string(const std::string& name);

struct Hyperparameters {
  int input_dim = 11;
  int hidden_dim = 36;
  int output_dim = 4;
  int rho = 150;  // window length for truncated backpropagation
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double init_range = 0.75;  // weights start uniform in [-init_range, init_range]
  int max_epochs = 100;
  double early_stop_delta = 1e-6;
  int early_stop_patience = 5;
  uint64_t seed = 42;
  CellForm cell_form = CellForm::standard;
  bool carry_state_across_epochs = false;

  bool operator==(const Hyperparameters&) const = default;
};

// Input layer, one recurrent cell, linear readout. Gate input weights are
// hidden x hidden because the cell consumes the projected input u, not the
// raw feature vector.
struct NetworkParameters {
  Mat w_lin;  // hidden x input
  Vec b_lin;
  Mat w_xi, w_hi;  // input gate
  Vec b_i;
  Mat w_xf, w_hf;  // forget gate
  Vec b_f;
  Mat w_xc, w_hc;  // candidate
  Vec b_c;
  Mat w_xo, w_ho;  // output gate
  Vec b_o;
  Mat w_out;  // output x hidden
  Vec b_out;

  bool operator==(const NetworkParameters&) const = default;
};

// Gradients share the exact shape of the parameters.
using Gradients = NetworkParameters;

NetworkParameters zeros_like(const Hyperparameters& h);

// Visits every tensor's flat storage together with its serialization name.
// Matrices pass their row-major buffer; biases pass themselves.
template <typename Params, typename Fn>
void for_each_tensor(Params& p, Fn&& fn) {
  fn("w_lin", p.w_lin.raw());
  fn("b_lin", p.b_lin);
  fn("w_xi", p.w_xi.raw());
  fn("w_hi", p.w_hi.raw());
  fn("b_i", p.b_i);
  fn("w_xf", p.w_xf.raw());
  fn("w_hf", p.w_hf.raw());
  fn("b_f", p.b_f);
  fn("w_xc", p.w_xc.raw());
  fn("w_hc", p.w_hc.raw());
  fn("b_c", p.b_c);
  fn("w_xo", p.w_xo.raw());
  fn("w_ho", p.w_ho.raw());
  fn("b_o", p.b_o);
  fn("w_out", p.w_out.raw());
  fn("b_out", p.b_out);
}

size_t parameter_count(const NetworkParameters& p);

struct LstmState {
  Vec c;
  Vec h;

  bool operator==(const LstmState&) const = default;
};

LstmState zero_state(int hidden_dim);

// All weights and biases drawn uniformly from [-init_range, init_range] with
// a deterministic generator, so one seed always yields one network.
NetworkParameters init_params(const Hyperparameters& h);

// One step: y = W_out * h_new + b_out. Throws if any intermediate goes
// non-finite, naming the layer that produced it.
std::pair<Vec, LstmState> forward_step(const NetworkParameters& p, const Hyperparameters& h,
                                       const LstmState& state, const Vec& x);

// Mean squared error over two equally sized value sets.
double mse(const Mat& predictions, const Mat& targets);

}  // namespace ccast
