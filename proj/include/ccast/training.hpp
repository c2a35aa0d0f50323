#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "ccast/network.hpp"
#include "ccast/pipeline.hpp"

namespace ccast {

struct AdamState {
  NetworkParameters m;  // first moment
  NetworkParameters v;  // second moment
  int64_t t = 0;        // completed steps

  bool operator==(const AdamState&) const = default;
};

AdamState init_adam(const Hyperparameters& h);

// One element update with bias correction:
//   m <- b1*m + (1-b1)*g, v <- b2*v + (1-b2)*g^2
//   theta <- theta - lr * (m/(1-b1^t)) / (sqrt(v/(1-b2^t)) + eps)
// t is the 1-based step count.
void adam_update(double& theta, double grad, double& m, double& v, int64_t t,
                 double lr, double beta1, double beta2, double epsilon);

// Applies adam_update across every tensor. Increments a.t once.
void adam_step(NetworkParameters& p, const Gradients& g, AdamState& a,
               const Hyperparameters& h);

struct WindowResult {
  Gradients grads;
  LstmState final_state;
  double loss = 0.0;
};

// Exact gradients of the window's mean squared error with respect to every
// parameter. The sequence is inputs[first .. first+rho) with the next
// column's price channels as each step's target. Backpropagation stops at the
// window start: the incoming state is treated as a constant.
WindowResult bptt_window(const NetworkParameters& p, const Hyperparameters& h,
                         const FeatureMatrix& inputs, size_t first,
                         const LstmState& initial);

// Loss of the same window without gradients (used by the finite-difference
// checks and for logging).
double window_loss(const NetworkParameters& p, const Hyperparameters& h,
                   const FeatureMatrix& inputs, size_t first, const LstmState& initial);

struct TrainingLog {
  std::vector<double> epoch_loss;
  bool stopped_early = false;
  int epochs_run = 0;
};

struct TrainedModel {
  NetworkParameters params;
  AdamState adam;
  TrainingLog log;
};

// Trains over non-overlapping windows of rho columns (stride rho), carrying
// the cell state across windows inside an epoch and resetting it between
// epochs unless configured otherwise. Stops early once the epoch loss moved
// by less than early_stop_delta over early_stop_patience epochs.
// With max_epochs = 0 the freshly initialized network is returned untouched.
TrainedModel train(const FeatureMatrix& m, const Hyperparameters& h);

// Same loop, but starting from an existing network instead of a fresh init.
TrainedModel train_from(const NetworkParameters& start, const FeatureMatrix& m,
                        const Hyperparameters& h);

// Feeds exactly the rho columns [first, first+rho) from zero state and
// returns the last output: the normalized next-step prediction.
std::array<double, kOhlcChannels> predict_next(const NetworkParameters& p,
                                               const Hyperparameters& h,
                                               const FeatureMatrix& inputs, size_t first);

// Convenience overload reading the trailing rho columns.
std::array<double, kOhlcChannels> predict_next(const NetworkParameters& p,
                                               const Hyperparameters& h,
                                               const FeatureMatrix& inputs);

}  // namespace ccast
