#include "ccast/network.hpp"

#include <cmath>

#include "ccast/error.hpp"
#include "ccast/rng.hpp"

namespace ccast {

std::string to_string(CellForm form) {
  return form == CellForm::standard ? "standard" : "reduced";
}

CellForm cell_form_from_string(const std::string& name) {
  if (name == "standard") return CellForm::standard;
  if (name == "reduced") return CellForm::reduced;
  throw Error("unknown cell form: " + name);
}

NetworkParameters zeros_like(const Hyperparameters& h) {
  const auto hid = static_cast<size_t>(h.hidden_dim);
  const auto in = static_cast<size_t>(h.input_dim);
  const auto out = static_cast<size_t>(h.output_dim);
  NetworkParameters p;
  p.w_lin = Mat(hid, in);
  p.b_lin.assign(hid, 0.0);
  for (Mat* m : {&p.w_xi, &p.w_hi, &p.w_xf, &p.w_hf, &p.w_xc, &p.w_hc, &p.w_xo, &p.w_ho})
    *m = Mat(hid, hid);
  for (Vec* v : {&p.b_i, &p.b_f, &p.b_c, &p.b_o}) v->assign(hid, 0.0);
  p.w_out = Mat(out, hid);
  p.b_out.assign(out, 0.0);
  return p;
}

size_t parameter_count(const NetworkParameters& p) {
  size_t n = 0;
  for_each_tensor(p, [&](const char*, const Vec& flat) { n += flat.size(); });
  return n;
}

LstmState zero_state(int hidden_dim) {
  LstmState s;
  s.c.assign(static_cast<size_t>(hidden_dim), 0.0);
  s.h.assign(static_cast<size_t>(hidden_dim), 0.0);
  return s;
}

NetworkParameters init_params(const Hyperparameters& h) {
  if (h.hidden_dim < 1 || h.input_dim < 1 || h.output_dim < 1)
    throw Error("network dimensions must be positive");
  if (!(h.init_range > 0.0)) throw Error("init_range must be positive");
  NetworkParameters p = zeros_like(h);
  Rng rng(h.seed);
  for_each_tensor(p, [&](const char*, Vec& flat) {
    for (double& w : flat) w = rng.uniform(-h.init_range, h.init_range);
  });
  return p;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_finite(const Vec& v, const char* layer) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(std::string("non-finite value in layer ") + layer);
}

}  // namespace

std::pair<Vec, LstmState> forward_step(const NetworkParameters& p, const Hyperparameters& h,
                                       const LstmState& state, const Vec& x) {
  if (x.size() != static_cast<size_t>(h.input_dim))
    throw Error("forward_step input size mismatch");
  if (state.h.size() != static_cast<size_t>(h.hidden_dim))
    throw Error("forward_step state size mismatch");

  Vec u = matvec(p.w_lin, x);
  add_scaled(u, p.b_lin, 1.0);
  check_finite(u, "input projection");

  auto gate = [&](const Mat& wx, const Mat& wh, const Vec& b) {
    Vec a = matvec(wx, u);
    add_matvec(wh, state.h, a);
    add_scaled(a, b, 1.0);
    return a;
  };

  Vec ai = gate(p.w_xi, p.w_hi, p.b_i);
  Vec af = gate(p.w_xf, p.w_hf, p.b_f);
  Vec ac = gate(p.w_xc, p.w_hc, p.b_c);
  Vec ao = gate(p.w_xo, p.w_ho, p.b_o);

  const auto hid = static_cast<size_t>(h.hidden_dim);
  LstmState next;
  next.c.resize(hid);
  next.h.resize(hid);
  for (size_t j = 0; j < hid; ++j) {
    const double i_g = sigmoid(ai[j]);
    const double f_g = sigmoid(af[j]);
    const double g = std::tanh(ac[j]);
    const double o_g = sigmoid(ao[j]);
    if (h.cell_form == CellForm::standard) {
      next.c[j] = f_g * state.c[j] + i_g * g;
      next.h[j] = o_g * std::tanh(next.c[j]);
    } else {
      next.c[j] = f_g * state.c[j] + g;
      next.h[j] = std::tanh(next.c[j]);
    }
  }
  check_finite(next.c, "cell state");

  Vec y = matvec(p.w_out, next.h);
  add_scaled(y, p.b_out, 1.0);
  check_finite(y, "output projection");
  return {std::move(y), std::move(next)};
}

double mse(const Mat& predictions, const Mat& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
    throw Error("mse shape mismatch");
  if (predictions.raw().empty()) throw Error("mse over empty matrices");
  double acc = 0.0;
  for (size_t i = 0; i < predictions.raw().size(); ++i) {
    const double d = predictions.raw()[i] - targets.raw()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(predictions.raw().size());
}

}  // namespace ccast
