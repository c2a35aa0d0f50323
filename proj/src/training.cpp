#include "ccast/training.hpp"

#include <cmath>

#include "ccast/error.hpp"

namespace ccast {

namespace {

Vec column(const FeatureMatrix& m, size_t c) {
  Vec x(m.rows());
  for (size_t r = 0; r < m.rows(); ++r) x[r] = m.values(r, c);
  return x;
}

void check_training_shapes(const Hyperparameters& h, const FeatureMatrix& m) {
  if (m.rows() != static_cast<size_t>(h.input_dim))
    throw Error("matrix has " + std::to_string(m.rows()) + " rows but the network expects " +
                std::to_string(h.input_dim));
  if (h.output_dim > h.input_dim)
    throw Error("output_dim cannot exceed input_dim: targets are the leading rows");
  if (h.rho < 1) throw Error("rho must be >= 1");
}

}  // namespace

AdamState init_adam(const Hyperparameters& h) {
  AdamState a;
  a.m = zeros_like(h);
  a.v = zeros_like(h);
  a.t = 0;
  return a;
}

void adam_update(double& theta, double grad, double& m, double& v, int64_t t,
                 double lr, double beta1, double beta2, double epsilon) {
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad * grad;
  const double m_hat = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
  const double v_hat = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
  theta -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
}

void adam_step(NetworkParameters& p, const Gradients& g, AdamState& a,
               const Hyperparameters& h) {
  a.t += 1;
  std::vector<const Vec*> grads;
  for_each_tensor(g, [&](const char*, const Vec& flat) { grads.push_back(&flat); });
  std::vector<Vec*> ms, vs;
  for_each_tensor(a.m, [&](const char*, Vec& flat) { ms.push_back(&flat); });
  for_each_tensor(a.v, [&](const char*, Vec& flat) { vs.push_back(&flat); });

  size_t idx = 0;
  for_each_tensor(p, [&](const char*, Vec& theta) {
    const Vec& grad = *grads[idx];
    Vec& m = *ms[idx];
    Vec& v = *vs[idx];
    if (grad.size() != theta.size()) throw Error("gradient shape mismatch in adam_step");
    for (size_t i = 0; i < theta.size(); ++i)
      adam_update(theta[i], grad[i], m[i], v[i], a.t, h.learning_rate, h.beta1, h.beta2,
                  h.epsilon);
    ++idx;
  });
}

WindowResult bptt_window(const NetworkParameters& p, const Hyperparameters& h,
                         const FeatureMatrix& inputs, size_t first,
                         const LstmState& initial) {
  check_training_shapes(h, inputs);
  const auto rho = static_cast<size_t>(h.rho);
  if (first + rho + 1 > inputs.cols())
    throw Error("window needs " + std::to_string(rho) + " inputs plus a target column");

  const auto hid = static_cast<size_t>(h.hidden_dim);
  const auto out_dim = static_cast<size_t>(h.output_dim);
  const bool standard = h.cell_form == CellForm::standard;

  // Forward pass, keeping every activation the backward pass needs.
  std::vector<Vec> xs(rho), us(rho), is(rho), fs(rho), gs(rho), os(rho), cs(rho),
      tcs(rho), hs(rho), ys(rho);
  LstmState state = initial;

  WindowResult result;
  result.loss = 0.0;
  for (size_t t = 0; t < rho; ++t) {
    xs[t] = column(inputs, first + t);
    Vec u = matvec(p.w_lin, xs[t]);
    add_scaled(u, p.b_lin, 1.0);

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

    is[t].resize(hid);
    fs[t].resize(hid);
    gs[t].resize(hid);
    os[t].resize(hid);
    cs[t].resize(hid);
    tcs[t].resize(hid);
    hs[t].resize(hid);
    for (size_t j = 0; j < hid; ++j) {
      is[t][j] = 1.0 / (1.0 + std::exp(-ai[j]));
      fs[t][j] = 1.0 / (1.0 + std::exp(-af[j]));
      gs[t][j] = std::tanh(ac[j]);
      os[t][j] = 1.0 / (1.0 + std::exp(-ao[j]));
      const double c_new = standard ? fs[t][j] * state.c[j] + is[t][j] * gs[t][j]
                                    : fs[t][j] * state.c[j] + gs[t][j];
      cs[t][j] = c_new;
      tcs[t][j] = std::tanh(c_new);
      hs[t][j] = standard ? os[t][j] * tcs[t][j] : tcs[t][j];
      if (!std::isfinite(c_new)) throw Error("non-finite cell state during training");
    }
    us[t] = std::move(u);

    ys[t] = matvec(p.w_out, hs[t]);
    add_scaled(ys[t], p.b_out, 1.0);

    for (size_t k = 0; k < out_dim; ++k) {
      const double d = ys[t][k] - inputs.values(k, first + t + 1);
      result.loss += d * d;
    }
    state.c = cs[t];
    state.h = hs[t];
  }
  const double denom = static_cast<double>(out_dim) * static_cast<double>(rho);
  result.loss /= denom;
  result.final_state = state;

  // Backward pass.
  Gradients g = zeros_like(h);
  Vec dh_carry(hid, 0.0), dc_carry(hid, 0.0);
  const double scale = 2.0 / denom;
  Vec dy(out_dim), dh(hid), dc(hid), dai(hid), daf(hid), dac(hid), dao(hid), du(hid);

  for (size_t t = rho; t-- > 0;) {
    for (size_t k = 0; k < out_dim; ++k)
      dy[k] = scale * (ys[t][k] - inputs.values(k, first + t + 1));

    add_outer(g.w_out, dy, hs[t]);
    add_scaled(g.b_out, dy, 1.0);

    dh = dh_carry;
    add_matvec_t(p.w_out, dy, dh);
    dc = dc_carry;

    const Vec& c_prev = t == 0 ? initial.c : cs[t - 1];
    const Vec& h_prev = t == 0 ? initial.h : hs[t - 1];

    for (size_t j = 0; j < hid; ++j) {
      const double i_g = is[t][j], f_g = fs[t][j], g_c = gs[t][j], o_g = os[t][j];
      const double tc = tcs[t][j];
      double d_cell = dc[j];
      double d_o = 0.0, d_i = 0.0;
      if (standard) {
        d_o = dh[j] * tc;
        d_cell += dh[j] * o_g * (1.0 - tc * tc);
        d_i = d_cell * g_c;
      } else {
        d_cell += dh[j] * (1.0 - tc * tc);
      }
      const double d_g = standard ? d_cell * i_g : d_cell;
      const double d_f = d_cell * c_prev[j];
      dc_carry[j] = d_cell * f_g;

      dai[j] = d_i * i_g * (1.0 - i_g);
      daf[j] = d_f * f_g * (1.0 - f_g);
      dac[j] = d_g * (1.0 - g_c * g_c);
      dao[j] = d_o * o_g * (1.0 - o_g);
    }

    add_outer(g.w_xi, dai, us[t]);
    add_outer(g.w_hi, dai, h_prev);
    add_scaled(g.b_i, dai, 1.0);
    add_outer(g.w_xf, daf, us[t]);
    add_outer(g.w_hf, daf, h_prev);
    add_scaled(g.b_f, daf, 1.0);
    add_outer(g.w_xc, dac, us[t]);
    add_outer(g.w_hc, dac, h_prev);
    add_scaled(g.b_c, dac, 1.0);
    add_outer(g.w_xo, dao, us[t]);
    add_outer(g.w_ho, dao, h_prev);
    add_scaled(g.b_o, dao, 1.0);

    du.assign(hid, 0.0);
    add_matvec_t(p.w_xi, dai, du);
    add_matvec_t(p.w_xf, daf, du);
    add_matvec_t(p.w_xc, dac, du);
    add_matvec_t(p.w_xo, dao, du);

    dh_carry.assign(hid, 0.0);
    add_matvec_t(p.w_hi, dai, dh_carry);
    add_matvec_t(p.w_hf, daf, dh_carry);
    add_matvec_t(p.w_hc, dac, dh_carry);
    add_matvec_t(p.w_ho, dao, dh_carry);

    add_outer(g.w_lin, du, xs[t]);
    add_scaled(g.b_lin, du, 1.0);
  }

  result.grads = std::move(g);
  return result;
}

double window_loss(const NetworkParameters& p, const Hyperparameters& h,
                   const FeatureMatrix& inputs, size_t first, const LstmState& initial) {
  check_training_shapes(h, inputs);
  const auto rho = static_cast<size_t>(h.rho);
  if (first + rho + 1 > inputs.cols())
    throw Error("window needs " + std::to_string(rho) + " inputs plus a target column");
  LstmState state = initial;
  double loss = 0.0;
  for (size_t t = 0; t < rho; ++t) {
    auto [y, next] = forward_step(p, h, state, column(inputs, first + t));
    for (size_t k = 0; k < static_cast<size_t>(h.output_dim); ++k) {
      const double d = y[k] - inputs.values(k, first + t + 1);
      loss += d * d;
    }
    state = std::move(next);
  }
  return loss / (static_cast<double>(h.output_dim) * static_cast<double>(h.rho));
}

namespace {

TrainedModel train_impl(NetworkParameters params, const FeatureMatrix& m,
                        const Hyperparameters& h) {
  check_training_shapes(h, m);
  const auto rho = static_cast<size_t>(h.rho);
  if (m.cols() < rho + 1)
    throw Error("training needs at least rho+1 = " + std::to_string(rho + 1) +
                " columns, got " + std::to_string(m.cols()));
  if (h.max_epochs < 0) throw Error("max_epochs must be >= 0");

  TrainedModel model;
  model.adam = init_adam(h);
  const size_t n_windows = (m.cols() - 1) / rho;

  LstmState carried = zero_state(h.hidden_dim);
  for (int epoch = 0; epoch < h.max_epochs; ++epoch) {
    LstmState state =
        h.carry_state_across_epochs && epoch > 0 ? carried : zero_state(h.hidden_dim);
    double total = 0.0;
    for (size_t w = 0; w < n_windows; ++w) {
      WindowResult res = bptt_window(params, h, m, w * rho, state);
      adam_step(params, res.grads, model.adam, h);
      state = std::move(res.final_state);
      total += res.loss;
    }
    carried = state;
    model.log.epoch_loss.push_back(total / static_cast<double>(n_windows));

    const auto& log = model.log.epoch_loss;
    if (h.early_stop_patience > 0 &&
        log.size() > static_cast<size_t>(h.early_stop_patience)) {
      const double recent = log.back();
      const double past = log[log.size() - 1 - h.early_stop_patience];
      if (std::fabs(past - recent) < h.early_stop_delta) {
        model.log.stopped_early = true;
        break;
      }
    }
  }
  model.log.epochs_run = static_cast<int>(model.log.epoch_loss.size());
  model.params = std::move(params);
  return model;
}

}  // namespace

TrainedModel train(const FeatureMatrix& m, const Hyperparameters& h) {
  return train_impl(init_params(h), m, h);
}

TrainedModel train_from(const NetworkParameters& start, const FeatureMatrix& m,
                        const Hyperparameters& h) {
  return train_impl(start, m, h);
}

std::array<double, kOhlcChannels> predict_next(const NetworkParameters& p,
                                               const Hyperparameters& h,
                                               const FeatureMatrix& inputs, size_t first) {
  check_training_shapes(h, inputs);
  const auto rho = static_cast<size_t>(h.rho);
  if (h.output_dim != static_cast<int>(kOhlcChannels))
    throw Error("predict_next expects a four-channel output head");
  if (first + rho > inputs.cols())
    throw Error("predict_next needs exactly rho = " + std::to_string(rho) + " columns");

  LstmState state = zero_state(h.hidden_dim);
  Vec y;
  for (size_t t = 0; t < rho; ++t) {
    auto [out, next] = forward_step(p, h, state, column(inputs, first + t));
    y = std::move(out);
    state = std::move(next);
  }
  return {y[0], y[1], y[2], y[3]};
}

std::array<double, kOhlcChannels> predict_next(const NetworkParameters& p,
                                               const Hyperparameters& h,
                                               const FeatureMatrix& inputs) {
  const auto rho = static_cast<size_t>(h.rho);
  if (inputs.cols() < rho) throw Error("predict_next needs at least rho columns");
  return predict_next(p, h, inputs, inputs.cols() - rho);
}

}  // namespace ccast
