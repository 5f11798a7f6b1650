#include "nowcast/nn.hpp"

#include <cmath>

#include "nowcast/errors.hpp"

namespace nowcast {

void init_uniform_fan_in(Tensor& w, int fan_in, Rng& rng) {
  const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (int i = 0; i < w.size(); ++i)
    w[static_cast<size_t>(i)] = rng.uniform(-limit, limit);
}

Conv2d::Conv2d(const std::string& name, int in_ch, int out_ch, int kernel,
               int stride_, Rng& rng)
    : w(name + ".w", {out_ch, in_ch, kernel, kernel}),
      b(name + ".b", {out_ch}),
      stride(stride_) {
  init_uniform_fan_in(w.value, in_ch * kernel * kernel, rng);
}

ConvTranspose2d::ConvTranspose2d(const std::string& name, int in_ch,
                                 int out_ch, int kernel, int stride_, Rng& rng)
    : w(name + ".w", {in_ch, out_ch, kernel, kernel}),
      b(name + ".b", {out_ch}),
      stride(stride_) {
  init_uniform_fan_in(w.value, in_ch * kernel * kernel, rng);
}

Dense::Dense(const std::string& name, int in_n, int out_n, Rng& rng)
    : w(name + ".w", {out_n, in_n}), b(name + ".b", {out_n}) {
  init_uniform_fan_in(w.value, in_n, rng);
}

LstmCell::LstmCell(const std::string& name, int in_n, int units_, Rng& rng)
    : w_ih(name + ".w_ih", {4 * units_, in_n}),
      w_hh(name + ".w_hh", {4 * units_, units_}),
      b(name + ".b", {4 * units_}),
      units(units_) {
  init_uniform_fan_in(w_ih.value, in_n, rng);
  init_uniform_fan_in(w_hh.value, units_, rng);
  for (int i = units_; i < 2 * units_; ++i) b.value[static_cast<size_t>(i)] = 1.0;
}

std::pair<NodeRef, NodeRef> LstmCell::step(Graph& g, NodeRef x, NodeRef h,
                                           NodeRef c, bool train) {
  NodeRef pre = g.add(g.matvec(g.leaf(w_ih, train), x, g.leaf(b, train)),
                      g.matvec(g.leaf(w_hh, train), h, nullptr));
  const int u = units;
  NodeRef gi = g.sigmoid(g.vec_slice(pre, 0, u));
  NodeRef gf = g.sigmoid(g.vec_slice(pre, u, 2 * u));
  NodeRef gg = g.tanh_op(g.vec_slice(pre, 2 * u, 3 * u));
  NodeRef go = g.sigmoid(g.vec_slice(pre, 3 * u, 4 * u));
  NodeRef c_new = g.add(g.mul(gf, c), g.mul(gi, gg));
  NodeRef h_new = g.mul(go, g.tanh_op(c_new));
  return {h_new, c_new};
}

ConvLstmCell::ConvLstmCell(const std::string& name, int in_ch, int filters_,
                           int kernel_, Rng& rng)
    : w_x(name + ".w_x", {4 * filters_, in_ch, kernel_, kernel_}),
      w_h(name + ".w_h", {4 * filters_, filters_, kernel_, kernel_}),
      b(name + ".b", {4 * filters_}),
      filters(filters_),
      kernel(kernel_) {
  init_uniform_fan_in(w_x.value, in_ch * kernel_ * kernel_, rng);
  init_uniform_fan_in(w_h.value, filters_ * kernel_ * kernel_, rng);
  for (int i = filters_; i < 2 * filters_; ++i)
    b.value[static_cast<size_t>(i)] = 1.0;
}

std::pair<NodeRef, NodeRef> ConvLstmCell::step(Graph& g, NodeRef x, NodeRef h,
                                               NodeRef c, bool train) {
  NodeRef pre = g.add(g.conv2d(x, g.leaf(w_x, train), g.leaf(b, train), 1),
                      g.conv2d(h, g.leaf(w_h, train), nullptr, 1));
  const int f = filters;
  NodeRef gi = g.sigmoid(g.channel_slice(pre, 0, f));
  NodeRef gf = g.sigmoid(g.channel_slice(pre, f, 2 * f));
  NodeRef gg = g.tanh_op(g.channel_slice(pre, 2 * f, 3 * f));
  NodeRef go = g.sigmoid(g.channel_slice(pre, 3 * f, 4 * f));
  NodeRef c_new = g.add(g.mul(gf, c), g.mul(gi, gg));
  NodeRef h_new = g.mul(go, g.tanh_op(c_new));
  return {h_new, c_new};
}

Adam::Adam(std::vector<Param*> params, double lr, double beta1, double beta2,
           double eps, double clip_norm)
    : params_(std::move(params)),
      lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      clip_norm_(clip_norm) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (Param* p : params_) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

void Adam::step() {
  double norm_sq = 0.0;
  for (Param* p : params_)
    for (int i = 0; i < p->grad.size(); ++i) {
      const double gi = p->grad[static_cast<size_t>(i)];
      norm_sq += gi * gi;
    }
  last_grad_norm_ = std::sqrt(norm_sq);
  if (!std::isfinite(last_grad_norm_))
    throw NumericError("non-finite gradient norm");
  double scale = 1.0;
  if (clip_norm_ > 0.0 && last_grad_norm_ > clip_norm_)
    scale = clip_norm_ / last_grad_norm_;

  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t k = 0; k < params_.size(); ++k) {
    Param* p = params_[k];
    double* m = m_[k].data();
    double* v = v_[k].data();
    double* w = p->value.data();
    const double* g = p->grad.data();
    for (int i = 0; i < p->value.size(); ++i) {
      const double gi = g[i] * scale;
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gi;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
      w[i] -= lr_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_);
    }
  }
}

void Adam::zero_grad() {
  for (Param* p : params_) p->grad.zero();
}

}  // namespace nowcast
