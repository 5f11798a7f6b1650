#pragma once

#include <string>
#include <vector>

#include "nowcast/graph.hpp"
#include "nowcast/rng.hpp"

namespace nowcast {

// Layers own their parameters and build graph nodes on demand. Weight init
// is fan-in-scaled uniform, biases zero; LSTM variants get a +1 forget-gate
// bias.

struct Conv2d {
  Param w, b;
  int stride = 1;

  Conv2d() = default;
  Conv2d(const std::string& name, int in_ch, int out_ch, int kernel,
         int stride_, Rng& rng);
  NodeRef operator()(Graph& g, NodeRef x, bool train) {
    return g.conv2d(x, g.leaf(w, train), g.leaf(b, train), stride);
  }
  void collect(std::vector<Param*>& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
};

struct ConvTranspose2d {
  Param w, b;
  int stride = 2;

  ConvTranspose2d() = default;
  ConvTranspose2d(const std::string& name, int in_ch, int out_ch, int kernel,
                  int stride_, Rng& rng);
  NodeRef operator()(Graph& g, NodeRef x, bool train) {
    return g.conv2d_transpose(x, g.leaf(w, train), g.leaf(b, train), stride);
  }
  void collect(std::vector<Param*>& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
};

struct Dense {
  Param w, b;

  Dense() = default;
  Dense(const std::string& name, int in_n, int out_n, Rng& rng);
  NodeRef operator()(Graph& g, NodeRef x, bool train) {
    return g.matvec(g.leaf(w, train), x, g.leaf(b, train));
  }
  void collect(std::vector<Param*>& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
};

// Conventional LSTM cell over flat vectors. Gate order (i, f, g, o), fused
// input/hidden weights.
struct LstmCell {
  Param w_ih, w_hh, b;
  int units = 0;

  LstmCell() = default;
  LstmCell(const std::string& name, int in_n, int units_, Rng& rng);
  // Returns {h', c'}.
  std::pair<NodeRef, NodeRef> step(Graph& g, NodeRef x, NodeRef h, NodeRef c,
                                   bool train);
  void collect(std::vector<Param*>& out) {
    out.push_back(&w_ih);
    out.push_back(&w_hh);
    out.push_back(&b);
  }
};

// Convolutional LSTM cell: gate pre-activations are same-padding stride-1
// convolutions of the input and hidden maps; hidden state keeps the input's
// spatial size.
struct ConvLstmCell {
  Param w_x, w_h, b;
  int filters = 0;
  int kernel = 3;

  ConvLstmCell() = default;
  ConvLstmCell(const std::string& name, int in_ch, int filters_, int kernel_,
               Rng& rng);
  std::pair<NodeRef, NodeRef> step(Graph& g, NodeRef x, NodeRef h, NodeRef c,
                                   bool train);
  void collect(std::vector<Param*>& out) {
    out.push_back(&w_x);
    out.push_back(&w_h);
    out.push_back(&b);
  }
};

// Adam with optional global-norm gradient clipping. Moment tensors are keyed
// by parameter order, which must stay stable across save/load.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Param*> params, double lr, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8, double clip_norm = 5.0);

  void step();
  void zero_grad();
  double last_grad_norm() const { return last_grad_norm_; }
  long long step_count() const { return t_; }

  // Checkpoint plumbing.
  std::vector<Tensor>& moments_m() { return m_; }
  std::vector<Tensor>& moments_v() { return v_; }
  void set_step_count(long long t) { t_ = t; }
  const std::vector<Param*>& params() const { return params_; }

 private:
  std::vector<Param*> params_;
  std::vector<Tensor> m_, v_;
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  double clip_norm_ = 5.0;
  double last_grad_norm_ = 0.0;
  long long t_ = 0;
};

// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization.
void init_uniform_fan_in(Tensor& w, int fan_in, Rng& rng);

}  // namespace nowcast
