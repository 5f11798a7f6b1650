#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nowcast/data.hpp"
#include "nowcast/graph.hpp"
#include "nowcast/nn.hpp"
#include "nowcast/rng.hpp"
#include "nowcast/tensor.hpp"

namespace nowcast {

// Diagonal Gaussian over the latent space, parameterized by mean and
// log-variance (clamped to +-logvar_clamp by the producing head).
struct GaussianParams {
  Tensor mean;
  Tensor log_variance;
};

// Hidden/cell bundles for the predictor ConvLSTM stack and the prior and
// inference LSTMs. Reset to zeros at the start of every sample.
struct RecurrentState {
  std::vector<Tensor> predictor_h, predictor_c;
  Tensor prior_h, prior_c;
  Tensor inference_h, inference_c;
};

struct ModelConfig {
  int frame_height = 160;
  int frame_width = 110;
  std::vector<int> encoder_filters = {16, 32, 64, 128};
  std::vector<int> encoder_kernels = {5, 5, 3, 3};
  int predictor_layers = 2;
  int predictor_filters = 128;
  int predictor_kernel = 3;
  int head_conv_filters = 128;
  int head_conv_kernel = 3;
  int lstm_units = 64;
  int latent_dim = 70;
  double beta = 1e-7;
  int n_input = 5;
  int n_predict = 10;
  double leaky_slope = 0.2;
  double logvar_clamp = 14.0;
  bool share_encoder = true;

  int padded_height() const { return (frame_height + 15) / 16 * 16; }
  int padded_width() const { return (frame_width + 15) / 16 * 16; }
  int feature_height() const { return padded_height() / 16; }
  int feature_width() const { return padded_width() / 16; }
  void validate() const;
};

struct BaselineConfig {
  int frame_height = 160;
  int frame_width = 110;
  int layers = 2;
  int filters = 64;
  int kernel = 3;
  int n_input = 5;
  int n_predict = 10;
  void validate() const;
};

struct LossNodes {
  NodeRef reconstruction = nullptr;
  NodeRef kl = nullptr;  // null for deterministic models
  NodeRef total = nullptr;
};

// Common surface shared by the stochastic model and the ConvLSTM baseline:
// enough for the trainer, forecaster and checkpoint code to treat them
// uniformly. Frames are (height, width) tensors in normalized [0,1] space.
class FramePredictor {
 public:
  virtual ~FramePredictor() = default;
  virtual std::string kind() const = 0;
  virtual bool stochastic() const = 0;
  virtual int frame_height() const = 0;
  virtual int frame_width() const = 0;
  virtual int n_input() const = 0;
  virtual std::vector<Param*> params() = 0;
  // Builds the single-step teacher-forced training loss for one sample. All
  // latent noise derives from noise_seed, so the loss is a deterministic
  // function of the parameters for a fixed seed.
  virtual LossNodes build_loss(Graph& g, const Sample& sample, double beta,
                               uint64_t noise_seed) = 0;
  // Autoregressive frame-feedback forecast after warming up on the inputs.
  virtual std::vector<Tensor> rollout(const std::vector<Tensor>& inputs,
                                      int n_predict, uint64_t seed,
                                      bool deterministic = false) = 0;
};

enum class HeadKind { Prior, Inference };

// Stochastic variational frame predictor: strided conv encoder, mirrored
// transposed-conv decoder, a 2-layer ConvLSTM latent predictor conditioned
// on z, and recurrent Gaussian heads for the learned prior and the
// inference (posterior) distribution.
class SvfpModel : public FramePredictor {
 public:
  SvfpModel(const ModelConfig& cfg, uint64_t init_seed);

  const ModelConfig& config() const { return cfg_; }
  std::string kind() const override { return "svfp"; }
  bool stochastic() const override { return true; }
  int frame_height() const override { return cfg_.frame_height; }
  int frame_width() const override { return cfg_.frame_width; }
  int n_input() const override { return cfg_.n_input; }
  std::vector<Param*> params() override;

  // Value-level ops (frozen-model inference; no gradient tracking).
  Tensor encode(const Tensor& frame);  // frame dims must be divisible by 16
  Tensor decode(const Tensor& features);
  GaussianParams head_step(HeadKind which, const Tensor& frame,
                           RecurrentState& state);
  Tensor predict_step(const Tensor& features, const Tensor& z,
                      RecurrentState& state);
  Tensor predict_next_frame(const Tensor& prev_frame, const Tensor& z,
                            RecurrentState& state);

  RecurrentState make_state() const;

  LossNodes build_loss(Graph& g, const Sample& sample, double beta,
                       uint64_t noise_seed) override;
  std::vector<Tensor> rollout(const std::vector<Tensor>& inputs, int n_predict,
                              uint64_t seed, bool deterministic) override;

  // Graph-level building blocks (shared by training and the value-level API).
  NodeRef encode_g(Graph& g, NodeRef frame_chw, bool train,
                   HeadKind* head_owner = nullptr);
  NodeRef decode_g(Graph& g, NodeRef features, bool train);
  // Advances the named head's LSTM nodes; returns mean/log-variance nodes.
  std::pair<NodeRef, NodeRef> head_step_g(Graph& g, HeadKind which,
                                          NodeRef frame_chw, NodeRef& h,
                                          NodeRef& c, bool train);
  NodeRef predictor_step_g(Graph& g, NodeRef features, NodeRef z,
                           std::vector<NodeRef>& h, std::vector<NodeRef>& c,
                           bool train);

 private:
  NodeRef pad_frame_g(Graph& g, NodeRef frame_chw) const;

  ModelConfig cfg_;
  std::vector<Conv2d> encoder_;
  std::vector<ConvTranspose2d> decoder_;
  std::vector<ConvLstmCell> predictor_;
  // Per-head stacks; index 0 = prior, 1 = inference.
  std::vector<Conv2d> head_conv_;
  std::vector<LstmCell> head_lstm_;
  std::vector<Dense> head_mean_, head_logvar_;
  // Private encoders when share_encoder is off.
  std::vector<std::vector<Conv2d>> head_encoder_;
};

// z = mean + exp(log_variance / 2) * noise (reparameterization).
Tensor sample_latent(const GaussianParams& params, const Tensor& noise);

// Deterministic two-layer ConvLSTM comparison model operating at full frame
// resolution with a 1x1 convolution output head.
class ConvLstmBaseline : public FramePredictor {
 public:
  ConvLstmBaseline(const BaselineConfig& cfg, uint64_t init_seed);

  const BaselineConfig& config() const { return cfg_; }
  std::string kind() const override { return "convlstm"; }
  bool stochastic() const override { return false; }
  int frame_height() const override { return cfg_.frame_height; }
  int frame_width() const override { return cfg_.frame_width; }
  int n_input() const override { return cfg_.n_input; }
  std::vector<Param*> params() override;

  struct State {
    std::vector<Tensor> h, c;
  };
  State make_state() const;
  Tensor predict_next(const Tensor& frame, State& state);

  LossNodes build_loss(Graph& g, const Sample& sample, double beta,
                       uint64_t noise_seed) override;
  std::vector<Tensor> rollout(const std::vector<Tensor>& inputs, int n_predict,
                              uint64_t seed, bool deterministic) override;

  NodeRef step_g(Graph& g, NodeRef frame_chw, std::vector<NodeRef>& h,
                 std::vector<NodeRef>& c, bool train);

 private:
  BaselineConfig cfg_;
  std::vector<ConvLstmCell> layers_;
  Conv2d out_head_;
};

}  // namespace nowcast
