#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "nowcast/tensor.hpp"

namespace nowcast {

// A named trainable tensor with its persistent gradient accumulator.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  Param() = default;
  Param(std::string n, std::vector<int> shape)
      : name(std::move(n)), value(Tensor(shape)), grad(Tensor(shape)) {}
};

// One value in a dynamically built computation graph. Nodes live in a Graph
// arena; creation order is a valid topological order.
struct Node {
  Tensor val;
  Tensor grad;  // allocated before the backward sweep
  bool needs_grad = false;
  std::function<void(Node&)> back;  // accumulates into parents / params
};

using NodeRef = Node*;

// Define-by-run reverse-mode tape over double tensors. Built per sample,
// cleared afterwards. Not thread-safe; use one Graph per thread.
class Graph {
 public:
  // Leaf referencing a parameter; backward adds into param.grad.
  NodeRef leaf(Param& p, bool trainable = true);
  // Constant input; never receives gradient.
  NodeRef constant(Tensor t);

  // Elementwise (shapes must match).
  NodeRef add(NodeRef a, NodeRef b);
  NodeRef sub(NodeRef a, NodeRef b);
  NodeRef mul(NodeRef a, NodeRef b);
  NodeRef scale(NodeRef a, double c);
  NodeRef add_scalar(NodeRef a, double c);
  NodeRef sigmoid(NodeRef a);
  NodeRef tanh_op(NodeRef a);
  NodeRef leaky_relu(NodeRef a, double slope);
  NodeRef exp_op(NodeRef a);
  NodeRef square(NodeRef a);
  NodeRef clamp(NodeRef a, double lo, double hi);

  // Reductions / shaping.
  NodeRef sum(NodeRef a);                    // -> shape {1}
  NodeRef reshape(NodeRef a, std::vector<int> shape);
  NodeRef flatten(NodeRef a);
  NodeRef vec_slice(NodeRef a, int i0, int i1);
  NodeRef channel_slice(NodeRef a, int c0, int c1);
  NodeRef concat_channels(NodeRef a, NodeRef b);
  NodeRef broadcast_to_map(NodeRef v, int h, int w);  // [d] -> [d,h,w]
  NodeRef pad_hw(NodeRef a, int out_h, int out_w);    // zero-pad bottom/right
  NodeRef crop_hw(NodeRef a, int out_h, int out_w);

  // Linear algebra / convolution.
  NodeRef matvec(NodeRef w, NodeRef x, NodeRef b);  // w:[out,in], b may be null
  // Same-padding convolution, pad=(k-1)/2; output spatial = ceil(in/stride).
  NodeRef conv2d(NodeRef x, NodeRef w, NodeRef b, int stride);
  // Stride-2-style transposed convolution, pad=(k-1)/2; output = stride*in.
  NodeRef conv2d_transpose(NodeRef x, NodeRef w, NodeRef b, int stride);

  void backward(NodeRef loss);
  void clear();
  size_t node_count() const { return nodes_.size(); }

 private:
  NodeRef make(Tensor val, bool needs_grad);
  std::deque<Node> nodes_;
};

}  // namespace nowcast
