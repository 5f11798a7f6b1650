#include "nowcast/graph.hpp"

#include <cmath>

#include "nowcast/errors.hpp"

namespace nowcast {

namespace {

void check_same_shape(const NodeRef a, const NodeRef b, const char* op) {
  if (!a->val.same_shape(b->val))
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     Tensor::shape_str(a->val.shape()) + " vs " +
                     Tensor::shape_str(b->val.shape()));
}

}  // namespace

NodeRef Graph::make(Tensor val, bool needs_grad) {
  nodes_.emplace_back();
  Node& n = nodes_.back();
  n.val = std::move(val);
  n.needs_grad = needs_grad;
  return &n;
}

NodeRef Graph::leaf(Param& p, bool trainable) {
  NodeRef n = make(p.value, trainable);
  if (trainable) {
    Param* pp = &p;
    n->back = [pp](Node& self) {
      double* g = pp->grad.data();
      const double* s = self.grad.data();
      for (int i = 0; i < self.grad.size(); ++i) g[i] += s[i];
    };
  }
  return n;
}

NodeRef Graph::constant(Tensor t) { return make(std::move(t), false); }

NodeRef Graph::add(NodeRef a, NodeRef b) {
  check_same_shape(a, b, "add");
  Tensor out = a->val;
  const double* bv = b->val.data();
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] += bv[i];
  NodeRef n = make(std::move(out), a->needs_grad || b->needs_grad);
  if (n->needs_grad)
    n->back = [a, b](Node& self) {
      const double* g = self.grad.data();
      if (a->needs_grad) {
        double* ga = a->grad.data();
        for (int i = 0; i < self.grad.size(); ++i) ga[i] += g[i];
      }
      if (b->needs_grad) {
        double* gb = b->grad.data();
        for (int i = 0; i < self.grad.size(); ++i) gb[i] += g[i];
      }
    };
  return n;
}

NodeRef Graph::sub(NodeRef a, NodeRef b) {
  check_same_shape(a, b, "sub");
  Tensor out = a->val;
  const double* bv = b->val.data();
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] -= bv[i];
  NodeRef n = make(std::move(out), a->needs_grad || b->needs_grad);
  if (n->needs_grad)
    n->back = [a, b](Node& self) {
      const double* g = self.grad.data();
      if (a->needs_grad) {
        double* ga = a->grad.data();
        for (int i = 0; i < self.grad.size(); ++i) ga[i] += g[i];
      }
      if (b->needs_grad) {
        double* gb = b->grad.data();
        for (int i = 0; i < self.grad.size(); ++i) gb[i] -= g[i];
      }
    };
  return n;
}

NodeRef Graph::mul(NodeRef a, NodeRef b) {
  check_same_shape(a, b, "mul");
  Tensor out = a->val;
  const double* bv = b->val.data();
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] *= bv[i];
  NodeRef n = make(std::move(out), a->needs_grad || b->needs_grad);
  if (n->needs_grad)
    n->back = [a, b](Node& self) {
      const double* g = self.grad.data();
      if (a->needs_grad) {
        double* ga = a->grad.data();
        const double* bv2 = b->val.data();
        for (int i = 0; i < self.grad.size(); ++i) ga[i] += g[i] * bv2[i];
      }
      if (b->needs_grad) {
        double* gb = b->grad.data();
        const double* av = a->val.data();
        for (int i = 0; i < self.grad.size(); ++i) gb[i] += g[i] * av[i];
      }
    };
  return n;
}

NodeRef Graph::scale(NodeRef a, double c) {
  Tensor out = a->val;
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] *= c;
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a, c](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      for (int i = 0; i < self.grad.size(); ++i) ga[i] += c * g[i];
    };
  return n;
}

NodeRef Graph::add_scalar(NodeRef a, double c) {
  Tensor out = a->val;
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] += c;
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      for (int i = 0; i < self.grad.size(); ++i) ga[i] += g[i];
    };
  return n;
}

NodeRef Graph::sigmoid(NodeRef a) {
  Tensor out = a->val;
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] = 1.0 / (1.0 + std::exp(-ov[i]));
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      const double* y = self.val.data();
      for (int i = 0; i < self.grad.size(); ++i)
        ga[i] += g[i] * y[i] * (1.0 - y[i]);
    };
  return n;
}

NodeRef Graph::tanh_op(NodeRef a) {
  Tensor out = a->val;
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] = std::tanh(ov[i]);
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      const double* y = self.val.data();
      for (int i = 0; i < self.grad.size(); ++i)
        ga[i] += g[i] * (1.0 - y[i] * y[i]);
    };
  return n;
}

NodeRef Graph::leaky_relu(NodeRef a, double slope) {
  Tensor out = a->val;
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i)
    if (ov[i] < 0.0) ov[i] *= slope;
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a, slope](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      const double* x = a->val.data();
      for (int i = 0; i < self.grad.size(); ++i)
        ga[i] += g[i] * (x[i] < 0.0 ? slope : 1.0);
    };
  return n;
}

NodeRef Graph::exp_op(NodeRef a) {
  Tensor out = a->val;
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] = std::exp(ov[i]);
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      const double* y = self.val.data();
      for (int i = 0; i < self.grad.size(); ++i) ga[i] += g[i] * y[i];
    };
  return n;
}

NodeRef Graph::square(NodeRef a) {
  Tensor out = a->val;
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) ov[i] *= ov[i];
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      const double* x = a->val.data();
      for (int i = 0; i < self.grad.size(); ++i) ga[i] += 2.0 * g[i] * x[i];
    };
  return n;
}

NodeRef Graph::clamp(NodeRef a, double lo, double hi) {
  Tensor out = a->val;
  double* ov = out.data();
  for (int i = 0; i < out.size(); ++i) {
    if (ov[i] < lo) ov[i] = lo;
    if (ov[i] > hi) ov[i] = hi;
  }
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a, lo, hi](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      const double* x = a->val.data();
      for (int i = 0; i < self.grad.size(); ++i)
        if (x[i] > lo && x[i] < hi) ga[i] += g[i];
    };
  return n;
}

NodeRef Graph::sum(NodeRef a) {
  double s = 0.0;
  const double* av = a->val.data();
  for (int i = 0; i < a->val.size(); ++i) s += av[i];
  NodeRef n = make(Tensor({1}, {s}), a->needs_grad);
  if (n->needs_grad)
    n->back = [a](Node& self) {
      const double g = self.grad[0];
      double* ga = a->grad.data();
      for (int i = 0; i < a->grad.size(); ++i) ga[i] += g;
    };
  return n;
}

NodeRef Graph::reshape(NodeRef a, std::vector<int> shape) {
  if (Tensor::count(shape) != a->val.size())
    throw ShapeError("reshape: element count mismatch");
  Tensor out(shape, a->val.vec());
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      for (int i = 0; i < self.grad.size(); ++i) ga[i] += g[i];
    };
  return n;
}

NodeRef Graph::flatten(NodeRef a) { return reshape(a, {a->val.size()}); }

NodeRef Graph::vec_slice(NodeRef a, int i0, int i1) {
  if (a->val.rank() != 1 || i0 < 0 || i1 > a->val.size() || i0 >= i1)
    throw ShapeError("vec_slice: bad range");
  Tensor out({i1 - i0});
  for (int i = i0; i < i1; ++i) out[static_cast<size_t>(i - i0)] = a->val[static_cast<size_t>(i)];
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a, i0](Node& self) {
      double* ga = a->grad.data();
      const double* g = self.grad.data();
      for (int i = 0; i < self.grad.size(); ++i) ga[i0 + i] += g[i];
    };
  return n;
}

NodeRef Graph::channel_slice(NodeRef a, int c0, int c1) {
  if (a->val.rank() != 3 || c0 < 0 || c1 > a->val.dim(0) || c0 >= c1)
    throw ShapeError("channel_slice: bad range");
  const int h = a->val.dim(1), w = a->val.dim(2), hw = h * w;
  Tensor out({c1 - c0, h, w});
  std::copy(a->val.data() + static_cast<size_t>(c0) * hw,
            a->val.data() + static_cast<size_t>(c1) * hw, out.data());
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a, c0, hw](Node& self) {
      double* ga = a->grad.data() + static_cast<size_t>(c0) * hw;
      const double* g = self.grad.data();
      for (int i = 0; i < self.grad.size(); ++i) ga[i] += g[i];
    };
  return n;
}

NodeRef Graph::concat_channels(NodeRef a, NodeRef b) {
  if (a->val.rank() != 3 || b->val.rank() != 3 || a->val.dim(1) != b->val.dim(1) ||
      a->val.dim(2) != b->val.dim(2))
    throw ShapeError("concat_channels: incompatible shapes");
  const int h = a->val.dim(1), w = a->val.dim(2);
  Tensor out({a->val.dim(0) + b->val.dim(0), h, w});
  std::copy(a->val.data(), a->val.data() + a->val.size(), out.data());
  std::copy(b->val.data(), b->val.data() + b->val.size(),
            out.data() + a->val.size());
  NodeRef n = make(std::move(out), a->needs_grad || b->needs_grad);
  if (n->needs_grad) {
    const int na = a->val.size();
    n->back = [a, b, na](Node& self) {
      const double* g = self.grad.data();
      if (a->needs_grad) {
        double* ga = a->grad.data();
        for (int i = 0; i < na; ++i) ga[i] += g[i];
      }
      if (b->needs_grad) {
        double* gb = b->grad.data();
        for (int i = 0; i < b->grad.size(); ++i) gb[i] += g[na + i];
      }
    };
  }
  return n;
}

NodeRef Graph::broadcast_to_map(NodeRef v, int h, int w) {
  if (v->val.rank() != 1) throw ShapeError("broadcast_to_map: expects vector");
  const int d = v->val.dim(0);
  Tensor out({d, h, w});
  for (int c = 0; c < d; ++c) {
    const double x = v->val[static_cast<size_t>(c)];
    double* o = out.data() + static_cast<size_t>(c) * h * w;
    for (int i = 0; i < h * w; ++i) o[i] = x;
  }
  NodeRef n = make(std::move(out), v->needs_grad);
  if (n->needs_grad)
    n->back = [v, h, w](Node& self) {
      const int hw = h * w;
      double* gv = v->grad.data();
      const double* g = self.grad.data();
      for (int c = 0; c < v->grad.size(); ++c) {
        double s = 0.0;
        const double* gc = g + static_cast<size_t>(c) * hw;
        for (int i = 0; i < hw; ++i) s += gc[i];
        gv[c] += s;
      }
    };
  return n;
}

NodeRef Graph::pad_hw(NodeRef a, int out_h, int out_w) {
  if (a->val.rank() != 3) throw ShapeError("pad_hw: expects (c,h,w)");
  const int c = a->val.dim(0), h = a->val.dim(1), w = a->val.dim(2);
  if (out_h < h || out_w < w) throw ShapeError("pad_hw: target smaller than input");
  Tensor out({c, out_h, out_w});
  for (int ch = 0; ch < c; ++ch)
    for (int r = 0; r < h; ++r)
      std::copy(a->val.data() + (static_cast<size_t>(ch) * h + r) * w,
                a->val.data() + (static_cast<size_t>(ch) * h + r) * w + w,
                out.data() + (static_cast<size_t>(ch) * out_h + r) * out_w);
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a, c, h, w, out_h, out_w](Node& self) {
      for (int ch = 0; ch < c; ++ch)
        for (int r = 0; r < h; ++r) {
          double* ga = a->grad.data() + (static_cast<size_t>(ch) * h + r) * w;
          const double* g =
              self.grad.data() + (static_cast<size_t>(ch) * out_h + r) * out_w;
          for (int i = 0; i < w; ++i) ga[i] += g[i];
        }
    };
  return n;
}

NodeRef Graph::crop_hw(NodeRef a, int out_h, int out_w) {
  if (a->val.rank() != 3) throw ShapeError("crop_hw: expects (c,h,w)");
  const int c = a->val.dim(0), h = a->val.dim(1), w = a->val.dim(2);
  if (out_h > h || out_w > w) throw ShapeError("crop_hw: target larger than input");
  Tensor out({c, out_h, out_w});
  for (int ch = 0; ch < c; ++ch)
    for (int r = 0; r < out_h; ++r)
      std::copy(a->val.data() + (static_cast<size_t>(ch) * h + r) * w,
                a->val.data() + (static_cast<size_t>(ch) * h + r) * w + out_w,
                out.data() + (static_cast<size_t>(ch) * out_h + r) * out_w);
  NodeRef n = make(std::move(out), a->needs_grad);
  if (n->needs_grad)
    n->back = [a, c, h, w, out_h, out_w](Node& self) {
      for (int ch = 0; ch < c; ++ch)
        for (int r = 0; r < out_h; ++r) {
          double* ga = a->grad.data() + (static_cast<size_t>(ch) * h + r) * w;
          const double* g =
              self.grad.data() + (static_cast<size_t>(ch) * out_h + r) * out_w;
          for (int i = 0; i < out_w; ++i) ga[i] += g[i];
        }
    };
  return n;
}

NodeRef Graph::matvec(NodeRef w, NodeRef x, NodeRef b) {
  if (w->val.rank() != 2 || x->val.rank() != 1 || w->val.dim(1) != x->val.dim(0))
    throw ShapeError("matvec: incompatible shapes");
  const int out_n = w->val.dim(0), in_n = w->val.dim(1);
  if (b && (b->val.rank() != 1 || b->val.dim(0) != out_n))
    throw ShapeError("matvec: bad bias shape");
  Tensor out({out_n});
  const double* wv = w->val.data();
  const double* xv = x->val.data();
  for (int o = 0; o < out_n; ++o) {
    double acc = b ? b->val[static_cast<size_t>(o)] : 0.0;
    const double* row = wv + static_cast<size_t>(o) * in_n;
    for (int i = 0; i < in_n; ++i) acc += row[i] * xv[i];
    out[static_cast<size_t>(o)] = acc;
  }
  NodeRef n = make(std::move(out),
                   w->needs_grad || x->needs_grad || (b && b->needs_grad));
  if (n->needs_grad)
    n->back = [w, x, b, out_n, in_n](Node& self) {
      const double* g = self.grad.data();
      if (w->needs_grad) {
        double* gw = w->grad.data();
        const double* xv = x->val.data();
        for (int o = 0; o < out_n; ++o) {
          double* row = gw + static_cast<size_t>(o) * in_n;
          const double go = g[o];
          for (int i = 0; i < in_n; ++i) row[i] += go * xv[i];
        }
      }
      if (x->needs_grad) {
        double* gx = x->grad.data();
        const double* wv = w->val.data();
        for (int o = 0; o < out_n; ++o) {
          const double* row = wv + static_cast<size_t>(o) * in_n;
          const double go = g[o];
          for (int i = 0; i < in_n; ++i) gx[i] += go * row[i];
        }
      }
      if (b && b->needs_grad) {
        double* gb = b->grad.data();
        for (int o = 0; o < out_n; ++o) gb[o] += g[o];
      }
    };
  return n;
}

NodeRef Graph::conv2d(NodeRef x, NodeRef w, NodeRef b, int stride) {
  if (x->val.rank() != 3 || w->val.rank() != 4)
    throw ShapeError("conv2d: expects x(c,h,w), w(oc,ic,kh,kw)");
  const int ic = x->val.dim(0), ih = x->val.dim(1), iw = x->val.dim(2);
  const int oc = w->val.dim(0), kh = w->val.dim(2), kw = w->val.dim(3);
  if (w->val.dim(1) != ic) throw ShapeError("conv2d: channel mismatch");
  if (b && (b->val.rank() != 1 || b->val.dim(0) != oc))
    throw ShapeError("conv2d: bad bias shape");
  const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  const int oh = (ih + 2 * ph - kh) / stride + 1;
  const int ow = (iw + 2 * pw - kw) / stride + 1;

  Tensor out({oc, oh, ow});
  const double* xv = x->val.data();
  const double* wv = w->val.data();
  for (int o = 0; o < oc; ++o) {
    const double bias = b ? b->val[static_cast<size_t>(o)] : 0.0;
    double* oplane = out.data() + static_cast<size_t>(o) * oh * ow;
    for (int r = 0; r < oh; ++r) {
      for (int c = 0; c < ow; ++c) {
        double acc = bias;
        const int r0 = r * stride - ph, c0 = c * stride - pw;
        for (int i = 0; i < ic; ++i) {
          const double* xplane = xv + static_cast<size_t>(i) * ih * iw;
          const double* wk =
              wv + ((static_cast<size_t>(o) * ic + i) * kh) * kw;
          for (int u = 0; u < kh; ++u) {
            const int rr = r0 + u;
            if (rr < 0 || rr >= ih) continue;
            const double* xrow = xplane + static_cast<size_t>(rr) * iw;
            const double* wrow = wk + static_cast<size_t>(u) * kw;
            for (int v = 0; v < kw; ++v) {
              const int cc = c0 + v;
              if (cc < 0 || cc >= iw) continue;
              acc += xrow[cc] * wrow[v];
            }
          }
        }
        oplane[static_cast<size_t>(r) * ow + c] = acc;
      }
    }
  }

  NodeRef n = make(std::move(out),
                   x->needs_grad || w->needs_grad || (b && b->needs_grad));
  if (n->needs_grad)
    n->back = [x, w, b, stride, ic, ih, iw, oc, kh, kw, ph, pw, oh,
               ow](Node& self) {
      const double* g = self.grad.data();
      const double* xv = x->val.data();
      const double* wv = w->val.data();
      double* gx = x->needs_grad ? x->grad.data() : nullptr;
      double* gw = w->needs_grad ? w->grad.data() : nullptr;
      double* gb = (b && b->needs_grad) ? b->grad.data() : nullptr;
      for (int o = 0; o < oc; ++o) {
        const double* gplane = g + static_cast<size_t>(o) * oh * ow;
        for (int r = 0; r < oh; ++r) {
          for (int c = 0; c < ow; ++c) {
            const double go = gplane[static_cast<size_t>(r) * ow + c];
            if (go == 0.0) continue;
            if (gb) gb[o] += go;
            const int r0 = r * stride - ph, c0 = c * stride - pw;
            for (int i = 0; i < ic; ++i) {
              const double* xplane = xv + static_cast<size_t>(i) * ih * iw;
              double* gxplane =
                  gx ? gx + static_cast<size_t>(i) * ih * iw : nullptr;
              const size_t wbase = ((static_cast<size_t>(o) * ic + i) * kh) * kw;
              for (int u = 0; u < kh; ++u) {
                const int rr = r0 + u;
                if (rr < 0 || rr >= ih) continue;
                for (int v = 0; v < kw; ++v) {
                  const int cc = c0 + v;
                  if (cc < 0 || cc >= iw) continue;
                  const size_t xi = static_cast<size_t>(rr) * iw + cc;
                  const size_t wi = wbase + static_cast<size_t>(u) * kw + v;
                  if (gw) gw[wi] += go * xplane[xi];
                  if (gxplane) gxplane[xi] += go * wv[wi];
                }
              }
            }
          }
        }
      }
    };
  return n;
}

NodeRef Graph::conv2d_transpose(NodeRef x, NodeRef w, NodeRef b, int stride) {
  if (x->val.rank() != 3 || w->val.rank() != 4)
    throw ShapeError("conv2d_transpose: expects x(c,h,w), w(ic,oc,kh,kw)");
  const int ic = x->val.dim(0), ih = x->val.dim(1), iw = x->val.dim(2);
  const int oc = w->val.dim(1), kh = w->val.dim(2), kw = w->val.dim(3);
  if (w->val.dim(0) != ic) throw ShapeError("conv2d_transpose: channel mismatch");
  if (b && (b->val.rank() != 1 || b->val.dim(0) != oc))
    throw ShapeError("conv2d_transpose: bad bias shape");
  const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  const int oh = stride * ih, ow = stride * iw;

  Tensor out({oc, oh, ow});
  if (b)
    for (int o = 0; o < oc; ++o) {
      double* oplane = out.data() + static_cast<size_t>(o) * oh * ow;
      const double bias = b->val[static_cast<size_t>(o)];
      for (int i = 0; i < oh * ow; ++i) oplane[i] = bias;
    }
  const double* xv = x->val.data();
  const double* wv = w->val.data();
  for (int i = 0; i < ic; ++i) {
    const double* xplane = xv + static_cast<size_t>(i) * ih * iw;
    for (int r = 0; r < ih; ++r) {
      for (int c = 0; c < iw; ++c) {
        const double xval = xplane[static_cast<size_t>(r) * iw + c];
        if (xval == 0.0) continue;
        for (int o = 0; o < oc; ++o) {
          double* oplane = out.data() + static_cast<size_t>(o) * oh * ow;
          const double* wk =
              wv + ((static_cast<size_t>(i) * oc + o) * kh) * kw;
          for (int u = 0; u < kh; ++u) {
            const int rr = r * stride + u - ph;
            if (rr < 0 || rr >= oh) continue;
            double* orow = oplane + static_cast<size_t>(rr) * ow;
            const double* wrow = wk + static_cast<size_t>(u) * kw;
            for (int v = 0; v < kw; ++v) {
              const int cc = c * stride + v - pw;
              if (cc < 0 || cc >= ow) continue;
              orow[cc] += xval * wrow[v];
            }
          }
        }
      }
    }
  }

  NodeRef n = make(std::move(out),
                   x->needs_grad || w->needs_grad || (b && b->needs_grad));
  if (n->needs_grad)
    n->back = [x, w, b, stride, ic, ih, iw, oc, kh, kw, ph, pw, oh,
               ow](Node& self) {
      const double* g = self.grad.data();
      const double* xv = x->val.data();
      const double* wv = w->val.data();
      double* gx = x->needs_grad ? x->grad.data() : nullptr;
      double* gw = w->needs_grad ? w->grad.data() : nullptr;
      if (b && b->needs_grad) {
        double* gb = b->grad.data();
        for (int o = 0; o < oc; ++o) {
          const double* gplane = g + static_cast<size_t>(o) * oh * ow;
          double s = 0.0;
          for (int i = 0; i < oh * ow; ++i) s += gplane[i];
          gb[o] += s;
        }
      }
      for (int i = 0; i < ic; ++i) {
        const double* xplane = xv + static_cast<size_t>(i) * ih * iw;
        double* gxplane = gx ? gx + static_cast<size_t>(i) * ih * iw : nullptr;
        for (int r = 0; r < ih; ++r) {
          for (int c = 0; c < iw; ++c) {
            const size_t xi = static_cast<size_t>(r) * iw + c;
            const double xval = xplane[xi];
            double gxacc = 0.0;
            for (int o = 0; o < oc; ++o) {
              const double* gplane = g + static_cast<size_t>(o) * oh * ow;
              const size_t wbase = ((static_cast<size_t>(i) * oc + o) * kh) * kw;
              for (int u = 0; u < kh; ++u) {
                const int rr = r * stride + u - ph;
                if (rr < 0 || rr >= oh) continue;
                const double* grow = gplane + static_cast<size_t>(rr) * ow;
                for (int v = 0; v < kw; ++v) {
                  const int cc = c * stride + v - pw;
                  if (cc < 0 || cc >= ow) continue;
                  const double go = grow[cc];
                  const size_t wi = wbase + static_cast<size_t>(u) * kw + v;
                  if (gw) gw[wi] += go * xval;
                  gxacc += go * wv[wi];
                }
              }
            }
            if (gxplane) gxplane[xi] += gxacc;
          }
        }
      }
    };
  return n;
}

void Graph::backward(NodeRef loss) {
  if (loss->val.size() != 1)
    throw ShapeError("backward: loss must be scalar");
  if (!loss->needs_grad)
    throw ConfigError("backward: loss does not require gradients");
  for (auto& n : nodes_)
    if (n.needs_grad) {
      n.grad = Tensor(n.val.shape());
    }
  loss->grad[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
    if (it->needs_grad && it->back) it->back(*it);
}

void Graph::clear() { nodes_.clear(); }

}  // namespace nowcast
