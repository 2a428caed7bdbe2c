// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wnr::nn {
namespace {

template <typename T>
void require(bool ok, const std::string& what, const Tensor<T>& t) {
  if (!ok) throw ShapeError(what + " (got " + t.shape_string() + ")");
}

template <typename T>
T dot(const T* a, const T* b, int n) {
  T acc = T(0);
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

ConvGeometry conv_geometry(int in_extent, int taps, int stride) {
  ConvGeometry g;
  g.in = in_extent;
  g.out = (in_extent + stride - 1) / stride;
  g.pad_total = std::max(0, (g.out - 1) * stride + taps - in_extent);
  g.pad_left = g.pad_total / 2;
  return g;
}

template <typename T>
Tensor<T> conv_forward(const Tensor<T>& x, const Conv<T>& p, MacCounter* macs) {
  require(x.rank() == 3 && x.dim(2) == p.in_channels(),
          "conv: input must be {N, F, " + std::to_string(p.in_channels()) + "}", x);
  const int n = x.dim(0), fin = x.dim(1);
  const int cin = p.in_channels(), cout = p.out_channels(), k = p.taps(), s = p.stride;
  const ConvGeometry g = conv_geometry(fin, k, s);
  Tensor<T> y({n, g.out, cout});
  std::vector<T> padded(static_cast<std::size_t>(fin + g.pad_total) * cin, T(0));
  const T* kw = p.kernel.data();
  const T* bias = p.bias.data();
  std::uint64_t executed = 0;
  for (int i = 0; i < n; ++i) {
    std::copy_n(x.data() + static_cast<std::size_t>(i) * fin * cin,
                static_cast<std::size_t>(fin) * cin,
                padded.begin() + static_cast<std::ptrdiff_t>(g.pad_left) * cin);
    for (int o = 0; o < g.out; ++o) {
      T* yr = y.data() + (static_cast<std::size_t>(i) * g.out + o) * cout;
      std::copy_n(bias, cout, yr);
      for (int tap = 0; tap < k; ++tap) {
        const T* xin = padded.data() + static_cast<std::size_t>(o * s + tap) * cin;
        const T* w = kw + static_cast<std::size_t>(tap) * cin * cout;
        for (int ci = 0; ci < cin; ++ci) {
          const T xv = xin[ci];
          const T* wr = w + static_cast<std::size_t>(ci) * cout;
          for (int co = 0; co < cout; ++co) yr[co] += xv * wr[co];
          executed += static_cast<std::uint64_t>(cout);
        }
      }
    }
  }
  if (macs) macs->macs += executed;
  return y;
}

template <typename T>
void conv_backward(const Tensor<T>& x, const Conv<T>& p, const Tensor<T>& grad_y,
                   Tensor<T>* grad_x, Conv<T>& grad_p) {
  const int n = x.dim(0), fin = x.dim(1);
  const int cin = p.in_channels(), cout = p.out_channels(), k = p.taps(), s = p.stride;
  const ConvGeometry g = conv_geometry(fin, k, s);
  require(grad_y.rank() == 3 && grad_y.dim(0) == n && grad_y.dim(1) == g.out &&
              grad_y.dim(2) == cout,
          "conv backward: grad_y shape mismatch", grad_y);
  if (grad_x) grad_x->resize(x.dims());
  const std::size_t padded_len = static_cast<std::size_t>(fin + g.pad_total) * cin;
  std::vector<T> padded(padded_len, T(0));
  std::vector<T> gpad(padded_len, T(0));
  const T* kw = p.kernel.data();
  T* gk = grad_p.kernel.data();
  T* gb = grad_p.bias.data();
  for (int i = 0; i < n; ++i) {
    std::copy_n(x.data() + static_cast<std::size_t>(i) * fin * cin,
                static_cast<std::size_t>(fin) * cin,
                padded.begin() + static_cast<std::ptrdiff_t>(g.pad_left) * cin);
    std::fill(gpad.begin(), gpad.end(), T(0));
    for (int o = 0; o < g.out; ++o) {
      const T* gy = grad_y.data() + (static_cast<std::size_t>(i) * g.out + o) * cout;
      for (int co = 0; co < cout; ++co) gb[co] += gy[co];
      for (int tap = 0; tap < k; ++tap) {
        const std::size_t off = static_cast<std::size_t>(o * s + tap) * cin;
        const T* xin = padded.data() + off;
        T* gin = gpad.data() + off;
        const T* w = kw + static_cast<std::size_t>(tap) * cin * cout;
        T* gw = gk + static_cast<std::size_t>(tap) * cin * cout;
        for (int ci = 0; ci < cin; ++ci) {
          const T xv = xin[ci];
          const T* wr = w + static_cast<std::size_t>(ci) * cout;
          T* gwr = gw + static_cast<std::size_t>(ci) * cout;
          T acc = T(0);
          for (int co = 0; co < cout; ++co) {
            acc += wr[co] * gy[co];
            gwr[co] += xv * gy[co];
          }
          gin[ci] += acc;
        }
      }
    }
    if (grad_x) {
      std::copy_n(gpad.begin() + static_cast<std::ptrdiff_t>(g.pad_left) * cin,
                  static_cast<std::size_t>(fin) * cin,
                  grad_x->data() + static_cast<std::size_t>(i) * fin * cin);
    }
  }
}

template <typename T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, const BatchNorm<T>& p, bool training,
                            BatchNormCache<T>* cache) {
  const int c = static_cast<int>(p.gamma.size());
  require(x.rank() >= 1 && x.dims().back() == c,
          "batchnorm: last axis must have " + std::to_string(c) + " channels", x);
  const std::size_t m = x.size() / static_cast<std::size_t>(c);
  Tensor<T> y(x.dims());
  const T* xv = x.data();
  T* yv = y.data();
  if (!training) {
    std::vector<T> scale(c), shift(c);
    for (int ch = 0; ch < c; ++ch) {
      const T inv = T(1) / std::sqrt(p.running_var[ch] + T(kBatchNormEps));
      scale[ch] = p.gamma[ch] * inv;
      shift[ch] = p.beta[ch] - p.running_mean[ch] * scale[ch];
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (int ch = 0; ch < c; ++ch) {
        yv[i * c + ch] = xv[i * c + ch] * scale[ch] + shift[ch];
      }
    }
    return y;
  }
  std::vector<double> mean(c, 0.0), var(c, 0.0), inv_std(c);
  for (std::size_t i = 0; i < m; ++i) {
    for (int ch = 0; ch < c; ++ch) mean[ch] += xv[i * c + ch];
  }
  for (int ch = 0; ch < c; ++ch) mean[ch] /= static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      const double d = xv[i * c + ch] - mean[ch];
      var[ch] += d * d;
    }
  }
  for (int ch = 0; ch < c; ++ch) {
    var[ch] /= static_cast<double>(m);
    inv_std[ch] = 1.0 / std::sqrt(var[ch] + kBatchNormEps);
  }
  Tensor<T> normalized(x.dims());
  T* nv = normalized.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      const T xh = static_cast<T>((xv[i * c + ch] - mean[ch]) * inv_std[ch]);
      nv[i * c + ch] = xh;
      yv[i * c + ch] = p.gamma[ch] * xh + p.beta[ch];
    }
  }
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->mean = std::move(mean);
    cache->var = std::move(var);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

template <typename T>
void batchnorm_backward(const BatchNormCache<T>& cache, const BatchNorm<T>& p,
                        const Tensor<T>& grad_y, Tensor<T>* grad_x, BatchNorm<T>& grad_p) {
  const int c = static_cast<int>(p.gamma.size());
  require(grad_y.same_shape(cache.normalized), "batchnorm backward: grad_y shape mismatch",
          grad_y);
  const std::size_t m = grad_y.size() / static_cast<std::size_t>(c);
  const T* gy = grad_y.data();
  const T* xh = cache.normalized.data();
  std::vector<double> sum_g(c, 0.0), sum_gh(c, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      const double g = gy[i * c + ch];
      sum_g[ch] += g;
      sum_gh[ch] += g * xh[i * c + ch];
    }
  }
  std::vector<double> sum_dxh(c), sum_dxh_xh(c);
  for (int ch = 0; ch < c; ++ch) {
    grad_p.beta[ch] += static_cast<T>(sum_g[ch]);
    grad_p.gamma[ch] += static_cast<T>(sum_gh[ch]);
    sum_dxh[ch] = sum_g[ch] * p.gamma[ch];
    sum_dxh_xh[ch] = sum_gh[ch] * p.gamma[ch];
  }
  if (!grad_x) return;
  grad_x->resize(grad_y.dims());
  T* gx = grad_x->data();
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      const double dxh = static_cast<double>(gy[i * c + ch]) * p.gamma[ch];
      gx[i * c + ch] = static_cast<T>(
          cache.inv_std[ch] *
          (dxh - sum_dxh[ch] * inv_m - xh[i * c + ch] * sum_dxh_xh[ch] * inv_m));
    }
  }
}

template <typename T>
void batchnorm_update_running(BatchNorm<T>& p, const BatchNormCache<T>& cache) {
  for (std::size_t ch = 0; ch < p.gamma.size(); ++ch) {
    p.running_mean[ch] = static_cast<T>(kBatchNormMomentum * p.running_mean[ch] +
                                        (1.0 - kBatchNormMomentum) * cache.mean[ch]);
    p.running_var[ch] = static_cast<T>(kBatchNormMomentum * p.running_var[ch] +
                                       (1.0 - kBatchNormMomentum) * cache.var[ch]);
  }
}

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> y(x.dims());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
  return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& y, const Tensor<T>& grad_y) {
  require(y.same_shape(grad_y), "relu backward: shape mismatch", grad_y);
  Tensor<T> gx(y.dims());
  for (std::size_t i = 0; i < y.size(); ++i) gx[i] = y[i] > T(0) ? grad_y[i] : T(0);
  return gx;
}

template <typename T>
T sigmoid(T v) {
  T s;
  if (v >= T(0)) {
    s = T(1) / (T(1) + std::exp(-v));
  } else {
    const T e = std::exp(v);
    s = e / (T(1) + e);
  }
  // Keep the open interval even where exp under/overflows.
  constexpr T lo = std::numeric_limits<T>::min();
  const T hi = std::nextafter(T(1), T(0));
  return std::clamp(s, lo, hi);
}

template <typename T>
Tensor<T> sigmoid_forward(const Tensor<T>& x) {
  Tensor<T> y(x.dims());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  return y;
}

template <typename T>
Tensor<T> sigmoid_backward(const Tensor<T>& y, const Tensor<T>& grad_y) {
  require(y.same_shape(grad_y), "sigmoid backward: shape mismatch", grad_y);
  Tensor<T> gx(y.dims());
  for (std::size_t i = 0; i < y.size(); ++i) gx[i] = grad_y[i] * y[i] * (T(1) - y[i]);
  return gx;
}

template <typename T>
Tensor<T> avgpool_forward(const Tensor<T>& x) {
  require(x.rank() == 3, "avgpool: input must be {N, F, C}", x);
  const int n = x.dim(0), fin = x.dim(1), c = x.dim(2), fout = fin / 2;
  Tensor<T> y({n, fout, c});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < fout; ++j) {
      const T* a = x.data() + (static_cast<std::size_t>(i) * fin + 2 * j) * c;
      const T* b = a + c;
      T* out = y.data() + (static_cast<std::size_t>(i) * fout + j) * c;
      for (int ch = 0; ch < c; ++ch) out[ch] = T(0.5) * (a[ch] + b[ch]);
    }
  }
  return y;
}

template <typename T>
Tensor<T> avgpool_backward(const std::vector<int>& x_dims, const Tensor<T>& grad_y) {
  const int n = x_dims[0], fin = x_dims[1], c = x_dims[2], fout = fin / 2;
  require(grad_y.rank() == 3 && grad_y.dim(0) == n && grad_y.dim(1) == fout &&
              grad_y.dim(2) == c,
          "avgpool backward: grad_y shape mismatch", grad_y);
  Tensor<T> gx(x_dims);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < fout; ++j) {
      const T* g = grad_y.data() + (static_cast<std::size_t>(i) * fout + j) * c;
      T* a = gx.data() + (static_cast<std::size_t>(i) * fin + 2 * j) * c;
      T* b = a + c;
      for (int ch = 0; ch < c; ++ch) {
        a[ch] = T(0.5) * g[ch];
        b[ch] = T(0.5) * g[ch];
      }
    }
  }
  return gx;
}

template <typename T>
Tensor<T> dense_forward(const Tensor<T>& x, const Dense<T>& p, MacCounter* macs) {
  const int out = p.kernel.dim(0), in = p.kernel.dim(1);
  require(x.rank() == 2 && x.dim(1) == in,
          "dense: input must be {N, " + std::to_string(in) + "}", x);
  const int n = x.dim(0);
  Tensor<T> y({n, out});
  std::uint64_t executed = 0;
  for (int i = 0; i < n; ++i) {
    const T* xr = x.data() + static_cast<std::size_t>(i) * in;
    T* yr = y.data() + static_cast<std::size_t>(i) * out;
    for (int o = 0; o < out; ++o) {
      yr[o] = p.bias[o] + dot(p.kernel.data() + static_cast<std::size_t>(o) * in, xr, in);
      executed += static_cast<std::uint64_t>(in);
    }
  }
  if (macs) macs->macs += executed;
  return y;
}

template <typename T>
void dense_backward(const Tensor<T>& x, const Dense<T>& p, const Tensor<T>& grad_y,
                    Tensor<T>* grad_x, Dense<T>& grad_p) {
  const int out = p.kernel.dim(0), in = p.kernel.dim(1), n = x.dim(0);
  require(grad_y.rank() == 2 && grad_y.dim(0) == n && grad_y.dim(1) == out,
          "dense backward: grad_y shape mismatch", grad_y);
  if (grad_x) grad_x->resize(x.dims());
  for (int i = 0; i < n; ++i) {
    const T* xr = x.data() + static_cast<std::size_t>(i) * in;
    const T* gy = grad_y.data() + static_cast<std::size_t>(i) * out;
    T* gx = grad_x ? grad_x->data() + static_cast<std::size_t>(i) * in : nullptr;
    for (int o = 0; o < out; ++o) {
      const T g = gy[o];
      grad_p.bias[o] += g;
      const T* w = p.kernel.data() + static_cast<std::size_t>(o) * in;
      T* gw = grad_p.kernel.data() + static_cast<std::size_t>(o) * in;
      for (int k = 0; k < in; ++k) gw[k] += g * xr[k];
      if (gx) {
        for (int k = 0; k < in; ++k) gx[k] += w[k] * g;
      }
    }
  }
}

template <typename T>
void gru_step(const T* x, const T* h_prev, const Gru<T>& p, T* h_out, T* z_out, T* r_out,
              T* c_out, MacCounter* macs) {
  const int in = p.input_dim(), hid = p.hidden_dim();
  std::vector<T> z(hid), r(hid), rh(hid);
  for (int o = 0; o < hid; ++o) {
    const std::size_t wi = static_cast<std::size_t>(o) * in;
    const std::size_t ui = static_cast<std::size_t>(o) * hid;
    z[o] = sigmoid(p.b_z[o] + dot(p.W_z.data() + wi, x, in) + dot(p.U_z.data() + ui, h_prev, hid));
    r[o] = sigmoid(p.b_r[o] + dot(p.W_r.data() + wi, x, in) + dot(p.U_r.data() + ui, h_prev, hid));
  }
  for (int j = 0; j < hid; ++j) rh[j] = r[j] * h_prev[j];
  for (int o = 0; o < hid; ++o) {
    const T c = std::tanh(p.b_h[o] +
                          dot(p.W_h.data() + static_cast<std::size_t>(o) * in, x, in) +
                          dot(p.U_h.data() + static_cast<std::size_t>(o) * hid, rh.data(), hid));
    h_out[o] = (T(1) - z[o]) * h_prev[o] + z[o] * c;
    if (c_out) c_out[o] = c;
  }
  if (z_out) std::copy(z.begin(), z.end(), z_out);
  if (r_out) std::copy(r.begin(), r.end(), r_out);
  if (macs) macs->macs += 3ull * (static_cast<std::uint64_t>(in) * hid +
                                  static_cast<std::uint64_t>(hid) * hid);
}

template <typename T>
Tensor<T> gru_forward(const Tensor<T>& x, const Gru<T>& p, const Tensor<T>* h0,
                      GruCache<T>* cache, MacCounter* macs) {
  const int in = p.input_dim(), hid = p.hidden_dim();
  require(x.rank() == 3 && x.dim(2) == in,
          "gru: input must be {B, T, " + std::to_string(in) + "}", x);
  const int batch = x.dim(0), steps = x.dim(1);
  if (h0) {
    require(h0->size() == static_cast<std::size_t>(batch) * hid,
            "gru: initial state must be {B, " + std::to_string(hid) + "}", *h0);
  }
  Tensor<T> h({batch, steps, hid});
  if (cache) {
    cache->z.resize({batch, steps, hid});
    cache->r.resize({batch, steps, hid});
    cache->c.resize({batch, steps, hid});
    cache->h_prev.resize({batch, steps, hid});
  }
  std::vector<T> zeros(hid, T(0));
  for (int b = 0; b < batch; ++b) {
    const T* prev = h0 ? h0->data() + static_cast<std::size_t>(b) * hid : zeros.data();
    for (int t = 0; t < steps; ++t) {
      const std::size_t row = static_cast<std::size_t>(b) * steps + t;
      T* out = h.data() + row * hid;
      if (cache) {
        std::copy_n(prev, hid, cache->h_prev.data() + row * hid);
        gru_step(x.data() + row * in, prev, p, out, cache->z.data() + row * hid,
                 cache->r.data() + row * hid, cache->c.data() + row * hid, macs);
      } else {
        gru_step<T>(x.data() + row * in, prev, p, out, nullptr, nullptr, nullptr, macs);
      }
      prev = out;
    }
  }
  return h;
}

template <typename T>
void gru_backward(const Tensor<T>& x, const Gru<T>& p, const GruCache<T>& cache,
                  const Tensor<T>& grad_h, Tensor<T>* grad_x, Gru<T>& grad_p) {
  const int in = p.input_dim(), hid = p.hidden_dim();
  const int batch = x.dim(0), steps = x.dim(1);
  require(grad_h.rank() == 3 && grad_h.dim(0) == batch && grad_h.dim(1) == steps &&
              grad_h.dim(2) == hid,
          "gru backward: grad_h shape mismatch", grad_h);
  if (grad_x) grad_x->resize(x.dims());
  std::vector<T> dh(hid), dh_next(hid), dh_prev(hid), dz(hid), dr(hid), dac(hid), daz(hid),
      dar(hid), drh(hid), rh(hid);

  // Accumulates one gate: bias, input kernel, recurrent kernel, and the
  // gradients flowing back into x and into the recurrent operand.
  auto gate = [&](const T* da, const Tensor<T>& w, const Tensor<T>& u, Tensor<T>& gw,
                  Tensor<T>& gu, Tensor<T>& gb, const T* xr, const T* hop, T* gx,
                  T* g_hop) {
    for (int o = 0; o < hid; ++o) {
      const T g = da[o];
      gb[o] += g;
      const std::size_t wi = static_cast<std::size_t>(o) * in;
      const std::size_t ui = static_cast<std::size_t>(o) * hid;
      for (int k = 0; k < in; ++k) gw[wi + k] += g * xr[k];
      if (gx) {
        for (int k = 0; k < in; ++k) gx[k] += w[wi + k] * g;
      }
      for (int j = 0; j < hid; ++j) {
        gu[ui + j] += g * hop[j];
        g_hop[j] += u[ui + j] * g;
      }
    }
  };

  for (int b = 0; b < batch; ++b) {
    std::fill(dh_next.begin(), dh_next.end(), T(0));
    for (int t = steps - 1; t >= 0; --t) {
      const std::size_t row = static_cast<std::size_t>(b) * steps + t;
      const T* z = cache.z.data() + row * hid;
      const T* r = cache.r.data() + row * hid;
      const T* c = cache.c.data() + row * hid;
      const T* hp = cache.h_prev.data() + row * hid;
      const T* gh = grad_h.data() + row * hid;
      const T* xr = x.data() + row * in;
      T* gx = grad_x ? grad_x->data() + row * in : nullptr;
      for (int j = 0; j < hid; ++j) {
        dh[j] = gh[j] + dh_next[j];
        dz[j] = dh[j] * (c[j] - hp[j]);
        dac[j] = dh[j] * z[j] * (T(1) - c[j] * c[j]);
        dh_prev[j] = dh[j] * (T(1) - z[j]);
        rh[j] = r[j] * hp[j];
        drh[j] = T(0);
      }
      gate(dac.data(), p.W_h, p.U_h, grad_p.W_h, grad_p.U_h, grad_p.b_h, xr, rh.data(), gx,
           drh.data());
      for (int j = 0; j < hid; ++j) {
        dr[j] = drh[j] * hp[j];
        dh_prev[j] += drh[j] * r[j];
        dar[j] = dr[j] * r[j] * (T(1) - r[j]);
        daz[j] = dz[j] * z[j] * (T(1) - z[j]);
      }
      gate(dar.data(), p.W_r, p.U_r, grad_p.W_r, grad_p.U_r, grad_p.b_r, xr, hp, gx,
           dh_prev.data());
      gate(daz.data(), p.W_z, p.U_z, grad_p.W_z, grad_p.U_z, grad_p.b_z, xr, hp, gx,
           dh_prev.data());
      std::swap(dh_next, dh_prev);
    }
  }
}

#define WNR_INSTANTIATE_LAYERS(T)                                                          \
  template Tensor<T> conv_forward(const Tensor<T>&, const Conv<T>&, MacCounter*);          \
  template void conv_backward(const Tensor<T>&, const Conv<T>&, const Tensor<T>&,          \
                              Tensor<T>*, Conv<T>&);                                       \
  template Tensor<T> batchnorm_forward(const Tensor<T>&, const BatchNorm<T>&, bool,        \
                                       BatchNormCache<T>*);                                \
  template void batchnorm_backward(const BatchNormCache<T>&, const BatchNorm<T>&,          \
                                   const Tensor<T>&, Tensor<T>*, BatchNorm<T>&);           \
  template void batchnorm_update_running(BatchNorm<T>&, const BatchNormCache<T>&);         \
  template Tensor<T> relu_forward(const Tensor<T>&);                                       \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                    \
  template T sigmoid(T);                                                                   \
  template Tensor<T> sigmoid_forward(const Tensor<T>&);                                    \
  template Tensor<T> sigmoid_backward(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> avgpool_forward(const Tensor<T>&);                                    \
  template Tensor<T> avgpool_backward(const std::vector<int>&, const Tensor<T>&);          \
  template Tensor<T> dense_forward(const Tensor<T>&, const Dense<T>&, MacCounter*);        \
  template void dense_backward(const Tensor<T>&, const Dense<T>&, const Tensor<T>&,        \
                               Tensor<T>*, Dense<T>&);                                     \
  template void gru_step(const T*, const T*, const Gru<T>&, T*, T*, T*, T*, MacCounter*);  \
  template Tensor<T> gru_forward(const Tensor<T>&, const Gru<T>&, const Tensor<T>*,        \
                                 GruCache<T>*, MacCounter*);                               \
  template void gru_backward(const Tensor<T>&, const Gru<T>&, const GruCache<T>&,          \
                             const Tensor<T>&, Tensor<T>*, Gru<T>&);

WNR_INSTANTIATE_LAYERS(float)
WNR_INSTANTIATE_LAYERS(double)

#undef WNR_INSTANTIATE_LAYERS

}  // namespace wnr::nn
