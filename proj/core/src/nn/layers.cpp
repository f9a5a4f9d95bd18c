#include "radarmon/nn/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

#include "radarmon/error.hpp"

namespace radarmon::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

struct ConvGeometry {
  std::size_t out_h, out_w, k_rows, cols;
};

ConvGeometry geometry(const Conv& c, const Shape3& in) {
  const auto out = output_shape(c, in);
  return {out.h, out.w, in.c * c.kernel_h * c.kernel_w, out.h * out.w};
}

// Output columns [lo, hi) whose input column ox*stride - pad + kx lies in [0, W).
std::pair<std::size_t, std::size_t> valid_range(std::size_t out_w, std::size_t stride, std::size_t pad, std::size_t k,
                                                std::size_t W) {
  const auto s = static_cast<std::ptrdiff_t>(stride);
  const auto off = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(pad);
  std::ptrdiff_t lo = off >= 0 ? 0 : (-off + s - 1) / s;
  std::ptrdiff_t hi = (static_cast<std::ptrdiff_t>(W) - 1 - off);
  hi = hi < 0 ? 0 : hi / s + 1;
  lo = std::min<std::ptrdiff_t>(lo, static_cast<std::ptrdiff_t>(out_w));
  hi = std::clamp<std::ptrdiff_t>(hi, lo, static_cast<std::ptrdiff_t>(out_w));
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

// Output rows [oy0, oy1) of the patch matrix: (C*kh*kw) x ((oy1-oy0)*Wo), row-major.
void im2col_rows(const Conv& c, const Shape3& in, std::span<const double> x, const ConvGeometry& g, std::size_t oy0,
                 std::size_t oy1, std::vector<double>& col) {
  const std::size_t cols = (oy1 - oy0) * g.out_w;
  col.resize(g.k_rows * cols);
  const auto pad = static_cast<std::ptrdiff_t>(c.pad);
  const auto stride = static_cast<std::ptrdiff_t>(c.stride);
  const auto H = static_cast<std::ptrdiff_t>(in.h);
  std::size_t row = 0;
  for (std::size_t ch = 0; ch < in.c; ++ch) {
    const double* plane = x.data() + ch * in.h * in.w;
    for (std::size_t ky = 0; ky < c.kernel_h; ++ky) {
      for (std::size_t kx = 0; kx < c.kernel_w; ++kx, ++row) {
        const auto [lo, hi] = valid_range(g.out_w, c.stride, c.pad, kx, in.w);
        const auto x_off = static_cast<std::ptrdiff_t>(kx) - pad;
        double* dst = col.data() + row * cols;
        for (std::size_t oy = oy0; oy < oy1; ++oy) {
          double* dst_row = dst + (oy - oy0) * g.out_w;
          const auto iy = static_cast<std::ptrdiff_t>(oy) * stride - pad + static_cast<std::ptrdiff_t>(ky);
          if (iy < 0 || iy >= H) {
            std::fill(dst_row, dst_row + g.out_w, 0.0);
            continue;
          }
          const double* src_row = plane + iy * static_cast<std::ptrdiff_t>(in.w);
          std::fill(dst_row, dst_row + lo, 0.0);
          if (c.stride == 1) {
            std::copy(src_row + static_cast<std::ptrdiff_t>(lo) + x_off, src_row + static_cast<std::ptrdiff_t>(hi) + x_off,
                      dst_row + lo);
          } else {
            for (std::size_t ox = lo; ox < hi; ++ox) dst_row[ox] = src_row[static_cast<std::ptrdiff_t>(ox) * stride + x_off];
          }
          std::fill(dst_row + hi, dst_row + g.out_w, 0.0);
        }
      }
    }
  }
}

// Adds the patch-matrix gradient of output rows [oy0, oy1) back onto dx.
void col2im_rows(const Conv& c, const Shape3& in, std::span<const double> col, const ConvGeometry& g, std::size_t oy0,
                 std::size_t oy1, std::span<double> dx) {
  const std::size_t cols = (oy1 - oy0) * g.out_w;
  const auto pad = static_cast<std::ptrdiff_t>(c.pad);
  const auto stride = static_cast<std::ptrdiff_t>(c.stride);
  const auto H = static_cast<std::ptrdiff_t>(in.h);
  std::size_t row = 0;
  for (std::size_t ch = 0; ch < in.c; ++ch) {
    double* plane = dx.data() + ch * in.h * in.w;
    for (std::size_t ky = 0; ky < c.kernel_h; ++ky) {
      for (std::size_t kx = 0; kx < c.kernel_w; ++kx, ++row) {
        const auto [lo, hi] = valid_range(g.out_w, c.stride, c.pad, kx, in.w);
        const auto x_off = static_cast<std::ptrdiff_t>(kx) - pad;
        const double* src = col.data() + row * cols;
        for (std::size_t oy = oy0; oy < oy1; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy) * stride - pad + static_cast<std::ptrdiff_t>(ky);
          if (iy < 0 || iy >= H) continue;
          double* dst_row = plane + iy * static_cast<std::ptrdiff_t>(in.w);
          const double* src_row = src + (oy - oy0) * g.out_w;
          if (c.stride == 1) {
            double* d = dst_row + (static_cast<std::ptrdiff_t>(lo) + x_off);
            const double* v = src_row + lo;
            for (std::size_t j = 0; j < hi - lo; ++j) d[j] += v[j];
          } else {
            for (std::size_t ox = lo; ox < hi; ++ox) dst_row[static_cast<std::ptrdiff_t>(ox) * stride + x_off] += src_row[ox];
          }
        }
      }
    }
  }
}

// Output rows handled per GEMM. About 128 output positions keeps the patch
// block resident in L2, which beats one large GEMM over the whole image.
std::size_t rows_per_block(const ConvGeometry& g) { return std::max<std::size_t>(1, 128 / g.out_w); }

thread_local std::vector<double> t_col;
thread_local std::vector<double> t_dcol;

}  // namespace

std::string to_string(const Shape3& s) {
  return std::to_string(s.c) + "x" + std::to_string(s.h) + "x" + std::to_string(s.w);
}

std::string describe(const LayerSpec& layer) {
  return std::visit(
      overloaded{[](const Conv& c) {
                   return "conv(" + std::to_string(c.out_channels) + ", " + std::to_string(c.kernel_h) + "x" +
                          std::to_string(c.kernel_w) + ", stride " + std::to_string(c.stride) + ", pad " +
                          std::to_string(c.pad) + ")";
                 },
                 [](const Relu&) { return std::string("relu"); },
                 [](const MaxPool& p) { return "maxpool(" + std::to_string(p.size) + ")"; },
                 [](const Dense& d) { return "dense(" + std::to_string(d.out) + ")"; },
                 [](const Softmax&) { return std::string("softmax"); }},
      layer);
}

Shape3 output_shape(const LayerSpec& layer, const Shape3& in) {
  return std::visit(
      overloaded{[&](const Conv& c) {
                   if (c.out_channels == 0 || c.kernel_h == 0 || c.kernel_w == 0 || c.stride == 0) {
                     throw ShapeError("conv with zero-sized dimension");
                   }
                   if (c.kernel_h > in.h + 2 * c.pad || c.kernel_w > in.w + 2 * c.pad) {
                     throw ShapeError("conv kernel " + describe(c) + " larger than padded input " + to_string(in));
                   }
                   return Shape3{c.out_channels, (in.h + 2 * c.pad - c.kernel_h) / c.stride + 1,
                                 (in.w + 2 * c.pad - c.kernel_w) / c.stride + 1};
                 },
                 [&](const Relu&) { return in; },
                 [&](const MaxPool& p) {
                   if (p.size == 0 || p.size > in.h || p.size > in.w) {
                     throw ShapeError("maxpool window larger than input " + to_string(in));
                   }
                   return Shape3{in.c, in.h / p.size, in.w / p.size};
                 },
                 [&](const Dense& d) {
                   if (d.out == 0) throw ShapeError("dense layer with zero outputs");
                   return Shape3{d.out, 1, 1};
                 },
                 [&](const Softmax&) { return in; }},
      layer);
}

std::vector<std::vector<std::size_t>> parameter_shapes(const LayerSpec& layer, const Shape3& in) {
  if (const auto* c = std::get_if<Conv>(&layer)) {
    return {{c->out_channels, in.c, c->kernel_h, c->kernel_w}, {c->out_channels}};
  }
  if (const auto* d = std::get_if<Dense>(&layer)) {
    return {{d->out, in.size()}, {d->out}};
  }
  return {};
}

void conv_forward(const Conv& spec, const Shape3& in_shape, std::span<const double> in,
                  std::span<const double> weight, std::span<const double> bias, std::span<double> out) {
  const auto g = geometry(spec, in_shape);
  const auto co = static_cast<Eigen::Index>(spec.out_channels);
  ConstMatMap w(weight.data(), co, static_cast<Eigen::Index>(g.k_rows));
  MatMap y(out.data(), co, static_cast<Eigen::Index>(g.cols));
  const auto step = rows_per_block(g);
  for (std::size_t oy0 = 0; oy0 < g.out_h; oy0 += step) {
    const auto oy1 = std::min(g.out_h, oy0 + step);
    const auto n = static_cast<Eigen::Index>((oy1 - oy0) * g.out_w);
    im2col_rows(spec, in_shape, in, g, oy0, oy1, t_col);
    y.middleCols(static_cast<Eigen::Index>(oy0 * g.out_w), n).noalias() =
        w * ConstMatMap(t_col.data(), static_cast<Eigen::Index>(g.k_rows), n);
  }
  y.colwise() += ConstVecMap(bias.data(), co);
}

void conv_backward(const Conv& spec, const Shape3& in_shape, std::span<const double> in,
                   std::span<const double> weight, std::span<const double> d_out, std::span<double> d_weight,
                   std::span<double> d_bias, std::span<double> d_in, double scale) {
  const auto g = geometry(spec, in_shape);
  const auto co = static_cast<Eigen::Index>(spec.out_channels);
  const auto k = static_cast<Eigen::Index>(g.k_rows);
  ConstMatMap dy(d_out.data(), co, static_cast<Eigen::Index>(g.cols));
  ConstMatMap w(weight.data(), co, k);
  MatMap dw(d_weight.data(), co, k);
  // Plain loops for the reductions below: Eigen's vectorized sums peel to an
  // aligned boundary, which makes the rounding depend on buffer addresses.
  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    const double* row = d_out.data() + o * g.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < g.cols; ++j) acc += row[j];
    d_bias[o] += scale * acc;
  }
  if (!d_in.empty()) std::fill(d_in.begin(), d_in.end(), 0.0);
  const auto step = rows_per_block(g);
  for (std::size_t oy0 = 0; oy0 < g.out_h; oy0 += step) {
    const auto oy1 = std::min(g.out_h, oy0 + step);
    const auto n = static_cast<Eigen::Index>((oy1 - oy0) * g.out_w);
    const auto dy_block = dy.middleCols(static_cast<Eigen::Index>(oy0 * g.out_w), n);
    im2col_rows(spec, in_shape, in, g, oy0, oy1, t_col);
    dw.noalias() += scale * (dy_block * ConstMatMap(t_col.data(), k, n).transpose());
    if (!d_in.empty()) {
      t_dcol.resize(g.k_rows * static_cast<std::size_t>(n));
      MatMap dcol(t_dcol.data(), k, n);
      dcol.noalias() = w.transpose() * dy_block;
      col2im_rows(spec, in_shape, t_dcol, g, oy0, oy1, d_in);
    }
  }
}

void relu_forward(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void relu_backward(std::span<const double> out, std::span<const double> d_out, std::span<double> d_in) {
  for (std::size_t i = 0; i < out.size(); ++i) d_in[i] = out[i] > 0.0 ? d_out[i] : 0.0;
}

void maxpool_forward(const MaxPool& spec, const Shape3& in_shape, std::span<const double> in,
                     std::span<double> out, std::span<std::uint32_t> argmax) {
  const auto o = output_shape(spec, in_shape);
  const auto s = spec.size;
  for (std::size_t c = 0; c < o.c; ++c) {
    for (std::size_t oy = 0; oy < o.h; ++oy) {
      for (std::size_t ox = 0; ox < o.w; ++ox) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t dy = 0; dy < s; ++dy) {
          for (std::size_t dx = 0; dx < s; ++dx) {
            const auto idx = (c * in_shape.h + oy * s + dy) * in_shape.w + ox * s + dx;
            if (in[idx] > best) {
              best = in[idx];
              best_idx = idx;
            }
          }
        }
        const auto oidx = (c * o.h + oy) * o.w + ox;
        out[oidx] = best;
        argmax[oidx] = static_cast<std::uint32_t>(best_idx);
      }
    }
  }
}

void maxpool_backward(std::span<const std::uint32_t> argmax, std::span<const double> d_out, std::span<double> d_in) {
  std::fill(d_in.begin(), d_in.end(), 0.0);
  for (std::size_t i = 0; i < d_out.size(); ++i) d_in[argmax[i]] += d_out[i];
}

void dense_forward(std::span<const double> in, std::span<const double> weight, std::span<const double> bias,
                   std::span<double> out) {
  const std::size_t n_in = in.size();
  for (std::size_t o = 0; o < out.size(); ++o) {
    const double* w = weight.data() + o * n_in;
    double acc = 0.0;
    for (std::size_t i = 0; i < n_in; ++i) acc += w[i] * in[i];
    out[o] = acc + bias[o];
  }
}

void dense_backward(std::span<const double> in, std::span<const double> weight, std::span<const double> d_out,
                    std::span<double> d_weight, std::span<double> d_bias, std::span<double> d_in, double scale) {
  const std::size_t n_in = in.size();
  for (std::size_t o = 0; o < d_out.size(); ++o) {
    const double g = scale * d_out[o];
    double* dw = d_weight.data() + o * n_in;
    for (std::size_t i = 0; i < n_in; ++i) dw[i] += g * in[i];
    d_bias[o] += g;
  }
  if (!d_in.empty()) {
    std::fill(d_in.begin(), d_in.end(), 0.0);
    for (std::size_t o = 0; o < d_out.size(); ++o) {
      const double* w = weight.data() + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) d_in[i] += w[i] * d_out[o];
    }
  }
}

void softmax(std::span<const double> logits, std::span<double> probs) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - top);
    sum += probs[i];
  }
  for (auto& p : probs) p /= sum;
}

}  // namespace radarmon::nn
