#pragma once

#include <string>
#include <vector>

#include "seqgen/scenario.hpp"

namespace seqgen {

// Shared tensor kernel. Generation-time effects and the execution-time
// backend both call these, so predicted and interpreted values agree exactly.
// Shape violations raise BackendError (execution semantics); the generator
// never constructs them because binding enumeration filters first.

namespace tensor_math {

inline std::string shape_str(const std::vector<std::int64_t>& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  out += ")";
  return out;
}

// Deterministic weight element in [-1, 1), keyed by (seed, tag, dims, index).
// Counter-based so both sides can materialize weights lazily in any order.
inline double weight_fill(std::uint64_t seed, const char* tag,
                          const std::vector<std::int64_t>& key, std::int64_t index) {
  std::uint64_t h = fnv1a(tag, seed ^ 0x9e3779b97f4a7c15ULL);
  for (auto k : key) h = fnv1a(&k, sizeof k, h);
  h = fnv1a(&index, sizeof index, h);
  std::uint64_t x = h;
  double u = static_cast<double>(splitmix64(x) >> 11) * 0x1.0p-53;
  return u * 2.0 - 1.0;
}

inline Tensor reshape(const Tensor& t, const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto d : shape) {
    if (d <= 0) throw BackendError("ShapeMismatch: reshape target dims must be positive");
    n *= d;
  }
  if (n != t.numel())
    throw BackendError("ShapeMismatch: cannot reshape " + shape_str(t.shape) + " to " +
                       shape_str(shape));
  return Tensor{shape, t.data};
}

inline Tensor unsqueeze(const Tensor& t, std::int64_t dim) {
  const auto rank = static_cast<std::int64_t>(t.shape.size());
  if (dim < 0 || dim > rank)
    throw BackendError("ShapeMismatch: unsqueeze dim " + std::to_string(dim) +
                       " out of range for rank " + std::to_string(rank));
  auto shape = t.shape;
  shape.insert(shape.begin() + dim, 1);
  return Tensor{std::move(shape), t.data};
}

inline std::vector<std::int64_t> strides_of(const std::vector<std::int64_t>& shape) {
  std::vector<std::int64_t> st(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) st[i] = st[i + 1] * shape[i + 1];
  return st;
}

inline Tensor transpose(const Tensor& t, std::int64_t d0, std::int64_t d1) {
  const auto rank = static_cast<std::int64_t>(t.shape.size());
  if (d0 < 0 || d0 >= rank || d1 < 0 || d1 >= rank)
    throw BackendError("ShapeMismatch: transpose dims out of range for rank " +
                       std::to_string(rank));
  auto shape = t.shape;
  std::swap(shape[d0], shape[d1]);
  Tensor out{shape, std::vector<double>(t.data.size())};
  const auto in_strides = strides_of(t.shape);
  const auto out_strides = strides_of(shape);
  std::vector<std::int64_t> idx(shape.size(), 0);
  for (std::int64_t flat = 0; flat < out.numel(); ++flat) {
    std::int64_t rem = flat;
    std::int64_t src = 0;
    for (std::size_t d = 0; d < shape.size(); ++d) {
      std::int64_t i = rem / out_strides[d];
      rem %= out_strides[d];
      std::size_t sd = d;
      if (static_cast<std::int64_t>(d) == d0) sd = static_cast<std::size_t>(d1);
      else if (static_cast<std::int64_t>(d) == d1) sd = static_cast<std::size_t>(d0);
      src += i * in_strides[sd];
    }
    out.data[flat] = t.data[src];
  }
  return out;
}

inline Tensor cat(const Tensor& a, const Tensor& b, std::int64_t dim) {
  if (a.shape.size() != b.shape.size())
    throw BackendError("ShapeMismatch: cat requires equal ranks, got " + shape_str(a.shape) +
                       " and " + shape_str(b.shape));
  const auto rank = static_cast<std::int64_t>(a.shape.size());
  if (dim < 0 || dim >= rank)
    throw BackendError("ShapeMismatch: cat dim " + std::to_string(dim) + " out of range");
  for (std::int64_t d = 0; d < rank; ++d) {
    if (d != dim && a.shape[d] != b.shape[d])
      throw BackendError("ShapeMismatch: cat requires matching dims outside the cat axis, got " +
                         shape_str(a.shape) + " and " + shape_str(b.shape));
  }
  auto shape = a.shape;
  shape[dim] += b.shape[dim];
  Tensor out{std::move(shape), {}};
  out.data.reserve(a.data.size() + b.data.size());
  std::int64_t outer = 1;
  for (std::int64_t d = 0; d < dim; ++d) outer *= a.shape[d];
  std::int64_t inner = 1;
  for (std::int64_t d = dim + 1; d < rank; ++d) inner *= a.shape[d];
  const std::int64_t a_block = a.shape[dim] * inner;
  const std::int64_t b_block = b.shape[dim] * inner;
  for (std::int64_t o = 0; o < outer; ++o) {
    out.data.insert(out.data.end(), a.data.begin() + o * a_block, a.data.begin() + (o + 1) * a_block);
    out.data.insert(out.data.end(), b.data.begin() + o * b_block, b.data.begin() + (o + 1) * b_block);
  }
  return out;
}

// y[..., o] = sum_i x[..., i] * W[o, i] + b[o]; W and b derived from
// (in_features, out_features, seed).
inline Tensor linear(const Tensor& x, std::int64_t out_features, std::uint64_t seed) {
  if (x.shape.empty()) throw BackendError("ShapeMismatch: linear requires rank >= 1");
  if (out_features <= 0) throw BackendError("ShapeMismatch: linear out_features must be positive");
  const std::int64_t in = x.shape.back();
  const std::vector<std::int64_t> key{in, out_features};
  auto shape = x.shape;
  shape.back() = out_features;
  const std::int64_t rows = x.numel() / in;
  Tensor out{std::move(shape), std::vector<double>(static_cast<std::size_t>(rows * out_features))};
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t o = 0; o < out_features; ++o) {
      double acc = weight_fill(seed, "linear_b", key, o);
      for (std::int64_t i = 0; i < in; ++i)
        acc += x.data[r * in + i] * weight_fill(seed, "linear_w", key, o * in + i);
      out.data[r * out_features + o] = acc;
    }
  }
  return out;
}

inline std::int64_t conv_out_dim(std::int64_t in, std::int64_t kernel, std::int64_t stride,
                                 std::int64_t padding) {
  return (in + 2 * padding - kernel) / stride + 1;
}

// Direct NCHW convolution with zero padding; W (out_c, in_c, k, k) and b
// (out_c) derived from (in_c, out_c, kernel, seed).
inline Tensor conv2d(const Tensor& x, std::int64_t out_channels, std::int64_t kernel,
                     std::int64_t stride, std::int64_t padding, std::uint64_t seed) {
  if (x.shape.size() != 4)
    throw BackendError("ShapeMismatch: conv2d requires a 4-D (N,C,H,W) input, got " +
                       shape_str(x.shape));
  const std::int64_t N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3];
  const std::int64_t Ho = conv_out_dim(H, kernel, stride, padding);
  const std::int64_t Wo = conv_out_dim(W, kernel, stride, padding);
  if (Ho < 1 || Wo < 1 || H + 2 * padding < kernel || W + 2 * padding < kernel)
    throw BackendError("ShapeMismatch: conv2d kernel does not fit input " + shape_str(x.shape));
  const std::vector<std::int64_t> key{C, out_channels, kernel};
  Tensor out{{N, out_channels, Ho, Wo},
             std::vector<double>(static_cast<std::size_t>(N * out_channels * Ho * Wo))};
  auto w_at = [&](std::int64_t o, std::int64_t c, std::int64_t i, std::int64_t j) {
    return weight_fill(seed, "conv_w", key, ((o * C + c) * kernel + i) * kernel + j);
  };
  for (std::int64_t n = 0; n < N; ++n) {
    for (std::int64_t o = 0; o < out_channels; ++o) {
      const double bias = weight_fill(seed, "conv_b", key, o);
      for (std::int64_t ho = 0; ho < Ho; ++ho) {
        for (std::int64_t wo = 0; wo < Wo; ++wo) {
          double acc = bias;
          for (std::int64_t c = 0; c < C; ++c) {
            for (std::int64_t i = 0; i < kernel; ++i) {
              const std::int64_t hi = ho * stride + i - padding;
              if (hi < 0 || hi >= H) continue;
              for (std::int64_t j = 0; j < kernel; ++j) {
                const std::int64_t wi = wo * stride + j - padding;
                if (wi < 0 || wi >= W) continue;
                acc += x.data[((n * C + c) * H + hi) * W + wi] * w_at(o, c, i, j);
              }
            }
          }
          out.data[((n * out_channels + o) * Ho + ho) * Wo + wo] = acc;
        }
      }
    }
  }
  return out;
}

}  // namespace tensor_math
}  // namespace seqgen
