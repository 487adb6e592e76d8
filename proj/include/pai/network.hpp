#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "pai/errors.hpp"
#include "pai/scalar.hpp"

namespace pai {

/// Fully connected affine map: y = W x + b, weights stored out x in.
struct DenseLayer {
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;

  std::size_t in_width() const { return weights.empty() ? 0 : weights.front().size(); }
  std::size_t out_width() const { return weights.size(); }
};

struct ReluLayer {
  std::size_t width = 0;
};

/// Single-channel valid convolution, stride 1. Images are flattened
/// row-major (row index slow, column fast).
struct Conv2dLayer {
  std::vector<std::vector<double>> filter;  // kh x kw
  std::size_t in_h = 0;
  std::size_t in_w = 0;
  std::vector<double> bias;  // per output, empty means zero

  std::size_t kernel_h() const { return filter.size(); }
  std::size_t kernel_w() const { return filter.empty() ? 0 : filter.front().size(); }
  std::size_t out_h() const { return in_h - kernel_h() + 1; }
  std::size_t out_w() const { return in_w - kernel_w() + 1; }
  std::size_t in_width() const { return in_h * in_w; }
  std::size_t out_width() const { return out_h() * out_w(); }
};

using Layer = std::variant<DenseLayer, ReluLayer, Conv2dLayer>;

inline std::size_t layer_in_width(const Layer& layer) {
  return std::visit([](const auto& l) -> std::size_t {
    using T = std::decay_t<decltype(l)>;
    if constexpr (std::is_same_v<T, ReluLayer>)
      return l.width;
    else
      return l.in_width();
  }, layer);
}

inline std::size_t layer_out_width(const Layer& layer) {
  return std::visit([](const auto& l) -> std::size_t {
    using T = std::decay_t<decltype(l)>;
    if constexpr (std::is_same_v<T, ReluLayer>)
      return l.width;
    else
      return l.out_width();
  }, layer);
}

inline std::string layer_kind(const Layer& layer) {
  if (std::holds_alternative<DenseLayer>(layer)) return "dense";
  if (std::holds_alternative<ReluLayer>(layer)) return "relu";
  return "conv2d";
}

namespace detail {

inline void validate_layer(const Layer& layer, std::size_t position) {
  auto where = [&] { return "layers[" + std::to_string(position) + "]"; };
  if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
    if (dense->weights.empty() || dense->weights.front().empty())
      throw ParseError(where() + ": dense weights must be a non-empty matrix");
    for (const auto& row : dense->weights)
      if (row.size() != dense->in_width())
        throw ParseError(where() + ": dense weights are not rectangular");
    if (!dense->bias.empty() && dense->bias.size() != dense->out_width())
      throw ParseError(where() + ": bias length " + std::to_string(dense->bias.size()) +
                       " does not match output width " + std::to_string(dense->out_width()));
  } else if (const auto* relu = std::get_if<ReluLayer>(&layer)) {
    if (relu->width == 0) throw ParseError(where() + ": relu width must be positive");
  } else if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
    if (conv->filter.empty() || conv->filter.front().empty())
      throw ParseError(where() + ": conv filter must be a non-empty matrix");
    for (const auto& row : conv->filter)
      if (row.size() != conv->kernel_w())
        throw ParseError(where() + ": conv filter is not rectangular");
    if (conv->in_h == 0 || conv->in_w == 0)
      throw ParseError(where() + ": conv input shape must be positive");
    if (conv->kernel_h() > conv->in_h || conv->kernel_w() > conv->in_w)
      throw ParseError(where() + ": filter larger than input");
    if (!conv->bias.empty() && conv->bias.size() != conv->out_width())
      throw ParseError(where() + ": bias length does not match conv output width");
  }
}

}  // namespace detail

/// Ordered list of layers with compatible widths.
class Network {
 public:
  explicit Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw ParseError("network has an empty layer list");
    for (std::size_t i = 0; i < layers_.size(); ++i) detail::validate_layer(layers_[i], i);
    for (std::size_t i = 1; i < layers_.size(); ++i) {
      std::size_t prev_out = layer_out_width(layers_[i - 1]);
      std::size_t next_in = layer_in_width(layers_[i]);
      if (prev_out != next_in)
        throw ParseError("width mismatch between layers[" + std::to_string(i - 1) + "] (" +
                         layer_kind(layers_[i - 1]) + ", out " + std::to_string(prev_out) +
                         ") and layers[" + std::to_string(i) + "] (" + layer_kind(layers_[i]) +
                         ", in " + std::to_string(next_in) + ")");
    }
  }

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  std::size_t input_width() const { return layer_in_width(layers_.front()); }
  std::size_t output_width() const { return layer_out_width(layers_.back()); }

  /// First `count` layers as a network of their own.
  Network prefix(std::size_t count) const {
    if (count == 0 || count > layers_.size()) throw ConfigError("prefix: bad layer count");
    return Network(std::vector<Layer>(layers_.begin(), layers_.begin() + count));
  }

 private:
  std::vector<Layer> layers_;
};

/// Rewrites a convolution as the equivalent dense affine layer. Row r of the
/// result holds the filter taps of the r-th receptive field at the flattened
/// input positions, zero elsewhere.
inline DenseLayer lower_conv(const Conv2dLayer& conv) {
  detail::validate_layer(Layer(conv), 0);
  const std::size_t out_h = conv.out_h();
  const std::size_t out_w = conv.out_w();
  DenseLayer dense;
  dense.weights.assign(out_h * out_w, std::vector<double>(conv.in_width(), 0.0));
  dense.bias.assign(out_h * out_w, 0.0);
  for (std::size_t r = 0; r < out_h; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      const std::size_t out_index = r * out_w + c;
      for (std::size_t i = 0; i < conv.kernel_h(); ++i)
        for (std::size_t j = 0; j < conv.kernel_w(); ++j)
          dense.weights[out_index][(r + i) * conv.in_w + (c + j)] = conv.filter[i][j];
      if (!conv.bias.empty()) dense.bias[out_index] = conv.bias[out_index];
    }
  }
  return dense;
}

template <class S>
std::vector<S> eval_layer(const Layer& layer, const std::vector<S>& x) {
  if (x.size() != layer_in_width(layer))
    throw DimensionError("eval: input length " + std::to_string(x.size()) +
                         " does not match layer width " + std::to_string(layer_in_width(layer)));
  using traits = scalar_traits<S>;
  if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
    std::vector<S> y(dense->out_width(), traits::zero());
    for (std::size_t r = 0; r < dense->out_width(); ++r) {
      S acc = dense->bias.empty() ? traits::zero() : traits::from_double(dense->bias[r]);
      for (std::size_t c = 0; c < dense->in_width(); ++c)
        acc += traits::from_double(dense->weights[r][c]) * x[c];
      y[r] = acc;
    }
    return y;
  }
  if (std::holds_alternative<ReluLayer>(layer)) {
    std::vector<S> y(x);
    for (auto& v : y)
      if (v < traits::zero()) v = traits::zero();
    return y;
  }
  // Direct sliding window; lower_conv is the independent second route.
  const auto& conv = std::get<Conv2dLayer>(layer);
  std::vector<S> y(conv.out_width(), traits::zero());
  for (std::size_t r = 0; r < conv.out_h(); ++r) {
    for (std::size_t c = 0; c < conv.out_w(); ++c) {
      S acc = conv.bias.empty() ? traits::zero()
                                : traits::from_double(conv.bias[r * conv.out_w() + c]);
      for (std::size_t i = 0; i < conv.kernel_h(); ++i)
        for (std::size_t j = 0; j < conv.kernel_w(); ++j)
          acc += traits::from_double(conv.filter[i][j]) * x[(r + i) * conv.in_w + (c + j)];
      y[r * conv.out_w() + c] = acc;
    }
  }
  return y;
}

template <class S>
std::vector<S> eval_network(const Network& net, std::vector<S> x) {
  for (const auto& layer : net.layers()) x = eval_layer<S>(layer, x);
  return x;
}

}  // namespace pai
