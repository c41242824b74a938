#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "epswae/dense_matrix.hpp"
#include "epswae/errors.hpp"
#include "epswae/rng.hpp"

namespace epswae {

enum class ActivationKind { Identity, ReLU, LeakyReLU, Sigmoid };

struct Activation {
  ActivationKind kind = ActivationKind::Identity;
  double slope = 0.01;  // LeakyReLU only; must lie in (0,1)
};

inline double activate(const Activation& a, double x) {
  switch (a.kind) {
    case ActivationKind::Identity: return x;
    case ActivationKind::ReLU: return x > 0.0 ? x : 0.0;
    case ActivationKind::LeakyReLU: return x > 0.0 ? x : a.slope * x;
    case ActivationKind::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

/// Derivative in terms of the pre-activation. The ReLU subgradient at 0 is 0.
inline double activate_derivative(const Activation& a, double pre) {
  switch (a.kind) {
    case ActivationKind::Identity: return 1.0;
    case ActivationKind::ReLU: return pre > 0.0 ? 1.0 : 0.0;
    case ActivationKind::LeakyReLU: return pre > 0.0 ? 1.0 : a.slope;
    case ActivationKind::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-pre));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

struct Layer {
  DenseMatrix weight;  // in_dim x out_dim
  DenseVector bias;    // out_dim
  Activation activation;
};

/// Fully-connected network. Batches are row-major (one sample per row);
/// a layer maps X -> act(X * W + b).
class MlpNetwork {
 public:
  MlpNetwork() = default;

  explicit MlpNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const Layer& l = layers_[i];
      if (l.bias.size() != l.weight.cols())
        throw ShapeError("layer " + std::to_string(i) + ": bias size " +
                         std::to_string(l.bias.size()) + " vs weight cols " +
                         std::to_string(l.weight.cols()));
      if (l.activation.kind == ActivationKind::LeakyReLU &&
          !(l.activation.slope > 0.0 && l.activation.slope < 1.0))
        throw UsageError("LeakyReLU slope must lie in (0,1)");
      if (i + 1 < layers_.size() && l.weight.cols() != layers_[i + 1].weight.rows())
        throw ShapeError("layer " + std::to_string(i) + " output dim " +
                         std::to_string(l.weight.cols()) + " does not feed layer " +
                         std::to_string(i + 1) + " input dim " +
                         std::to_string(layers_[i + 1].weight.rows()));
    }
  }

  /// Seeded network with the given layer widths (dims = [in, h1, ..., out]).
  /// Hidden layers use `hidden`, the final layer is linear. Weights use
  /// uniform fan-in (Kaiming-style) scaling, biases start at zero.
  static MlpNetwork random(const std::vector<std::size_t>& dims, Activation hidden,
                           Rng& rng) {
    if (dims.size() < 2) throw UsageError("MlpNetwork::random: need at least 2 dims");
    std::vector<Layer> layers;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
      Layer l;
      l.weight = DenseMatrix(dims[i], dims[i + 1]);
      l.bias = DenseVector(dims[i + 1], 0.0);
      const double bound = std::sqrt(6.0 / static_cast<double>(dims[i]));
      for (double& w : l.weight.raw()) w = rng.uniform(-bound, bound);
      l.activation = (i + 2 < dims.size()) ? hidden
                                           : Activation{ActivationKind::Identity, 0.01};
      layers.push_back(std::move(l));
    }
    return MlpNetwork(std::move(layers));
  }

  std::size_t layer_count() const { return layers_.size(); }
  std::size_t input_dim() const { return layers_.front().weight.rows(); }
  std::size_t output_dim() const { return layers_.back().weight.cols(); }

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  bool all_finite() const {
    for (const Layer& l : layers_) {
      if (!l.weight.all_finite()) return false;
      for (double b : l.bias)
        if (!std::isfinite(b)) return false;
    }
    return true;
  }

  friend bool operator==(const MlpNetwork& a, const MlpNetwork& b) {
    if (a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t i = 0; i < a.layers_.size(); ++i) {
      if (!(a.layers_[i].weight == b.layers_[i].weight)) return false;
      if (a.layers_[i].bias != b.layers_[i].bias) return false;
      if (a.layers_[i].activation.kind != b.layers_[i].activation.kind) return false;
    }
    return true;
  }

 private:
  std::vector<Layer> layers_;
};

/// Per-layer intermediates of one forward pass, kept for backprop.
struct ForwardCache {
  DenseMatrix input;
  std::vector<DenseMatrix> pre;   // X*W + b per layer
  std::vector<DenseMatrix> post;  // act(pre) per layer
};

inline std::pair<DenseMatrix, ForwardCache> mlp_forward(const MlpNetwork& net,
                                                        const DenseMatrix& batch) {
  if (batch.cols() != net.input_dim())
    throw ShapeError("mlp_forward: batch cols " + std::to_string(batch.cols()) +
                     " vs network input dim " + std::to_string(net.input_dim()));
  ForwardCache cache;
  cache.input = batch;
  const DenseMatrix* current = &batch;
  for (const Layer& l : net.layers()) {
    DenseMatrix pre = matmul(*current, l.weight);
    for (std::size_t i = 0; i < pre.rows(); ++i) {
      double* row = pre.row(i);
      for (std::size_t j = 0; j < pre.cols(); ++j) row[j] += l.bias[j];
    }
    DenseMatrix post = pre;
    if (l.activation.kind != ActivationKind::Identity)
      for (double& v : post.raw()) v = activate(l.activation, v);
    cache.pre.push_back(std::move(pre));
    cache.post.push_back(std::move(post));
    current = &cache.post.back();
  }
  return {cache.post.back(), std::move(cache)};
}

/// Forward pass without keeping intermediates.
inline DenseMatrix mlp_output(const MlpNetwork& net, const DenseMatrix& batch) {
  return mlp_forward(net, batch).first;
}

struct MlpGradients {
  std::vector<DenseMatrix> weight;
  std::vector<DenseVector> bias;

  static MlpGradients zeros_like(const MlpNetwork& net) {
    MlpGradients g;
    for (const Layer& l : net.layers()) {
      g.weight.emplace_back(l.weight.rows(), l.weight.cols());
      g.bias.emplace_back(l.bias.size(), 0.0);
    }
    return g;
  }
};

/// Backpropagates grad_output (dL/d output) through the cached forward pass.
/// Returns parameter gradients and the gradient with respect to the input batch.
inline std::pair<MlpGradients, DenseMatrix> mlp_backward(const MlpNetwork& net,
                                                         const ForwardCache& cache,
                                                         const DenseMatrix& grad_output) {
  const auto& layers = net.layers();
  if (cache.pre.size() != layers.size())
    throw ShapeError("mlp_backward: cache does not match network depth");
  if (!grad_output.same_shape(cache.post.back()))
    throw ShapeError("mlp_backward: grad_output shape mismatch");

  MlpGradients grads = MlpGradients::zeros_like(net);
  DenseMatrix grad = grad_output;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const Layer& l = layers[li];
    // dZ = dA .* act'(pre)
    if (l.activation.kind != ActivationKind::Identity) {
      const DenseMatrix& pre = cache.pre[li];
      for (std::size_t i = 0; i < grad.size(); ++i)
        grad.raw()[i] *= activate_derivative(l.activation, pre.raw()[i]);
    }
    const DenseMatrix& below = (li == 0) ? cache.input : cache.post[li - 1];
    grads.weight[li] = matmul_transpose_a(below, grad);
    grads.bias[li] = column_sums(grad);
    if (li > 0) grad = matmul_transpose_b(grad, l.weight);
  }
  DenseMatrix grad_input = matmul_transpose_b(grad, layers.front().weight);
  return {std::move(grads), std::move(grad_input)};
}

}  // namespace epswae
