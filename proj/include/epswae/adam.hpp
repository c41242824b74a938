#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "epswae/errors.hpp"
#include "epswae/mlp.hpp"

namespace epswae {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One Adam update with bias correction on a flat parameter block.
/// `t` is the 1-based step counter after incrementing.
inline void adam_update(std::span<double> params, std::span<const double> grads,
                        std::span<double> m, std::span<double> v, std::uint64_t t,
                        const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != m.size() ||
      params.size() != v.size())
    throw ShapeError("adam_update: parameter/gradient/moment size mismatch");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

/// First/second-moment accumulators mirroring one network's parameters.
class AdamState {
 public:
  AdamState() = default;

  AdamState(const MlpNetwork& net, AdamConfig cfg) : cfg_(cfg) {
    for (const Layer& l : net.layers()) {
      m_weight_.emplace_back(l.weight.rows(), l.weight.cols());
      v_weight_.emplace_back(l.weight.rows(), l.weight.cols());
      m_bias_.emplace_back(l.bias.size(), 0.0);
      v_bias_.emplace_back(l.bias.size(), 0.0);
    }
  }

  void step(MlpNetwork& net, const MlpGradients& grads) {
    auto& layers = net.layers();
    if (grads.weight.size() != layers.size())
      throw ShapeError("AdamState::step: gradient layer count mismatch");
    ++t_;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      adam_update(layers[i].weight.raw(), grads.weight[i].raw(),
                  m_weight_[i].raw(), v_weight_[i].raw(), t_, cfg_);
      adam_update(layers[i].bias, grads.bias[i], m_bias_[i], v_bias_[i], t_, cfg_);
    }
  }

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<DenseMatrix> m_weight_, v_weight_;
  std::vector<DenseVector> m_bias_, v_bias_;
};

}  // namespace epswae
