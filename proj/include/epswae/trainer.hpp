#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epswae/adam.hpp"
#include "epswae/data_gen.hpp"
#include "epswae/errors.hpp"
#include "epswae/losses.hpp"
#include "epswae/mlp.hpp"
#include "epswae/rng.hpp"
#include "epswae/sw_distance.hpp"

namespace epswae {

enum class PriorMode { EncodedPrior, FixedGaussian };

inline std::string to_string(PriorMode m) {
  return m == PriorMode::EncodedPrior ? "encoded" : "fixed-gaussian";
}

inline PriorMode parse_prior_mode(const std::string& s) {
  if (s == "encoded" || s == "epswae") return PriorMode::EncodedPrior;
  if (s == "fixed-gaussian" || s == "swae") return PriorMode::FixedGaussian;
  throw UsageError("unknown prior mode '" + s + "'");
}

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 100;
  double lr = 0.001;
  std::size_t k1 = 1;  // autoencoder substeps per cycle
  std::size_t k2 = 2;  // prior-encoder substeps per cycle
  LossWeights weights{1.0, 0.1, 0.01};
  int p = 2;
  std::size_t L = 5;
  std::size_t M = 50;
  NonlinearityKind nonlinearity = NonlinearityKind::SineShear;
  bool full_poly_basis = false;
  std::size_t latent_dim = 3;
  std::vector<std::size_t> hidden = {40, 40, 40};
  std::uint64_t seed = 1;
  PriorMode prior_mode = PriorMode::EncodedPrior;
  bool fsc_enabled = true;
  std::size_t prior_input_dim = 40;
  std::size_t prior_components = 1;  // 1 = plain Gaussian prior input
  double prior_sigma_scale = 1.0;
  // Whether prior-encoder substeps draw a fresh data minibatch (pseudocode
  // reading) or reuse the cycle's minibatch.
  bool pe_fresh_data = true;
  std::size_t eval_subset = 2000;  // cap for per-epoch evaluation metrics
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  EnsembleConfig ensemble_config() const {
    return {L, M, p, nonlinearity, full_poly_basis};
  }

  AdamConfig adam_config() const { return {lr, adam_beta1, adam_beta2, adam_eps}; }
};

enum class Phase { Autoencoder, PriorEncoder };

struct StepRecord {
  std::size_t epoch = 0;    // 1-based
  std::size_t cycle = 0;    // minibatch cycle within the epoch, 0-based
  std::size_t substep = 0;  // substep within the phase, 0-based
  Phase phase = Phase::Autoencoder;
  LossReport report;
};

struct EvalMetrics {
  double reconstruction_mse = 0.0;
  double nsw_prior_posterior = 0.0;
  double fsc = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_total_ae = 0.0;
  double mean_reconstruction = 0.0;
  double mean_nsw_ae = 0.0;
  double mean_fsc = 0.0;
  EvalMetrics eval;
  double wall_seconds = 0.0;
};

struct TrainingLog {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
};

struct EpswaeModel {
  MlpNetwork encoder;
  MlpNetwork decoder;
  std::optional<MlpNetwork> prior_encoder;  // absent in fixed-Gaussian mode
  std::size_t latent_dim = 0;
};

/// Test/logging hook invoked after every optimizer step.
using StepObserver = std::function<void(Phase, const EpswaeModel&)>;

inline PriorInputSampler make_prior_sampler(const TrainConfig& cfg) {
  Rng means = Rng(cfg.seed).stream("prior/means");
  if (cfg.prior_components <= 1)
    return make_gaussian_sampler(cfg.prior_input_dim, cfg.prior_sigma_scale);
  return make_mixture_sampler(cfg.prior_input_dim, cfg.prior_components, means,
                              cfg.prior_sigma_scale);
}

namespace detail {

inline EvalMetrics evaluate_impl(const MlpNetwork& encoder, const MlpNetwork& decoder,
                                 const MlpNetwork* prior_encoder, const Dataset& data,
                                 const TrainConfig& cfg) {
  // Fixed streams derived from the config seed: repeated evaluation of the
  // same model uses identical prior draws and slice ensembles.
  Rng ev = Rng(cfg.seed).stream("eval");
  const std::size_t n = data.inputs.rows();
  const std::size_t e =
      (cfg.eval_subset == 0) ? n : std::min(cfg.eval_subset, n);
  PointCloud xe(e, data.inputs.cols());
  for (std::size_t i = 0; i < e; ++i)
    for (std::size_t j = 0; j < data.inputs.cols(); ++j) xe(i, j) = data.inputs(i, j);

  const PointCloud z = mlp_output(encoder, xe);
  const PointCloud xr = mlp_output(decoder, z);

  EvalMetrics m;
  m.reconstruction_mse = reconstruction_mse(xe, xr).value;

  PointCloud y;
  Rng rng_xi = ev.stream("xi");
  if (prior_encoder) {
    const PriorInputSampler sampler = make_prior_sampler(cfg);
    y = mlp_output(*prior_encoder, sample_prior_input(sampler, e, rng_xi));
  } else {
    y = PointCloud(e, cfg.latent_dim);
    for (double& v : y.raw()) v = rng_xi.normal();
  }
  Rng rng_ens = ev.stream("ensemble");
  const SliceEnsemble ens = make_slice_ensemble(z, cfg.ensemble_config(), rng_ens);
  m.nsw_prior_posterior = nsw_distance(z, y, ens);
  m.fsc = fsc_loss(xe, z).value;
  return m;
}

inline void require_finite(const LossReport& r, std::size_t epoch, std::size_t step,
                           const std::string& phase) {
  if (!std::isfinite(r.reconstruction))
    throw NonFiniteLossError(epoch, step, phase, "reconstruction", r.reconstruction);
  if (!std::isfinite(r.nsw)) throw NonFiniteLossError(epoch, step, phase, "nsw", r.nsw);
  if (!std::isfinite(r.fsc)) throw NonFiniteLossError(epoch, step, phase, "fsc", r.fsc);
  if (!std::isfinite(r.total))
    throw NonFiniteLossError(epoch, step, phase, "total", r.total);
}

}  // namespace detail

/// Metrics on a fixed evaluation subset with frozen randomness; deterministic
/// given (model, data, config.seed).
inline EvalMetrics evaluate(const EpswaeModel& model, const Dataset& data,
                            const TrainConfig& cfg) {
  return detail::evaluate_impl(model.encoder, model.decoder,
                               model.prior_encoder ? &*model.prior_encoder : nullptr,
                               data, cfg);
}

/// Two-step iterative training. Per minibatch cycle the autoencoder is
/// updated for k1 substeps (prior-encoder frozen) minimizing
/// alpha*rec + beta*NSW + kappa*FSC, then the prior-encoder for k2 substeps
/// (autoencoder frozen) minimizing NSW(posterior, prior). Every substep draws
/// fresh prior inputs and a fresh slice ensemble; loss and gradient share the
/// ensemble within a substep. In fixed-Gaussian mode prior samples come
/// straight from N(0, I) in latent space and phase 2 is skipped.
inline std::pair<EpswaeModel, TrainingLog> train(const TrainConfig& cfg,
                                                 const Dataset& data,
                                                 const StepObserver& observer = {}) {
  const std::size_t n = data.inputs.rows();
  const std::size_t d = data.inputs.cols();
  if (n == 0) throw UsageError("train: empty dataset");
  if (cfg.batch_size < 1 || cfg.batch_size > n)
    throw UsageError("train: batch_size must lie in [1, dataset size]");
  if (cfg.k1 < 1 || cfg.k2 < 1) throw UsageError("train: k1 and k2 must be >= 1");
  if (!(cfg.lr > 0.0)) throw UsageError("train: lr must be > 0");
  if (cfg.fsc_enabled && cfg.weights.kappa > 0.0 && cfg.batch_size < 2)
    throw UsageError("train: FSC term needs batch_size >= 2");

  const bool encoded = (cfg.prior_mode == PriorMode::EncodedPrior);
  Rng root(cfg.seed);

  EpswaeModel model;
  model.latent_dim = cfg.latent_dim;
  std::vector<std::size_t> enc_dims{d};
  enc_dims.insert(enc_dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  enc_dims.push_back(cfg.latent_dim);
  std::vector<std::size_t> dec_dims{cfg.latent_dim};
  dec_dims.insert(dec_dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dec_dims.push_back(d);
  const Activation relu{ActivationKind::ReLU, 0.01};
  Rng rng_init_enc = root.stream("init/encoder");
  Rng rng_init_dec = root.stream("init/decoder");
  model.encoder = MlpNetwork::random(enc_dims, relu, rng_init_enc);
  model.decoder = MlpNetwork::random(dec_dims, relu, rng_init_dec);
  if (encoded) {
    std::vector<std::size_t> pe_dims{cfg.prior_input_dim};
    pe_dims.insert(pe_dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    pe_dims.push_back(cfg.latent_dim);
    Rng rng_init_pe = root.stream("init/prior_encoder");
    model.prior_encoder = MlpNetwork::random(pe_dims, relu, rng_init_pe);
  }

  const AdamConfig adam = cfg.adam_config();
  AdamState opt_enc(model.encoder, adam);
  AdamState opt_dec(model.decoder, adam);
  AdamState opt_pe;
  if (encoded) opt_pe = AdamState(*model.prior_encoder, adam);

  const PriorInputSampler sampler = make_prior_sampler(cfg);
  const EnsembleConfig ens_cfg = cfg.ensemble_config();

  // Independent streams per purpose: consuming one never shifts another, so
  // e.g. disabling the NSW term leaves minibatch order untouched.
  Rng rng_shuffle = root.stream("shuffle");
  Rng rng_xi_ae = root.stream("xi/ae");
  Rng rng_xi_pe = root.stream("xi/pe");
  Rng rng_ens_ae = root.stream("ensemble/ae");
  Rng rng_ens_pe = root.stream("ensemble/pe");
  Rng rng_pe_batch = root.stream("batch/pe");

  TrainingLog log;
  const std::size_t cycles = n / cfg.batch_size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> pe_pool(n);
  std::size_t global_step = 0;

  auto gather = [&](const std::vector<std::size_t>& idx, std::size_t offset,
                    std::size_t count) {
    PointCloud batch(count, d);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < d; ++j) batch(i, j) = data.inputs(idx[offset + i], j);
    return batch;
  };

  auto draw_prior_latents = [&](std::size_t count, Rng& rng) {
    PointCloud y(count, cfg.latent_dim);
    for (double& v : y.raw()) v = rng.normal();
    return y;
  };

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto epoch_t0 = std::chrono::steady_clock::now();
    rng_shuffle.shuffle(order);
    double sum_total = 0.0, sum_rec = 0.0, sum_nsw = 0.0, sum_fsc = 0.0;
    std::size_t ae_steps = 0;

    for (std::size_t cycle = 0; cycle < cycles; ++cycle) {
      const PointCloud x = gather(order, cycle * cfg.batch_size, cfg.batch_size);

      for (std::size_t s = 0; s < cfg.k1; ++s) {
        ++global_step;
        auto [z, cache_e] = mlp_forward(model.encoder, x);
        auto [x_hat, cache_d] = mlp_forward(model.decoder, z);

        SliceEnsemble ens;
        const PointCloud* prior = &z;  // placeholder when the NSW term is off
        PointCloud y;
        if (cfg.weights.beta > 0.0) {
          if (encoded)
            y = mlp_output(*model.prior_encoder,
                           sample_prior_input(sampler, cfg.batch_size, rng_xi_ae));
          else
            y = draw_prior_latents(cfg.batch_size, rng_xi_ae);
          ens = make_slice_ensemble(z, ens_cfg, rng_ens_ae);
          prior = &y;
        }
        AutoencoderLossResult res = autoencoder_loss(
            x, x_hat, z, *prior, /*reference=*/x, cfg.weights, ens, cfg.fsc_enabled);
        detail::require_finite(res.report, epoch, global_step, "AE");

        auto [g_dec, g_z_from_dec] = mlp_backward(model.decoder, cache_d, res.grad_recon);
        DenseMatrix g_z = std::move(res.grad_posterior);
        g_z += g_z_from_dec;
        auto [g_enc, g_x] = mlp_backward(model.encoder, cache_e, g_z);
        (void)g_x;
        opt_enc.step(model.encoder, g_enc);
        opt_dec.step(model.decoder, g_dec);

        log.steps.push_back({epoch, cycle, s, Phase::Autoencoder, res.report});
        sum_total += res.report.total;
        sum_rec += res.report.reconstruction;
        sum_nsw += res.report.nsw;
        sum_fsc += res.report.fsc;
        ++ae_steps;
        if (observer) observer(Phase::Autoencoder, model);
      }

      if (!encoded) continue;
      for (std::size_t s = 0; s < cfg.k2; ++s) {
        ++global_step;
        PointCloud xp;
        if (cfg.pe_fresh_data) {
          std::iota(pe_pool.begin(), pe_pool.end(), 0);
          for (std::size_t i = 0; i < cfg.batch_size; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_pe_batch.below(n - i));
            std::swap(pe_pool[i], pe_pool[j]);
          }
          xp = gather(pe_pool, 0, cfg.batch_size);
        } else {
          xp = x;
        }
        const PointCloud z = mlp_output(model.encoder, xp);
        auto [y, cache_pe] = mlp_forward(
            *model.prior_encoder, sample_prior_input(sampler, cfg.batch_size, rng_xi_pe));
        SliceEnsemble ens = make_slice_ensemble(z, ens_cfg, rng_ens_pe);
        PriorLossResult res = prior_encoder_loss(z, y, ens);
        LossReport report;
        report.nsw = res.value;
        report.total = res.value;
        detail::require_finite(report, epoch, global_step, "PE");

        auto [g_pe, g_xi] = mlp_backward(*model.prior_encoder, cache_pe, res.grad_prior);
        (void)g_xi;
        opt_pe.step(*model.prior_encoder, g_pe);

        log.steps.push_back({epoch, cycle, s, Phase::PriorEncoder, report});
        if (observer) observer(Phase::PriorEncoder, model);
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    if (ae_steps > 0) {
      rec.mean_total_ae = sum_total / static_cast<double>(ae_steps);
      rec.mean_reconstruction = sum_rec / static_cast<double>(ae_steps);
      rec.mean_nsw_ae = sum_nsw / static_cast<double>(ae_steps);
      rec.mean_fsc = sum_fsc / static_cast<double>(ae_steps);
    }
    rec.eval = detail::evaluate_impl(
        model.encoder, model.decoder,
        model.prior_encoder ? &*model.prior_encoder : nullptr, data, cfg);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_t0)
            .count();
    log.epochs.push_back(rec);
  }
  return {std::move(model), std::move(log)};
}

/// SWAE baseline: the same loop with prior samples drawn from a standard
/// Gaussian in latent space and no prior-encoder phase.
inline std::pair<EpswaeModel, TrainingLog> train_swae_baseline(
    TrainConfig cfg, const Dataset& data, const StepObserver& observer = {}) {
  cfg.prior_mode = PriorMode::FixedGaussian;
  return train(cfg, data, observer);
}

}  // namespace epswae
