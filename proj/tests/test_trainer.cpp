#include <catch2/catch_amalgamated.hpp>

#include "epswae/data_gen.hpp"
#include "epswae/trainer.hpp"

using namespace epswae;

namespace {

Dataset small_spiral(std::size_t n, std::uint64_t seed) {
  SpiralConfig cfg;
  cfg.n_samples = n;
  cfg.seed = seed;
  const Spiral3d s = generate_spiral(cfg);
  Rng rng = Rng(seed).stream("embedding");
  return {embed(s.points, make_embedding(40, rng)), s.points};
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 50;
  cfg.L = 2;
  cfg.M = 10;
  cfg.eval_subset = 200;
  cfg.seed = 7;
  return cfg;
}

bool networks_equal(const MlpNetwork& a, const MlpNetwork& b) { return a == b; }

}  // namespace

TEST_CASE("train: zero epochs returns an initialized model and empty log") {
  const Dataset ds = small_spiral(200, 1);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 0;
  const auto [model, log] = train(cfg, ds);
  CHECK(log.steps.empty());
  CHECK(log.epochs.empty());
  CHECK(model.encoder.input_dim() == 40);
  CHECK(model.encoder.output_dim() == 3);
  CHECK(model.decoder.input_dim() == 3);
  CHECK(model.decoder.output_dim() == 40);
  REQUIRE(model.prior_encoder.has_value());
  CHECK(model.prior_encoder->input_dim() == 40);
  CHECK(model.prior_encoder->output_dim() == 3);
  CHECK(model.encoder.all_finite());
}

TEST_CASE("train: argument validation") {
  const Dataset ds = small_spiral(100, 2);
  TrainConfig cfg = tiny_config();
  cfg.batch_size = 101;
  CHECK_THROWS_AS(train(cfg, ds), UsageError);
  cfg = tiny_config();
  cfg.k1 = 0;
  CHECK_THROWS_AS(train(cfg, ds), UsageError);
  cfg = tiny_config();
  cfg.lr = 0.0;
  CHECK_THROWS_AS(train(cfg, ds), UsageError);
}

TEST_CASE("train: plain autoencoder reconstruction improves over epochs") {
  const Dataset ds = small_spiral(600, 3);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 10;
  cfg.weights = LossWeights{1.0, 0.0, 0.0};
  cfg.prior_mode = PriorMode::FixedGaussian;
  const auto [model, log] = train(cfg, ds);
  REQUIRE(log.epochs.size() == 10);
  CHECK(log.epochs.back().mean_reconstruction < log.epochs.front().mean_reconstruction);
}

TEST_CASE("train: freeze correctness across phases") {
  const Dataset ds = small_spiral(200, 4);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 1;

  // After every step, the parameters of the phase that was frozen must be
  // bit-identical to the snapshot taken after the previous step.
  MlpNetwork snap_pe, snap_enc, snap_dec;
  bool have_snapshot = false;
  std::size_t ae_seen = 0, pe_seen = 0;

  const StepObserver observer = [&](Phase phase, const EpswaeModel& m) {
    if (have_snapshot) {
      if (phase == Phase::Autoencoder) {
        CHECK(networks_equal(*m.prior_encoder, snap_pe));
      } else {
        CHECK(networks_equal(m.encoder, snap_enc));
        CHECK(networks_equal(m.decoder, snap_dec));
      }
    }
    snap_pe = *m.prior_encoder;
    snap_enc = m.encoder;
    snap_dec = m.decoder;
    have_snapshot = true;
    (phase == Phase::Autoencoder ? ae_seen : pe_seen) += 1;
  };

  train(cfg, ds, observer);
  CHECK(ae_seen == 4);  // 200/50 cycles * k1=1
  CHECK(pe_seen == 8);  // cycles * k2=2
}

TEST_CASE("train: determinism, same seed gives identical logs and models") {
  const Dataset ds = small_spiral(300, 5);
  const TrainConfig cfg = tiny_config();
  const auto [model_a, log_a] = train(cfg, ds);
  const auto [model_b, log_b] = train(cfg, ds);
  CHECK(networks_equal(model_a.encoder, model_b.encoder));
  CHECK(networks_equal(model_a.decoder, model_b.decoder));
  CHECK(networks_equal(*model_a.prior_encoder, *model_b.prior_encoder));
  REQUIRE(log_a.steps.size() == log_b.steps.size());
  for (std::size_t i = 0; i < log_a.steps.size(); ++i) {
    CHECK(log_a.steps[i].report.total == log_b.steps[i].report.total);
    CHECK(log_a.steps[i].report.nsw == log_b.steps[i].report.nsw);
  }
  REQUIRE(log_a.epochs.size() == log_b.epochs.size());
  for (std::size_t i = 0; i < log_a.epochs.size(); ++i) {
    CHECK(log_a.epochs[i].eval.reconstruction_mse ==
          log_b.epochs[i].eval.reconstruction_mse);
    CHECK(log_a.epochs[i].eval.nsw_prior_posterior ==
          log_b.epochs[i].eval.nsw_prior_posterior);
  }
}

TEST_CASE("train_swae_baseline: no PE phase, equivalence at beta = 0") {
  const Dataset ds = small_spiral(300, 6);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 3;

  const auto [swae_model, swae_log] = train_swae_baseline(cfg, ds);
  CHECK_FALSE(swae_model.prior_encoder.has_value());
  for (const StepRecord& s : swae_log.steps) CHECK(s.phase == Phase::Autoencoder);

  // With beta = 0 the prior never enters the autoencoder updates: the
  // encoder/decoder trajectories of the two modes coincide bit-for-bit.
  cfg.weights.beta = 0.0;
  const auto [epswae_model, epswae_log] = train(cfg, ds);
  const auto [swae0_model, swae0_log] = train_swae_baseline(cfg, ds);
  CHECK(networks_equal(epswae_model.encoder, swae0_model.encoder));
  CHECK(networks_equal(epswae_model.decoder, swae0_model.decoder));
}

TEST_CASE("train: smoke run completes without non-finite losses") {
  const Dataset ds = small_spiral(400, 7);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 5;
  const auto [model, log] = train(cfg, ds);
  for (const StepRecord& s : log.steps) CHECK(std::isfinite(s.report.total));
  const auto [swae_model, swae_log] = train_swae_baseline(cfg, ds);
  for (const StepRecord& s : swae_log.steps) CHECK(std::isfinite(s.report.total));
}

TEST_CASE("train: exploding configuration aborts with diagnostics") {
  const Dataset ds = small_spiral(200, 8);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 50;
  cfg.lr = 1e18;  // guaranteed blow-up
  cfg.weights.alpha = 1e30;
  try {
    train(cfg, ds);
    FAIL("expected NonFiniteLossError");
  } catch (const NonFiniteLossError& e) {
    CHECK(e.epoch() >= 1);
    CHECK(e.step() >= 1);
    CHECK((e.phase() == "AE" || e.phase() == "PE"));
    CHECK_FALSE(e.term().empty());
  }
}

TEST_CASE("evaluate: deterministic and improves with training") {
  const Dataset ds = small_spiral(500, 9);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 8;

  TrainConfig init_cfg = cfg;
  init_cfg.epochs = 0;
  const auto [untrained, log0] = train(init_cfg, ds);
  const auto [trained, log1] = train(cfg, ds);

  const EvalMetrics before = evaluate(untrained, ds, cfg);
  const EvalMetrics before_again = evaluate(untrained, ds, cfg);
  CHECK(before.reconstruction_mse == before_again.reconstruction_mse);
  CHECK(before.nsw_prior_posterior == before_again.nsw_prior_posterior);
  CHECK(before.fsc == before_again.fsc);

  const EvalMetrics after = evaluate(trained, ds, cfg);
  CHECK(after.nsw_prior_posterior < before.nsw_prior_posterior);

  // Trained reconstruction beats the mean predictor (data variance).
  const DenseVector var = column_variances(ds.inputs);
  double mean_var = 0.0;
  for (double v : var) mean_var += v / static_cast<double>(var.size());
  CHECK(after.reconstruction_mse < mean_var);
}
