// Command-line front end: dataset generation, training, evaluation,
// latent-space interpolation and nonlinearity benchmarks.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epswae/checkpoint.hpp"
#include "epswae/config_file.hpp"
#include "epswae/data_gen.hpp"
#include "epswae/geodesic.hpp"
#include "epswae/manifest.hpp"
#include "epswae/sw_distance.hpp"
#include "epswae/svg_plot.hpp"
#include "epswae/trainer.hpp"
#include "epswae/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
};

epswae::ConfigMap load_config(const CommonOptions& opts) {
  epswae::ConfigMap cfg;
  if (!opts.config_path.empty()) cfg = epswae::parse_config_file(opts.config_path);
  if (opts.seed) cfg["seed"] = std::to_string(*opts.seed);
  return cfg;
}

/// Out-dir must be writable before any computation starts.
void ensure_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) throw epswae::UsageError("--out is required");
  fs::create_directories(out_dir);
  const fs::path probe = fs::path(out_dir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw epswae::IoError("output directory not writable: " + out_dir);
  }
  fs::remove(probe);
}

std::vector<std::size_t> parse_size_list(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw epswae::UsageError(std::string(what) + ": bad integer '" + item + "'");
    }
  }
  if (out.empty()) throw epswae::UsageError(std::string(what) + ": empty list");
  return out;
}

epswae::SpiralConfig spiral_config_from(const epswae::ConfigMap& c) {
  epswae::SpiralConfig cfg;
  cfg.n_samples = epswae::config_get_size(c, "data.n_samples", cfg.n_samples);
  cfg.turns = epswae::config_get(c, "data.turns", cfg.turns);
  cfg.profile = epswae::parse_radius_profile(
      epswae::config_get(c, "data.radius_profile", std::string("constant")));
  cfg.noise_fraction = epswae::config_get(c, "data.noise_fraction", cfg.noise_fraction);
  cfg.seed = epswae::config_get(c, "seed", std::uint64_t{1});
  return cfg;
}

epswae::TrainConfig train_config_from(const epswae::ConfigMap& c) {
  epswae::TrainConfig cfg;
  cfg.epochs = epswae::config_get_size(c, "train.epochs", cfg.epochs);
  cfg.batch_size = epswae::config_get_size(c, "train.batch_size", cfg.batch_size);
  cfg.lr = epswae::config_get(c, "train.lr", cfg.lr);
  cfg.k1 = epswae::config_get_size(c, "train.k1", cfg.k1);
  cfg.k2 = epswae::config_get_size(c, "train.k2", cfg.k2);
  cfg.weights.alpha = epswae::config_get(c, "train.alpha", cfg.weights.alpha);
  cfg.weights.beta = epswae::config_get(c, "train.beta", cfg.weights.beta);
  cfg.weights.kappa = epswae::config_get(c, "train.kappa", cfg.weights.kappa);
  cfg.p = static_cast<int>(epswae::config_get(c, "train.p", std::uint64_t{2}));
  cfg.L = epswae::config_get_size(c, "train.L", cfg.L);
  cfg.M = epswae::config_get_size(c, "train.M", cfg.M);
  cfg.nonlinearity = epswae::parse_nonlinearity(
      epswae::config_get(c, "train.nonlinearity", std::string("sine-shear")));
  cfg.full_poly_basis = epswae::config_get(c, "train.full_poly_basis", false);
  cfg.latent_dim = epswae::config_get_size(c, "train.latent_dim", cfg.latent_dim);
  if (const auto it = c.find("train.hidden"); it != c.end())
    cfg.hidden = parse_size_list(it->second, "train.hidden");
  cfg.seed = epswae::config_get(c, "seed", std::uint64_t{1});
  cfg.prior_mode = epswae::parse_prior_mode(
      epswae::config_get(c, "train.prior_mode", std::string("encoded")));
  cfg.fsc_enabled = epswae::config_get(c, "train.fsc", true);
  cfg.prior_input_dim =
      epswae::config_get_size(c, "train.prior_input_dim", cfg.prior_input_dim);
  cfg.prior_components =
      epswae::config_get_size(c, "train.prior_components", cfg.prior_components);
  cfg.prior_sigma_scale =
      epswae::config_get(c, "train.prior_sigma_scale", cfg.prior_sigma_scale);
  cfg.pe_fresh_data = epswae::config_get(c, "train.pe_fresh_data", cfg.pe_fresh_data);
  cfg.eval_subset = epswae::config_get_size(c, "train.eval_subset", cfg.eval_subset);
  return cfg;
}

std::map<std::string, std::string> echo_train_config(const epswae::TrainConfig& cfg) {
  std::map<std::string, std::string> m;
  m["train.epochs"] = std::to_string(cfg.epochs);
  m["train.batch_size"] = std::to_string(cfg.batch_size);
  m["train.lr"] = std::to_string(cfg.lr);
  m["train.k1"] = std::to_string(cfg.k1);
  m["train.k2"] = std::to_string(cfg.k2);
  m["train.alpha"] = std::to_string(cfg.weights.alpha);
  m["train.beta"] = std::to_string(cfg.weights.beta);
  m["train.kappa"] = std::to_string(cfg.weights.kappa);
  m["train.p"] = std::to_string(cfg.p);
  m["train.L"] = std::to_string(cfg.L);
  m["train.M"] = std::to_string(cfg.M);
  m["train.nonlinearity"] = epswae::to_string(cfg.nonlinearity);
  m["train.latent_dim"] = std::to_string(cfg.latent_dim);
  m["train.prior_mode"] = epswae::to_string(cfg.prior_mode);
  m["train.fsc"] = cfg.fsc_enabled ? "true" : "false";
  m["train.prior_input_dim"] = std::to_string(cfg.prior_input_dim);
  m["seed"] = std::to_string(cfg.seed);
  return m;
}

json metrics_json(const epswae::EvalMetrics& m) {
  return json{{"reconstruction_mse", m.reconstruction_mse},
              {"nsw_prior_posterior", m.nsw_prior_posterior},
              {"fsc", m.fsc}};
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw epswae::IoError("cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
}

void write_training_log(const epswae::TrainingLog& log, const fs::path& path,
                        bool deterministic) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw epswae::IoError("cannot open for writing: " + path.string());
  for (const epswae::StepRecord& s : log.steps) {
    json j{{"epoch", s.epoch},
           {"cycle", s.cycle},
           {"substep", s.substep},
           {"phase", s.phase == epswae::Phase::Autoencoder ? "AE" : "PE"},
           {"rec", s.report.reconstruction},
           {"nsw", s.report.nsw},
           {"fsc", s.report.fsc},
           {"total", s.report.total}};
    f << j.dump() << '\n';
  }
  for (const epswae::EpochRecord& e : log.epochs) {
    json j{{"epoch", e.epoch},
           {"phase", "epoch"},
           {"mean_total_ae", e.mean_total_ae},
           {"mean_reconstruction", e.mean_reconstruction},
           {"mean_nsw_ae", e.mean_nsw_ae},
           {"mean_fsc", e.mean_fsc},
           {"eval_reconstruction_mse", e.eval.reconstruction_mse},
           {"eval_nsw_prior_posterior", e.eval.nsw_prior_posterior},
           {"eval_fsc", e.eval.fsc}};
    if (!deterministic) j["wall_seconds"] = e.wall_seconds;
    f << j.dump() << '\n';
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

/// Latent sample CSV: tagged posterior samples (evaluation subset) plus an
/// equal count of prior samples. Consumable by `interpolate --latents`.
void write_latent_samples(const epswae::EpswaeModel& model, const epswae::Dataset& ds,
                          const epswae::TrainConfig& cfg, const fs::path& path) {
  const std::size_t n =
      (cfg.eval_subset == 0) ? ds.inputs.rows()
                             : std::min(cfg.eval_subset, ds.inputs.rows());
  epswae::PointCloud xe(n, ds.inputs.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < ds.inputs.cols(); ++j) xe(i, j) = ds.inputs(i, j);
  const epswae::PointCloud posterior = epswae::mlp_output(model.encoder, xe);

  epswae::Rng xi = epswae::Rng(cfg.seed).stream("latents/xi");
  epswae::PointCloud prior;
  if (model.prior_encoder) {
    const epswae::PriorInputSampler sampler = epswae::make_prior_sampler(cfg);
    prior = epswae::mlp_output(*model.prior_encoder,
                               epswae::sample_prior_input(sampler, n, xi));
  } else {
    prior = epswae::PointCloud(n, cfg.latent_dim);
    for (double& v : prior.raw()) v = xi.normal();
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw epswae::IoError("cannot open for writing: " + path.string());
  f << "tag";
  for (std::size_t c = 0; c < posterior.cols(); ++c) f << ",z" << c;
  f << "\n";
  char buf[40];
  auto emit = [&](const epswae::PointCloud& cloud, const char* tag) {
    for (std::size_t i = 0; i < cloud.rows(); ++i) {
      f << tag;
      for (std::size_t c = 0; c < cloud.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", cloud(i, c));
        f << ',' << buf;
      }
      f << "\n";
    }
  };
  emit(posterior, "posterior");
  emit(prior, "prior");
}

/// Reads a latent sample CSV (tag,z0,... or plain z0,...); returns points and
/// per-row tags ("" when untagged).
std::pair<epswae::PointCloud, std::vector<std::string>> load_latent_samples(
    const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw epswae::IoError("cannot open for reading: " + path.string());
  std::string header;
  std::getline(f, header);
  const bool tagged = header.rfind("tag", 0) == 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> tags;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first && tagged) {
        tags.push_back(cell);
        first = false;
        continue;
      }
      first = false;
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw epswae::ParseError("malformed latent value '" + cell + "'", line_no);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw epswae::ParseError("ragged latent CSV", line_no);
    rows.push_back(std::move(row));
    if (!tagged) tags.emplace_back();
  }
  if (rows.empty()) throw epswae::ParseError("empty latent CSV: " + path.string());
  epswae::PointCloud pts(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) pts(i, j) = rows[i][j];
  return {std::move(pts), std::move(tags)};
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

int cmd_gen(const CommonOptions& opts) {
  Timer timer;
  ensure_out_dir(opts.out_dir);
  const epswae::ConfigMap cfg = load_config(opts);
  const epswae::SpiralConfig spiral_cfg = spiral_config_from(cfg);
  const std::size_t ambient = epswae::config_get_size(cfg, "data.ambient_dim", 40);

  epswae::Spiral3d spiral = epswae::generate_spiral(spiral_cfg);
  epswae::Rng embed_rng = epswae::Rng(spiral_cfg.seed).stream("embedding");
  const epswae::EmbeddingMap map = epswae::make_embedding(ambient, embed_rng);
  epswae::Dataset ds{epswae::embed(spiral.points, map), spiral.points};

  const fs::path out(opts.out_dir);
  epswae::save_dataset(ds, out / "dataset.csv");
  epswae::save_matrix_csv(map.matrix, out / "embedding.csv", "a");

  epswae::RunManifest man;
  man.command = "gen";
  man.config = cfg;
  man.config["data.n_samples"] = std::to_string(spiral_cfg.n_samples);
  man.config["data.turns"] = std::to_string(spiral_cfg.turns);
  man.config["data.radius_profile"] = epswae::to_string(spiral_cfg.profile);
  man.config["data.noise_fraction"] = std::to_string(spiral_cfg.noise_fraction);
  man.config["data.ambient_dim"] = std::to_string(ambient);
  man.seed = spiral_cfg.seed;
  man.outputs = {(out / "dataset.csv").string(), (out / "embedding.csv").string()};
  man.wall_seconds = timer.seconds();
  epswae::write_manifest(man, out / "manifest.json");
  std::cout << "gen: wrote " << ds.inputs.rows() << "x" << ds.inputs.cols()
            << " dataset to " << (out / "dataset.csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const CommonOptions& opts, const std::string& data_path,
              const std::string& mode, bool linear_sw, bool no_fsc) {
  Timer timer;
  ensure_out_dir(opts.out_dir);
  const epswae::ConfigMap cfg_map = load_config(opts);
  epswae::TrainConfig cfg = train_config_from(cfg_map);
  if (!mode.empty()) cfg.prior_mode = epswae::parse_prior_mode(mode);
  if (linear_sw) {
    // Plain sliced Wasserstein: one identity transform with M directions.
    cfg.nonlinearity = epswae::NonlinearityKind::Identity;
    cfg.L = 1;
  }
  if (no_fsc) cfg.fsc_enabled = false;

  const epswae::Dataset ds = epswae::load_dataset(data_path);
  auto [model, log] = epswae::train(cfg, ds);
  const epswae::EvalMetrics metrics = epswae::evaluate(model, ds, cfg);

  const fs::path out(opts.out_dir);
  epswae::save_network(model.encoder, out / "encoder.json");
  epswae::save_network(model.decoder, out / "decoder.json");
  std::vector<std::string> outputs{(out / "encoder.json").string(),
                                   (out / "decoder.json").string()};
  if (model.prior_encoder) {
    epswae::save_network(*model.prior_encoder, out / "prior_encoder.json");
    outputs.push_back((out / "prior_encoder.json").string());
  }
  write_training_log(log, out / "train_log.jsonl", opts.deterministic);
  outputs.push_back((out / "train_log.jsonl").string());
  write_json_file(metrics_json(metrics), out / "metrics.json");
  outputs.push_back((out / "metrics.json").string());
  write_latent_samples(model, ds, cfg, out / "latents.csv");
  outputs.push_back((out / "latents.csv").string());

  epswae::RunManifest man;
  man.command = "train";
  man.config = cfg_map;
  for (const auto& [k, v] : echo_train_config(cfg)) man.config[k] = v;
  man.config["mode"] = epswae::to_string(cfg.prior_mode);
  man.seed = cfg.seed;
  man.outputs = std::move(outputs);
  man.input_hashes["dataset"] = epswae::fnv1a_file_hex(data_path);
  man.wall_seconds = timer.seconds();
  epswae::write_manifest(man, out / "manifest.json");
  std::cout << "train: " << epswae::to_string(cfg.prior_mode) << " model, final metrics"
            << " rec=" << metrics.reconstruction_mse
            << " nsw=" << metrics.nsw_prior_posterior << " fsc=" << metrics.fsc << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const CommonOptions& opts, const std::string& data_path,
             const std::string& encoder_path, const std::string& decoder_path,
             const std::string& prior_encoder_path) {
  Timer timer;
  ensure_out_dir(opts.out_dir);
  const epswae::ConfigMap cfg_map = load_config(opts);
  epswae::TrainConfig cfg = train_config_from(cfg_map);

  epswae::EpswaeModel model;
  model.encoder = epswae::load_network(encoder_path);
  model.decoder = epswae::load_network(decoder_path);
  model.latent_dim = model.encoder.output_dim();
  cfg.latent_dim = model.latent_dim;
  if (!prior_encoder_path.empty()) {
    model.prior_encoder = epswae::load_network(prior_encoder_path);
  } else {
    cfg.prior_mode = epswae::PriorMode::FixedGaussian;
  }

  const epswae::Dataset ds = epswae::load_dataset(data_path);
  const epswae::EvalMetrics metrics = epswae::evaluate(model, ds, cfg);

  const fs::path out(opts.out_dir);
  write_json_file(metrics_json(metrics), out / "metrics.json");

  epswae::RunManifest man;
  man.command = "eval";
  man.config = cfg_map;
  man.seed = cfg.seed;
  man.outputs = {(out / "metrics.json").string()};
  man.input_hashes["dataset"] = epswae::fnv1a_file_hex(data_path);
  man.input_hashes["encoder"] = epswae::fnv1a_file_hex(encoder_path);
  man.wall_seconds = timer.seconds();
  epswae::write_manifest(man, out / "manifest.json");
  std::cout << "eval: rec=" << metrics.reconstruction_mse
            << " nsw=" << metrics.nsw_prior_posterior << " fsc=" << metrics.fsc << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// interpolate
// ---------------------------------------------------------------------------

int cmd_interpolate(const CommonOptions& opts, const std::string& data_path,
                    const std::string& encoder_path,
                    const std::string& prior_encoder_path, const std::string& endpoints,
                    const std::string& method, std::size_t k, double h,
                    std::size_t n_samples, bool densify,
                    const std::string& sample_source, const std::string& latents_path) {
  Timer timer;
  ensure_out_dir(opts.out_dir);
  const epswae::ConfigMap cfg_map = load_config(opts);
  epswae::TrainConfig cfg = train_config_from(cfg_map);

  const std::vector<std::size_t> ends = parse_size_list(endpoints, "--endpoints");
  if (ends.size() != 2)
    throw epswae::UsageError("--endpoints: expected two data indices i,j");
  if (method != "geodesic" && method != "linear")
    throw epswae::UsageError("--method must be 'geodesic' or 'linear'");
  if (sample_source != "posterior" && sample_source != "prior" &&
      sample_source != "both")
    throw epswae::UsageError("--sample-source must be posterior, prior or both");

  const epswae::Dataset ds = epswae::load_dataset(data_path);
  const epswae::MlpNetwork encoder = epswae::load_network(encoder_path);
  cfg.latent_dim = encoder.output_dim();
  std::optional<epswae::MlpNetwork> prior_encoder;
  if (!prior_encoder_path.empty())
    prior_encoder = epswae::load_network(prior_encoder_path);
  if (ends[0] >= ds.inputs.rows() || ends[1] >= ds.inputs.rows())
    throw epswae::UsageError("--endpoints out of range for dataset of " +
                             std::to_string(ds.inputs.rows()) + " rows");

  epswae::Rng root(cfg.seed);

  // Endpoint latents.
  epswae::PointCloud endpoint_inputs(2, ds.inputs.cols());
  for (int e = 0; e < 2; ++e)
    for (std::size_t j = 0; j < ds.inputs.cols(); ++j)
      endpoint_inputs(e, j) = ds.inputs(ends[e], j);
  const epswae::PointCloud endpoint_latents = epswae::mlp_output(encoder, endpoint_inputs);

  // Gather the latent sample set.
  auto encode_posterior_subset = [&](std::size_t count) {
    std::vector<std::size_t> pool(ds.inputs.rows());
    std::iota(pool.begin(), pool.end(), 0);
    epswae::Rng subset = root.stream("interp/subset");
    for (std::size_t i = 0; i < count && i + 1 < pool.size(); ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(subset.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    epswae::PointCloud x(count, ds.inputs.cols());
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < ds.inputs.cols(); ++j)
        x(i, j) = ds.inputs(pool[i], j);
    return epswae::mlp_output(encoder, x);
  };

  auto draw_prior_latents = [&](std::size_t count) {
    epswae::Rng xi = root.stream("interp/xi");
    if (prior_encoder) {
      const epswae::PriorInputSampler sampler = epswae::make_prior_sampler(cfg);
      return epswae::mlp_output(*prior_encoder,
                                epswae::sample_prior_input(sampler, count, xi));
    }
    epswae::PointCloud y(count, cfg.latent_dim);
    for (double& v : y.raw()) v = xi.normal();
    return y;
  };

  epswae::LatentSampleSet samples;
  epswae::PointCloud posterior_display, prior_display;
  if (!latents_path.empty()) {
    // Pre-computed latent samples (e.g. the trainer's latents.csv).
    auto [pts, tags] = load_latent_samples(latents_path);
    if (pts.cols() != cfg.latent_dim)
      throw epswae::UsageError("--latents dimension " + std::to_string(pts.cols()) +
                               " does not match the encoder latent dim " +
                               std::to_string(cfg.latent_dim));
    std::size_t n_post = 0, n_prior = 0;
    for (const std::string& t : tags) (t == "prior" ? n_prior : n_post) += 1;
    posterior_display = epswae::PointCloud(n_post, pts.cols());
    prior_display = epswae::PointCloud(n_prior, pts.cols());
    std::size_t ip = 0, iq = 0;
    for (std::size_t i = 0; i < pts.rows(); ++i) {
      const bool is_prior = tags[i] == "prior";
      epswae::PointCloud& dst = is_prior ? prior_display : posterior_display;
      std::size_t& row_i = is_prior ? iq : ip;
      for (std::size_t c = 0; c < pts.cols(); ++c) dst(row_i, c) = pts(i, c);
      ++row_i;
    }
    // Graph rows are assembled posterior block first, then prior block.
    for (std::size_t i = 0; i < n_post; ++i)
      samples.tags.push_back(epswae::SampleTag::Posterior);
    for (std::size_t i = 0; i < n_prior; ++i)
      samples.tags.push_back(epswae::SampleTag::Prior);
  } else {
    if (sample_source == "posterior" || sample_source == "both") {
      posterior_display = encode_posterior_subset(n_samples);
      for (std::size_t i = 0; i < posterior_display.rows(); ++i)
        samples.tags.push_back(epswae::SampleTag::Posterior);
    }
    if (sample_source == "prior" || sample_source == "both") {
      prior_display = draw_prior_latents(n_samples);
      for (std::size_t i = 0; i < prior_display.rows(); ++i)
        samples.tags.push_back(epswae::SampleTag::Prior);
    }
  }
  const std::size_t graph_n =
      posterior_display.rows() + prior_display.rows() + 2;
  samples.points = epswae::PointCloud(graph_n, cfg.latent_dim);
  std::size_t row = 0;
  for (const epswae::PointCloud* cloud : {&posterior_display, &prior_display})
    for (std::size_t i = 0; i < cloud->rows(); ++i, ++row)
      for (std::size_t c = 0; c < cfg.latent_dim; ++c)
        samples.points(row, c) = (*cloud)(i, c);
  for (int e = 0; e < 2; ++e, ++row) {
    for (std::size_t c = 0; c < cfg.latent_dim; ++c)
      samples.points(row, c) = endpoint_latents(e, c);
    samples.tags.push_back(epswae::SampleTag::Endpoint);
  }
  const std::size_t src = graph_n - 2, dst = graph_n - 1;

  // Prior marks for the figure even when the graph uses posterior samples only.
  if (prior_display.rows() == 0) prior_display = draw_prior_latents(n_samples);

  epswae::PointCloud path_points;
  std::vector<long long> node_column;
  json meta{{"method", method},
            {"endpoints", {ends[0], ends[1]}},
            {"n_samples", n_samples},
            {"k", k},
            {"h", h},
            {"densify", densify}};
  if (method == "geodesic") {
    epswae::GeodesicQueryConfig qcfg;
    qcfg.k = k;
    qcfg.h = h;
    qcfg.densify = densify;
    const epswae::GeodesicResult res =
        epswae::network_geodesic(samples, src, dst, qcfg);
    path_points = res.path.points;
    for (std::size_t i = 0; i < path_points.rows(); ++i) {
      if (densify)
        node_column.push_back(i % 2 == 0
                                  ? static_cast<long long>(res.path.nodes[i / 2])
                                  : -1);
      else
        node_column.push_back(static_cast<long long>(res.path.nodes[i]));
    }
    meta["t_final"] = res.t_final;
    meta["energy"] = res.path.energy;
    meta["graph_nodes"] = graph_n;
  } else {
    path_points = epswae::linear_interpolation(endpoint_latents.row_span(0),
                                               endpoint_latents.row_span(1),
                                               std::max<std::size_t>(n_samples, 2));
    node_column.assign(path_points.rows(), -1);
    node_column.front() = static_cast<long long>(src);
    node_column.back() = static_cast<long long>(dst);
  }

  // path.csv: node index (-1 for synthetic points) plus latent coordinates.
  const fs::path out(opts.out_dir);
  {
    std::ofstream f(out / "path.csv", std::ios::binary);
    if (!f) throw epswae::IoError("cannot open for writing: " + (out / "path.csv").string());
    f << "node";
    for (std::size_t c = 0; c < path_points.cols(); ++c) f << ",z" << c;
    f << "\n";
    char buf[40];
    for (std::size_t i = 0; i < path_points.rows(); ++i) {
      f << node_column[i];
      for (std::size_t c = 0; c < path_points.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", path_points(i, c));
        f << ',' << buf;
      }
      f << "\n";
    }
  }
  write_json_file(meta, out / "path_meta.json");
  epswae::write_latent_scatter_svg(out / "scatter.svg", posterior_display,
                                   prior_display, path_points);

  epswae::RunManifest man;
  man.command = "interpolate";
  man.config = cfg_map;
  man.config["method"] = method;
  man.config["k"] = std::to_string(k);
  man.config["h"] = std::to_string(h);
  man.config["n_samples"] = std::to_string(n_samples);
  man.config["endpoints"] = std::to_string(ends[0]) + "," + std::to_string(ends[1]);
  man.config["sample_source"] = sample_source;
  man.seed = cfg.seed;
  man.outputs = {(out / "path.csv").string(), (out / "path_meta.json").string(),
                 (out / "scatter.svg").string()};
  man.input_hashes["dataset"] = epswae::fnv1a_file_hex(data_path);
  man.input_hashes["encoder"] = epswae::fnv1a_file_hex(encoder_path);
  man.wall_seconds = timer.seconds();
  epswae::write_manifest(man, out / "manifest.json");
  std::cout << "interpolate: " << method << " path with " << path_points.rows()
            << " points\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

int cmd_bench(const CommonOptions& opts, const std::string& kinds_arg,
              const std::string& dims_arg, std::size_t reps, std::size_t n,
              std::size_t big_l, std::size_t m, bool full_basis,
              const std::string& data_path) {
  Timer timer;
  ensure_out_dir(opts.out_dir);
  const epswae::ConfigMap cfg_map = load_config(opts);
  const std::uint64_t seed = epswae::config_get(cfg_map, "seed", std::uint64_t{1});

  std::vector<epswae::NonlinearityKind> kinds;
  {
    std::stringstream ss(kinds_arg);
    std::string item;
    while (std::getline(ss, item, ',')) kinds.push_back(epswae::parse_nonlinearity(item));
    if (kinds.empty()) throw epswae::UsageError("--kinds: empty list");
  }
  const std::vector<std::size_t> dims = parse_size_list(dims_arg, "--dims");

  const fs::path out(opts.out_dir);
  std::vector<std::string> outputs;
  {
    std::ofstream f(out / "bench.csv", std::ios::binary);
    if (!f) throw epswae::IoError("cannot open for writing: " + (out / "bench.csv").string());
    f << "kind,d,N,L,M,mean_seconds,std_seconds\n";
    for (const epswae::NonlinearityKind kind : kinds) {
      for (const std::size_t d : dims) {
        epswae::Rng rng = epswae::Rng(seed).stream("bench/" + epswae::to_string(kind) +
                                                   "/" + std::to_string(d));
        const epswae::BenchResult r = epswae::bench_nonlinearity(
            kind, d, n, reps, rng, big_l, m, 2, full_basis);
        f << epswae::to_string(r.kind) << ',' << r.d << ',' << r.n << ',' << r.L << ','
          << r.M << ',' << r.mean_seconds << ',' << r.std_seconds << "\n";
        std::cout << "bench: " << epswae::to_string(r.kind) << " d=" << r.d << " mean "
                  << r.mean_seconds << " s +- " << r.std_seconds << " s\n";
      }
    }
  }
  outputs.push_back((out / "bench.csv").string());

  epswae::RunManifest man;
  man.command = "bench";
  man.config = cfg_map;
  man.config["kinds"] = kinds_arg;
  man.config["dims"] = dims_arg;
  man.config["reps"] = std::to_string(reps);
  man.config["full_basis"] = full_basis ? "true" : "false";
  man.seed = seed;

  // With a dataset: the loss-vs-epoch comparison, all four kinds.
  if (!data_path.empty()) {
    const epswae::Dataset ds = epswae::load_dataset(data_path);
    epswae::TrainConfig cfg = train_config_from(cfg_map);
    std::ofstream f(out / "loss_curves.csv", std::ios::binary);
    if (!f)
      throw epswae::IoError("cannot open for writing: " + (out / "loss_curves.csv").string());
    f << "kind,epoch,mean_total_ae,eval_nsw_prior_posterior\n";
    for (const epswae::NonlinearityKind kind :
         {epswae::NonlinearityKind::Identity, epswae::NonlinearityKind::SineShear,
          epswae::NonlinearityKind::Cubic, epswae::NonlinearityKind::Quintic}) {
      epswae::TrainConfig run_cfg = cfg;
      run_cfg.nonlinearity = kind;
      auto [model, log] = epswae::train(run_cfg, ds);
      for (const epswae::EpochRecord& e : log.epochs)
        f << epswae::to_string(kind) << ',' << e.epoch << ',' << e.mean_total_ae << ','
          << e.eval.nsw_prior_posterior << "\n";
      std::cout << "bench: loss curve " << epswae::to_string(kind) << " final "
                << (log.epochs.empty() ? 0.0 : log.epochs.back().mean_total_ae) << "\n";
    }
    outputs.push_back((out / "loss_curves.csv").string());
    man.input_hashes["dataset"] = epswae::fnv1a_file_hex(data_path);
  }

  man.outputs = std::move(outputs);
  man.wall_seconds = timer.seconds();
  epswae::write_manifest(man, out / "manifest.json");
  return 0;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const epswae::ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const epswae::UsageError*>(&e)) return "usage";
  if (dynamic_cast<const epswae::DegenerateInputError*>(&e)) return "degenerate-input";
  if (dynamic_cast<const epswae::ParseError*>(&e)) return "parse";
  if (dynamic_cast<const epswae::NonFiniteLossError*>(&e)) return "non-finite-loss";
  if (dynamic_cast<const epswae::DisconnectedGraphError*>(&e)) return "disconnected-graph";
  if (dynamic_cast<const epswae::IoError*>(&e)) return "io";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encoded-prior sliced-Wasserstein autoencoder toolkit"};
  app.require_subcommand(1);
  // --h is a domain flag (energy exponent); keep help long-form only.
  app.set_help_flag("--help", "print help");

  CommonOptions common;
  std::string data_path, mode, method = "geodesic", endpoints;
  std::string encoder_path, decoder_path, prior_encoder_path;
  std::string kinds = "sine-shear,cubic,quintic", dims = "3";
  std::string sample_source = "posterior", latents_path;
  std::size_t k = 5, n_samples = 400, reps = 1000, bench_n = 100, bench_l = 5,
              bench_m = 50;
  double h = 2.0;
  bool linear_sw = false, no_fsc = false, densify = false, full_basis = false;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    sub->set_help_flag("--help", "print help");
    auto* copt = sub->add_option("--config", common.config_path, "config file (key = value)");
    if (needs_config) copt->required();
    sub->add_option("--out", common.out_dir, "output directory")->required();
    sub->add_option("--seed", common.seed, "seed override");
    sub->add_flag("--deterministic", common.deterministic,
                  "bit-reproducible outputs (omits wall-clock fields from logs)");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate the embedded spiral dataset");
  add_common(gen, true);

  CLI::App* train = app.add_subcommand("train", "train a model on a dataset");
  add_common(train, true);
  train->add_option("--data", data_path, "dataset CSV")->required();
  train->add_option("--mode", mode, "epswae | swae");
  train->add_flag("--linear-sw", linear_sw, "ablation: replace NSW by linear SW");
  train->add_flag("--no-fsc", no_fsc, "ablation: disable the FSC term");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a trained model");
  add_common(eval, true);
  eval->add_option("--data", data_path, "dataset CSV")->required();
  eval->add_option("--encoder", encoder_path, "encoder checkpoint")->required();
  eval->add_option("--decoder", decoder_path, "decoder checkpoint")->required();
  eval->add_option("--prior-encoder", prior_encoder_path, "prior-encoder checkpoint");

  CLI::App* interp = app.add_subcommand("interpolate", "latent-space interpolation");
  add_common(interp, true);
  interp->add_option("--data", data_path, "dataset CSV")->required();
  interp->add_option("--encoder", encoder_path, "encoder checkpoint")->required();
  interp->add_option("--prior-encoder", prior_encoder_path, "prior-encoder checkpoint");
  interp->add_option("--endpoints", endpoints, "two data indices i,j")->required();
  interp->add_option("--method", method, "geodesic | linear");
  interp->add_option("--k", k, "neighbor count for scales");
  interp->add_option("--h", h, "energy exponent on edge distances");
  interp->add_option("--n-samples", n_samples, "latent samples for the graph");
  interp->add_flag("--densify", densify, "insert midpoints along the path");
  interp->add_option("--sample-source", sample_source, "posterior | prior | both");
  interp->add_option("--latents", latents_path,
                     "latent sample CSV (e.g. the trainer's latents.csv); replaces "
                     "--sample-source");

  CLI::App* bench = app.add_subcommand("bench", "nonlinearity benchmarks");
  add_common(bench, false);
  bench->add_option("--kinds", kinds, "comma list of nonlinearities");
  bench->add_option("--dims", dims, "comma list of dimensions");
  bench->add_option("--reps", reps, "repetitions per configuration");
  bench->add_option("--n", bench_n, "samples per cloud");
  bench->add_option("--L", bench_l, "transforms per evaluation");
  bench->add_option("--M", bench_m, "directions per transform");
  bench->add_flag("--full-basis", full_basis, "full polynomial monomial basis");
  bench->add_option("--data", data_path, "dataset CSV enables the loss-curve comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    json err{{"error", "cli"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(common);
    if (train->parsed()) return cmd_train(common, data_path, mode, linear_sw, no_fsc);
    if (eval->parsed())
      return cmd_eval(common, data_path, encoder_path, decoder_path, prior_encoder_path);
    if (interp->parsed())
      return cmd_interpolate(common, data_path, encoder_path, prior_encoder_path,
                             endpoints, method, k, h, n_samples, densify, sample_source,
                             latents_path);
    if (bench->parsed())
      return cmd_bench(common, kinds, dims, reps, bench_n, bench_l, bench_m, full_basis,
                       data_path);
  } catch (const std::exception& e) {
    json err{{"error", error_kind(e)}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
