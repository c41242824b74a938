#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "epswae/dense_matrix.hpp"
#include "epswae/errors.hpp"
#include "epswae/rng.hpp"
#include "epswae/sw_distance.hpp"

namespace epswae {

// ---------------------------------------------------------------------------
// 3-D spiral
// ---------------------------------------------------------------------------

enum class RadiusProfile { Constant, Growing };

inline std::string to_string(RadiusProfile p) {
  return p == RadiusProfile::Constant ? "constant" : "growing";
}

inline RadiusProfile parse_radius_profile(const std::string& s) {
  if (s == "constant") return RadiusProfile::Constant;
  if (s == "growing") return RadiusProfile::Growing;
  throw UsageError("unknown radius profile '" + s + "'");
}

struct SpiralConfig {
  std::size_t n_samples = 10000;
  double turns = 3.0;
  RadiusProfile profile = RadiusProfile::Constant;
  double noise_fraction = 0.10;  // of the noiseless curve's bounding-box diagonal
  std::uint64_t seed = 1;
};

/// The noiseless parametric curve at arc parameter s in [0, 2*pi*turns]:
/// (r(s) cos s, r(s) sin s, s / 2*pi). Constant profile has r = 1; the
/// growing profile ramps r from 0.5 to 1.5 over the full parameter range.
/// Height is one unit per turn either way.
inline void spiral_curve_point(double s, double turns, RadiusProfile profile,
                               double* out3) {
  const double s_max = 2.0 * std::numbers::pi * turns;
  const double r =
      profile == RadiusProfile::Constant ? 1.0 : 0.5 + (s_max > 0.0 ? s / s_max : 0.0);
  out3[0] = r * std::cos(s);
  out3[1] = r * std::sin(s);
  out3[2] = s / (2.0 * std::numbers::pi);
}

struct Spiral3d {
  PointCloud points;      // N x 3
  DenseVector arc_params; // N
};

/// Samples the curve uniformly in parameter, then adds isotropic Gaussian
/// noise with sigma = noise_fraction * (bounding-box diagonal of the
/// noiseless draw). Noise uses its own stream so the parameter draw is
/// unaffected by the noise setting.
inline Spiral3d generate_spiral(const SpiralConfig& cfg) {
  if (cfg.n_samples < 1) throw UsageError("generate_spiral: n_samples must be >= 1");
  if (!(cfg.noise_fraction >= 0.0 && cfg.noise_fraction < 1.0))
    throw UsageError("generate_spiral: noise_fraction must lie in [0,1)");
  Rng root(cfg.seed);
  Rng rng_param = root.stream("spiral/param");
  Rng rng_noise = root.stream("spiral/noise");
  const double s_max = 2.0 * std::numbers::pi * cfg.turns;

  Spiral3d out;
  out.points = PointCloud(cfg.n_samples, 3);
  out.arc_params.resize(cfg.n_samples);
  double lo[3], hi[3];
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    const double s = rng_param.uniform(0.0, s_max);
    out.arc_params[i] = s;
    spiral_curve_point(s, cfg.turns, cfg.profile, out.points.row(i));
    for (int c = 0; c < 3; ++c) {
      const double v = out.points(i, c);
      lo[c] = (i == 0) ? v : std::min(lo[c], v);
      hi[c] = (i == 0) ? v : std::max(hi[c], v);
    }
  }
  if (cfg.noise_fraction > 0.0 && cfg.n_samples > 1) {
    double diag2 = 0.0;
    for (int c = 0; c < 3; ++c) diag2 += (hi[c] - lo[c]) * (hi[c] - lo[c]);
    const double sigma = cfg.noise_fraction * std::sqrt(diag2);
    for (double& v : out.points.raw()) v += rng_noise.normal(0.0, sigma);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random linear embedding to ambient dimension
// ---------------------------------------------------------------------------

struct EmbeddingMap {
  DenseMatrix matrix;  // ambient_dim x 3, full column rank
};

namespace detail {

/// Column rank via modified Gram-Schmidt (enough for a handful of columns).
inline std::size_t column_rank(const DenseMatrix& a, double tol = 1e-10) {
  std::vector<DenseVector> basis;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    DenseVector v(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) v[i] = a(i, j);
    const double orig = norm(v);
    for (const DenseVector& b : basis) {
      const double c = dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
    const double res = norm(v);
    if (res > tol * std::max(orig, 1.0)) {
      for (double& x : v) x /= res;
      basis.push_back(std::move(v));
    }
  }
  return basis.size();
}

}  // namespace detail

/// Seeded Gaussian ambient_dim x 3 map, redrawn until it has full column rank.
inline EmbeddingMap make_embedding(std::size_t ambient_dim, Rng& rng) {
  if (ambient_dim < 3) throw UsageError("make_embedding: ambient dim must be >= 3");
  EmbeddingMap map;
  do {
    map.matrix = DenseMatrix(ambient_dim, 3);
    for (double& v : map.matrix.raw()) v = rng.normal();
  } while (detail::column_rank(map.matrix) < 3);
  return map;
}

/// Linear image of a 3-D cloud: rows x ambient_dim.
inline PointCloud embed(const PointCloud& points3d, const EmbeddingMap& map) {
  if (points3d.cols() != map.matrix.cols())
    throw ShapeError("embed: points dim " + std::to_string(points3d.cols()) +
                     " vs map input dim " + std::to_string(map.matrix.cols()));
  return matmul_transpose_b(points3d, map.matrix);
}

// ---------------------------------------------------------------------------
// Prior-input samplers
// ---------------------------------------------------------------------------

/// Input distribution for the prior-encoder: an isotropic Gaussian or a
/// mixture of Gaussians with seeded component means. All component scales are
/// multiplied by sigma_scale (1 for training, > 1 to probe outliers).
struct PriorInputSampler {
  enum class Kind { Gaussian, GaussianMixture };
  Kind kind = Kind::Gaussian;
  std::size_t dim = 0;
  DenseMatrix component_means;   // n_components x dim (mixture only)
  DenseVector component_scales;  // per component (mixture only)
  double sigma_scale = 1.0;
};

inline PriorInputSampler make_gaussian_sampler(std::size_t dim, double sigma_scale = 1.0) {
  if (dim < 1) throw UsageError("make_gaussian_sampler: dim must be >= 1");
  if (!(sigma_scale > 0.0)) throw UsageError("sampler: sigma_scale must be > 0");
  return {PriorInputSampler::Kind::Gaussian, dim, {}, {}, sigma_scale};
}

/// Mixture with uniform weights, component means drawn from N(0, 3^2 I) and
/// unit component scales.
inline PriorInputSampler make_mixture_sampler(std::size_t dim, std::size_t n_components,
                                              Rng& rng, double sigma_scale = 1.0) {
  if (dim < 1 || n_components < 1)
    throw UsageError("make_mixture_sampler: dim and n_components must be >= 1");
  if (!(sigma_scale > 0.0)) throw UsageError("sampler: sigma_scale must be > 0");
  PriorInputSampler s;
  s.kind = PriorInputSampler::Kind::GaussianMixture;
  s.dim = dim;
  s.sigma_scale = sigma_scale;
  s.component_means = DenseMatrix(n_components, dim);
  for (double& v : s.component_means.raw()) v = rng.normal(0.0, 3.0);
  s.component_scales = DenseVector(n_components, 1.0);
  return s;
}

inline PointCloud sample_prior_input(const PriorInputSampler& sampler, std::size_t n,
                                     Rng& rng) {
  if (n < 1) throw UsageError("sample_prior_input: n must be >= 1");
  if (!(sampler.sigma_scale > 0.0))
    throw UsageError("sample_prior_input: sigma_scale must be > 0");
  PointCloud out(n, sampler.dim);
  if (sampler.kind == PriorInputSampler::Kind::Gaussian) {
    for (double& v : out.raw()) v = rng.normal(0.0, sampler.sigma_scale);
    return out;
  }
  const std::size_t k = sampler.component_means.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = static_cast<std::size_t>(rng.below(k));
    const double sd = sampler.component_scales[c] * sampler.sigma_scale;
    double* row = out.row(i);
    const double* mean = sampler.component_means.row(c);
    for (std::size_t j = 0; j < sampler.dim; ++j) row[j] = mean[j] + rng.normal(0.0, sd);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset I/O (CSV, lossless for 64-bit values)
// ---------------------------------------------------------------------------

struct Dataset {
  PointCloud inputs;        // N x ambient_dim
  PointCloud ground_truth;  // N x 3, the noisy 3-D points before embedding
};

namespace detail {

inline void append_double(std::string& buf, double v) {
  char tmp[40];
  // 17 significant digits round-trip any finite double.
  const int len = std::snprintf(tmp, sizeof tmp, "%.17g", v);
  buf.append(tmp, static_cast<std::size_t>(len));
}

inline double parse_double(const char*& p, const char* end, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(p, end, v);
  if (res.ec != std::errc{}) throw ParseError("malformed number", line);
  p = res.ptr;
  return v;
}

}  // namespace detail

/// Writes a matrix as CSV with header `prefix0,prefix1,...`.
inline void save_matrix_csv(const DenseMatrix& m, const std::filesystem::path& path,
                            const std::string& prefix) {
  std::string buf;
  buf.reserve(m.size() * 20 + m.cols() * 8);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (j) buf.push_back(',');
    buf += prefix + std::to_string(j);
  }
  buf.push_back('\n');
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) buf.push_back(',');
      detail::append_double(buf, row[j]);
    }
    buf.push_back('\n');
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

namespace detail {

struct CsvContent {
  std::vector<std::string> header;
  DenseMatrix values;
};

inline CsvContent load_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  CsvContent out;
  const char* p = text.data();
  const char* end = p + text.size();
  // Header line.
  {
    const char* nl = std::find(p, end, '\n');
    std::string col;
    for (const char* q = p; q != nl; ++q) {
      if (*q == ',') {
        out.header.push_back(col);
        col.clear();
      } else if (*q != '\r') {
        col.push_back(*q);
      }
    }
    out.header.push_back(col);
    p = (nl == end) ? end : nl + 1;
  }
  const std::size_t cols = out.header.size();
  if (cols == 0 || out.header[0].empty()) throw ParseError("missing header", 1);

  std::vector<double> values;
  std::size_t line = 2;
  std::size_t rows = 0;
  while (p < end) {
    if (*p == '\n') {  // blank line (e.g. trailing newline)
      ++p;
      ++line;
      continue;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) {
        if (p >= end || *p != ',')
          throw ParseError("expected " + std::to_string(cols) + " columns", line);
        ++p;
      }
      values.push_back(parse_double(p, end, line));
    }
    while (p < end && (*p == '\r')) ++p;
    if (p < end) {
      if (*p != '\n') throw ParseError("trailing characters after last column", line);
      ++p;
    }
    ++rows;
    ++line;
  }
  out.values = DenseMatrix(rows, cols);
  std::copy(values.begin(), values.end(), out.values.raw().begin());
  return out;
}

}  // namespace detail

inline DenseMatrix load_matrix_csv(const std::filesystem::path& path) {
  return detail::load_csv(path).values;
}

/// Dataset CSV: columns x0..x{D-1} then gt0,gt1,gt2.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  if (ds.inputs.rows() != ds.ground_truth.rows())
    throw ShapeError("save_dataset: inputs/ground_truth row counts differ");
  std::string buf;
  const std::size_t d = ds.inputs.cols();
  const std::size_t g = ds.ground_truth.cols();
  buf.reserve(ds.inputs.size() * 20);
  for (std::size_t j = 0; j < d; ++j) {
    if (j) buf.push_back(',');
    buf += "x" + std::to_string(j);
  }
  for (std::size_t j = 0; j < g; ++j) buf += ",gt" + std::to_string(j);
  buf.push_back('\n');
  for (std::size_t i = 0; i < ds.inputs.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j) buf.push_back(',');
      detail::append_double(buf, ds.inputs(i, j));
    }
    for (std::size_t j = 0; j < g; ++j) {
      buf.push_back(',');
      detail::append_double(buf, ds.ground_truth(i, j));
    }
    buf.push_back('\n');
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  detail::CsvContent csv = detail::load_csv(path);
  std::size_t n_x = 0;
  while (n_x < csv.header.size() && csv.header[n_x] == "x" + std::to_string(n_x)) ++n_x;
  if (n_x == 0) throw ParseError("missing column x0 in " + path.string(), 1);
  const std::size_t n_gt = csv.header.size() - n_x;
  if (n_gt < 3)
    throw ParseError("missing column gt" + std::to_string(n_gt) + " in " + path.string(),
                     1);
  if (n_gt > 3)
    throw ParseError("unexpected extra columns after gt2 in " + path.string(), 1);
  for (std::size_t j = 0; j < n_gt; ++j)
    if (csv.header[n_x + j] != "gt" + std::to_string(j))
      throw ParseError("missing column gt" + std::to_string(j) + " in " + path.string(), 1);

  Dataset ds;
  ds.inputs = DenseMatrix(csv.values.rows(), n_x);
  ds.ground_truth = DenseMatrix(csv.values.rows(), n_gt);
  for (std::size_t i = 0; i < csv.values.rows(); ++i) {
    for (std::size_t j = 0; j < n_x; ++j) ds.inputs(i, j) = csv.values(i, j);
    for (std::size_t j = 0; j < n_gt; ++j) ds.ground_truth(i, j) = csv.values(i, n_x + j);
  }
  return ds;
}

}  // namespace epswae
