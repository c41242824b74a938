#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "epswae/dense_matrix.hpp"
#include "epswae/errors.hpp"
#include "epswae/rng.hpp"

namespace epswae {

/// A point cloud is a row-major matrix: N samples x d coordinates. Sample
/// counts of the two clouds entering any distance here must match.
using PointCloud = DenseMatrix;

// ---------------------------------------------------------------------------
// 1-D Wasserstein
// ---------------------------------------------------------------------------

/// Closed-form 1-D p-Wasserstein distance between two equal-size empirical
/// measures: sort both lists ascending and average |x_(j) - y_(j)|^p, then
/// take the 1/p power.
inline double wasserstein_1d(std::span<const double> xs, std::span<const double> ys,
                             int p) {
  if (xs.empty()) throw UsageError("wasserstein_1d: empty input");
  if (xs.size() != ys.size())
    throw UsageError("wasserstein_1d: sample counts differ (" +
                     std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) +
                     ")");
  if (p < 1) throw UsageError("wasserstein_1d: p must be >= 1");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    acc += (p == 1) ? d : (p == 2 ? d * d : std::pow(d, p));
  }
  acc /= static_cast<double>(a.size());
  return (p == 1) ? acc : (p == 2 ? std::sqrt(acc) : std::pow(acc, 1.0 / p));
}

// ---------------------------------------------------------------------------
// Random projections
// ---------------------------------------------------------------------------

/// M directions drawn uniformly on S^{d-1} (normalized Gaussian draws),
/// returned as the rows of an M x d matrix.
inline DenseMatrix sample_sphere_directions(std::size_t d, std::size_t m, Rng& rng) {
  if (d < 1 || m < 1) throw UsageError("sample_sphere_directions: d and M must be >= 1");
  DenseMatrix dirs(m, d);
  if (d == 1) {  // S^0 is exactly {-1, +1}
    for (std::size_t i = 0; i < m; ++i) dirs(i, 0) = rng.normal() < 0.0 ? -1.0 : 1.0;
    return dirs;
  }
  for (std::size_t i = 0; i < m; ++i) {
    double n2 = 0.0;
    do {
      n2 = 0.0;
      double* row = dirs.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        row[j] = rng.normal();
        n2 += row[j] * row[j];
      }
    } while (n2 < 1e-24);
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t j = 0; j < d; ++j) dirs.row(i)[j] *= inv;
  }
  return dirs;
}

namespace detail {

inline void argsort(std::span<const double> values, std::vector<std::uint32_t>& order) {
  order.resize(values.size());
  std::iota(order.begin(), order.end(), 0u);
  // Stable sort on value keeps ties in original-index order (determinism).
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
}

/// d_{W,p}^p between two 1-D sample lists given their sort orders.
inline double slice_cost(std::span<const double> a, std::span<const double> b,
                         std::span<const std::uint32_t> oa,
                         std::span<const std::uint32_t> ob, int p) {
  double acc = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double d = a[oa[r]] - b[ob[r]];
    acc += (p == 1) ? std::abs(d) : d * d;
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace detail

/// Sliced Wasserstein distance on a fixed direction set (rows of
/// `directions`): ((1/M) sum_k d_{W,p}^p(proj_k mu, proj_k nu))^{1/p}.
inline double sliced_wasserstein(const PointCloud& mu, const PointCloud& nu, int p,
                                 const DenseMatrix& directions) {
  if (mu.rows() == 0) throw UsageError("sliced_wasserstein: empty cloud");
  if (mu.rows() != nu.rows() || mu.cols() != nu.cols())
    throw UsageError("sliced_wasserstein: cloud shapes differ");
  if (directions.cols() != mu.cols())
    throw ShapeError("sliced_wasserstein: direction dim " +
                     std::to_string(directions.cols()) + " vs cloud dim " +
                     std::to_string(mu.cols()));
  if (p != 1 && p != 2) throw UsageError("sliced_wasserstein: p must be 1 or 2");
  const std::size_t n = mu.rows();
  const std::size_t m = directions.rows();
  const DenseMatrix pu = matmul_transpose_b(mu, directions);  // N x M
  const DenseMatrix pv = matmul_transpose_b(nu, directions);
  std::vector<double> colu(n), colv(n);
  std::vector<std::uint32_t> ou, ov;
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      colu[i] = pu(i, k);
      colv[i] = pv(i, k);
    }
    detail::argsort(colu, ou);
    detail::argsort(colv, ov);
    total += detail::slice_cost(colu, colv, ou, ov, p);
  }
  total /= static_cast<double>(m);
  return (p == 1) ? total : std::sqrt(total);
}

/// Monte-Carlo sliced Wasserstein with M fresh directions.
inline double sliced_wasserstein(const PointCloud& mu, const PointCloud& nu, int p,
                                 std::size_t m, Rng& rng) {
  return sliced_wasserstein(mu, nu, p, sample_sphere_directions(mu.cols(), m, rng));
}

// ---------------------------------------------------------------------------
// Random nonlinear transforms
// ---------------------------------------------------------------------------

enum class NonlinearityKind { Identity, SineShear, Cubic, Quintic };

inline std::string to_string(NonlinearityKind k) {
  switch (k) {
    case NonlinearityKind::Identity: return "identity";
    case NonlinearityKind::SineShear: return "sine-shear";
    case NonlinearityKind::Cubic: return "cubic";
    case NonlinearityKind::Quintic: return "quintic";
  }
  return "?";
}

inline NonlinearityKind parse_nonlinearity(const std::string& s) {
  if (s == "identity" || s == "linear") return NonlinearityKind::Identity;
  if (s == "sine-shear" || s == "sine_shear" || s == "sineshear")
    return NonlinearityKind::SineShear;
  if (s == "cubic") return NonlinearityKind::Cubic;
  if (s == "quintic") return NonlinearityKind::Quintic;
  throw UsageError("unknown nonlinearity '" + s + "'");
}

/// One monomial of a multivariate polynomial, as (variable, power) factors.
struct Monomial {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;
};

/// One random nonlinear map R^d -> R^d used inside the NSW distance.
///
///   Identity    x -> x
///   SineShear   x -> x + gamma * sin(<zeta_hat, x>)          (bounded shear)
///   Cubic       x -> x + a .* u^3,          u = (x - c) / s  (per coordinate)
///   Quintic     x -> x + a .* u^3 + b .* u^5
///
/// When `mix` is non-empty the cubic/quintic map instead uses the full
/// monomial basis of the given odd degrees: x -> x + mix * m(u). The full
/// basis costs O(d^k) per point and exists for the complexity comparison.
struct RandomTransform {
  NonlinearityKind kind = NonlinearityKind::Identity;
  DenseVector zeta_hat;  // unit vector, sine-shear
  DenseVector gamma;     // shear amplitudes, sine-shear
  DenseVector center;    // per-coordinate centering, polynomial arms
  DenseVector scale;     // per-coordinate standardization, polynomial arms
  DenseVector coeff3, coeff5;
  DenseMatrix mix;  // d x n_monomials; non-empty selects the full basis
  std::vector<Monomial> monomials;

  bool full_basis() const { return !mix.empty(); }
};

inline RandomTransform identity_transform() { return {}; }

inline RandomTransform sine_shear_transform(DenseVector zeta, DenseVector gamma) {
  if (zeta.size() != gamma.size())
    throw ShapeError("sine_shear_transform: zeta/gamma size mismatch");
  const double zn = norm(zeta);
  if (!(zn > 0.0)) throw UsageError("sine_shear_transform: zeta must be nonzero");
  for (double& v : zeta) v /= zn;
  RandomTransform t;
  t.kind = NonlinearityKind::SineShear;
  t.zeta_hat = std::move(zeta);
  t.gamma = std::move(gamma);
  return t;
}

inline RandomTransform coordinate_poly_transform(NonlinearityKind kind,
                                                 DenseVector center, DenseVector scale,
                                                 DenseVector coeff3, DenseVector coeff5) {
  if (kind != NonlinearityKind::Cubic && kind != NonlinearityKind::Quintic)
    throw UsageError("coordinate_poly_transform: kind must be cubic or quintic");
  RandomTransform t;
  t.kind = kind;
  t.center = std::move(center);
  t.scale = std::move(scale);
  t.coeff3 = std::move(coeff3);
  t.coeff5 = std::move(coeff5);
  return t;
}

/// All exponent vectors over d variables with total degree exactly `degree`,
/// in lexicographic order, appended to `out` in sparse (index, power) form.
inline void enumerate_monomials(std::size_t d, unsigned degree,
                                std::vector<Monomial>& out) {
  std::vector<std::uint32_t> expo(d, 0);
  auto rec = [&](auto&& self, std::size_t var, unsigned remaining) -> void {
    if (var + 1 == d) {
      expo[var] = remaining;
      Monomial m;
      for (std::uint32_t j = 0; j < d; ++j)
        if (expo[j] > 0) m.factors.emplace_back(j, expo[j]);
      out.push_back(std::move(m));
      expo[var] = 0;
      return;
    }
    for (unsigned e = 0; e <= remaining; ++e) {
      expo[var] = e;
      self(self, var + 1, remaining - e);
    }
    expo[var] = 0;
  };
  rec(rec, 0, degree);
}

inline std::vector<Monomial> poly_basis_monomials(NonlinearityKind kind, std::size_t d) {
  std::vector<Monomial> out;
  enumerate_monomials(d, 3, out);
  if (kind == NonlinearityKind::Quintic) enumerate_monomials(d, 5, out);
  return out;
}

/// Standard deviation of a monomial of iid standard normals:
/// sqrt(prod (2a_i - 1)!!). Used to normalize polynomial terms so that every
/// nonlinearity perturbs on the same scale as the shear amplitudes.
inline double monomial_std_normal(const Monomial& m) {
  double var = 1.0;
  for (const auto& [idx, pw] : m.factors) {
    double dfact = 1.0;  // (2a-1)!!
    for (std::uint32_t k = 1; k <= pw; ++k) dfact *= static_cast<double>(2 * k - 1);
    var *= dfact;
  }
  return std::sqrt(var);
}

namespace detail {

inline double eval_monomial(const Monomial& m, const double* u) {
  double acc = 1.0;
  for (const auto& [idx, pw] : m.factors) {
    double x = u[idx];
    double p = x;
    for (std::uint32_t e = 1; e < pw; ++e) p *= x;
    acc *= p;
  }
  return acc;
}

/// d(monomial)/d(u_j) evaluated at u, for one factor index position.
inline double eval_monomial_partial(const Monomial& m, const double* u,
                                    std::size_t factor_pos) {
  double acc = static_cast<double>(m.factors[factor_pos].second);
  for (std::size_t f = 0; f < m.factors.size(); ++f) {
    const auto& [idx, pw] = m.factors[f];
    const std::uint32_t eff = (f == factor_pos) ? pw - 1 : pw;
    double x = u[idx];
    double p = 1.0;
    for (std::uint32_t e = 0; e < eff; ++e) p *= x;
    acc *= p;
  }
  return acc;
}

}  // namespace detail

/// Push-forward of a cloud through one random transform (row-wise).
inline PointCloud apply_nonlinearity(const RandomTransform& t, const PointCloud& cloud) {
  const std::size_t n = cloud.rows();
  const std::size_t d = cloud.cols();
  switch (t.kind) {
    case NonlinearityKind::Identity:
      return cloud;
    case NonlinearityKind::SineShear: {
      if (t.zeta_hat.size() != d)
        throw ShapeError("apply_nonlinearity: transform dim " +
                         std::to_string(t.zeta_hat.size()) + " vs cloud dim " +
                         std::to_string(d));
      PointCloud out = cloud;
      for (std::size_t i = 0; i < n; ++i) {
        double* row = out.row(i);
        const double s = std::sin(dot(t.zeta_hat, cloud.row_span(i)));
        for (std::size_t j = 0; j < d; ++j) row[j] += t.gamma[j] * s;
      }
      return out;
    }
    case NonlinearityKind::Cubic:
    case NonlinearityKind::Quintic: {
      if (t.center.size() != d)
        throw ShapeError("apply_nonlinearity: transform dim " +
                         std::to_string(t.center.size()) + " vs cloud dim " +
                         std::to_string(d));
      PointCloud out = cloud;
      std::vector<double> u(d);
      for (std::size_t i = 0; i < n; ++i) {
        const double* in = cloud.row(i);
        double* row = out.row(i);
        for (std::size_t j = 0; j < d; ++j) u[j] = (in[j] - t.center[j]) / t.scale[j];
        if (!t.full_basis()) {
          for (std::size_t j = 0; j < d; ++j) {
            const double u3 = u[j] * u[j] * u[j];
            row[j] += t.coeff3[j] * u3;
            if (t.kind == NonlinearityKind::Quintic)
              row[j] += t.coeff5[j] * u3 * u[j] * u[j];
          }
        } else {
          for (std::size_t q = 0; q < t.monomials.size(); ++q) {
            const double mv = detail::eval_monomial(t.monomials[q], u.data());
            for (std::size_t j = 0; j < d; ++j) row[j] += t.mix(j, q) * mv;
          }
        }
      }
      return out;
    }
  }
  return cloud;
}

/// grad_x += J_T(x_i)^T g_i for every row, where g is the gradient with
/// respect to the transformed cloud T(x).
inline void accumulate_jacobian_transpose(const RandomTransform& t,
                                          const PointCloud& cloud,
                                          const DenseMatrix& grad_transformed,
                                          DenseMatrix& grad_x) {
  const std::size_t n = cloud.rows();
  const std::size_t d = cloud.cols();
  switch (t.kind) {
    case NonlinearityKind::Identity:
      grad_x += grad_transformed;
      return;
    case NonlinearityKind::SineShear: {
      for (std::size_t i = 0; i < n; ++i) {
        const double* g = grad_transformed.row(i);
        double* out = grad_x.row(i);
        const double c = std::cos(dot(t.zeta_hat, cloud.row_span(i)));
        const double gg = dot(t.gamma, grad_transformed.row_span(i));
        for (std::size_t j = 0; j < d; ++j) out[j] += g[j] + t.zeta_hat[j] * gg * c;
      }
      return;
    }
    case NonlinearityKind::Cubic:
    case NonlinearityKind::Quintic: {
      std::vector<double> u(d);
      for (std::size_t i = 0; i < n; ++i) {
        const double* in = cloud.row(i);
        const double* g = grad_transformed.row(i);
        double* out = grad_x.row(i);
        for (std::size_t j = 0; j < d; ++j) u[j] = (in[j] - t.center[j]) / t.scale[j];
        if (!t.full_basis()) {
          for (std::size_t j = 0; j < d; ++j) {
            const double u2 = u[j] * u[j];
            double deriv = 1.0 + 3.0 * t.coeff3[j] * u2 / t.scale[j];
            if (t.kind == NonlinearityKind::Quintic)
              deriv += 5.0 * t.coeff5[j] * u2 * u2 / t.scale[j];
            out[j] += g[j] * deriv;
          }
        } else {
          for (std::size_t j = 0; j < d; ++j) out[j] += g[j];
          for (std::size_t q = 0; q < t.monomials.size(); ++q) {
            const Monomial& mono = t.monomials[q];
            double w = 0.0;  // <mix column q, g_i>
            for (std::size_t j = 0; j < d; ++j) w += t.mix(j, q) * g[j];
            for (std::size_t f = 0; f < mono.factors.size(); ++f) {
              const std::uint32_t j = mono.factors[f].first;
              out[j] += w * detail::eval_monomial_partial(mono, u.data(), f) / t.scale[j];
            }
          }
        }
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Slice ensembles and the NSW distance
// ---------------------------------------------------------------------------

struct EnsembleConfig {
  std::size_t L = 5;  // nonlinear transforms
  std::size_t M = 50; // projection directions per transform
  int p = 2;
  NonlinearityKind kind = NonlinearityKind::SineShear;
  bool full_poly_basis = false;
};

/// The frozen randomness of one NSW evaluation: L transforms, each with its
/// own M unit directions. Freezing lets a training step evaluate the loss and
/// its gradient on identical slices.
struct SliceEnsemble {
  std::vector<RandomTransform> transforms;
  std::vector<DenseMatrix> directions;  // per transform, M x d with unit rows
  int p = 2;

  std::size_t size() const { return transforms.size(); }
  std::size_t dim() const { return directions.empty() ? 0 : directions.front().cols(); }
};

/// Draws an ensemble whose transform parameters are Gaussian with mean 0 and
/// per-coordinate variance matching that of `reference` (zero-variance
/// coordinates fall back to unit scale so transforms stay well defined).
/// Directions are drawn fresh per transform.
inline SliceEnsemble make_slice_ensemble(const PointCloud& reference,
                                         const EnsembleConfig& cfg, Rng& rng) {
  if (reference.rows() == 0) throw UsageError("make_slice_ensemble: empty reference");
  if (cfg.L < 1 || cfg.M < 1) throw UsageError("make_slice_ensemble: L and M must be >= 1");
  if (cfg.p != 1 && cfg.p != 2) throw UsageError("make_slice_ensemble: p must be 1 or 2");
  const std::size_t d = reference.cols();
  const DenseVector mean = column_means(reference);
  DenseVector sigma = column_variances(reference);
  for (double& v : sigma) v = (v > 0.0) ? std::sqrt(v) : 1.0;

  SliceEnsemble ens;
  ens.p = cfg.p;
  for (std::size_t l = 0; l < cfg.L; ++l) {
    RandomTransform t;
    switch (cfg.kind) {
      case NonlinearityKind::Identity:
        t = identity_transform();
        break;
      case NonlinearityKind::SineShear: {
        DenseVector zeta(d), gamma(d);
        for (std::size_t j = 0; j < d; ++j) zeta[j] = rng.normal(0.0, sigma[j]);
        for (std::size_t j = 0; j < d; ++j) gamma[j] = rng.normal(0.0, sigma[j]);
        // Degenerate zero draw: fall back to the first axis.
        if (!(norm(zeta) > 0.0)) zeta[0] = 1.0;
        t = sine_shear_transform(std::move(zeta), std::move(gamma));
        break;
      }
      case NonlinearityKind::Cubic:
      case NonlinearityKind::Quintic: {
        t.kind = cfg.kind;
        t.center = mean;
        t.scale = sigma;
        // Odd powers of a standardized coordinate have std sqrt((2a-1)!!);
        // dividing by it keeps every arm's perturbation on the shear scale.
        if (!cfg.full_poly_basis) {
          const double norm3 = std::sqrt(15.0);   // std of u^3, u ~ N(0,1)
          const double norm5 = std::sqrt(945.0);  // std of u^5
          t.coeff3.resize(d);
          t.coeff5.resize(d, 0.0);
          for (std::size_t j = 0; j < d; ++j)
            t.coeff3[j] = rng.normal(0.0, sigma[j] / norm3);
          if (cfg.kind == NonlinearityKind::Quintic)
            for (std::size_t j = 0; j < d; ++j)
              t.coeff5[j] = rng.normal(0.0, sigma[j] / norm5);
        } else {
          t.monomials = poly_basis_monomials(cfg.kind, d);
          const double inv_sqrt_q = 1.0 / std::sqrt(static_cast<double>(t.monomials.size()));
          t.mix = DenseMatrix(d, t.monomials.size());
          for (std::size_t q = 0; q < t.monomials.size(); ++q) {
            const double inv_std = 1.0 / monomial_std_normal(t.monomials[q]);
            for (std::size_t j = 0; j < d; ++j)
              t.mix(j, q) = rng.normal(0.0, sigma[j] * inv_sqrt_q * inv_std);
          }
        }
        break;
      }
    }
    ens.transforms.push_back(std::move(t));
    ens.directions.push_back(sample_sphere_directions(d, cfg.M, rng));
  }
  return ens;
}

struct NswGradient {
  double value = 0.0;
  DenseMatrix grad_mu;
  DenseMatrix grad_nu;
};

namespace detail {

template <bool WithGrad>
inline NswGradient nsw_core(const PointCloud& mu, const PointCloud& nu,
                            const SliceEnsemble& ens) {
  if (mu.rows() == 0) throw UsageError("nsw_distance: empty cloud");
  if (mu.rows() != nu.rows() || mu.cols() != nu.cols())
    throw UsageError("nsw_distance: cloud shapes differ");
  if (ens.size() == 0) throw UsageError("nsw_distance: empty ensemble");
  if (ens.dim() != mu.cols())
    throw ShapeError("nsw_distance: ensemble dim " + std::to_string(ens.dim()) +
                     " vs cloud dim " + std::to_string(mu.cols()));
  const int p = ens.p;
  const std::size_t n = mu.rows();
  const std::size_t big_l = ens.size();

  NswGradient res;
  if constexpr (WithGrad) {
    res.grad_mu = DenseMatrix(mu.rows(), mu.cols());
    res.grad_nu = DenseMatrix(nu.rows(), nu.cols());
  }

  std::vector<double> colu(n), colv(n);
  std::vector<std::vector<std::uint32_t>> orders_u, orders_v;
  for (std::size_t l = 0; l < big_l; ++l) {
    const RandomTransform& t = ens.transforms[l];
    const DenseMatrix& dirs = ens.directions[l];
    const std::size_t m = dirs.rows();
    const PointCloud tu = apply_nonlinearity(t, mu);
    const PointCloud tv = apply_nonlinearity(t, nu);
    const DenseMatrix pu = matmul_transpose_b(tu, dirs);  // N x M
    const DenseMatrix pv = matmul_transpose_b(tv, dirs);

    orders_u.assign(m, {});
    orders_v.assign(m, {});
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        colu[i] = pu(i, k);
        colv[i] = pv(i, k);
      }
      argsort(colu, orders_u[k]);
      argsort(colv, orders_v[k]);
      s += slice_cost(colu, colv, orders_u[k], orders_v[k], p);
    }
    s /= static_cast<double>(m);
    const double sw = (p == 1) ? s : std::sqrt(s);
    res.value += sw / static_cast<double>(big_l);

    if constexpr (WithGrad) {
      if (!(s > 0.0)) continue;  // identical slices; zero (sub)gradient
      // d value / d proj = S^{1/p-1} |diff|^{p-1} sign(diff) / (L*M*N)
      const double factor = ((p == 1) ? 1.0 : 1.0 / sw) /
                            static_cast<double>(big_l * m * n);
      DenseMatrix cu(n, m), cv(n, m);
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t r = 0; r < n; ++r) {
          const std::uint32_t i = orders_u[k][r];
          const std::uint32_t j = orders_v[k][r];
          const double diff = pu(i, k) - pv(j, k);
          const double g =
              factor * ((p == 1) ? (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0))
                                 : diff);
          cu(i, k) = g;
          cv(j, k) = -g;
        }
      }
      const DenseMatrix gu = matmul(cu, dirs);  // N x d, grad wrt transformed mu
      const DenseMatrix gv = matmul(cv, dirs);
      accumulate_jacobian_transpose(t, mu, gu, res.grad_mu);
      accumulate_jacobian_transpose(t, nu, gv, res.grad_nu);
    }
  }
  return res;
}

}  // namespace detail

/// Nonlinear sliced Wasserstein distance on a frozen ensemble:
/// (1/L) sum_l d_SW(T_l mu, T_l nu), deterministic given the ensemble.
inline double nsw_distance(const PointCloud& mu, const PointCloud& nu,
                           const SliceEnsemble& ens) {
  return detail::nsw_core<false>(mu, nu, ens).value;
}

/// NSW value plus its gradient with respect to every sample of both clouds,
/// holding the sort-induced matchings fixed (valid almost everywhere; zero on
/// the exact-tie set).
inline NswGradient nsw_gradient(const PointCloud& mu, const PointCloud& nu,
                                const SliceEnsemble& ens) {
  return detail::nsw_core<true>(mu, nu, ens);
}

// ---------------------------------------------------------------------------
// Nonlinearity micro-benchmark
// ---------------------------------------------------------------------------

struct BenchResult {
  NonlinearityKind kind = NonlinearityKind::SineShear;
  std::size_t d = 0, n = 0, L = 0, M = 0;
  std::size_t repetitions = 0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
};

/// Times `repetitions` full NSW evaluations (ensemble draw + distance, the
/// cost one training step pays) between two fixed Gaussian clouds.
inline BenchResult bench_nonlinearity(NonlinearityKind kind, std::size_t d,
                                      std::size_t n, std::size_t repetitions, Rng& rng,
                                      std::size_t big_l = 5, std::size_t m = 50,
                                      int p = 2, bool full_poly_basis = false) {
  if (repetitions < 1) throw UsageError("bench_nonlinearity: repetitions must be >= 1");
  PointCloud mu(n, d), nu(n, d);
  for (double& v : mu.raw()) v = rng.normal();
  for (double& v : nu.raw()) v = rng.normal();
  EnsembleConfig cfg{big_l, m, p, kind, full_poly_basis};

  double sink = 0.0;
  std::vector<double> seconds(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    SliceEnsemble ens = make_slice_ensemble(mu, cfg, rng);
    sink += nsw_distance(mu, nu, ens);
    const auto t1 = std::chrono::steady_clock::now();
    seconds[r] = std::chrono::duration<double>(t1 - t0).count();
  }
  BenchResult res{kind, d, n, big_l, m, repetitions, 0.0, 0.0};
  for (double s : seconds) res.mean_seconds += s;
  res.mean_seconds /= static_cast<double>(repetitions);
  if (repetitions > 1) {
    double acc = 0.0;
    for (double s : seconds) acc += (s - res.mean_seconds) * (s - res.mean_seconds);
    res.std_seconds = std::sqrt(acc / static_cast<double>(repetitions - 1));
  }
  // Keep the optimizer from dropping the timed work.
  if (!std::isfinite(sink)) throw DegenerateInputError("bench_nonlinearity: non-finite distance");
  return res;
}

}  // namespace epswae
