#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "epswae/dense_matrix.hpp"
#include "epswae/errors.hpp"
#include "epswae/sw_distance.hpp"

namespace epswae {

struct LossWeights {
  double alpha = 1.0;   // reconstruction
  double beta = 0.1;    // NSW prior/posterior
  double kappa = 0.01;  // feature structural consistency
};

struct LossReport {
  double reconstruction = 0.0;
  double nsw = 0.0;
  double fsc = 0.0;
  double total = 0.0;
};

struct ValueGrad {
  double value = 0.0;
  DenseMatrix grad;
};

/// Mean squared error over all samples and coordinates; gradient is with
/// respect to the reconstruction.
inline ValueGrad reconstruction_mse(const PointCloud& x, const PointCloud& x_recon) {
  if (!x.same_shape(x_recon)) throw ShapeError("reconstruction_mse: shape mismatch");
  if (x.rows() == 0) throw UsageError("reconstruction_mse: empty input");
  ValueGrad out;
  out.grad = DenseMatrix(x.rows(), x.cols());
  const double inv = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x_recon.raw()[i] - x.raw()[i];
    out.value += d * d * inv;
    out.grad.raw()[i] = 2.0 * d * inv;
  }
  return out;
}

namespace detail {

/// Strict-upper-triangle pairwise Euclidean distances, flattened row-major
/// (pairs (0,1), (0,2), ..., (N-2,N-1)).
inline DenseVector pairwise_distances(const PointCloud& pts) {
  const std::size_t n = pts.rows();
  DenseVector d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d.push_back(euclidean_distance(pts.row_span(i), pts.row_span(j)));
  return d;
}

}  // namespace detail

/// Feature structural consistency: both pairwise-distance matrices are
/// normalized by their own mean over the strict upper triangle, and the loss
/// is the mean squared difference of the normalized entries. Normalization
/// makes the loss invariant to uniform rescaling of either cloud. The
/// gradient is with respect to the latent points.
inline ValueGrad fsc_loss(const PointCloud& reference, const PointCloud& latents) {
  const std::size_t n = reference.rows();
  if (n != latents.rows()) throw UsageError("fsc_loss: sample counts differ");
  if (n < 2) throw UsageError("fsc_loss: need at least 2 samples");

  const DenseVector dref = detail::pairwise_distances(reference);
  const DenseVector dlat = detail::pairwise_distances(latents);
  const std::size_t npairs = dref.size();
  const double w = 1.0 / static_cast<double>(npairs);

  double mref = 0.0, mlat = 0.0;
  for (std::size_t q = 0; q < npairs; ++q) {
    mref += dref[q] * w;
    mlat += dlat[q] * w;
  }
  if (!(mref > 0.0))
    throw DegenerateInputError("fsc_loss: all reference points identical");
  if (!(mlat > 0.0))
    throw DegenerateInputError("fsc_loss: all latent points identical");

  // loss = w * sum_q (lambda_q - r_q)^2 with lambda = dlat/mlat, r = dref/mref.
  double value = 0.0;
  double cross = 0.0;  // sum_q (lambda_q - r_q) * lambda_q
  for (std::size_t q = 0; q < npairs; ++q) {
    const double lam = dlat[q] / mlat;
    const double diff = lam - dref[q] / mref;
    value += diff * diff * w;
    cross += diff * lam;
  }

  ValueGrad out;
  out.value = value;
  out.grad = DenseMatrix(latents.rows(), latents.cols());
  // d loss / d dlat_q = (2w/mlat) * ((lambda_q - r_q) - w * cross)
  std::size_t q = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++q) {
      if (!(dlat[q] > 0.0)) continue;  // coincident pair: subgradient 0
      const double lam = dlat[q] / mlat;
      const double diff = lam - dref[q] / mref;
      const double dl = (2.0 * w / mlat) * (diff - w * cross);
      const double scale = dl / dlat[q];
      double* gi = out.grad.row(i);
      double* gj = out.grad.row(j);
      const double* zi = latents.row(i);
      const double* zj = latents.row(j);
      for (std::size_t c = 0; c < latents.cols(); ++c) {
        const double delta = (zi[c] - zj[c]) * scale;
        gi[c] += delta;
        gj[c] -= delta;
      }
    }
  }
  return out;
}

struct AutoencoderLossResult {
  LossReport report;
  DenseMatrix grad_recon;      // d total / d x_recon
  DenseMatrix grad_posterior;  // d total / d posterior samples
};

/// Composite autoencoder loss: alpha * MSE(x, x_recon)
/// + beta * NSW(posterior, prior) + kappa * FSC(reference, posterior).
/// The prior cloud is a constant here; gradients flow to the reconstruction
/// and the posterior samples. Terms with zero weight are skipped and reported
/// as 0.
inline AutoencoderLossResult autoencoder_loss(
    const PointCloud& x, const PointCloud& x_recon, const PointCloud& posterior,
    const PointCloud& prior, const PointCloud& reference, const LossWeights& weights,
    const SliceEnsemble& ensemble, bool fsc_enabled = true) {
  if (posterior.rows() != prior.rows() || posterior.cols() != prior.cols())
    throw UsageError("autoencoder_loss: posterior/prior shapes differ");
  if (reference.rows() != posterior.rows())
    throw UsageError("autoencoder_loss: reference/posterior sample counts differ");

  AutoencoderLossResult out;
  ValueGrad rec = reconstruction_mse(x, x_recon);
  out.report.reconstruction = rec.value;
  out.grad_recon = std::move(rec.grad);
  out.grad_recon *= weights.alpha;

  out.grad_posterior = DenseMatrix(posterior.rows(), posterior.cols());
  if (weights.beta > 0.0) {
    NswGradient nsw = nsw_gradient(posterior, prior, ensemble);
    out.report.nsw = nsw.value;
    out.grad_posterior.add_scaled(nsw.grad_mu, weights.beta);
  }
  if (fsc_enabled && weights.kappa > 0.0) {
    ValueGrad fsc = fsc_loss(reference, posterior);
    out.report.fsc = fsc.value;
    out.grad_posterior.add_scaled(fsc.grad, weights.kappa);
  }
  out.report.total = weights.alpha * out.report.reconstruction +
                     weights.beta * out.report.nsw + weights.kappa * out.report.fsc;
  return out;
}

struct PriorLossResult {
  double value = 0.0;
  DenseMatrix grad_prior;
};

/// Prior-encoder loss: NSW(posterior, prior) with the posterior held
/// constant; the gradient flows to the prior samples only.
inline PriorLossResult prior_encoder_loss(const PointCloud& posterior,
                                          const PointCloud& prior,
                                          const SliceEnsemble& ensemble) {
  NswGradient nsw = nsw_gradient(posterior, prior, ensemble);
  return {nsw.value, std::move(nsw.grad_nu)};
}

}  // namespace epswae
