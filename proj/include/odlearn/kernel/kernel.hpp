#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace odlearn::kernel {

/// Diagonal-scaled squared-exponential kernel
/// k(x, y) = exp(-sum_i (x_i - y_i)^2 / (2 sigma_i^2)).
struct GaussianKernelParams {
  Eigen::VectorXd bandwidths;

  static GaussianKernelParams isotropic(int dim, double sigma) {
    return {Eigen::VectorXd::Constant(dim, sigma)};
  }
};

double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const GaussianKernelParams& params);

/// Empirical mean embedding of a sample set: the weighted average of kernel
/// sections. Weights default to uniform 1/n.
struct EmbeddedDataset {
  Eigen::MatrixXd samples;  // n x d, standardized features
  Eigen::VectorXd weights;  // non-negative, sums to 1
  std::string source_id;

  static EmbeddedDataset from_samples(Eigen::MatrixXd samples, std::string source_id = {});
};

/// <Phi_a, Phi_b> = sum_ij w_i w_j k(a_i, b_j). Deterministic pairwise
/// summation; throws PreconditionError on dimension mismatch.
double embedding_inner(const EmbeddedDataset& a, const EmbeddedDataset& b,
                       const GaussianKernelParams& params);

/// Squared RKHS distance ||Phi_a - Phi_b||^2, clamped at zero.
double rkhs_distance2(const EmbeddedDataset& a, const EmbeddedDataset& b,
                      const GaussianKernelParams& params);

/// N x N matrix of embedding inner products (parallel over entries).
Eigen::MatrixXd embedding_inner_matrix(const std::vector<EmbeddedDataset>& datasets,
                                       const GaussianKernelParams& params);

/// N x N matrix of squared RKHS distances.
Eigen::MatrixXd rkhs_distance_matrix(const std::vector<EmbeddedDataset>& datasets,
                                     const GaussianKernelParams& params);

/// rows x cols matrix of squared RKHS distances between two dataset lists.
Eigen::MatrixXd cross_rkhs_distance_matrix(const std::vector<EmbeddedDataset>& rows,
                                           const std::vector<EmbeddedDataset>& cols,
                                           const GaussianKernelParams& params);

/// Outer Gaussian kernel on embeddings:
/// K_ab = exp(-||Phi_a - Phi_b||^2 / (2 s^2)); symmetric PSD, unit diagonal.
Eigen::MatrixXd embedding_kernel_matrix(const std::vector<EmbeddedDataset>& datasets,
                                        double outer_bandwidth,
                                        const GaussianKernelParams& params);

/// Numerically careful sum: recursive pairwise reduction, fixed order.
double pairwise_sum(std::span<const double> values);

/// Random Fourier feature map z(x) = sqrt(2/D) cos(W x + b) whose inner
/// products approximate the Gaussian kernel with the stored bandwidths.
struct RffMap {
  Eigen::MatrixXd frequencies;  // D x d, rows ~ N(0, diag(1/sigma^2))
  Eigen::VectorXd phases;       // D, ~ U[0, 2*pi)
  Eigen::VectorXd bandwidths;
  std::uint64_t seed = 0;

  static RffMap make(int dim, int feature_count, const Eigen::VectorXd& bandwidths,
                     std::uint64_t seed);
};

Eigen::VectorXd rff_features(const Eigen::VectorXd& x, const RffMap& map);
/// Row-wise features for a sample matrix (n x d) -> (n x D).
Eigen::MatrixXd rff_features_matrix(const Eigen::MatrixXd& x, const RffMap& map);

/// Per-dimension affine shift/scale fitted on a training pool.
/// Constant dimensions get scale 1 (passthrough) and are flagged.
struct FeatureStandardizer {
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;
  std::vector<bool> constant_dims;

  static FeatureStandardizer fit(const Eigen::MatrixXd& pool);
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply_matrix(const Eigen::MatrixXd& x) const;
};

}  // namespace odlearn::kernel
