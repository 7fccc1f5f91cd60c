#include "odlearn/kernel/kernel.hpp"

#include <cmath>

#include "odlearn/common/error.hpp"
#include "odlearn/common/parallel.hpp"
#include "odlearn/common/rng.hpp"

namespace odlearn::kernel {

namespace {

void check_bandwidths(const GaussianKernelParams& params, Eigen::Index dim) {
  if (params.bandwidths.size() != dim) {
    throw PreconditionError("kernel: bandwidth/feature dimension mismatch");
  }
  for (Eigen::Index i = 0; i < params.bandwidths.size(); ++i) {
    if (!(params.bandwidths[i] > 0.0)) {
      throw PreconditionError("kernel: bandwidths must be positive");
    }
  }
}

// Samples scaled by 1/sigma so that k(x,y) = exp(-|u-v|^2 / 2).
Eigen::MatrixXd scale_samples(const Eigen::MatrixXd& samples,
                              const GaussianKernelParams& params) {
  return samples * params.bandwidths.cwiseInverse().asDiagonal();
}

// Weighted double kernel sum between two pre-scaled sample sets.
double weighted_kernel_sum(const Eigen::MatrixXd& u, const Eigen::VectorXd& wu,
                           const Eigen::MatrixXd& v, const Eigen::VectorXd& wv) {
  const Eigen::VectorXd u2 = u.rowwise().squaredNorm();
  const Eigen::VectorXd v2 = v.rowwise().squaredNorm();
  Eigen::MatrixXd dist2 = -2.0 * (u * v.transpose());
  dist2.colwise() += u2;
  dist2.rowwise() += v2.transpose();
  dist2 = dist2.cwiseMax(0.0);
  const Eigen::VectorXd row_sums = (-0.5 * dist2).array().exp().matrix() * wv;

  std::vector<double> terms(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) terms[static_cast<std::size_t>(i)] = wu[i] * row_sums[i];
  return pairwise_sum(terms);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const GaussianKernelParams& params) {
  if (x.size() != y.size()) throw PreconditionError("kernel_eval: dimension mismatch");
  check_bandwidths(params, x.size());
  double exponent = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = (x[i] - y[i]) / params.bandwidths[i];
    exponent += d * d;
  }
  return std::exp(-0.5 * exponent);
}

EmbeddedDataset EmbeddedDataset::from_samples(Eigen::MatrixXd samples, std::string source_id) {
  if (samples.rows() == 0) {
    throw PreconditionError("EmbeddedDataset: empty sample set has no embedding");
  }
  EmbeddedDataset d;
  d.weights = Eigen::VectorXd::Constant(samples.rows(), 1.0 / static_cast<double>(samples.rows()));
  d.samples = std::move(samples);
  d.source_id = std::move(source_id);
  return d;
}

double embedding_inner(const EmbeddedDataset& a, const EmbeddedDataset& b,
                       const GaussianKernelParams& params) {
  if (a.samples.cols() != b.samples.cols()) {
    throw PreconditionError("embedding_inner: feature dimension mismatch");
  }
  check_bandwidths(params, a.samples.cols());
  return weighted_kernel_sum(scale_samples(a.samples, params), a.weights,
                             scale_samples(b.samples, params), b.weights);
}

double rkhs_distance2(const EmbeddedDataset& a, const EmbeddedDataset& b,
                      const GaussianKernelParams& params) {
  const double d2 = embedding_inner(a, a, params) + embedding_inner(b, b, params) -
                    2.0 * embedding_inner(a, b, params);
  return std::max(d2, 0.0);
}

Eigen::MatrixXd embedding_inner_matrix(const std::vector<EmbeddedDataset>& datasets,
                                       const GaussianKernelParams& params) {
  const std::size_t n = datasets.size();
  if (n == 0) throw PreconditionError("embedding_inner_matrix: no datasets");
  for (const auto& d : datasets) check_bandwidths(params, d.samples.cols());

  std::vector<Eigen::MatrixXd> scaled(n);
  parallel_for(0, n, [&](std::size_t i) { scaled[i] = scale_samples(datasets[i].samples, params); });

  Eigen::MatrixXd gram(n, n);
  // Upper triangle (including diagonal), flattened for parallel dispatch.
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  entries.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) entries.emplace_back(i, j);

  parallel_for(0, entries.size(), [&](std::size_t e) {
    const auto [i, j] = entries[e];
    const double val =
        weighted_kernel_sum(scaled[i], datasets[i].weights, scaled[j], datasets[j].weights);
    gram(i, j) = val;
    gram(j, i) = val;
  });
  return gram;
}

Eigen::MatrixXd rkhs_distance_matrix(const std::vector<EmbeddedDataset>& datasets,
                                     const GaussianKernelParams& params) {
  const Eigen::MatrixXd gram = embedding_inner_matrix(datasets, params);
  const Eigen::VectorXd diag = gram.diagonal();
  Eigen::MatrixXd dist2 = -2.0 * gram;
  dist2.colwise() += diag;
  dist2.rowwise() += diag.transpose();
  return dist2.cwiseMax(0.0);
}

Eigen::MatrixXd cross_rkhs_distance_matrix(const std::vector<EmbeddedDataset>& rows,
                                           const std::vector<EmbeddedDataset>& cols,
                                           const GaussianKernelParams& params) {
  if (rows.empty() || cols.empty()) {
    throw PreconditionError("cross_rkhs_distance_matrix: empty dataset list");
  }
  std::vector<Eigen::MatrixXd> row_scaled(rows.size()), col_scaled(cols.size());
  parallel_for(0, rows.size(),
               [&](std::size_t i) { row_scaled[i] = scale_samples(rows[i].samples, params); });
  parallel_for(0, cols.size(),
               [&](std::size_t j) { col_scaled[j] = scale_samples(cols[j].samples, params); });

  Eigen::VectorXd row_self(rows.size()), col_self(cols.size());
  parallel_for(0, rows.size(), [&](std::size_t i) {
    row_self[i] = weighted_kernel_sum(row_scaled[i], rows[i].weights, row_scaled[i], rows[i].weights);
  });
  parallel_for(0, cols.size(), [&](std::size_t j) {
    col_self[j] = weighted_kernel_sum(col_scaled[j], cols[j].weights, col_scaled[j], cols[j].weights);
  });

  Eigen::MatrixXd dist2(rows.size(), cols.size());
  parallel_for(0, rows.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double cross =
          weighted_kernel_sum(row_scaled[i], rows[i].weights, col_scaled[j], cols[j].weights);
      dist2(i, j) = std::max(row_self[i] + col_self[j] - 2.0 * cross, 0.0);
    }
  });
  return dist2;
}

Eigen::MatrixXd embedding_kernel_matrix(const std::vector<EmbeddedDataset>& datasets,
                                        double outer_bandwidth,
                                        const GaussianKernelParams& params) {
  if (!(outer_bandwidth > 0.0)) {
    throw PreconditionError("embedding_kernel_matrix: outer bandwidth must be positive");
  }
  const Eigen::MatrixXd dist2 = rkhs_distance_matrix(datasets, params);
  Eigen::MatrixXd k = (-dist2.array() / (2.0 * outer_bandwidth * outer_bandwidth)).exp();
  k.diagonal().setOnes();
  return k;
}

RffMap RffMap::make(int dim, int feature_count, const Eigen::VectorXd& bandwidths,
                    std::uint64_t seed) {
  if (feature_count < 1) throw PreconditionError("RffMap: feature count must be >= 1");
  if (bandwidths.size() != dim) throw PreconditionError("RffMap: bandwidth dimension mismatch");

  RffMap map;
  map.frequencies.resize(feature_count, dim);
  map.phases.resize(feature_count);
  map.bandwidths = bandwidths;
  map.seed = seed;

  RngStream rng(seed, 0x8fff);
  for (int k = 0; k < feature_count; ++k) {
    for (int j = 0; j < dim; ++j) {
      map.frequencies(k, j) = rng.normal() / bandwidths[j];
    }
  }
  for (int k = 0; k < feature_count; ++k) map.phases[k] = rng.uniform(0.0, 2.0 * M_PI);
  return map;
}

Eigen::VectorXd rff_features(const Eigen::VectorXd& x, const RffMap& map) {
  if (x.size() != map.frequencies.cols()) {
    throw PreconditionError("rff_features: dimension mismatch");
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(map.frequencies.rows()));
  return scale * ((map.frequencies * x + map.phases).array().cos()).matrix();
}

Eigen::MatrixXd rff_features_matrix(const Eigen::MatrixXd& x, const RffMap& map) {
  if (x.cols() != map.frequencies.cols()) {
    throw PreconditionError("rff_features_matrix: dimension mismatch");
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(map.frequencies.rows()));
  Eigen::MatrixXd phase = x * map.frequencies.transpose();
  phase.rowwise() += map.phases.transpose();
  return scale * phase.array().cos().matrix();
}

FeatureStandardizer FeatureStandardizer::fit(const Eigen::MatrixXd& pool) {
  if (pool.rows() == 0) throw PreconditionError("FeatureStandardizer: empty pool");
  FeatureStandardizer st;
  st.shift = pool.colwise().mean();
  st.scale.resize(pool.cols());
  st.constant_dims.assign(static_cast<std::size_t>(pool.cols()), false);
  for (Eigen::Index j = 0; j < pool.cols(); ++j) {
    const double var =
        (pool.col(j).array() - st.shift[j]).square().sum() / static_cast<double>(pool.rows());
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
      st.scale[j] = 1.0;  // constant dimension: passthrough
      st.constant_dims[static_cast<std::size_t>(j)] = true;
    } else {
      st.scale[j] = sd;
    }
  }
  return st;
}

Eigen::VectorXd FeatureStandardizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != shift.size()) throw PreconditionError("standardize: dimension mismatch");
  return (x - shift).cwiseQuotient(scale);
}

Eigen::MatrixXd FeatureStandardizer::apply_matrix(const Eigen::MatrixXd& x) const {
  if (x.cols() != shift.size()) throw PreconditionError("standardize: dimension mismatch");
  Eigen::MatrixXd out = x;
  out.rowwise() -= shift.transpose();
  return out * scale.cwiseInverse().asDiagonal();
}

}  // namespace odlearn::kernel
