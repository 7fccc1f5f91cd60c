#include "odlearn/regress/regressor.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "odlearn/common/error.hpp"
#include "odlearn/common/parallel.hpp"
#include "odlearn/common/rng.hpp"
#include "odlearn/orbit/kepler.hpp"

namespace odlearn::regress {

namespace {

Eigen::MatrixXd pool_rows(const std::vector<Eigen::MatrixXd>& feature_sets) {
  Eigen::Index total = 0, dim = feature_sets.front().cols();
  for (const auto& f : feature_sets) {
    if (f.cols() != dim) throw PreconditionError("train: inconsistent feature dimensions");
    total += f.rows();
  }
  Eigen::MatrixXd pool(total, dim);
  Eigen::Index at = 0;
  for (const auto& f : feature_sets) {
    pool.middleRows(at, f.rows()) = f;
    at += f.rows();
  }
  return pool;
}

std::vector<kernel::EmbeddedDataset> embed_all(const std::vector<Eigen::MatrixXd>& feature_sets,
                                               const kernel::FeatureStandardizer& st) {
  std::vector<kernel::EmbeddedDataset> out(feature_sets.size());
  parallel_for(0, feature_sets.size(), [&](std::size_t i) {
    if (feature_sets[i].rows() == 0) {
      throw PreconditionError("train/predict: empty dataset has no embedding");
    }
    out[i] = kernel::EmbeddedDataset::from_samples(st.apply_matrix(feature_sets[i]));
  });
  return out;
}

Eigen::MatrixXd outer_kernel(const Eigen::MatrixXd& dist2, double bandwidth) {
  Eigen::MatrixXd k = (-dist2.array() / (2.0 * bandwidth * bandwidth)).exp();
  return k;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

}  // namespace

Eigen::VectorXd median_heuristic_scales(const Eigen::MatrixXd& pool, std::uint64_t seed) {
  const Eigen::Index n = pool.rows(), d = pool.cols();
  if (n < 2) throw PreconditionError("median_heuristic_scales: need at least two rows");
  RngStream rng(seed, 0x3ed1a);
  const int pairs = 2000;
  Eigen::VectorXd scales(d);
  std::vector<double> column(static_cast<std::size_t>(n));
  std::vector<double> diffs(pairs);
  for (Eigen::Index j = 0; j < d; ++j) {
    // Sort the column first so the subsampled pairs do not depend on the
    // order datasets were pooled in (permutation invariance).
    for (Eigen::Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = pool(i, j);
    std::sort(column.begin(), column.end());
    for (int p = 0; p < pairs; ++p) {
      const auto a = rng.uniform_index(static_cast<std::uint64_t>(n));
      const auto b = rng.uniform_index(static_cast<std::uint64_t>(n));
      diffs[p] = std::abs(column[a] - column[b]);
    }
    const double m = median_of(diffs);
    scales[j] = m > 1e-12 ? m : 1.0;
  }
  return scales;
}

TrainedRegressor train(const std::vector<Eigen::MatrixXd>& feature_sets,
                       const Eigen::MatrixXd& targets, const RegressorHyperparams& hp,
                       OutputMode mode, const TrainOptions& options) {
  const auto n = static_cast<Eigen::Index>(feature_sets.size());
  if (n < 2) throw PreconditionError("train: need at least two training datasets");
  if (targets.rows() != n) throw PreconditionError("train: dataset/target count mismatch");
  if (!targets.allFinite()) throw PreconditionError("train: targets must be finite");
  if (!(hp.regularizer > 0.0)) throw PreconditionError("train: regularizer must be positive");
  const Eigen::Index components = targets.cols();
  if (hp.outer_bandwidths.size() != components) {
    throw PreconditionError("train: one outer bandwidth per output component required");
  }

  TrainedRegressor model;
  model.output_mode = mode;
  model.hyperparams = hp;
  model.standardize_targets = options.standardize_targets;

  const Eigen::MatrixXd pool = pool_rows(feature_sets);
  model.standardizer = kernel::FeatureStandardizer::fit(pool);
  model.inner_bandwidths =
      hp.inner_multiplier * median_heuristic_scales(model.standardizer.apply_matrix(pool));
  model.training_embeddings = embed_all(feature_sets, model.standardizer);

  // Target standardization per component.
  model.target_shift.resize(components);
  model.target_scale.resize(components);
  for (Eigen::Index c = 0; c < components; ++c) {
    if (options.standardize_targets) {
      model.target_shift[c] = targets.col(c).mean();
      const double sd = std::sqrt((targets.col(c).array() - model.target_shift[c]).square().sum() /
                                  static_cast<double>(n));
      model.target_scale[c] = sd > 1e-12 ? sd : 1.0;
    } else {
      model.target_shift[c] = 0.0;
      model.target_scale[c] = 1.0;
    }
  }

  const kernel::GaussianKernelParams params{model.inner_bandwidths};
  const Eigen::MatrixXd dist2 = kernel::rkhs_distance_matrix(model.training_embeddings, params);

  model.dual_coefficients.resize(n, components);
  const double ridge = static_cast<double>(n) * hp.regularizer;
  for (Eigen::Index c = 0; c < components; ++c) {
    Eigen::MatrixXd k = outer_kernel(dist2, hp.outer_bandwidths[c]);
    k.diagonal().setOnes();
    k.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("train: Cholesky factorization failed (component " +
                           std::to_string(c) + ")");
    }
    const Eigen::VectorXd s =
        (targets.col(c).array() - model.target_shift[c]) / model.target_scale[c];
    model.dual_coefficients.col(c) = llt.solve(s);
  }
  return model;
}

Eigen::VectorXd predict(const TrainedRegressor& model, const Eigen::MatrixXd& features) {
  return predict_batch(model, {features}).row(0);
}

Eigen::MatrixXd predict_batch(const TrainedRegressor& model,
                              const std::vector<Eigen::MatrixXd>& feature_sets) {
  if (feature_sets.empty()) throw PreconditionError("predict: no datasets");
  const auto test_embeddings = embed_all(feature_sets, model.standardizer);
  const kernel::GaussianKernelParams params{model.inner_bandwidths};
  const Eigen::MatrixXd dist2 =
      kernel::cross_rkhs_distance_matrix(test_embeddings, model.training_embeddings, params);

  const Eigen::Index components = model.dual_coefficients.cols();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(feature_sets.size()), components);
  for (Eigen::Index c = 0; c < components; ++c) {
    const Eigen::MatrixXd k_r = outer_kernel(dist2, model.hyperparams.outer_bandwidths[c]);
    out.col(c) = (k_r * model.dual_coefficients.col(c)) * model.target_scale[c];
    out.col(c).array() += model.target_shift[c];
  }
  if (model.output_mode == OutputMode::kKeplerian) {
    // a, e pass through; i, raan, argp, M are angles.
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index c = 2; c < std::min<Eigen::Index>(6, components); ++c) {
        out(r, c) = orbit::normalize_angle(out(r, c));
      }
    }
  }
  return out;
}

CvResult cross_validate(const std::vector<Eigen::MatrixXd>& feature_sets,
                        const Eigen::MatrixXd& targets, const CvGrid& grid, OutputMode mode) {
  const auto n = static_cast<Eigen::Index>(feature_sets.size());
  if (grid.fold_count < 2) throw PreconditionError("cross_validate: need >= 2 folds");
  if (n < grid.fold_count) {
    throw PreconditionError("cross_validate: need at least fold_count datasets");
  }
  if (grid.inner_multipliers.empty() || grid.outer_multipliers.empty() ||
      grid.regularizers.empty()) {
    throw PreconditionError("cross_validate: empty candidate list");
  }
  const Eigen::Index components = targets.cols();

  // Seeded shuffle, then contiguous blocks as folds.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(grid.shuffle_seed, 0xf01d);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> folds;  // [begin, end) in order[]
  const Eigen::Index base = n / grid.fold_count, extra = n % grid.fold_count;
  Eigen::Index at = 0;
  for (int f = 0; f < grid.fold_count; ++f) {
    const Eigen::Index len = base + (f < extra ? 1 : 0);
    folds.emplace_back(at, at + len);
    at += len;
  }

  // Standardized targets for fold scoring (fit on all data, same convention
  // as train()).
  Eigen::MatrixXd std_targets(n, components);
  for (Eigen::Index c = 0; c < components; ++c) {
    const double mean = targets.col(c).mean();
    double sd = std::sqrt((targets.col(c).array() - mean).square().sum() / static_cast<double>(n));
    if (sd <= 1e-12) sd = 1.0;
    std_targets.col(c) = (targets.col(c).array() - mean) / sd;
  }

  // Candidates sorted ascending so that on ties the larger value wins via <=.
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto inner_candidates = sorted(grid.inner_multipliers);
  const auto outer_candidates = sorted(grid.outer_multipliers);
  const auto reg_candidates = sorted(grid.regularizers);

  CvResult result;
  double best_score = std::numeric_limits<double>::infinity();
  bool have_best = false;

  const Eigen::MatrixXd pool = pool_rows(feature_sets);
  const auto standardizer = kernel::FeatureStandardizer::fit(pool);
  const Eigen::VectorXd base_scales =
      median_heuristic_scales(standardizer.apply_matrix(pool));

  for (const double inner_mult : inner_candidates) {
    const kernel::GaussianKernelParams params{inner_mult * base_scales};
    const auto embeddings = embed_all(feature_sets, standardizer);
    Eigen::MatrixXd dist2 = kernel::rkhs_distance_matrix(embeddings, params);

    // Median pairwise embedding distance sets the outer-bandwidth scale.
    std::vector<double> off_diag;
    off_diag.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off_diag.push_back(std::sqrt(dist2(i, j)));
    double outer_scale = median_of(off_diag);
    if (outer_scale <= 1e-12) outer_scale = 1.0;

    // Permute distances into shuffled order once.
    Eigen::MatrixXd dist2_shuffled(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        dist2_shuffled(i, j) = dist2(order[static_cast<std::size_t>(i)],
                                     order[static_cast<std::size_t>(j)]);
    Eigen::MatrixXd targets_shuffled(n, components);
    for (Eigen::Index i = 0; i < n; ++i)
      targets_shuffled.row(i) = std_targets.row(order[static_cast<std::size_t>(i)]);

    for (const double reg : reg_candidates) {
      Eigen::VectorXd best_outer(components);
      Eigen::VectorXd best_component_err(components);

      for (Eigen::Index c = 0; c < components; ++c) {
        double best_err = std::numeric_limits<double>::infinity();
        double best_bw = outer_candidates.front() * outer_scale;
        for (const double outer_mult : outer_candidates) {
          const double bw = outer_mult * outer_scale;
          double err_sum = 0.0;
          Eigen::Index err_count = 0;
          for (const auto& [fb, fe] : folds) {
            const Eigen::Index held = fe - fb;
            const Eigen::Index kept = n - held;
            // Gather train/train and held/train blocks.
            Eigen::MatrixXd d_tt(kept, kept), d_ht(held, kept);
            Eigen::VectorXd y_t(kept), y_h(held);
            Eigen::Index ti = 0;
            std::vector<Eigen::Index> train_rows;
            train_rows.reserve(static_cast<std::size_t>(kept));
            for (Eigen::Index i = 0; i < n; ++i) {
              if (i >= fb && i < fe) continue;
              train_rows.push_back(i);
              y_t[ti++] = targets_shuffled(i, c);
            }
            for (Eigen::Index a = 0; a < kept; ++a)
              for (Eigen::Index b = 0; b < kept; ++b)
                d_tt(a, b) = dist2_shuffled(train_rows[static_cast<std::size_t>(a)],
                                            train_rows[static_cast<std::size_t>(b)]);
            for (Eigen::Index h = 0; h < held; ++h) {
              y_h[h] = targets_shuffled(fb + h, c);
              for (Eigen::Index b = 0; b < kept; ++b)
                d_ht(h, b) = dist2_shuffled(fb + h, train_rows[static_cast<std::size_t>(b)]);
            }

            Eigen::MatrixXd k = outer_kernel(d_tt, bw);
            k.diagonal().setOnes();
            k.diagonal().array() += static_cast<double>(kept) * reg;
            const Eigen::VectorXd alpha = Eigen::LLT<Eigen::MatrixXd>(k).solve(y_t);
            const Eigen::VectorXd pred = outer_kernel(d_ht, bw) * alpha;
            err_sum += (pred - y_h).squaredNorm();
            err_count += held;
          }
          const double err = err_sum / static_cast<double>(err_count);
          if (err <= best_err) {  // ties -> larger bandwidth (ascending scan)
            best_err = err;
            best_bw = bw;
          }
        }
        best_outer[c] = best_bw;
        best_component_err[c] = best_err;
      }

      const double score = best_component_err.sum();
      CvRecord rec;
      rec.inner_multiplier = inner_mult;
      rec.regularizer = reg;
      rec.outer_bandwidths = best_outer;
      rec.mean_cv_error = score;
      result.table.push_back(rec);

      if (!have_best || score <= best_score) {  // ties -> larger reg/inner
        have_best = true;
        best_score = score;
        result.best.inner_multiplier = inner_mult;
        result.best.outer_bandwidths = best_outer;
        result.best.regularizer = reg;
      }
    }
  }
  return result;
}

}  // namespace odlearn::regress
