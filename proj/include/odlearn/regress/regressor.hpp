#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "odlearn/kernel/kernel.hpp"

namespace odlearn::regress {

/// What the output components mean; Keplerian mode re-normalizes the four
/// angle components to [0, 2*pi) at prediction time.
enum class OutputMode { kKeplerian, kCartesian };

/// Hyperparameters of the two-stage distribution regressor: one shared
/// inner-bandwidth multiplier (times the per-dimension median-heuristic
/// scale), one outer bandwidth per output component (the output kernel is
/// block-diagonal, so each component has its own Gaussian on embedding
/// distance), and one regularizer.
struct RegressorHyperparams {
  double inner_multiplier = 1.0;
  Eigen::VectorXd outer_bandwidths;  // absolute, one per output component
  double regularizer = 1e-4;         // xi_2 > 0
};

struct TrainedRegressor {
  kernel::FeatureStandardizer standardizer;
  Eigen::VectorXd inner_bandwidths;  // resolved per feature dimension
  RegressorHyperparams hyperparams;
  OutputMode output_mode = OutputMode::kKeplerian;
  std::vector<kernel::EmbeddedDataset> training_embeddings;
  Eigen::VectorXd target_shift;       // per component
  Eigen::VectorXd target_scale;       // per component
  Eigen::MatrixXd dual_coefficients;  // N x C, column c solves (K_c + N xi I) a = s_c
  bool standardize_targets = true;
};

struct TrainOptions {
  bool standardize_targets = true;
};

/// Per-dimension median-heuristic scale of standardized features: the median
/// absolute coordinate difference over a fixed random subsample of pairs.
Eigen::VectorXd median_heuristic_scales(const Eigen::MatrixXd& standardized_pool,
                                        std::uint64_t seed = 0);

/// Trains per-component kernel ridge over dataset embeddings:
/// alpha_c = (K_c + N xi_2 I)^{-1} s_c.
/// feature_sets carries raw (unstandardized) per-dataset sample matrices.
TrainedRegressor train(const std::vector<Eigen::MatrixXd>& feature_sets,
                       const Eigen::MatrixXd& targets, const RegressorHyperparams& hp,
                       OutputMode mode, const TrainOptions& options = {});

/// Predicts the parameter vector for one raw sample matrix.
Eigen::VectorXd predict(const TrainedRegressor& model, const Eigen::MatrixXd& features);

/// Batch prediction (parallel over datasets).
Eigen::MatrixXd predict_batch(const TrainedRegressor& model,
                              const std::vector<Eigen::MatrixXd>& feature_sets);

/// Grid for model selection. Outer candidates are multipliers of the median
/// pairwise embedding distance under the current inner bandwidth.
struct CvGrid {
  std::vector<double> inner_multipliers = {0.5, 1.0, 2.0};
  std::vector<double> outer_multipliers = {0.25, 0.5, 1.0, 2.0};
  std::vector<double> regularizers = {1e-6, 1e-4, 1e-2};
  int fold_count = 5;
  std::uint64_t shuffle_seed = 1234;
};

struct CvRecord {
  double inner_multiplier;
  double regularizer;
  Eigen::VectorXd outer_bandwidths;
  double mean_cv_error;  // summed over components, standardized units
};

struct CvResult {
  RegressorHyperparams best;
  std::vector<CvRecord> table;
};

/// Grid search with k-fold cross-validation (contiguous blocks after a
/// seeded shuffle). The outer-bandwidth choice factorizes per component;
/// ties break toward larger regularizer, then larger bandwidths.
CvResult cross_validate(const std::vector<Eigen::MatrixXd>& feature_sets,
                        const Eigen::MatrixXd& targets, const CvGrid& grid,
                        OutputMode mode);

/// Versioned binary model container.
void save_model(const TrainedRegressor& model, std::ostream& out);
TrainedRegressor load_model(std::istream& in);
void save_model_file(const TrainedRegressor& model, const std::string& path);
TrainedRegressor load_model_file(const std::string& path);

}  // namespace odlearn::regress
