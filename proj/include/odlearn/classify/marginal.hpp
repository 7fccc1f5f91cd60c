#pragma once

#include <cstdint>
#include <vector>

#include "odlearn/kernel/kernel.hpp"

namespace odlearn::classify {

enum class Loss {
  kLogistic,  // log(1 + exp(-y m)), the default
  kHinge,     // squared hinge max(0, 1 - y m)^2 (smooth, batch-friendly)
};

/// Hyperparameters of the marginal-prediction classifier. The product kernel
/// k_P(Phi, Phi') * k1(x, x') is approximated by the tensor product of two
/// random Fourier feature maps: a point-level map z1 (dimension D1) whose
/// per-dataset mean stands in for the embedding Phi(P_hat), and an
/// embedding-level map z_P (dimension D_P) over that mean vector.
struct ClassifierHyperparams {
  double point_multiplier = 1.0;     // point bandwidths: times median-heuristic scale
  double embedding_bandwidth = 1.0;  // isotropic sigma over the D1-dim mean feature
  int point_feature_count = 64;      // D1
  int embedding_feature_count = 64;  // D_P
  double regularizer = 1e-4;         // xi_1 > 0
  Loss loss = Loss::kLogistic;
  std::uint64_t rff_seed = 7;
};

struct TrainedClassifier {
  kernel::FeatureStandardizer standardizer;
  kernel::RffMap point_map;      // D1 x d
  kernel::RffMap embedding_map;  // D_P x D1 (unused in pooled mode)
  Eigen::VectorXd weights;       // D_P*D1 (marginal) or D1 (pooled)
  bool uses_embedding = true;
  ClassifierHyperparams hyperparams;
};

/// Trains the marginal classifier on labeled datasets (labels in {-1, +1},
/// each dataset must contain both classes). The regularized linear problem in
/// the joint feature space is solved by deterministic L-BFGS to gradient norm
/// below 1e-8, with the 1/(N n_i) weighting of the objective.
TrainedClassifier train_marginal(const std::vector<Eigen::MatrixXd>& feature_sets,
                                 const std::vector<Eigen::VectorXi>& labels,
                                 const ClassifierHyperparams& hp);

/// Pooled baseline: same objective restricted to point features only (the
/// dataset embedding factor is dropped).
TrainedClassifier train_pooled_baseline(const std::vector<Eigen::MatrixXd>& feature_sets,
                                        const std::vector<Eigen::VectorXi>& labels,
                                        const ClassifierHyperparams& hp);

/// Raw decision values for every observation; the test dataset supplies its
/// own empirical marginal.
Eigen::VectorXd decision_values(const TrainedClassifier& model,
                                const Eigen::MatrixXd& features);

/// Signed labels (sign of the decision value; zero maps to +1).
Eigen::VectorXi classify(const TrainedClassifier& model, const Eigen::MatrixXd& features);

}  // namespace odlearn::classify
