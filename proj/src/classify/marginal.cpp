#include "odlearn/classify/marginal.hpp"

#include <cmath>
#include <deque>
#include <functional>

#include "odlearn/common/error.hpp"
#include "odlearn/common/parallel.hpp"
#include "odlearn/regress/regressor.hpp"

namespace odlearn::classify {

namespace {

// loss(margin) and d loss / d margin for y*score.
inline double loss_value(Loss loss, double margin) {
  switch (loss) {
    case Loss::kLogistic:
      if (-margin > 30.0) return -margin;
      return std::log1p(std::exp(-margin));
    case Loss::kHinge: {
      const double gap = std::max(0.0, 1.0 - margin);
      return gap * gap;
    }
  }
  return 0.0;
}

inline double loss_derivative(Loss loss, double margin) {
  switch (loss) {
    case Loss::kLogistic: {
      if (-margin > 30.0) return -1.0;
      const double e = std::exp(-margin);
      return -e / (1.0 + e);
    }
    case Loss::kHinge: {
      const double gap = std::max(0.0, 1.0 - margin);
      return -2.0 * gap;
    }
  }
  return 0.0;
}

// Minimal deterministic L-BFGS with Armijo backtracking.
Eigen::VectorXd lbfgs_minimize(
    Eigen::Index dim,
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& value_and_grad,
    double grad_tol = 1e-8, int max_iter = 500) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd grad(dim);
  double value = value_and_grad(w, grad);

  const int history = 10;
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < max_iter; ++iter) {
    if (grad.norm() < grad_tol) break;

    // Two-loop recursion.
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    double dir_deriv = grad.dot(direction);
    if (dir_deriv > 0.0) {  // not a descent direction: fall back to gradient
      direction = -grad;
      dir_deriv = -grad.squaredNorm();
    }

    double step = 1.0;
    Eigen::VectorXd w_new(dim), grad_new(dim);
    double value_new = value;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      w_new = w + step * direction;
      value_new = value_and_grad(w_new, grad_new);
      if (value_new <= value + 1e-4 * step * dir_deriv) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // flat to machine precision

    const Eigen::VectorXd s = w_new - w;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    w = w_new;
    grad = grad_new;
    value = value_new;
  }
  return w;
}

struct PreparedData {
  std::vector<Eigen::MatrixXd> point_features;      // n_i x D1 per dataset
  std::vector<Eigen::VectorXd> embedding_features;  // D_P per dataset (marginal mode)
  std::vector<Eigen::VectorXd> labels;              // +-1 per observation
};

void check_labels(const std::vector<Eigen::MatrixXd>& feature_sets,
                  const std::vector<Eigen::VectorXi>& labels) {
  if (feature_sets.size() < 2) {
    throw PreconditionError("train: need at least two labeled datasets");
  }
  if (labels.size() != feature_sets.size()) {
    throw PreconditionError("train: dataset/label count mismatch");
  }
  bool any_pos = false, any_neg = false;
  for (std::size_t i = 0; i < feature_sets.size(); ++i) {
    if (labels[i].size() != feature_sets[i].rows()) {
      throw PreconditionError("train: label length must equal observation count");
    }
    for (Eigen::Index j = 0; j < labels[i].size(); ++j) {
      if (labels[i][j] != 1 && labels[i][j] != -1) {
        throw PreconditionError("train: labels must be -1 or +1");
      }
      (labels[i][j] == 1 ? any_pos : any_neg) = true;
    }
  }
  if (!any_pos || !any_neg) {
    throw PreconditionError("train: degenerate labels, both classes required");
  }
}

TrainedClassifier train_impl(const std::vector<Eigen::MatrixXd>& feature_sets,
                             const std::vector<Eigen::VectorXi>& labels,
                             const ClassifierHyperparams& hp, bool uses_embedding) {
  check_labels(feature_sets, labels);
  if (!(hp.regularizer > 0.0)) throw PreconditionError("train: regularizer must be positive");
  if (hp.point_feature_count < 1 || hp.embedding_feature_count < 1) {
    throw PreconditionError("train: RFF dimensions must be >= 1");
  }

  TrainedClassifier model;
  model.uses_embedding = uses_embedding;
  model.hyperparams = hp;

  // Standardize on the pooled training points.
  Eigen::Index total = 0;
  const Eigen::Index dim = feature_sets.front().cols();
  for (const auto& f : feature_sets) total += f.rows();
  Eigen::MatrixXd pool(total, dim);
  Eigen::Index at = 0;
  for (const auto& f : feature_sets) {
    pool.middleRows(at, f.rows()) = f;
    at += f.rows();
  }
  model.standardizer = kernel::FeatureStandardizer::fit(pool);
  const Eigen::VectorXd point_bw =
      hp.point_multiplier *
      regress::median_heuristic_scales(model.standardizer.apply_matrix(pool));

  model.point_map =
      kernel::RffMap::make(static_cast<int>(dim), hp.point_feature_count, point_bw, hp.rff_seed);
  model.embedding_map = kernel::RffMap::make(
      hp.point_feature_count, hp.embedding_feature_count,
      Eigen::VectorXd::Constant(hp.point_feature_count, hp.embedding_bandwidth),
      hp.rff_seed + 1);

  const std::size_t n_sets = feature_sets.size();
  PreparedData data;
  data.point_features.resize(n_sets);
  data.embedding_features.resize(n_sets);
  data.labels.resize(n_sets);
  parallel_for(0, n_sets, [&](std::size_t i) {
    const Eigen::MatrixXd std_features = model.standardizer.apply_matrix(feature_sets[i]);
    data.point_features[i] = kernel::rff_features_matrix(std_features, model.point_map);
    if (uses_embedding) {
      const Eigen::VectorXd mean_feature = data.point_features[i].colwise().mean();
      data.embedding_features[i] = kernel::rff_features(mean_feature, model.embedding_map);
    }
    data.labels[i] = labels[i].cast<double>();
  });

  const Eigen::Index d1 = hp.point_feature_count;
  const Eigen::Index dp = hp.embedding_feature_count;
  const Eigen::Index weight_dim = uses_embedding ? dp * d1 : d1;
  const double inv_n = 1.0 / static_cast<double>(n_sets);

  // Objective (1/N) sum_i (1/n_i) sum_j L(w . psi_ij, y_ij) + xi ||w||^2.
  // In marginal mode psi_ij = z_P(mu_i) (x) z1(x_ij); reshaping w as a
  // D_P x D1 matrix keeps every pass O(n_i D1 + D_P D1).
  auto value_and_grad = [&](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    std::vector<double> values(n_sets);
    std::vector<Eigen::MatrixXd> grads(n_sets);
    parallel_for(0, n_sets, [&](std::size_t i) {
      const Eigen::MatrixXd& z1 = data.point_features[i];
      const double inv_ni = 1.0 / static_cast<double>(z1.rows());
      Eigen::VectorXd scores;
      Eigen::VectorXd p;
      if (uses_embedding) {
        const Eigen::Map<const Eigen::MatrixXd> w_mat(w.data(), dp, d1);
        p = data.embedding_features[i];
        scores = z1 * (w_mat.transpose() * p);
      } else {
        scores = z1 * w;
      }
      double local_value = 0.0;
      Eigen::VectorXd coeff(scores.size());
      for (Eigen::Index j = 0; j < scores.size(); ++j) {
        const double y = data.labels[i][j];
        const double margin = y * scores[j];
        local_value += loss_value(hp.loss, margin);
        coeff[j] = loss_derivative(hp.loss, margin) * y * inv_ni * inv_n;
      }
      values[i] = local_value * inv_ni * inv_n;
      const Eigen::VectorXd zc = z1.transpose() * coeff;  // D1
      if (uses_embedding) {
        grads[i] = p * zc.transpose();  // D_P x D1
      } else {
        grads[i] = zc;
      }
    });

    grad = Eigen::VectorXd::Zero(weight_dim);
    Eigen::Map<Eigen::MatrixXd> grad_mat(grad.data(), uses_embedding ? dp : d1,
                                         uses_embedding ? d1 : 1);
    double value = 0.0;
    for (std::size_t i = 0; i < n_sets; ++i) {  // fixed order accumulation
      value += values[i];
      grad_mat += grads[i];
    }
    grad += 2.0 * hp.regularizer * w;
    return value + hp.regularizer * w.squaredNorm();
  };

  model.weights = lbfgs_minimize(weight_dim, value_and_grad);
  return model;
}

}  // namespace

TrainedClassifier train_marginal(const std::vector<Eigen::MatrixXd>& feature_sets,
                                 const std::vector<Eigen::VectorXi>& labels,
                                 const ClassifierHyperparams& hp) {
  return train_impl(feature_sets, labels, hp, true);
}

TrainedClassifier train_pooled_baseline(const std::vector<Eigen::MatrixXd>& feature_sets,
                                        const std::vector<Eigen::VectorXi>& labels,
                                        const ClassifierHyperparams& hp) {
  return train_impl(feature_sets, labels, hp, false);
}

Eigen::VectorXd decision_values(const TrainedClassifier& model,
                                const Eigen::MatrixXd& features) {
  if (features.rows() == 0) throw PreconditionError("classify: empty dataset");
  const Eigen::MatrixXd std_features = model.standardizer.apply_matrix(features);
  const Eigen::MatrixXd z1 = kernel::rff_features_matrix(std_features, model.point_map);
  if (!model.uses_embedding) return z1 * model.weights;

  const Eigen::Index d1 = model.hyperparams.point_feature_count;
  const Eigen::Index dp = model.hyperparams.embedding_feature_count;
  const Eigen::Map<const Eigen::MatrixXd> w_mat(model.weights.data(), dp, d1);
  const Eigen::VectorXd mean_feature = z1.colwise().mean();
  const Eigen::VectorXd p = kernel::rff_features(mean_feature, model.embedding_map);
  return z1 * (w_mat.transpose() * p);
}

Eigen::VectorXi classify(const TrainedClassifier& model, const Eigen::MatrixXd& features) {
  const Eigen::VectorXd scores = decision_values(model, features);
  Eigen::VectorXi labels(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) labels[i] = scores[i] < 0.0 ? -1 : 1;
  return labels;
}

}  // namespace odlearn::classify
