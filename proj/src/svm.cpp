#include "lfgw/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lfgw/kernels.hpp"

namespace lfgw {

SvmModel svm_train_binary(const Matrix& kernel, const std::vector<int>& y,
                          const SvmTrainConfig& cfg) {
  const Index n = kernel.rows();
  if (kernel.cols() != n) throw InputError("svm: training kernel must be square");
  if (static_cast<Index>(y.size()) != n) throw InputError("svm: label count mismatch");
  if (!(cfg.c > 0.0)) throw InputError("svm: C must be positive");
  for (int v : y) {
    if (v != 1 && v != -1) throw InputError("svm: binary labels must be +-1");
  }

  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // gradient of 1/2 a'Qa - e'a at a = 0
  const double c = cfg.c;

  auto in_up = [&](Index t) {
    return (y[static_cast<size_t>(t)] > 0 && alpha(t) < c) ||
           (y[static_cast<size_t>(t)] < 0 && alpha(t) > 0.0);
  };
  auto in_low = [&](Index t) {
    return (y[static_cast<size_t>(t)] > 0 && alpha(t) > 0.0) ||
           (y[static_cast<size_t>(t)] < 0 && alpha(t) < c);
  };

  SvmModel model;
  model.converged = false;
  double m_val = 0.0;
  double big_m_val = 0.0;
  for (long iter = 0; iter < cfg.max_iters; ++iter) {
    Index i = -1;
    Index j = -1;
    m_val = -std::numeric_limits<double>::infinity();
    big_m_val = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      const double score = -y[static_cast<size_t>(t)] * grad(t);
      if (in_up(t) && score > m_val) {
        m_val = score;
        i = t;
      }
      if (in_low(t) && score < big_m_val) {
        big_m_val = score;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m_val - big_m_val <= cfg.kkt_tol) {
      model.converged = (i >= 0 && j >= 0);
      break;
    }

    const double yi = y[static_cast<size_t>(i)];
    const double yj = y[static_cast<size_t>(j)];
    // move along d = yi e_i - yj e_j, which keeps y'alpha fixed
    const double slope = yi * grad(i) - yj * grad(j);  // <= 0 by selection
    double curv = kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
    if (curv <= 0.0) curv = 1e-12;
    double step = -slope / curv;

    double limit = std::numeric_limits<double>::infinity();
    limit = std::min(limit, yi > 0 ? c - alpha(i) : alpha(i));
    limit = std::min(limit, yj > 0 ? alpha(j) : c - alpha(j));
    step = std::min(step, limit);
    if (step <= 0.0) break;  // numerically stuck

    alpha(i) += yi * step;
    alpha(j) -= yj * step;
    for (Index t = 0; t < n; ++t) {
      grad(t) += y[static_cast<size_t>(t)] * step * (kernel(t, i) - kernel(t, j));
    }
  }

  // bias from free support vectors, else the midpoint of the violating gap
  double rho_sum = 0.0;
  int rho_count = 0;
  for (Index t = 0; t < n; ++t) {
    if (alpha(t) > 1e-12 && alpha(t) < c - 1e-12) {
      rho_sum += y[static_cast<size_t>(t)] * grad(t);
      ++rho_count;
    }
  }
  if (rho_count > 0) {
    model.rho = rho_sum / rho_count;
  } else if (std::isfinite(m_val) && std::isfinite(big_m_val)) {
    model.rho = -(m_val + big_m_val) / 2.0;
  } else {
    model.rho = 0.0;  // degenerate problem (e.g. one-class training set)
  }
  model.alpha = std::move(alpha);
  model.y = y;
  return model;
}

Vector svm_decision(const Matrix& kernel_test_train, const SvmModel& model) {
  const Index n = model.alpha.size();
  if (kernel_test_train.cols() != n) {
    throw InputError("svm_decision: kernel block column count mismatch");
  }
  Vector signed_alpha(n);
  for (Index t = 0; t < n; ++t) {
    signed_alpha(t) = model.alpha(t) * model.y[static_cast<size_t>(t)];
  }
  return (kernel_test_train * signed_alpha).array() - model.rho;
}

std::vector<int> svm_classify(const Matrix& kernel_train, const std::vector<int>& y_train,
                              const Matrix& kernel_test_train, double c, int num_classes,
                              bool* clipped, bool clip_indefinite) {
  if (num_classes < 2) throw InputError("svm_classify: need at least two classes");
  const Index n = kernel_train.rows();
  if (static_cast<Index>(y_train.size()) != n) {
    throw InputError("svm_classify: label count mismatch");
  }
  if (clipped) *clipped = false;

  Matrix train = kernel_train;
  if (clip_indefinite && !is_positive_semidefinite(train)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(train);
    Vector ev = solver.eigenvalues().cwiseMax(0.0);
    train = solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
    if (clipped) *clipped = true;
  }

  SvmTrainConfig cfg;
  cfg.c = c;
  const Index n_test = kernel_test_train.rows();
  std::vector<int> predictions(static_cast<size_t>(n_test), 0);

  if (num_classes == 2) {
    std::vector<int> y(static_cast<size_t>(n));
    for (Index t = 0; t < n; ++t) y[static_cast<size_t>(t)] = y_train[static_cast<size_t>(t)] == 1 ? 1 : -1;
    SvmModel model = svm_train_binary(train, y, cfg);
    Vector dec = svm_decision(kernel_test_train, model);
    for (Index t = 0; t < n_test; ++t) {
      predictions[static_cast<size_t>(t)] = dec(t) > 0.0 ? 1 : 0;
    }
    return predictions;
  }

  Matrix scores(n_test, num_classes);
  for (int cls = 0; cls < num_classes; ++cls) {
    std::vector<int> y(static_cast<size_t>(n));
    for (Index t = 0; t < n; ++t) {
      y[static_cast<size_t>(t)] = y_train[static_cast<size_t>(t)] == cls ? 1 : -1;
    }
    SvmModel model = svm_train_binary(train, y, cfg);
    scores.col(cls) = svm_decision(kernel_test_train, model);
  }
  for (Index t = 0; t < n_test; ++t) {
    int best = 0;
    for (int cls = 1; cls < num_classes; ++cls) {
      if (scores(t, cls) > scores(t, best)) best = cls;  // ties keep the lowest class
    }
    predictions[static_cast<size_t>(t)] = best;
  }
  return predictions;
}

}  // namespace lfgw
