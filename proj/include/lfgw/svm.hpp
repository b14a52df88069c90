#pragma once

#include <vector>

#include "lfgw/types.hpp"

namespace lfgw {

/// C-SVC dual solved by sequential minimal optimization on a precomputed
/// kernel (maximal-violating-pair working-set selection).
struct SvmModel {
  Vector alpha;        // dual variables, length n_train
  std::vector<int> y;  // +-1 labels the machine was trained with
  double rho = 0.0;    // bias; decision(x) = sum_t alpha_t y_t K(x, t) - rho
  bool converged = true;
};

struct SvmTrainConfig {
  double c = 1.0;
  double kkt_tol = 1e-3;
  long max_iters = 10000000;
};

SvmModel svm_train_binary(const Matrix& kernel, const std::vector<int>& y,
                          const SvmTrainConfig& cfg);

/// Decision values for rows of a test-vs-train kernel block.
Vector svm_decision(const Matrix& kernel_test_train, const SvmModel& model);

/// Train on a precomputed kernel and predict class indices for test rows.
/// Binary problems use one machine (positive = class 1); multiclass is
/// one-vs-rest with argmax over decision values, ties to the lowest class.
/// A training kernel that fails the PSD check is clipped (negative
/// eigenvalues zeroed); `clipped`, when given, reports that. Callers that
/// guarantee a PSD kernel (e.g. slices of a Gaussian Gram matrix) can skip
/// the eigendecomposition with clip_indefinite = false.
std::vector<int> svm_classify(const Matrix& kernel_train, const std::vector<int>& y_train,
                              const Matrix& kernel_test_train, double c, int num_classes,
                              bool* clipped = nullptr, bool clip_indefinite = true);

}  // namespace lfgw
