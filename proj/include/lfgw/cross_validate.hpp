#pragma once

#include <map>
#include <vector>

#include "lfgw/types.hpp"

namespace lfgw {

/// One precomputed-distance setting: the (alpha, WL depth) pair it came from.
struct ParamKey {
  double alpha = 0.5;
  int wl_depth = 0;
  bool operator<(const ParamKey& o) const {
    return alpha < o.alpha || (alpha == o.alpha && wl_depth < o.wl_depth);
  }
};

struct CvConfig {
  int folds = 10;
  int repeats = 10;
  int inner_folds = 5;  // grid selection on the training folds
  unsigned seed = 42;
  int threads = 0;
};

struct CvSelection {
  int repeat = 0;
  int fold = 0;
  ParamKey key;
  double gamma = 0.0;
  double c = 0.0;
  double test_accuracy = 0.0;
  std::vector<int> test_indices;
  std::vector<int> predictions;
};

struct CvReport {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // across repeat-level accuracies
  std::vector<double> repeat_accuracies;
  std::vector<CvSelection> selections;  // one per (repeat, fold)
};

/// Stratified fold assignment (round-robin per shuffled class). Throws when a
/// class is too small to appear in every training set.
std::vector<int> stratified_folds(const std::vector<int>& labels, int num_classes, int folds,
                                  unsigned seed);

/// Repeated stratified k-fold cross validation of a Gaussian-kernel SVM over
/// precomputed linearFGW distance matrices, one per (alpha, WL depth).
/// Hyperparameters (alpha, H, gamma, C) are selected per outer fold by an
/// inner stratified CV on the training folds only.
CvReport cross_validate(const std::vector<int>& labels, int num_classes,
                        const std::map<ParamKey, Matrix>& distances,
                        const std::vector<double>& c_grid,
                        const std::vector<double>& gamma_grid, const CvConfig& cfg);

}  // namespace lfgw
