#include "lfgw/cross_validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lfgw/kernels.hpp"
#include "lfgw/parallel.hpp"
#include "lfgw/svm.hpp"

namespace lfgw {

namespace {

Matrix slice(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < cols.size(); ++c) out(static_cast<Index>(r), static_cast<Index>(c)) = m(rows[r], cols[c]);
  return out;
}

std::vector<int> gather(const std::vector<int>& v, const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[static_cast<size_t>(i)]);
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  int hits = 0;
  for (size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
  return predicted.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace

std::vector<int> stratified_folds(const std::vector<int>& labels, int num_classes, int folds,
                                  unsigned seed) {
  if (folds < 2) throw InputError("stratified_folds: need at least 2 folds");
  if (static_cast<int>(labels.size()) < folds) {
    throw InputError("stratified_folds: more folds than samples");
  }
  std::vector<std::vector<int>> by_class(static_cast<size_t>(num_classes));
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw InputError("stratified_folds: label out of range");
    }
    by_class[static_cast<size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  for (const auto& members : by_class) {
    if (!members.empty() && static_cast<int>(members.size()) < 2) {
      throw InputError(
          "stratified_folds: a class with a single sample cannot appear in every training "
          "set");
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<int> assignment(labels.size(), 0);
  int next_fold = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (int idx : members) {
      assignment[static_cast<size_t>(idx)] = next_fold;
      next_fold = (next_fold + 1) % folds;
    }
  }
  return assignment;
}

CvReport cross_validate(const std::vector<int>& labels, int num_classes,
                        const std::map<ParamKey, Matrix>& distances,
                        const std::vector<double>& c_grid,
                        const std::vector<double>& gamma_grid, const CvConfig& cfg) {
  if (distances.empty()) throw InputError("cross_validate: no distance matrices");
  if (c_grid.empty() || gamma_grid.empty()) throw InputError("cross_validate: empty grid");
  const int n = static_cast<int>(labels.size());
  if (num_classes == 1) {
    // one label value: every prediction is trivially correct
    CvReport trivial;
    trivial.mean_accuracy = 1.0;
    trivial.std_accuracy = 0.0;
    trivial.repeat_accuracies.assign(static_cast<size_t>(cfg.repeats), 1.0);
    return trivial;
  }
  for (const auto& [key, d] : distances) {
    if (d.rows() != n || d.cols() != n) {
      throw InputError("cross_validate: distance matrix size does not match labels");
    }
  }

  // Gram matrices per (alpha/H, gamma), shared across folds and repeats.
  std::vector<std::pair<ParamKey, double>> kernel_keys;
  std::vector<Matrix> kernels;
  for (const auto& [key, d] : distances) {
    for (double gamma : gamma_grid) {
      kernel_keys.emplace_back(key, gamma);
      kernels.push_back(gram_from_distances(d, gamma).values);
    }
  }

  struct Task {
    int repeat;
    int fold;
  };
  std::vector<Task> tasks;
  for (int r = 0; r < cfg.repeats; ++r)
    for (int f = 0; f < cfg.folds; ++f) tasks.push_back({r, f});

  std::vector<std::vector<int>> fold_assignments(static_cast<size_t>(cfg.repeats));
  for (int r = 0; r < cfg.repeats; ++r) {
    fold_assignments[static_cast<size_t>(r)] =
        stratified_folds(labels, num_classes, cfg.folds, cfg.seed + static_cast<unsigned>(r));
  }

  std::vector<CvSelection> selections(tasks.size());
  std::vector<int> fold_correct(tasks.size(), 0);
  std::vector<int> fold_total(tasks.size(), 0);

  parallel_for(0, static_cast<Index>(tasks.size()), cfg.threads, [&](Index task_idx) {
    const Task task = tasks[static_cast<size_t>(task_idx)];
    const auto& fold_of = fold_assignments[static_cast<size_t>(task.repeat)];

    std::vector<int> train_idx;
    std::vector<int> test_idx;
    for (int i = 0; i < n; ++i) {
      (fold_of[static_cast<size_t>(i)] == task.fold ? test_idx : train_idx).push_back(i);
    }
    const std::vector<int> y_train = gather(labels, train_idx);
    const std::vector<int> y_test = gather(labels, test_idx);

    // inner stratified CV on the training set only
    std::vector<int> inner_fold;
    try {
      inner_fold = stratified_folds(
          y_train, num_classes, cfg.inner_folds,
          cfg.seed + 1000003u * static_cast<unsigned>(task.repeat) +
              7919u * static_cast<unsigned>(task.fold));
    } catch (const InputError&) {
      // a class too small to stratify inside this training set: plain round-robin
      inner_fold.resize(y_train.size());
      for (size_t t = 0; t < y_train.size(); ++t) {
        inner_fold[t] = static_cast<int>(t) % cfg.inner_folds;
      }
    }

    size_t best_kernel = 0;
    double best_c = c_grid.front();
    double best_score = -1.0;
    for (size_t kk = 0; kk < kernels.size(); ++kk) {
      Matrix train_gram = slice(kernels[kk], train_idx, train_idx);
      for (double c : c_grid) {
        int correct = 0;
        int total = 0;
        for (int inner = 0; inner < cfg.inner_folds; ++inner) {
          std::vector<int> fit_rows;
          std::vector<int> val_rows;
          for (size_t t = 0; t < train_idx.size(); ++t) {
            (inner_fold[t] == inner ? val_rows : fit_rows).push_back(static_cast<int>(t));
          }
          if (val_rows.empty() || fit_rows.empty()) continue;
          Matrix fit_gram = slice(train_gram, fit_rows, fit_rows);
          Matrix val_gram = slice(train_gram, val_rows, fit_rows);
          std::vector<int> y_fit = gather(y_train, fit_rows);
          std::vector<int> y_val = gather(y_train, val_rows);
          std::vector<int> pred = svm_classify(fit_gram, y_fit, val_gram, c, num_classes,
                                               nullptr, /*clip_indefinite=*/false);
          for (size_t t = 0; t < pred.size(); ++t) correct += pred[t] == y_val[t];
          total += static_cast<int>(pred.size());
        }
        const double score = total > 0 ? static_cast<double>(correct) / total : 0.0;
        if (score > best_score) {
          best_score = score;
          best_kernel = kk;
          best_c = c;
        }
      }
    }

    Matrix train_gram = slice(kernels[best_kernel], train_idx, train_idx);
    Matrix test_gram = slice(kernels[best_kernel], test_idx, train_idx);
    std::vector<int> pred = svm_classify(train_gram, y_train, test_gram, best_c, num_classes,
                                         nullptr, /*clip_indefinite=*/false);

    int correct = 0;
    for (size_t t = 0; t < pred.size(); ++t) correct += pred[t] == y_test[t];
    fold_correct[static_cast<size_t>(task_idx)] = correct;
    fold_total[static_cast<size_t>(task_idx)] = static_cast<int>(pred.size());

    CvSelection sel;
    sel.repeat = task.repeat;
    sel.fold = task.fold;
    sel.key = kernel_keys[best_kernel].first;
    sel.gamma = kernel_keys[best_kernel].second;
    sel.c = best_c;
    sel.test_accuracy = accuracy(pred, y_test);
    sel.test_indices = test_idx;
    sel.predictions = pred;
    selections[static_cast<size_t>(task_idx)] = sel;
  });

  CvReport report;
  report.selections = std::move(selections);
  report.repeat_accuracies.resize(static_cast<size_t>(cfg.repeats), 0.0);
  for (int r = 0; r < cfg.repeats; ++r) {
    int correct = 0;
    int total = 0;
    for (size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].repeat == r) {
        correct += fold_correct[t];
        total += fold_total[t];
      }
    }
    report.repeat_accuracies[static_cast<size_t>(r)] =
        total > 0 ? static_cast<double>(correct) / total : 0.0;
  }
  const double mean =
      std::accumulate(report.repeat_accuracies.begin(), report.repeat_accuracies.end(), 0.0) /
      static_cast<double>(cfg.repeats);
  double var = 0.0;
  for (double a : report.repeat_accuracies) var += (a - mean) * (a - mean);
  var /= static_cast<double>(cfg.repeats);
  report.mean_accuracy = mean;
  report.std_accuracy = std::sqrt(var);
  return report;
}

}  // namespace lfgw
