#include "lfgw/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

namespace lfgw {

GramMatrix gram_from_distances(const Matrix& distances, double gamma, GramSource source) {
  if (!(gamma > 0.0)) throw InputError("gram_from_distances: gamma must be positive");
  if (distances.rows() != distances.cols()) {
    throw InputError("gram_from_distances: distance matrix must be square");
  }
  if ((distances.array() < 0.0).any()) {
    throw InputError("gram_from_distances: negative distance entry");
  }
  if ((distances - distances.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw InputError("gram_from_distances: distance matrix must be symmetric");
  }
  if (distances.diagonal().cwiseAbs().maxCoeff() > 1e-9) {
    throw InputError("gram_from_distances: distance matrix must have a zero diagonal");
  }
  GramMatrix gram;
  gram.values = (-gamma * distances).array().exp().matrix();
  gram.values = 0.5 * (gram.values + gram.values.transpose()).eval();
  gram.gamma = gamma;
  gram.source = source;
  return gram;
}

std::pair<double, double> eigenvalue_range(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

bool is_positive_semidefinite(const Matrix& symmetric) {
  auto [lo, hi] = eigenvalue_range(symmetric);
  return lo >= -1e-8 * std::max(hi, 0.0);
}

namespace {

double squared_distance_to(const Matrix& points, Index i, const Vector& center) {
  return (points.row(i).transpose() - center).squaredNorm();
}

KmeansResult lloyd_once(const Matrix& points, int k, std::mt19937_64& rng, int max_iters) {
  const Index n = points.rows();
  const Index d = points.cols();

  // k-means++ seeding
  Matrix centroids(k, d);
  std::uniform_int_distribution<Index> first(0, n - 1);
  centroids.row(0) = points.row(first(rng));
  Vector best_sq = Vector::Constant(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    for (Index i = 0; i < n; ++i) {
      best_sq(i) =
          std::min(best_sq(i), squared_distance_to(points, i, centroids.row(c - 1).transpose()));
    }
    const double total = best_sq.sum();
    Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      double target = unif(rng);
      for (Index i = 0; i < n; ++i) {
        target -= best_sq(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);  // all points coincide with a centroid
    }
    centroids.row(c) = points.row(chosen);
  }

  std::vector<int> labels(static_cast<size_t>(n), 0);
  std::vector<int> counts(static_cast<size_t>(k), 0);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dist = (points.row(i) - centroids.row(c)).squaredNorm();
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (labels[static_cast<size_t>(i)] != best) {
        labels[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    centroids.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Index i = 0; i < n; ++i) {
      centroids.row(labels[static_cast<size_t>(i)]) += points.row(i);
      ++counts[static_cast<size_t>(labels[static_cast<size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        centroids.row(c) /= counts[static_cast<size_t>(c)];
      } else {
        // empty cluster: move it onto the point farthest from its centroid
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          const double dist =
              (points.row(i) - centroids.row(labels[static_cast<size_t>(i)])).squaredNorm();
          if (dist > far_d) {
            far_d = dist;
            far = i;
          }
        }
        centroids.row(c) = points.row(far);
      }
    }
  }

  KmeansResult result;
  result.labels = std::move(labels);
  result.centroids = std::move(centroids);
  result.inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    result.inertia +=
        (points.row(i) - result.centroids.row(result.labels[static_cast<size_t>(i)]))
            .squaredNorm();
  }
  return result;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, int k, unsigned seed, int restarts, int max_iters) {
  const Index n = points.rows();
  if (k < 1) throw InputError("kmeans: k must be >= 1");
  if (k > n) throw InputError("kmeans: k exceeds the number of points");
  std::mt19937_64 rng(seed);
  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    KmeansResult run = lloyd_once(points, k, rng, max_iters);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

std::vector<int> kmeans_embeddings(const std::vector<GraphEmbedding>& embeddings,
                                   const Vector& sigma, int k, unsigned seed, int restarts) {
  if (embeddings.empty()) throw InputError("kmeans_embeddings: no embeddings");
  const Index n = static_cast<Index>(embeddings.size());
  Vector first = weighted_embedding_vector(embeddings.front(), sigma);
  Matrix points(n, first.size());
  points.row(0) = first.transpose();
  for (Index i = 1; i < n; ++i) {
    points.row(i) =
        weighted_embedding_vector(embeddings[static_cast<size_t>(i)], sigma).transpose();
  }
  return kmeans(points, k, seed, restarts).labels;
}

std::vector<int> spectral_clustering(const GramMatrix& gram, int k, unsigned seed,
                                     bool* clipped) {
  const Index n = gram.values.rows();
  if (k < 1) throw InputError("spectral_clustering: k must be >= 1");
  if (k > n) throw InputError("spectral_clustering: k exceeds the number of samples");
  if (clipped) *clipped = false;

  Matrix affinity = gram.values;
  if (!is_positive_semidefinite(affinity)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(affinity);
    Vector ev = solver.eigenvalues().cwiseMax(0.0);
    affinity = solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
    if (clipped) *clipped = true;
  }

  Vector degree = affinity.rowwise().sum();
  if ((degree.array() <= 1e-300).any()) {
    throw InputError("spectral_clustering: degenerate affinity (zero row)");
  }
  Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Matrix normalized = inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(normalized);
  Matrix basis = solver.eigenvectors().rightCols(k);  // top-k eigenvalues
  for (Index i = 0; i < n; ++i) {
    const double norm = basis.row(i).norm();
    if (norm > 0.0) basis.row(i) /= norm;
  }
  return kmeans(basis, k, seed).labels;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw InputError("adjusted_rand_index: labelings must be nonempty and equal-length");
  }
  const auto relabel = [](const std::vector<int>& v) {
    std::vector<int> ids(v);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<int> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
      out[i] = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), v[i]) - ids.begin());
    }
    return std::make_pair(out, static_cast<int>(ids.size()));
  };
  auto [ra, ka] = relabel(a);
  auto [rb, kb] = relabel(b);
  Matrix contingency = Matrix::Zero(ka, kb);
  for (size_t i = 0; i < ra.size(); ++i) contingency(ra[i], rb[i]) += 1.0;

  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_cells = 0.0;
  for (Index i = 0; i < contingency.rows(); ++i)
    for (Index j = 0; j < contingency.cols(); ++j) sum_cells += choose2(contingency(i, j));
  double sum_rows = 0.0;
  for (Index i = 0; i < contingency.rows(); ++i) sum_rows += choose2(contingency.row(i).sum());
  double sum_cols = 0.0;
  for (Index j = 0; j < contingency.cols(); ++j) sum_cols += choose2(contingency.col(j).sum());
  const double total = choose2(static_cast<double>(ra.size()));
  const double expected = sum_rows * sum_cols / total;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (std::abs(maximum - expected) < 1e-15) return 1.0;  // both labelings trivial
  return (sum_cells - expected) / (maximum - expected);
}

double best_permutation_accuracy(const std::vector<int>& predicted,
                                 const std::vector<int>& truth, int k) {
  if (predicted.size() != truth.size() || predicted.empty()) {
    throw InputError("best_permutation_accuracy: labelings must be equal-length");
  }
  if (k < 1 || k > 8) {
    throw InputError("best_permutation_accuracy: k must be in [1, 8]");
  }
  std::vector<int> perm(static_cast<size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    int hits = 0;
    for (size_t i = 0; i < predicted.size(); ++i) {
      const int p = predicted[i];
      if (p >= 0 && p < k && perm[static_cast<size_t>(p)] == truth[i]) ++hits;
    }
    best = std::max(best, static_cast<double>(hits) / static_cast<double>(predicted.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace lfgw
