#pragma once

#include <vector>

#include "lfgw/linear_fgw.hpp"
#include "lfgw/types.hpp"

namespace lfgw {

enum class GramSource { LinearFgw, Fgw };

/// Gaussian kernel matrix K = exp(-gamma * D) built from a distance matrix.
struct GramMatrix {
  Matrix values;
  double gamma = 0.0;
  GramSource source = GramSource::LinearFgw;
};

/// Elementwise exp(-gamma * D). D must be symmetric, nonnegative with a zero
/// diagonal. When D is a squared Euclidean distance (the linearFGW case) the
/// result is positive semi-definite.
GramMatrix gram_from_distances(const Matrix& distances, double gamma,
                               GramSource source = GramSource::LinearFgw);

/// Smallest/largest eigenvalues of a symmetric matrix.
std::pair<double, double> eigenvalue_range(const Matrix& symmetric);

/// true iff min eigenvalue >= -1e-8 * max eigenvalue.
bool is_positive_semidefinite(const Matrix& symmetric);

struct KmeansResult {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding; the best of `restarts` seeded
/// runs by inertia. Deterministic for a fixed seed.
KmeansResult kmeans(const Matrix& points, int k, unsigned seed, int restarts = 50,
                    int max_iters = 100);

/// K-means on sqrt(sigma)-weighted embedding vectors.
std::vector<int> kmeans_embeddings(const std::vector<GraphEmbedding>& embeddings,
                                   const Vector& sigma, int k, unsigned seed,
                                   int restarts = 50);

/// Normalized-cut spectral clustering of a kernel matrix: symmetric
/// normalization, top-k eigenvectors, row normalization, k-means on the rows.
/// Kernels that fail the PSD check are clipped (negative eigenvalues zeroed);
/// `clipped`, when given, reports whether that happened.
std::vector<int> spectral_clustering(const GramMatrix& gram, int k, unsigned seed,
                                     bool* clipped = nullptr);

/// Adjusted Rand index between two labelings.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Clustering accuracy under the best label permutation (brute force over
/// permutations; k <= 8).
double best_permutation_accuracy(const std::vector<int>& predicted,
                                 const std::vector<int>& truth, int k);

}  // namespace lfgw
