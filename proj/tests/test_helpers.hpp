#pragma once

#include <random>
#include <vector>

#include "lfgw/measure_graph.hpp"

namespace lfgw::testing {

/// Erdos-Renyi graph with standard normal features and uniform measure.
inline MeasureGraph random_graph(std::mt19937_64& rng, Index m, Index d,
                                 double edge_prob = 0.5) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      if (unif(rng) < edge_prob) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
  Matrix x(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = gauss(rng);
  return make_measure_graph(std::move(x), std::move(a), uniform_measure(m));
}

/// Path graph over scalar features.
inline MeasureGraph path_graph(const std::vector<double>& features) {
  const Index m = static_cast<Index>(features.size());
  Matrix x(m, 1);
  for (Index i = 0; i < m; ++i) x(i, 0) = features[static_cast<size_t>(i)];
  Matrix a = Matrix::Zero(m, m);
  for (Index i = 0; i + 1 < m; ++i) {
    a(i, i + 1) = 1.0;
    a(i + 1, i) = 1.0;
  }
  return make_measure_graph(std::move(x), std::move(a), uniform_measure(m));
}

inline std::vector<Index> random_permutation(std::mt19937_64& rng, Index m) {
  std::vector<Index> perm(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) perm[static_cast<size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace lfgw::testing
