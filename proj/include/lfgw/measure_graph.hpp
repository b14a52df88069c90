#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lfgw/types.hpp"

namespace lfgw {

/// A graph carrying node features X (m x d), a structure matrix A (m x m,
/// symmetric; binary adjacency unless built otherwise) and a probability
/// measure over nodes. Immutable by convention once validated.
struct MeasureGraph {
  Matrix features;   // m x d, d == 0 allowed (featureless graphs)
  Matrix structure;  // m x m, symmetric
  Vector measure;    // length m, nonnegative, sums to 1
  std::optional<int> label;

  Index num_nodes() const { return structure.rows(); }
  Index feature_dim() const { return features.cols(); }

  /// Throws InputError if any invariant is violated.
  void validate() const;
};

/// Validating constructor.
MeasureGraph make_measure_graph(Matrix features, Matrix structure, Vector measure,
                                std::optional<int> label = std::nullopt);

/// Uniform probability vector of length m.
Vector uniform_measure(Index m);

/// Graph with the same structure/features under a node relabeling:
/// new node p[i] takes the data of old node i.
MeasureGraph permute_graph(const MeasureGraph& g, const std::vector<Index>& perm);

/// An ordered collection of measure graphs sharing one feature dimensionality.
struct GraphDataset {
  std::vector<MeasureGraph> graphs;
  std::string name;
  int num_classes = 1;

  Index size() const { return static_cast<Index>(graphs.size()); }
  Index feature_dim() const { return graphs.empty() ? 0 : graphs.front().feature_dim(); }
  std::vector<int> labels() const;

  void validate() const;
};

}  // namespace lfgw
