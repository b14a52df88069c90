#include "lfgw/wl.hpp"

#include <cmath>

namespace lfgw {

MeasureGraph wl_propagate(const MeasureGraph& g, int depth) {
  if (depth < 0) throw InputError("wl_propagate: depth must be >= 0");
  if (depth == 0) return g;
  if (g.feature_dim() < 1) {
    throw InputError("wl_propagate: graph has no node features to propagate");
  }
  const Index m = g.num_nodes();
  const Index d = g.feature_dim();

  Matrix out(m, d * (depth + 1));
  out.leftCols(d) = g.features;

  Vector row_sums = g.structure.rowwise().sum();
  Matrix current = g.features;
  for (int h = 1; h <= depth; ++h) {
    Matrix aggregated = g.structure * current;  // weighted neighbor sums
    Matrix next(m, d);
    for (Index i = 0; i < m; ++i) {
      if (std::abs(row_sums(i)) < 1e-15) {
        next.row(i) = current.row(i);  // isolated node: neighbor mean = self
      } else {
        next.row(i) = 0.5 * (current.row(i) + aggregated.row(i) / row_sums(i));
      }
    }
    out.middleCols(d * h, d) = next;
    current = std::move(next);
  }

  MeasureGraph result = g;
  result.features = std::move(out);
  return result;
}

GraphDataset wl_propagate(const GraphDataset& dataset, int depth) {
  GraphDataset out;
  out.name = dataset.name;
  out.num_classes = dataset.num_classes;
  out.graphs.reserve(dataset.graphs.size());
  for (const auto& g : dataset.graphs) out.graphs.push_back(wl_propagate(g, depth));
  return out;
}

double mixing_diameter(const MeasureGraph& g, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw InputError("mixing_diameter: alpha must be in [0,1]");
  const Index m = g.num_nodes();
  if (m == 0) throw InputError("mixing_diameter: empty graph");

  double feature_spread = 0.0;
  if (g.feature_dim() > 0) {
    for (Index i = 0; i < m; ++i) {
      for (Index j = i + 1; j < m; ++j) {
        const double dist = (g.features.row(i) - g.features.row(j)).squaredNorm();
        feature_spread = std::max(feature_spread, dist);
      }
    }
  }
  const double gap = g.structure.maxCoeff() - g.structure.minCoeff();
  return alpha * feature_spread + (1.0 - alpha) * gap * gap;
}

}  // namespace lfgw
