#pragma once

#include "lfgw/measure_graph.hpp"

namespace lfgw {

/// Continuous Weisfeiler-Lehman feature propagation. Each round replaces a
/// node feature by the average of itself and the mean over its neighbors
/// (neighbors = nonzero structure entries, weighted); rounds 0..depth are
/// concatenated, so the output dimensionality is d * (depth + 1).
/// depth == 0 returns the graph unchanged. Isolated nodes keep their own
/// feature as the neighbor mean.
MeasureGraph wl_propagate(const MeasureGraph& g, int depth);

/// Apply wl_propagate to every graph of a dataset.
GraphDataset wl_propagate(const GraphDataset& dataset, int depth);

/// Blended maximal spread of a graph:
///   alpha * max_{i,j} ||x_i - x_j||^2  +  (1 - alpha) * (max A - min A)^2.
/// Note the weighting mirrors the FGW objective (alpha on the feature term);
/// this is the form used by the linearization error bound.
double mixing_diameter(const MeasureGraph& g, double alpha);

}  // namespace lfgw
