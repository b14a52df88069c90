#pragma once

#include <vector>

#include "lfgw/measure_graph.hpp"
#include "lfgw/solvers.hpp"

namespace lfgw {

struct BarycenterConfig {
  Index num_nodes = 0;   // reference size K; 0 picks the median dataset node count
  int outer_iters = 10;  // block-coordinate rounds
  double tol = 1e-5;     // relative objective-decrease stopping threshold
  enum class Init { RandomSampleGraph, FeatureKmeans } init = Init::FeatureKmeans;
  unsigned seed = 0;

  void validate() const;
};

/// Median node count of a dataset (lower middle for even sizes).
Index median_node_count(const GraphDataset& dataset);

/// FGW barycenter of a dataset with uniform weights, computed by
/// block-coordinate descent: solve the plans from the current barycenter to
/// every graph, then replace features/structure by the plan-weighted average
/// of the barycentric projections. The objective per round is the mean FGW
/// value; per graph the better of the fresh plan and the previous round's
/// plan is kept, so the recorded sequence never increases.
MeasureGraph compute_barycenter(const GraphDataset& dataset, const BarycenterConfig& cfg_b,
                                const SolverConfig& cfg_s, int threads = 0,
                                std::vector<double>* objective_history = nullptr);

/// Sum of FGW distances from every dataset graph to the reference.
double barycenter_objective(const MeasureGraph& reference, const GraphDataset& dataset,
                            const SolverConfig& cfg_s, int threads = 0);

}  // namespace lfgw
