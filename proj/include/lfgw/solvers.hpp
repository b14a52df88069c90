#pragma once

#include "lfgw/measure_graph.hpp"
#include "lfgw/transport.hpp"

namespace lfgw {

/// Pairwise squared Euclidean distances between node features,
/// D(i,j) = ||x_i - y_j||^2, computed by the squared-norm expansion and
/// clamped at zero. Requires equal feature dimensionality d >= 1.
Matrix feature_cost_matrix(const MeasureGraph& g1, const MeasureGraph& g2);

/// FGW objective of a coupling:
///   sum_{i,j,k,l} [(1-alpha) ||x_i - y_j||^2 + alpha |A_{i,k} - B_{j,l}|^2]
///                 pi_{i,j} pi_{k,l},
/// evaluated through the tensorized identity (the structure term contracts to
/// <C12 - 2 A pi B, pi> with C12 built from the plan's own marginals), which
/// agrees with the quartic sum for every nonnegative plan.
double evaluate_fgw_objective(const MeasureGraph& g1, const MeasureGraph& g2,
                              const TransportPlan& plan, double alpha);

/// Fused Gromov-Wasserstein distance via the proximal point algorithm:
/// T outer iterations, each linearizing the structure term at the current
/// plan and solving the KL-proximal subproblem with Sinkhorn-Knopp scaling
/// (log-domain stabilization engages on kernel underflow). Deterministic:
/// initialization is the product coupling. The returned plan is rounded onto
/// the marginal polytope and the value is its exact objective.
FgwResult solve_fgw(const MeasureGraph& g1, const MeasureGraph& g2, const SolverConfig& cfg);

/// Entropic optimal transport for an explicit cost matrix through the same
/// proximal machinery (equivalent to solve_fgw at alpha = 0 with this cost).
FgwResult solve_wasserstein(const Matrix& cost, const Vector& mu, const Vector& nu,
                            const SolverConfig& cfg);

}  // namespace lfgw
