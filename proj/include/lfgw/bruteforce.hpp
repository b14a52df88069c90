#pragma once

#include <vector>

#include "lfgw/measure_graph.hpp"

namespace lfgw {
namespace bruteforce {

/// FGW objective of an arbitrary coupling by the literal quadruple sum.
/// Quadratic cost in the node counts; intended for graphs of <= ~6 nodes.
double quartic_objective(const MeasureGraph& g1, const MeasureGraph& g2, const Matrix& plan,
                         double alpha);

/// Every vertex of the transport polytope Pi(mu, nu), found by enumerating
/// spanning-tree supports of the complete bipartite graph and keeping the
/// feasible basic solutions. Guarded to small sizes (m * n <= 20).
std::vector<Matrix> coupling_vertices(const Vector& mu, const Vector& nu);

struct SearchResult {
  double value = 0.0;
  Matrix plan;
};

/// Independent minimizer of the FGW objective over the coupling polytope:
/// evaluates every vertex plus random feasible couplings, then polishes the
/// best candidates (and random restarts) with exact-line-search Frank-Wolfe,
/// whose linear subproblems are solved exactly over the vertex list.
SearchResult min_over_couplings(const MeasureGraph& g1, const MeasureGraph& g2, double alpha,
                                unsigned seed = 1, int refine_starts = 20,
                                int refine_iters = 120, int random_candidates = 64);

}  // namespace bruteforce
}  // namespace lfgw
