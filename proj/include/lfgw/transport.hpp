#pragma once

#include <vector>

#include "lfgw/types.hpp"

namespace lfgw {

/// A coupling between two node measures. Rows belong to the source measure,
/// columns to the target.
struct TransportPlan {
  Matrix coupling;        // m x n, nonnegative
  Vector source_measure;  // length m
  Vector target_measure;  // length n

  /// L1 deviation of the coupling's marginals from the stored measures.
  double marginal_residual() const;

  /// Throws InputError if marginals deviate by more than eps or entries are
  /// negative beyond round-off.
  void validate(double eps = 1e-7) const;
};

/// Configuration of the proximal-point FGW / entropic Wasserstein solvers.
struct SolverConfig {
  double alpha = 0.5;            // feature/structure trade-off in [0,1]
  double eta = 0.1;              // proximal (entropic) weight
  int outer_iters = 5;           // proximal point iterations T
  int inner_sinkhorn_iters = 50; // Sinkhorn-Knopp iterations per proximal step
  double sinkhorn_tol = 1e-9;    // marginal L1 residual stopping threshold

  void validate() const;
};

struct FgwResult {
  double value = 0.0;  // objective at the returned (feasible) plan
  TransportPlan plan;
  bool converged = false;   // final proximal step met sinkhorn_tol
  double residual = 0.0;    // marginal residual of the last inner solve
  std::vector<double> objective_history;  // objective per accepted outer iterate
};

/// Exact projection of a nonnegative matrix onto the transport polytope
/// Pi(mu, nu): row/column rescaling followed by a rank-one residual fix.
Matrix round_to_marginals(const Matrix& plan, const Vector& mu, const Vector& nu);

}  // namespace lfgw
