#pragma once

#include <string>
#include <vector>

#include "lfgw/measure_graph.hpp"
#include "lfgw/solvers.hpp"

namespace lfgw {

/// Image of a source graph under the barycentric projections of a coupling:
/// a graph shaped like the reference (K nodes, reference measure) whose
/// features and structure are coupling-weighted averages of the source's.
struct SurrogateGraph {
  Matrix projected_features;   // K x d
  Matrix projected_structure;  // K x K
  Vector reference_measure;    // length K

  MeasureGraph as_measure_graph() const;
};

/// Barycentric projections for nodes and edges:
///   Zt_k    = (1/sigma_k) sum_i pi_{k,i} x_i
///   Ct_{kl} = (1/(sigma_k sigma_l)) sum_{i,j} pi_{k,i} pi_{l,j} A_{i,j}
/// where the plan runs from the reference (rows, measure sigma) to the source.
SurrogateGraph barycentric_project(const MeasureGraph& reference, const MeasureGraph& source,
                                   const TransportPlan& plan);

/// Fixed-length Euclidean image of a graph against a reference: the
/// sqrt(1-alpha)-scaled projected features (row-major, reference-node order)
/// followed by the sqrt(alpha)-scaled projected structure (row-major).
/// Blocks are stored without measure weights; distances apply them.
struct GraphEmbedding {
  Vector node_block;  // length K * d
  Vector edge_block;  // length K * K
  double alpha = 0.5;
  std::string reference_id;
  Index num_reference_nodes = 0;
  Index feature_dim = 0;
};

/// Solve FGW from the reference to g, project, and flatten.
GraphEmbedding embed(const MeasureGraph& reference, const MeasureGraph& g,
                     const SolverConfig& cfg, const std::string& reference_id = "");

/// Squared-distance between two embeddings sharing one reference:
///   (1-alpha) sum_k sigma_k ||dZ_k||^2 + alpha sum_{k,l} sigma_k sigma_l dC_{kl}^2
/// (the alpha factors live inside the stored blocks).
double linear_fgw_distance(const GraphEmbedding& e1, const GraphEmbedding& e2,
                           const Vector& sigma);

/// Flat vector whose plain squared Euclidean distance equals
/// linear_fgw_distance: node entries scaled by sqrt(sigma_k), edge entries by
/// sqrt(sigma_k sigma_l).
Vector weighted_embedding_vector(const GraphEmbedding& e, const Vector& sigma);

/// Embed every graph of a dataset against one reference (parallel).
std::vector<GraphEmbedding> embed_dataset(const GraphDataset& dataset,
                                          const MeasureGraph& reference,
                                          const SolverConfig& cfg, int threads = 0,
                                          const std::string& reference_id = "");

/// All pairwise distances between precomputed embeddings. Symmetric, zero
/// diagonal.
Matrix pairwise_distance_matrix(const std::vector<GraphEmbedding>& embeddings,
                                const Vector& sigma, int threads = 0);

/// N embeddings (one FGW solve each), then the N x N distance matrix.
Matrix pairwise_linear_fgw(const GraphDataset& dataset, const MeasureGraph& reference,
                           const SolverConfig& cfg, int threads = 0);

struct ProjectionCheckReport {
  double diag_value = 0.0;      // diagonal-plan objective between reference and surrogate
  double fgw_to_surrogate = 0.0;  // best known FGW(reference, surrogate)
  double fgw_to_g = 0.0;        // solver FGW(reference, g)
  bool optimality_checked = false;  // brute-force optimality scan ran
  bool optimality_ok = true;        // diag plan beats every brute-force candidate
  double optimality_margin = 0.0;   // min candidate objective - diag objective
  bool contraction_ok = false;       // FGW(ref, surrogate) <= FGW(ref, g) + tol
  double contraction_margin = 0.0;   // fgw_to_g - fgw_to_surrogate
};

/// Numerical check of the barycentric-projection optimality claims:
/// claim 1 - diag(sigma) is FGW-optimal between the reference and the
/// surrogate (verified by brute force over coupling-polytope vertices with
/// local refinement, only for graphs of <= max_bruteforce_nodes nodes);
/// claim 2 - FGW(reference, surrogate) <= FGW(reference, g).
ProjectionCheckReport check_projection_optimality(const MeasureGraph& reference, const MeasureGraph& g,
                          const SolverConfig& cfg, double tol = 1e-6,
                          Index max_bruteforce_nodes = 4);

struct BoundCheckReport {
  double lhs = 0.0;  // |FGW(g1,g2) - linearFGW(g1,g2)|
  double rhs = 0.0;  // 4 min{FGW(g1,ref), FGW(g2,ref)} + 2 diam(g1) + 2 diam(g2)
  double fgw_12 = 0.0;
  double linear_fgw_12 = 0.0;
  double fgw_1_ref = 0.0;
  double fgw_2_ref = 0.0;
  double diam_1 = 0.0;
  double diam_2 = 0.0;
  bool ok = false;
};

/// Numerical check of the linearization error bound
/// |FGW - linearFGW| <= 4 min{FGW(g1,ref), FGW(g2,ref)} + 2 diam(g1) + 2 diam(g2)
/// with a relative tolerance on the right-hand side.
BoundCheckReport check_linearization_bound(const MeasureGraph& g1, const MeasureGraph& g2,
                          const MeasureGraph& reference, const SolverConfig& cfg,
                          double rel_tol = 1e-4);

}  // namespace lfgw
