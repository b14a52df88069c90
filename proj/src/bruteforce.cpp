#include "lfgw/bruteforce.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lfgw {
namespace bruteforce {

namespace {

// Union-find over m + n bipartite vertices.
struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Solve the flow on a spanning tree of K_{m,n} by peeling leaves. Returns
// false if any flow goes negative (infeasible basis).
bool solve_tree(const std::vector<std::pair<int, int>>& edges, const Vector& mu,
                const Vector& nu, Matrix& plan) {
  const int m = static_cast<int>(mu.size());
  const int n = static_cast<int>(nu.size());
  const int total = m + n;
  std::vector<std::vector<int>> incident(total);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    incident[edges[e].first].push_back(e);
    incident[m + edges[e].second].push_back(e);
  }
  std::vector<double> remaining(total);
  for (int i = 0; i < m; ++i) remaining[i] = mu(i);
  for (int j = 0; j < n; ++j) remaining[m + j] = nu(j);
  std::vector<int> degree(total);
  for (int v = 0; v < total; ++v) degree[v] = static_cast<int>(incident[v].size());
  std::vector<bool> edge_done(edges.size(), false);

  plan = Matrix::Zero(m, n);
  std::vector<int> leaves;
  for (int v = 0; v < total; ++v) {
    if (degree[v] == 1) leaves.push_back(v);
  }
  int processed = 0;
  while (!leaves.empty()) {
    const int v = leaves.back();
    leaves.pop_back();
    int live_edge = -1;
    for (int e : incident[v]) {
      if (!edge_done[e]) {
        live_edge = e;
        break;
      }
    }
    if (live_edge < 0) continue;
    const auto [ri, cj] = edges[live_edge];
    const double flow = remaining[v];
    if (flow < -1e-12) return false;
    plan(ri, cj) = std::max(flow, 0.0);
    edge_done[live_edge] = true;
    ++processed;
    const int other = (v == ri) ? m + cj : ri;
    remaining[other] -= flow;
    remaining[v] = 0.0;
    if (--degree[other] == 1) leaves.push_back(other);
    degree[v] = 0;
  }
  return processed == static_cast<int>(edges.size());
}

struct QuadraticObjective {
  const Matrix* feature_cost;  // null when alpha == 1 or featureless
  const Matrix* a;
  const Matrix* b;
  double alpha;

  double operator()(const Matrix& pi) const {
    double value = 0.0;
    const Index m = a->rows();
    const Index n = b->rows();
    if (alpha < 1.0 && feature_cost != nullptr) {
      value += (1.0 - alpha) * feature_cost->cwiseProduct(pi).sum();
    }
    if (alpha > 0.0) {
      double s = 0.0;
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
          const double pij = pi(i, j);
          if (pij == 0.0) continue;
          for (Index k = 0; k < m; ++k)
            for (Index l = 0; l < n; ++l) {
              const double diff = (*a)(i, k) - (*b)(j, l);
              s += diff * diff * pij * pi(k, l);
            }
        }
      value += alpha * s;
    }
    return value;
  }

  // gradient(i,j) = (1-alpha) D_ij + 2 alpha sum_{k,l} (A_ik - B_jl)^2 pi_kl
  Matrix gradient(const Matrix& pi) const {
    const Index m = a->rows();
    const Index n = b->rows();
    Matrix grad = Matrix::Zero(m, n);
    if (alpha < 1.0 && feature_cost != nullptr) grad = (1.0 - alpha) * (*feature_cost);
    if (alpha > 0.0) {
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
          double s = 0.0;
          for (Index k = 0; k < m; ++k)
            for (Index l = 0; l < n; ++l) {
              const double diff = (*a)(i, k) - (*b)(j, l);
              s += diff * diff * pi(k, l);
            }
          grad(i, j) += 2.0 * alpha * s;
        }
    }
    return grad;
  }

  // curvature term Q(d) = alpha * sum (A_ik - B_jl)^2 d_ij d_kl
  double curvature(const Matrix& d) const {
    if (alpha == 0.0) return 0.0;
    const Index m = a->rows();
    const Index n = b->rows();
    double s = 0.0;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) {
        if (d(i, j) == 0.0) continue;
        for (Index k = 0; k < m; ++k)
          for (Index l = 0; l < n; ++l) {
            const double diff = (*a)(i, k) - (*b)(j, l);
            s += diff * diff * d(i, j) * d(k, l);
          }
      }
    return alpha * s;
  }
};

// Frank-Wolfe with exact line search; the linear subproblem scans the vertex
// list, so iterates stay in the polytope.
double frank_wolfe(const QuadraticObjective& obj, const std::vector<Matrix>& vertices,
                   Matrix& pi, int iters) {
  double value = obj(pi);
  for (int it = 0; it < iters; ++it) {
    Matrix grad = obj.gradient(pi);
    int best = 0;
    double best_dot = (vertices[0].cwiseProduct(grad)).sum();
    for (int v = 1; v < static_cast<int>(vertices.size()); ++v) {
      const double dot = (vertices[v].cwiseProduct(grad)).sum();
      if (dot < best_dot) {
        best_dot = dot;
        best = v;
      }
    }
    Matrix dir = vertices[best] - pi;
    const double slope = grad.cwiseProduct(dir).sum();
    if (slope > -1e-14) break;  // stationary over the polytope
    const double curv = obj.curvature(dir);
    double gamma = 1.0;
    if (curv > 0.0) gamma = std::clamp(-slope / (2.0 * curv), 0.0, 1.0);
    // for nonconvex curvature pick the better endpoint
    if (curv <= 0.0 && slope + curv > 0.0) gamma = 0.0;
    if (gamma == 0.0) break;
    pi += gamma * dir;
    value = obj(pi);
  }
  return value;
}

// Random feasible coupling: positive random matrix pushed toward the
// marginals by iterative proportional fitting, then exactly repaired.
Matrix random_coupling(const Vector& mu, const Vector& nu, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Matrix x(mu.size(), nu.size());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = unif(rng);
  for (int it = 0; it < 60; ++it) {
    Vector r = x.rowwise().sum();
    for (Index i = 0; i < x.rows(); ++i) x.row(i) *= mu(i) / r(i);
    Vector c = x.colwise().sum();
    for (Index j = 0; j < x.cols(); ++j) x.col(j) *= nu(j) / c(j);
  }
  // exact repair: scale down overfull rows/cols, spread the deficit
  Vector r = x.rowwise().sum();
  for (Index i = 0; i < x.rows(); ++i)
    if (r(i) > mu(i)) x.row(i) *= mu(i) / r(i);
  Vector c = x.colwise().sum();
  for (Index j = 0; j < x.cols(); ++j)
    if (c(j) > nu(j)) x.col(j) *= nu(j) / c(j);
  Vector er = (mu - x.rowwise().sum()).cwiseMax(0.0);
  Vector ec = (nu - x.colwise().sum().transpose()).cwiseMax(0.0);
  const double tot = ec.sum();
  if (tot > 0.0) x += er * (ec / tot).transpose();
  return x;
}

}  // namespace

double quartic_objective(const MeasureGraph& g1, const MeasureGraph& g2, const Matrix& plan,
                         double alpha) {
  const Index m = g1.num_nodes();
  const Index n = g2.num_nodes();
  if (plan.rows() != m || plan.cols() != n) {
    throw InputError("quartic_objective: plan shape mismatch");
  }
  double total = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      if (plan(i, j) == 0.0 && alpha == 1.0) continue;
      double feature = 0.0;
      if (g1.feature_dim() > 0) {
        feature = (g1.features.row(i) - g2.features.row(j)).squaredNorm();
      }
      for (Index k = 0; k < m; ++k)
        for (Index l = 0; l < n; ++l) {
          const double gap = g1.structure(i, k) - g2.structure(j, l);
          total +=
              ((1.0 - alpha) * feature + alpha * gap * gap) * plan(i, j) * plan(k, l);
        }
    }
  return total;
}

std::vector<Matrix> coupling_vertices(const Vector& mu, const Vector& nu) {
  const int m = static_cast<int>(mu.size());
  const int n = static_cast<int>(nu.size());
  if (m * n > 20) {
    throw InputError("coupling_vertices: guarded to m*n <= 20 (vertex blow-up)");
  }
  const int edge_count = m * n;
  const int tree_size = m + n - 1;
  std::vector<std::pair<int, int>> all_edges;
  all_edges.reserve(edge_count);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) all_edges.emplace_back(i, j);

  std::vector<Matrix> vertices;
  std::vector<int> pick(tree_size);
  std::iota(pick.begin(), pick.end(), 0);

  auto is_tree = [&](const std::vector<int>& subset) {
    DisjointSet ds(m + n);
    for (int e : subset) {
      if (!ds.unite(all_edges[e].first, m + all_edges[e].second)) return false;
    }
    return true;
  };

  // enumerate all (m*n choose m+n-1) edge subsets
  while (true) {
    if (is_tree(pick)) {
      std::vector<std::pair<int, int>> edges;
      edges.reserve(tree_size);
      for (int e : pick) edges.push_back(all_edges[e]);
      Matrix plan;
      if (solve_tree(edges, mu, nu, plan)) vertices.push_back(std::move(plan));
    }
    int pos = tree_size - 1;
    while (pos >= 0 && pick[pos] == edge_count - tree_size + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int q = pos + 1; q < tree_size; ++q) pick[q] = pick[q - 1] + 1;
  }

  // drop exact duplicates (degenerate bases share vertices)
  std::vector<Matrix> unique;
  for (auto& v : vertices) {
    bool dup = false;
    for (const auto& u : unique) {
      if ((u - v).cwiseAbs().maxCoeff() < 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(std::move(v));
  }
  return unique;
}

SearchResult min_over_couplings(const MeasureGraph& g1, const MeasureGraph& g2, double alpha,
                                unsigned seed, int refine_starts, int refine_iters,
                                int random_candidates) {
  Matrix feature_cost;
  const bool with_features = g1.feature_dim() > 0 && alpha < 1.0;
  if (with_features) {
    if (g1.feature_dim() != g2.feature_dim()) {
      throw InputError("min_over_couplings: feature dimensionality mismatch");
    }
    feature_cost = Matrix(g1.num_nodes(), g2.num_nodes());
    for (Index i = 0; i < g1.num_nodes(); ++i)
      for (Index j = 0; j < g2.num_nodes(); ++j)
        feature_cost(i, j) = (g1.features.row(i) - g2.features.row(j)).squaredNorm();
  }
  QuadraticObjective obj{with_features ? &feature_cost : nullptr, &g1.structure,
                         &g2.structure, alpha};

  std::vector<Matrix> candidates = coupling_vertices(g1.measure, g2.measure);
  const size_t vertex_count = candidates.size();
  std::mt19937_64 rng(seed);
  for (int r = 0; r < random_candidates; ++r) {
    candidates.push_back(random_coupling(g1.measure, g2.measure, rng));
  }
  candidates.push_back(g1.measure * g2.measure.transpose());

  std::vector<std::pair<double, size_t>> scored;
  scored.reserve(candidates.size());
  for (size_t c = 0; c < candidates.size(); ++c) scored.emplace_back(obj(candidates[c]), c);
  std::sort(scored.begin(), scored.end());

  SearchResult best{scored.front().first, candidates[scored.front().second]};

  std::vector<Matrix> vertices(candidates.begin(),
                               candidates.begin() + static_cast<long>(vertex_count));
  const int starts = std::min<int>(refine_starts, static_cast<int>(scored.size()));
  for (int s = 0; s < starts; ++s) {
    Matrix pi = candidates[scored[static_cast<size_t>(s)].second];
    const double value = frank_wolfe(obj, vertices, pi, refine_iters);
    if (value < best.value) {
      best.value = value;
      best.plan = pi;
    }
  }
  return best;
}

}  // namespace bruteforce
}  // namespace lfgw
