#include "lfgw/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lfgw/kernels.hpp"
#include "lfgw/linear_fgw.hpp"
#include "lfgw/parallel.hpp"

namespace lfgw {

void BarycenterConfig::validate() const {
  if (num_nodes < 0) throw InputError("barycenter config: num_nodes must be >= 0");
  if (outer_iters < 1) throw InputError("barycenter config: outer_iters must be >= 1");
  if (!(tol > 0.0)) throw InputError("barycenter config: tol must be positive");
}

Index median_node_count(const GraphDataset& dataset) {
  if (dataset.graphs.empty()) throw InputError("median_node_count: empty dataset");
  std::vector<Index> sizes;
  sizes.reserve(dataset.graphs.size());
  for (const auto& g : dataset.graphs) sizes.push_back(g.num_nodes());
  std::sort(sizes.begin(), sizes.end());
  return sizes[(sizes.size() - 1) / 2];
}

namespace {

MeasureGraph init_from_sample(const GraphDataset& dataset, Index k, std::mt19937_64& rng) {
  std::uniform_int_distribution<size_t> pick(0, dataset.graphs.size() - 1);
  const MeasureGraph& g = dataset.graphs[pick(rng)];
  const Index m = g.num_nodes();
  std::vector<Index> idx(static_cast<size_t>(std::max(k, m)));
  for (Index i = 0; i < m; ++i) idx[static_cast<size_t>(i)] = i;
  if (m >= k) {
    std::shuffle(idx.begin(), idx.begin() + m, rng);
    idx.resize(static_cast<size_t>(k));
    std::sort(idx.begin(), idx.end());
  } else {
    std::uniform_int_distribution<Index> extra(0, m - 1);
    for (Index i = m; i < k; ++i) idx[static_cast<size_t>(i)] = extra(rng);
  }
  Matrix features(k, g.feature_dim());
  Matrix structure(k, k);
  for (Index r = 0; r < k; ++r) {
    features.row(r) = g.features.row(idx[static_cast<size_t>(r)]);
    for (Index c = 0; c < k; ++c) {
      structure(r, c) = g.structure(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
    }
  }
  return make_measure_graph(std::move(features), std::move(structure), uniform_measure(k));
}

MeasureGraph init_from_feature_kmeans(const GraphDataset& dataset, Index k,
                                      const SolverConfig& cfg_s, std::mt19937_64& rng) {
  const Index d = dataset.feature_dim();
  Index total = 0;
  for (const auto& g : dataset.graphs) total += g.num_nodes();
  if (total < k) {
    throw InputError("barycenter: K exceeds the pooled node count; use a smaller K");
  }

  Matrix z;
  if (d > 0) {
    Matrix pooled(total, d);
    Index row = 0;
    for (const auto& g : dataset.graphs) {
      pooled.middleRows(row, g.num_nodes()) = g.features;
      row += g.num_nodes();
    }
    std::uniform_int_distribution<unsigned> reseed;
    z = kmeans(pooled, static_cast<int>(k), reseed(rng), /*restarts=*/10).centroids;
  } else {
    z = Matrix(k, 0);
  }

  // structure: edge projection of a sampled graph under the first plan
  std::uniform_int_distribution<size_t> pick(0, dataset.graphs.size() - 1);
  const MeasureGraph& sample = dataset.graphs[pick(rng)];
  const Vector sigma = uniform_measure(k);
  Matrix plan;
  bool informative = d > 0;
  if (informative) {
    Matrix cost(k, sample.num_nodes());
    for (Index r = 0; r < k; ++r)
      for (Index c = 0; c < sample.num_nodes(); ++c)
        cost(r, c) = (z.row(r) - sample.features.row(c)).squaredNorm();
    if (cost.maxCoeff() <= 1e-15) informative = false;  // constant features
    if (informative) plan = solve_wasserstein(cost, sigma, sample.measure, cfg_s).plan.coupling;
  }
  if (!informative) plan = sigma * sample.measure.transpose();

  Matrix scaled = sigma.cwiseInverse().asDiagonal() * plan;
  Matrix projected = scaled * sample.structure * scaled.transpose();
  Matrix structure = 0.5 * (projected + projected.transpose());
  return make_measure_graph(std::move(z), std::move(structure), sigma);
}

}  // namespace

MeasureGraph compute_barycenter(const GraphDataset& dataset, const BarycenterConfig& cfg_b,
                                const SolverConfig& cfg_s, int threads,
                                std::vector<double>* objective_history) {
  cfg_b.validate();
  cfg_s.validate();
  if (dataset.graphs.empty()) throw InputError("compute_barycenter: empty dataset");
  const Index k = cfg_b.num_nodes > 0 ? cfg_b.num_nodes : median_node_count(dataset);
  const size_t n = dataset.graphs.size();
  const double weight = 1.0 / static_cast<double>(n);
  const Vector sigma = uniform_measure(k);

  std::mt19937_64 rng(cfg_b.seed);
  MeasureGraph bary = cfg_b.init == BarycenterConfig::Init::FeatureKmeans
                          ? init_from_feature_kmeans(dataset, k, cfg_s, rng)
                          : init_from_sample(dataset, k, rng);

  std::vector<TransportPlan> plans(n);
  std::vector<bool> has_plan(n, false);
  std::vector<double> values(n, 0.0);
  double prev_objective = std::numeric_limits<double>::infinity();

  for (int round = 0; round < cfg_b.outer_iters; ++round) {
    parallel_for(0, static_cast<Index>(n), threads, [&](Index idx) {
      const size_t i = static_cast<size_t>(idx);
      FgwResult res = solve_fgw(bary, dataset.graphs[i], cfg_s);
      double value = res.value;
      TransportPlan plan = std::move(res.plan);
      if (has_plan[i]) {
        // keep the previous round's plan when it still scores better
        const double prev_value =
            evaluate_fgw_objective(bary, dataset.graphs[i], plans[i], cfg_s.alpha);
        if (prev_value < value) {
          value = prev_value;
          plan = plans[i];
        }
      }
      plans[i] = std::move(plan);
      values[i] = value;
      has_plan[i] = true;
    });

    double objective = 0.0;
    for (double v : values) objective += weight * v;
    if (objective_history) objective_history->push_back(objective);
    if (round > 0 &&
        prev_objective - objective < cfg_b.tol * std::max(std::abs(prev_objective), 1e-12)) {
      break;
    }
    prev_objective = objective;

    Matrix z = Matrix::Zero(k, dataset.feature_dim());
    Matrix c = Matrix::Zero(k, k);
    Vector inv_sigma = sigma.cwiseInverse();
    for (size_t i = 0; i < n; ++i) {
      Matrix scaled = inv_sigma.asDiagonal() * plans[i].coupling;
      z.noalias() += weight * (scaled * dataset.graphs[i].features);
      c.noalias() += weight * (scaled * dataset.graphs[i].structure * scaled.transpose());
    }
    c = 0.5 * (c + c.transpose());
    bary = make_measure_graph(std::move(z), std::move(c), sigma);
  }
  return bary;
}

double barycenter_objective(const MeasureGraph& reference, const GraphDataset& dataset,
                            const SolverConfig& cfg_s, int threads) {
  if (dataset.graphs.empty()) throw InputError("barycenter_objective: empty dataset");
  std::vector<double> values(dataset.graphs.size(), 0.0);
  parallel_for(0, dataset.size(), threads, [&](Index i) {
    values[static_cast<size_t>(i)] =
        solve_fgw(dataset.graphs[static_cast<size_t>(i)], reference, cfg_s).value;
  });
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace lfgw
