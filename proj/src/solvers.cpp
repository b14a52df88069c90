#include "lfgw/solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lfgw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear-domain Sinkhorn is safe while every kernel log stays above this.
constexpr double kLogUnderflowGuard = -500.0;

void check_measure(const Vector& w, const char* side) {
  if ((w.array() <= 0.0).any()) {
    std::ostringstream os;
    os << "solver: " << side << " measure must be strictly positive";
    throw InputError(os.str());
  }
  if (std::abs(w.sum() - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "solver: " << side << " measure must sum to 1";
    throw InputError(os.str());
  }
}

Vector log_sum_exp_rows(const Matrix& m) {
  Vector mx = m.rowwise().maxCoeff();
  Vector out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    if (mx(i) == -kInf) {
      out(i) = -kInf;
    } else {
      out(i) = mx(i) + std::log((m.row(i).array() - mx(i)).exp().sum());
    }
  }
  return out;
}

struct ProxStep {
  Matrix log_plan;
  double residual = 0.0;
};

// Solves  min_{pi in Pi(mu,nu)} <cost, pi> + eta * KL(pi || exp(log_prev))
// by Sinkhorn-Knopp scaling of the kernel exp(log_prev - cost/eta).
// Runs in the linear domain while safe, otherwise in the log domain.
ProxStep kl_prox_sinkhorn(const Matrix& log_prev, const Matrix& cost, double eta,
                          const Vector& mu, const Vector& nu, int max_iters, double tol) {
  const Index m = mu.size();
  const Index n = nu.size();
  Matrix log_kernel = log_prev - cost / eta;

  const bool linear_safe = log_kernel.minCoeff() > kLogUnderflowGuard;
  if (linear_safe) {
    Matrix kernel = log_kernel.array().exp().matrix();
    Vector u = Vector::Ones(m);
    Vector v = Vector::Ones(n);
    double residual = kInf;
    bool stable = true;
    for (int it = 0; it < max_iters; ++it) {
      Vector kv = kernel * v;
      if ((kv.array() <= 0.0).any() || !kv.allFinite()) {
        stable = false;
        break;
      }
      u = mu.cwiseQuotient(kv);
      Vector ktu = kernel.transpose() * u;
      if ((ktu.array() <= 0.0).any() || !ktu.allFinite()) {
        stable = false;
        break;
      }
      v = nu.cwiseQuotient(ktu);
      // column marginals are exact after the v-update; measure the row gap
      residual = (u.cwiseProduct(kernel * v) - mu).cwiseAbs().sum();
      if (residual <= tol) break;
    }
    if (stable && u.allFinite() && v.allFinite()) {
      ProxStep step;
      step.log_plan = log_kernel;
      step.log_plan.colwise() += u.array().log().matrix();
      step.log_plan.rowwise() += v.array().log().matrix().transpose();
      step.residual = residual;
      return step;
    }
    // fall through to the stabilized path
  }

  Vector log_mu = mu.array().log().matrix();
  Vector log_nu = nu.array().log().matrix();
  Vector f = Vector::Zero(m);
  Vector g = Vector::Zero(n);
  double residual = kInf;
  for (int it = 0; it < max_iters; ++it) {
    Matrix shifted = log_kernel;
    shifted.rowwise() += g.transpose();
    Vector row_lse = log_sum_exp_rows(shifted);
    if ((row_lse.array() == -kInf).any()) {
      throw NumericalError(
          "Sinkhorn underflow: a kernel row is numerically zero; increase eta");
    }
    f = log_mu - row_lse;

    Matrix shifted_t = log_kernel.transpose();
    shifted_t.rowwise() += f.transpose();
    Vector col_lse = log_sum_exp_rows(shifted_t);
    if ((col_lse.array() == -kInf).any()) {
      throw NumericalError(
          "Sinkhorn underflow: a kernel column is numerically zero; increase eta");
    }
    g = log_nu - col_lse;

    Matrix log_plan = log_kernel;
    log_plan.colwise() += f;
    log_plan.rowwise() += g.transpose();
    Vector rows = log_plan.array().exp().matrix().rowwise().sum();
    residual = (rows - mu).cwiseAbs().sum();
    if (residual <= tol) break;
  }
  ProxStep step;
  step.log_plan = log_kernel;
  step.log_plan.colwise() += f;
  step.log_plan.rowwise() += g.transpose();
  step.residual = residual;
  return step;
}

double objective_terms(const Matrix* feature_cost, const Matrix& a, const Matrix& b,
                       const Matrix& pi, double alpha) {
  double feature_term = 0.0;
  if (alpha < 1.0 && feature_cost != nullptr) {
    feature_term = feature_cost->cwiseProduct(pi).sum();
  }
  double structure_term = 0.0;
  if (alpha > 0.0) {
    Vector row_mass = pi.rowwise().sum();
    Vector col_mass = pi.colwise().sum();
    const double s1 = row_mass.dot(a.cwiseProduct(a) * row_mass);
    const double s2 = col_mass.dot(b.cwiseProduct(b) * col_mass);
    const double cross = (a * pi * b).cwiseProduct(pi).sum();
    structure_term = s1 + s2 - 2.0 * cross;
  }
  const double value = (1.0 - alpha) * feature_term + alpha * structure_term;
  return value < 0.0 ? 0.0 : value;  // absorb round-off on self-pairs
}

// Node ordering by (degree, feature row), invariant to relabeling whenever
// the keys are distinct.
std::vector<Index> alignment_order(const Matrix& structure, const Matrix& features) {
  const Index m = structure.rows();
  Vector degree = structure.rowwise().sum();
  std::vector<Index> order(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (degree(a) != degree(b)) return degree(a) > degree(b);
    for (Index c = 0; c < features.cols(); ++c) {
      if (features(a, c) != features(b, c)) return features(a, c) < features(b, c);
    }
    return a < b;
  });
  return order;
}

// Northwest-corner coupling along sorted node orders: a sharp alignment that
// breaks the regular-graph symmetry the product coupling cannot escape (the
// linearized structure cost is constant there, so Sinkhorn reproduces the
// prior). Blended with the product plan to keep the support strictly positive
// for the multiplicative kernel.
Matrix sorted_alignment_plan(const MeasureGraph& g1, const MeasureGraph& g2) {
  const Vector& mu = g1.measure;
  const Vector& nu = g2.measure;
  const auto rows = alignment_order(g1.structure, g1.features);
  const auto cols = alignment_order(g2.structure, g2.features);
  Matrix nw = Matrix::Zero(mu.size(), nu.size());
  size_t i = 0;
  size_t j = 0;
  double need_row = mu(rows[0]);
  double need_col = nu(cols[0]);
  while (true) {
    const double moved = std::min(need_row, need_col);
    nw(rows[i], cols[j]) += moved;
    need_row -= moved;
    need_col -= moved;
    if (need_row <= 1e-15) {
      if (++i >= rows.size()) break;
      need_row = mu(rows[i]);
    }
    if (need_col <= 1e-15) {
      if (++j >= cols.size()) break;
      need_col = nu(cols[j]);
    }
  }
  return 0.9 * nw + 0.1 * mu * nu.transpose();
}

struct ProximalLoopResult {
  Matrix plan;  // rounded, feasible
  double value = 0.0;
  bool converged = false;
  double residual = 0.0;
  std::vector<double> history;
};

// Shared outer loop from a strictly positive feasible starting plan.
// `make_cost` maps the current (unrounded) plan to the linearized cost of the
// next proximal subproblem; `objective` scores a rounded plan.
template <typename CostFn, typename ObjectiveFn>
ProximalLoopResult run_proximal_loop(const Vector& mu, const Vector& nu,
                                     const SolverConfig& cfg, CostFn&& make_cost,
                                     ObjectiveFn&& objective, Matrix pi) {
  Matrix log_plan = pi.array().log().matrix();

  ProximalLoopResult out;
  double prev_value = kInf;
  for (int t = 0; t < cfg.outer_iters; ++t) {
    Matrix cost = make_cost(pi);
    ProxStep step =
        kl_prox_sinkhorn(log_plan, cost, cfg.eta, mu, nu, cfg.inner_sinkhorn_iters,
                         cfg.sinkhorn_tol);
    Matrix pi_new = step.log_plan.array().exp().matrix();
    Matrix rounded = round_to_marginals(pi_new, mu, nu);
    const double value = objective(rounded);
    if (t > 0 && value > prev_value + 1e-12 * std::max(1.0, std::abs(prev_value))) {
      break;  // inner inexactness started to hurt; keep the better iterate
    }
    log_plan = std::move(step.log_plan);
    pi = std::move(pi_new);
    out.plan = std::move(rounded);
    out.residual = step.residual;
    out.history.push_back(value);
    prev_value = value;
  }
  out.value = prev_value;
  out.converged = out.residual <= cfg.sinkhorn_tol;
  return out;
}

}  // namespace

double TransportPlan::marginal_residual() const {
  const double row_gap = (coupling.rowwise().sum() - source_measure).cwiseAbs().sum();
  const double col_gap =
      (coupling.colwise().sum().transpose() - target_measure).cwiseAbs().sum();
  return row_gap + col_gap;
}

void TransportPlan::validate(double eps) const {
  if (coupling.rows() != source_measure.size() || coupling.cols() != target_measure.size()) {
    throw InputError("transport plan: coupling shape does not match measures");
  }
  if ((coupling.array() < 0.0).any()) {
    throw InputError("transport plan: negative coupling entry");
  }
  if (marginal_residual() > eps) {
    throw InputError("transport plan: marginals violated beyond tolerance");
  }
}

void SolverConfig::validate() const {
  if (alpha < 0.0 || alpha > 1.0) throw InputError("solver config: alpha must be in [0,1]");
  if (!(eta > 0.0)) throw InputError("solver config: eta must be positive");
  if (outer_iters < 1) throw InputError("solver config: outer_iters must be >= 1");
  if (inner_sinkhorn_iters < 1) {
    throw InputError("solver config: inner_sinkhorn_iters must be >= 1");
  }
  if (!(sinkhorn_tol > 0.0)) throw InputError("solver config: sinkhorn_tol must be positive");
}

Matrix round_to_marginals(const Matrix& plan, const Vector& mu, const Vector& nu) {
  if (plan.rows() != mu.size() || plan.cols() != nu.size()) {
    throw InputError("round_to_marginals: shape mismatch");
  }
  Matrix x = plan;
  Vector rows = x.rowwise().sum();
  for (Index i = 0; i < x.rows(); ++i) {
    if (rows(i) > mu(i) && rows(i) > 0.0) x.row(i) *= mu(i) / rows(i);
  }
  Vector cols = x.colwise().sum();
  for (Index j = 0; j < x.cols(); ++j) {
    if (cols(j) > nu(j) && cols(j) > 0.0) x.col(j) *= nu(j) / cols(j);
  }
  Vector err_r = (mu - x.rowwise().sum()).cwiseMax(0.0);
  Vector err_c = (nu - x.colwise().sum().transpose()).cwiseMax(0.0);
  const double total = err_c.sum();
  if (total > 0.0) {
    x.noalias() += err_r * (err_c / total).transpose();
  }
  return x;
}

Matrix feature_cost_matrix(const MeasureGraph& g1, const MeasureGraph& g2) {
  if (g1.feature_dim() != g2.feature_dim()) {
    throw InputError("feature_cost_matrix: feature dimensionality mismatch");
  }
  if (g1.feature_dim() < 1) {
    throw InputError("feature_cost_matrix: graphs carry no node features");
  }
  Vector sq1 = g1.features.rowwise().squaredNorm();
  Vector sq2 = g2.features.rowwise().squaredNorm();
  Matrix d = (-2.0) * g1.features * g2.features.transpose();
  d.colwise() += sq1;
  d.rowwise() += sq2.transpose();
  return d.cwiseMax(0.0);
}

double evaluate_fgw_objective(const MeasureGraph& g1, const MeasureGraph& g2,
                              const TransportPlan& plan, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw InputError("evaluate_fgw_objective: alpha must be in [0,1]");
  }
  if (plan.coupling.rows() != g1.num_nodes() || plan.coupling.cols() != g2.num_nodes()) {
    throw InputError("evaluate_fgw_objective: plan shape does not match graphs");
  }
  if (g1.feature_dim() != g2.feature_dim()) {
    throw InputError("evaluate_fgw_objective: feature dimensionality mismatch");
  }
  if (alpha < 1.0 && g1.feature_dim() >= 1) {
    Matrix d = feature_cost_matrix(g1, g2);
    return objective_terms(&d, g1.structure, g2.structure, plan.coupling, alpha);
  }
  return objective_terms(nullptr, g1.structure, g2.structure, plan.coupling, alpha);
}

FgwResult solve_fgw(const MeasureGraph& g1, const MeasureGraph& g2, const SolverConfig& cfg) {
  cfg.validate();
  if (g1.num_nodes() == 0 || g2.num_nodes() == 0) {
    throw InputError("solve_fgw: graphs must be nonempty");
  }
  if (g1.feature_dim() != g2.feature_dim()) {
    throw InputError("solve_fgw: feature dimensionality mismatch");
  }
  const bool featureless = g1.feature_dim() == 0;
  if (featureless && cfg.alpha != 1.0) {
    throw InputError("solve_fgw: featureless graphs require alpha = 1");
  }
  check_measure(g1.measure, "source");
  check_measure(g2.measure, "target");
  if (!g1.structure.allFinite() || !g2.structure.allFinite() || !g1.features.allFinite() ||
      !g2.features.allFinite()) {
    throw InputError("solve_fgw: non-finite cost entries");
  }

  const Index m = g1.num_nodes();
  const Index n = g2.num_nodes();
  const Matrix& a = g1.structure;
  const Matrix& b = g2.structure;
  const Vector& mu = g1.measure;
  const Vector& nu = g2.measure;

  Matrix feature_cost =
      featureless ? Matrix::Zero(m, n) : feature_cost_matrix(g1, g2);

  // Constant part of the linearized structure cost: C12 = (A.A) mu 1' + 1 nu' (B.B)'
  Matrix c12 = Matrix::Zero(m, n);
  c12.colwise() += (a.cwiseProduct(a) * mu).eval();
  c12.rowwise() += (b.cwiseProduct(b) * nu).transpose().eval();

  const double alpha = cfg.alpha;
  auto make_cost = [&](const Matrix& pi) -> Matrix {
    Matrix cost = (1.0 - alpha) * feature_cost;
    if (alpha > 0.0) cost.noalias() += alpha * (c12 - 2.0 * a * pi * b);
    return cost;
  };
  auto objective = [&](const Matrix& pi) {
    return objective_terms(featureless ? nullptr : &feature_cost, a, b, pi, alpha);
  };

  ProximalLoopResult loop =
      run_proximal_loop(mu, nu, cfg, make_cost, objective, mu * nu.transpose());
  if (alpha > 0.0 && m > 1 && n > 1) {
    // the structure term is quadratic; a second deterministic start escapes
    // product-coupling saddles on (near-)regular graphs
    ProximalLoopResult alt = run_proximal_loop(mu, nu, cfg, make_cost, objective,
                                               sorted_alignment_plan(g1, g2));
    if (alt.value < loop.value) loop = std::move(alt);
  }

  FgwResult result;
  result.value = loop.value;
  result.plan = TransportPlan{std::move(loop.plan), mu, nu};
  result.converged = loop.converged;
  result.residual = loop.residual;
  result.objective_history = std::move(loop.history);
  return result;
}

FgwResult solve_wasserstein(const Matrix& cost, const Vector& mu, const Vector& nu,
                            const SolverConfig& cfg) {
  cfg.validate();
  if (cost.rows() != mu.size() || cost.cols() != nu.size()) {
    throw InputError("solve_wasserstein: cost shape does not match measures");
  }
  if (!cost.allFinite()) throw InputError("solve_wasserstein: non-finite cost entries");
  if ((cost.array() < 0.0).any()) {
    throw InputError("solve_wasserstein: cost entries must be nonnegative");
  }
  check_measure(mu, "source");
  check_measure(nu, "target");

  auto make_cost = [&](const Matrix&) { return cost; };
  auto objective = [&](const Matrix& pi) { return cost.cwiseProduct(pi).sum(); };
  ProximalLoopResult loop =
      run_proximal_loop(mu, nu, cfg, make_cost, objective, mu * nu.transpose());

  FgwResult result;
  result.value = loop.value;
  result.plan = TransportPlan{std::move(loop.plan), mu, nu};
  result.converged = loop.converged;
  result.residual = loop.residual;
  result.objective_history = std::move(loop.history);
  return result;
}

}  // namespace lfgw
