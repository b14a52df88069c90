#include <doctest.h>

#include "lfgw/solvers.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace lfgw;

namespace {

SolverConfig tight_config(double alpha) {
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.eta = 0.1;
  cfg.outer_iters = 20;
  cfg.inner_sinkhorn_iters = 200;
  cfg.sinkhorn_tol = 1e-10;
  return cfg;
}

}  // namespace

TEST_CASE("feature cost matrix") {
  SUBCASE("identical single-node graphs") {
    MeasureGraph g = testing::path_graph({1.5});
    Matrix d = feature_cost_matrix(g, g);
    CHECK(d.rows() == 1);
    CHECK(d(0, 0) == doctest::Approx(0.0));
  }
  SUBCASE("unit basis vectors") {
    Matrix x1(1, 2), x2(1, 2);
    x1 << 1.0, 0.0;
    x2 << 0.0, 1.0;
    MeasureGraph g1 = make_measure_graph(x1, Matrix::Zero(1, 1), uniform_measure(1));
    MeasureGraph g2 = make_measure_graph(x2, Matrix::Zero(1, 1), uniform_measure(1));
    CHECK(feature_cost_matrix(g1, g2)(0, 0) == doctest::Approx(2.0));
  }
  SUBCASE("matches the naive double loop") {
    std::mt19937_64 rng(17);
    MeasureGraph g1 = testing::random_graph(rng, 3, 2);
    MeasureGraph g2 = testing::random_graph(rng, 4, 2);
    Matrix fast = feature_cost_matrix(g1, g2);
    Matrix naive = testing::naive_feature_cost(g1, g2);
    CHECK((fast - naive).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("dimension mismatch") {
    std::mt19937_64 rng(17);
    MeasureGraph g1 = testing::random_graph(rng, 3, 2);
    MeasureGraph g2 = testing::random_graph(rng, 3, 3);
    CHECK_THROWS_AS(feature_cost_matrix(g1, g2), InputError);
  }
}

TEST_CASE("evaluate_fgw_objective") {
  SUBCASE("diagonal self-plan gives zero") {
    std::mt19937_64 rng(29);
    MeasureGraph g = testing::random_graph(rng, 4, 2);
    TransportPlan plan{Matrix(g.measure.asDiagonal()), g.measure, g.measure};
    CHECK(evaluate_fgw_objective(g, g, plan, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("single-node closed form") {
    // feature distance^2 = 4, structures zero, alpha = 1/4 -> 0.75 * 4 = 3
    MeasureGraph g1 = testing::path_graph({0.0});
    MeasureGraph g2 = testing::path_graph({2.0});
    TransportPlan plan{Matrix::Ones(1, 1), uniform_measure(1), uniform_measure(1)};
    CHECK(evaluate_fgw_objective(g1, g2, plan, 0.25) == doctest::Approx(3.0));
  }
  SUBCASE("tensorized value equals the quartic loop") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
      MeasureGraph g1 = testing::random_graph(rng, 3, 2);
      MeasureGraph g2 = testing::random_graph(rng, 3, 2);
      Matrix coupling = g1.measure * g2.measure.transpose();
      TransportPlan plan{coupling, g1.measure, g2.measure};
      const double alpha = trial / 25.0;
      const double fast = evaluate_fgw_objective(g1, g2, plan, alpha);
      const double slow = testing::quartic_fgw_objective(g1, g2, coupling, alpha);
      CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
  }
  SUBCASE("alpha 1 ignores features, alpha 0 ignores structure") {
    std::mt19937_64 rng(37);
    MeasureGraph g1 = testing::random_graph(rng, 3, 2);
    MeasureGraph g2 = testing::random_graph(rng, 4, 2);
    MeasureGraph g1_perturbed = g1;
    g1_perturbed.features.setRandom();
    Matrix coupling = g1.measure * g2.measure.transpose();
    TransportPlan plan{coupling, g1.measure, g2.measure};
    CHECK(evaluate_fgw_objective(g1, g2, plan, 1.0) ==
          doctest::Approx(evaluate_fgw_objective(g1_perturbed, g2, plan, 1.0)));
    MeasureGraph g1_rewired = g1;
    g1_rewired.structure.setZero();
    CHECK(evaluate_fgw_objective(g1, g2, plan, 0.0) ==
          doctest::Approx(evaluate_fgw_objective(g1_rewired, g2, plan, 0.0)));
  }
}

TEST_CASE("solve_fgw self distance is ~0 with a near-diagonal plan") {
  MeasureGraph g = testing::path_graph({0.0, 2.0, 4.0, 6.0});
  FgwResult res = solve_fgw(g, g, tight_config(0.5));
  CHECK(res.value <= 1e-6);
  Matrix diag = Matrix(g.measure.asDiagonal());
  CHECK((res.plan.coupling - diag).cwiseAbs().maxCoeff() < 1e-5);
  res.plan.validate();
}

TEST_CASE("solve_fgw beats or matches the one-parameter grid scan on 2-node pairs") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    MeasureGraph g1 = testing::random_graph(rng, 2, 2, 0.8);
    MeasureGraph g2 = testing::random_graph(rng, 2, 2, 0.4);
    const double alpha = (trial % 5) / 4.0;
    FgwResult res = solve_fgw(g1, g2, tight_config(alpha));
    const double oracle = testing::two_node_grid_minimum(g1, g2, alpha);
    CHECK(res.value <= oracle * 1.02 + 1e-9);
    CHECK(res.value >= oracle - 1e-6);
  }
}

TEST_CASE("solve_fgw at alpha 0 equals entropic Wasserstein on the feature cost") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    MeasureGraph g1 = testing::random_graph(rng, 3, 2);
    MeasureGraph g2 = testing::random_graph(rng, 4, 2);
    SolverConfig cfg = tight_config(0.0);
    FgwResult fgw = solve_fgw(g1, g2, cfg);
    FgwResult wass = solve_wasserstein(feature_cost_matrix(g1, g2), g1.measure, g2.measure, cfg);
    CHECK(fgw.value == doctest::Approx(wass.value).epsilon(1e-6));
  }
}

TEST_CASE("solve_fgw symmetry and permutation equivariance") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    MeasureGraph g1 = testing::random_graph(rng, 3, 2);
    MeasureGraph g2 = testing::random_graph(rng, 4, 2);
    SolverConfig cfg = tight_config(0.5);
    FgwResult forward = solve_fgw(g1, g2, cfg);
    FgwResult backward = solve_fgw(g2, g1, cfg);
    CHECK(forward.value == doctest::Approx(backward.value).epsilon(1e-6));

    auto perm = testing::random_permutation(rng, 3);
    FgwResult permuted = solve_fgw(permute_graph(g1, perm), g2, cfg);
    CHECK(permuted.value == doctest::Approx(forward.value).epsilon(1e-8));
    Matrix rearranged(3, 4);
    for (Index i = 0; i < 3; ++i) {
      rearranged.row(perm[static_cast<size_t>(i)]) = forward.plan.coupling.row(i);
    }
    CHECK((permuted.plan.coupling - rearranged).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("solve_fgw objective history is non-increasing") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    MeasureGraph g1 = testing::random_graph(rng, 4, 2);
    MeasureGraph g2 = testing::random_graph(rng, 5, 2);
    SolverConfig cfg;
    cfg.alpha = 0.5;
    cfg.outer_iters = 10;
    FgwResult res = solve_fgw(g1, g2, cfg);
    for (size_t t = 1; t < res.objective_history.size(); ++t) {
      CHECK(res.objective_history[t] <= res.objective_history[t - 1] + 1e-8);
    }
  }
}

TEST_CASE("returned plans satisfy the coupling invariants") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    MeasureGraph g1 = testing::random_graph(rng, 3 + trial % 3, 2);
    MeasureGraph g2 = testing::random_graph(rng, 2 + trial % 4, 2);
    SolverConfig cfg;
    cfg.alpha = 0.3;
    FgwResult res = solve_fgw(g1, g2, cfg);
    res.plan.validate(1e-7);
    CHECK(res.value == doctest::Approx(evaluate_fgw_objective(g1, g2, res.plan, cfg.alpha))
                           .epsilon(1e-10));
  }
}

TEST_CASE("solve_fgw featureless graphs require alpha 1") {
  // 3-path: irregular degrees, so the product initialization is not a
  // stationary point of the structure term (regular graphs would stall there)
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 2) = a(2, 1) = 1.0;
  MeasureGraph g = make_measure_graph(Matrix(3, 0), a, uniform_measure(3));
  CHECK_THROWS_AS(solve_fgw(g, g, tight_config(0.5)), InputError);
  FgwResult res = solve_fgw(g, g, tight_config(1.0));
  CHECK(res.value <= 1e-8);
}

TEST_CASE("solve_wasserstein closed forms") {
  SUBCASE("single source row") {
    Matrix cost(1, 3);
    cost << 1.0, 2.0, 3.0;
    Vector mu = uniform_measure(1);
    Vector nu(3);
    nu << 0.2, 0.3, 0.5;
    FgwResult res = solve_wasserstein(cost, mu, nu, tight_config(0.0));
    CHECK((res.plan.coupling.transpose() - nu).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(res.value == doctest::Approx(0.2 + 0.6 + 1.5));
  }
  SUBCASE("2x2 anti-identity cost pushes mass to the diagonal") {
    Matrix cost(2, 2);
    cost << 0.0, 1.0, 1.0, 0.0;
    SolverConfig cfg = tight_config(0.0);
    cfg.outer_iters = 60;
    FgwResult res = solve_wasserstein(cost, uniform_measure(2), uniform_measure(2), cfg);
    CHECK(res.value <= 1e-6);
    CHECK(res.plan.coupling(0, 0) == doctest::Approx(0.5).epsilon(1e-4));
  }
  SUBCASE("random 4x4 against the permutation-enumeration oracle") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      Matrix cost(4, 4);
      for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) cost(i, j) = unif(rng);
      SolverConfig cfg = tight_config(0.0);
      cfg.outer_iters = 60;
      cfg.inner_sinkhorn_iters = 300;
      FgwResult res = solve_wasserstein(cost, uniform_measure(4), uniform_measure(4), cfg);
      const double lp = testing::permutation_lp_minimum(cost);
      CHECK(res.value <= lp * 1.02 + 1e-9);
      CHECK(res.value >= lp - 1e-9);
    }
  }
  SUBCASE("negative and non-finite costs rejected") {
    Matrix bad(1, 1);
    bad << -1.0;
    CHECK_THROWS_AS(solve_wasserstein(bad, uniform_measure(1), uniform_measure(1), SolverConfig{}),
                    InputError);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_wasserstein(bad, uniform_measure(1), uniform_measure(1), SolverConfig{}),
                    InputError);
  }
}

TEST_CASE("log-domain stabilization handles huge costs") {
  // squared distances of order 1e4 drive exp(-cost/eta) far below double range
  Matrix x1(2, 1), x2(2, 1);
  x1 << 0.0, 100.0;
  x2 << 0.0, 100.0;
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = a(1, 0) = 1.0;
  MeasureGraph g1 = make_measure_graph(x1, a, uniform_measure(2));
  MeasureGraph g2 = make_measure_graph(x2, a, uniform_measure(2));
  FgwResult res = solve_fgw(g1, g2, tight_config(0.5));
  CHECK(res.value <= 1e-6);  // identity matching is free
  res.plan.validate();
}

TEST_CASE("solver handles non-uniform node measures") {
  std::mt19937_64 rng(67);
  MeasureGraph g1 = testing::random_graph(rng, 4, 2);
  MeasureGraph g2 = testing::random_graph(rng, 3, 2);
  Vector mu(4);
  mu << 0.4, 0.3, 0.2, 0.1;
  Vector nu(3);
  nu << 0.5, 0.25, 0.25;
  g1.measure = mu;
  g2.measure = nu;

  SolverConfig cfg = tight_config(0.5);
  FgwResult res = solve_fgw(g1, g2, cfg);
  res.plan.validate(1e-7);
  CHECK((res.plan.coupling.rowwise().sum() - mu).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((res.plan.coupling.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(res.value ==
        doctest::Approx(evaluate_fgw_objective(g1, g2, res.plan, 0.5)).epsilon(1e-10));
  FgwResult back = solve_fgw(g2, g1, cfg);
  CHECK(res.value == doctest::Approx(back.value).epsilon(1e-6));

  SUBCASE("zero-mass nodes are rejected") {
    g1.measure << 0.5, 0.5, 0.0, 0.0;
    CHECK_THROWS_AS(solve_fgw(g1, g2, cfg), InputError);
  }
}
