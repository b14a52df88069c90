#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lfgw/barycenter.hpp"
#include "lfgw/bruteforce.hpp"
#include "lfgw/cross_validate.hpp"
#include "lfgw/dataset_io.hpp"
#include "lfgw/hashing.hpp"
#include "lfgw/kernels.hpp"
#include "lfgw/linear_fgw.hpp"
#include "lfgw/solvers.hpp"
#include "lfgw/svm.hpp"
#include "lfgw/wl.hpp"

namespace py = pybind11;
using namespace lfgw;

namespace {

StructureKind structure_from_string(const std::string& kind) {
  if (kind == "adjacency") return StructureKind::Adjacency;
  if (kind == "shortest-path") return StructureKind::ShortestPath;
  throw InputError("unknown structure kind '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_lfgw, m) {
  m.doc() = "Fused Gromov-Wasserstein graph embeddings (linearFGW) core";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<MeasureGraph>(m, "MeasureGraph")
      .def(py::init([](Matrix features, Matrix structure, std::optional<Vector> measure,
                       std::optional<int> label) {
             Vector mu = measure ? *measure : uniform_measure(structure.rows());
             return make_measure_graph(std::move(features), std::move(structure),
                                       std::move(mu), label);
           }),
           py::arg("features"), py::arg("structure"), py::arg("measure") = std::nullopt,
           py::arg("label") = std::nullopt)
      .def_readonly("features", &MeasureGraph::features)
      .def_readonly("structure", &MeasureGraph::structure)
      .def_readonly("measure", &MeasureGraph::measure)
      .def_readonly("label", &MeasureGraph::label)
      .def_property_readonly("num_nodes", &MeasureGraph::num_nodes)
      .def_property_readonly("feature_dim", &MeasureGraph::feature_dim)
      .def("__repr__", [](const MeasureGraph& g) {
        return "MeasureGraph(" + std::to_string(g.num_nodes()) + " nodes, d=" +
               std::to_string(g.feature_dim()) + ")";
      });

  py::class_<GraphDataset>(m, "GraphDataset")
      .def(py::init<>())
      .def_readwrite("name", &GraphDataset::name)
      .def_readwrite("num_classes", &GraphDataset::num_classes)
      .def("add_graph",
           [](GraphDataset& ds, const MeasureGraph& g) { ds.graphs.push_back(g); })
      .def("graph", [](const GraphDataset& ds, size_t i) { return ds.graphs.at(i); })
      .def("labels", &GraphDataset::labels)
      .def("validate", &GraphDataset::validate)
      .def("__len__", [](const GraphDataset& ds) { return ds.graphs.size(); })
      .def_property_readonly("feature_dim", &GraphDataset::feature_dim);

  m.def(
      "load_tu_dataset",
      [](const std::filesystem::path& root, const std::string& name,
         const std::string& structure) {
        return load_tu_dataset(root, name, structure_from_string(structure));
      },
      py::arg("root"), py::arg("name"), py::arg("structure") = "adjacency");
  m.def(
      "load_dataset",
      [](const std::filesystem::path& path, const std::string& structure) {
        return load_dataset(path, structure_from_string(structure));
      },
      py::arg("path"), py::arg("structure") = "adjacency");
  m.def("save_dataset_json", &save_dataset_json, py::arg("dataset"), py::arg("path"));
  m.def("dataset_to_json", &dataset_to_json);
  m.def(
      "dataset_from_json",
      [](const std::string& text, const std::string& structure) {
        return dataset_from_json(text, structure_from_string(structure));
      },
      py::arg("text"), py::arg("structure") = "adjacency");
  m.def("to_shortest_path_structure", &to_shortest_path_structure);

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("graphs_per_class", &SyntheticSpec::graphs_per_class)
      .def_readwrite("num_classes", &SyntheticSpec::num_classes)
      .def_readwrite("nodes_min", &SyntheticSpec::nodes_min)
      .def_readwrite("nodes_max", &SyntheticSpec::nodes_max)
      .def_readwrite("edge_probs", &SyntheticSpec::edge_probs)
      .def_readwrite("feature_dim", &SyntheticSpec::feature_dim)
      .def_readwrite("feature_shift", &SyntheticSpec::feature_shift)
      .def_readwrite("seed", &SyntheticSpec::seed);
  m.def("make_synthetic_dataset", &make_synthetic_dataset);

  m.def("wl_propagate",
        py::overload_cast<const MeasureGraph&, int>(&wl_propagate), py::arg("graph"),
        py::arg("depth"));
  m.def("wl_propagate_dataset",
        py::overload_cast<const GraphDataset&, int>(&wl_propagate), py::arg("dataset"),
        py::arg("depth"), py::call_guard<py::gil_scoped_release>());
  m.def("mixing_diameter", &mixing_diameter, py::arg("graph"), py::arg("alpha"));
  m.def("permute_graph", &permute_graph, py::arg("graph"), py::arg("permutation"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](double alpha, double eta, int outer_iters, int inner_sinkhorn_iters,
                       double sinkhorn_tol) {
             SolverConfig cfg{alpha, eta, outer_iters, inner_sinkhorn_iters, sinkhorn_tol};
             cfg.validate();
             return cfg;
           }),
           py::arg("alpha") = 0.5, py::arg("eta") = 0.1, py::arg("outer_iters") = 5,
           py::arg("inner_sinkhorn_iters") = 50, py::arg("sinkhorn_tol") = 1e-9)
      .def_readwrite("alpha", &SolverConfig::alpha)
      .def_readwrite("eta", &SolverConfig::eta)
      .def_readwrite("outer_iters", &SolverConfig::outer_iters)
      .def_readwrite("inner_sinkhorn_iters", &SolverConfig::inner_sinkhorn_iters)
      .def_readwrite("sinkhorn_tol", &SolverConfig::sinkhorn_tol);

  py::class_<TransportPlan>(m, "TransportPlan")
      .def(py::init<Matrix, Vector, Vector>(), py::arg("coupling"),
           py::arg("source_measure"), py::arg("target_measure"))
      .def_readonly("coupling", &TransportPlan::coupling)
      .def_readonly("source_measure", &TransportPlan::source_measure)
      .def_readonly("target_measure", &TransportPlan::target_measure)
      .def("marginal_residual", &TransportPlan::marginal_residual)
      .def("validate", &TransportPlan::validate, py::arg("eps") = 1e-7);

  py::class_<FgwResult>(m, "FgwResult")
      .def_readonly("value", &FgwResult::value)
      .def_readonly("plan", &FgwResult::plan)
      .def_readonly("converged", &FgwResult::converged)
      .def_readonly("residual", &FgwResult::residual)
      .def_readonly("objective_history", &FgwResult::objective_history);

  m.def("feature_cost_matrix", &feature_cost_matrix, py::arg("g1"), py::arg("g2"));
  m.def("evaluate_fgw_objective", &evaluate_fgw_objective, py::arg("g1"), py::arg("g2"),
        py::arg("plan"), py::arg("alpha"));
  m.def("solve_fgw", &solve_fgw, py::arg("g1"), py::arg("g2"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("solve_wasserstein", &solve_wasserstein, py::arg("cost"), py::arg("mu"),
        py::arg("nu"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

  py::class_<SurrogateGraph>(m, "SurrogateGraph")
      .def_readonly("projected_features", &SurrogateGraph::projected_features)
      .def_readonly("projected_structure", &SurrogateGraph::projected_structure)
      .def_readonly("reference_measure", &SurrogateGraph::reference_measure)
      .def("as_measure_graph", &SurrogateGraph::as_measure_graph);
  m.def("barycentric_project", &barycentric_project, py::arg("reference"),
        py::arg("source"), py::arg("plan"));

  py::class_<GraphEmbedding>(m, "GraphEmbedding")
      .def_readonly("node_block", &GraphEmbedding::node_block)
      .def_readonly("edge_block", &GraphEmbedding::edge_block)
      .def_readonly("alpha", &GraphEmbedding::alpha)
      .def_readonly("reference_id", &GraphEmbedding::reference_id)
      .def_readonly("num_reference_nodes", &GraphEmbedding::num_reference_nodes)
      .def_readonly("feature_dim", &GraphEmbedding::feature_dim);
  m.def("embed", &embed, py::arg("reference"), py::arg("graph"), py::arg("config"),
        py::arg("reference_id") = "", py::call_guard<py::gil_scoped_release>());
  m.def("linear_fgw_distance", &linear_fgw_distance, py::arg("e1"), py::arg("e2"),
        py::arg("sigma"));
  m.def("weighted_embedding_vector", &weighted_embedding_vector, py::arg("embedding"),
        py::arg("sigma"));
  m.def("embed_dataset", &embed_dataset, py::arg("dataset"), py::arg("reference"),
        py::arg("config"), py::arg("threads") = 0, py::arg("reference_id") = "",
        py::call_guard<py::gil_scoped_release>());
  m.def("pairwise_distance_matrix", &pairwise_distance_matrix, py::arg("embeddings"),
        py::arg("sigma"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("pairwise_linear_fgw", &pairwise_linear_fgw, py::arg("dataset"),
        py::arg("reference"), py::arg("config"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<BarycenterConfig> bary_cfg(m, "BarycenterConfig");
  py::enum_<BarycenterConfig::Init>(bary_cfg, "Init")
      .value("RandomSampleGraph", BarycenterConfig::Init::RandomSampleGraph)
      .value("FeatureKmeans", BarycenterConfig::Init::FeatureKmeans);
  bary_cfg
      .def(py::init([](Index num_nodes, int outer_iters, double tol, unsigned seed,
                       const std::string& init) {
             BarycenterConfig cfg;
             cfg.num_nodes = num_nodes;
             cfg.outer_iters = outer_iters;
             cfg.tol = tol;
             cfg.seed = seed;
             if (init == "feature-kmeans") {
               cfg.init = BarycenterConfig::Init::FeatureKmeans;
             } else if (init == "random-sample-graph") {
               cfg.init = BarycenterConfig::Init::RandomSampleGraph;
             } else {
               throw InputError("unknown barycenter init '" + init + "'");
             }
             cfg.validate();
             return cfg;
           }),
           py::arg("num_nodes") = 0, py::arg("outer_iters") = 10, py::arg("tol") = 1e-5,
           py::arg("seed") = 0, py::arg("init") = "feature-kmeans")
      .def_readwrite("num_nodes", &BarycenterConfig::num_nodes)
      .def_readwrite("outer_iters", &BarycenterConfig::outer_iters)
      .def_readwrite("tol", &BarycenterConfig::tol)
      .def_readwrite("seed", &BarycenterConfig::seed);
  m.def(
      "compute_barycenter",
      [](const GraphDataset& dataset, const BarycenterConfig& cfg_b, const SolverConfig& cfg_s,
         int threads) {
        std::vector<double> history;
        MeasureGraph bary = compute_barycenter(dataset, cfg_b, cfg_s, threads, &history);
        return py::make_tuple(bary, history);
      },
      py::arg("dataset"), py::arg("barycenter_config"), py::arg("solver_config"),
      py::arg("threads") = 0);
  m.def("barycenter_objective", &barycenter_objective, py::arg("reference"),
        py::arg("dataset"), py::arg("solver_config"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("median_node_count", &median_node_count);

  py::enum_<GramSource>(m, "GramSource")
      .value("LinearFgw", GramSource::LinearFgw)
      .value("Fgw", GramSource::Fgw);
  py::class_<GramMatrix>(m, "GramMatrix")
      .def_readonly("values", &GramMatrix::values)
      .def_readonly("gamma", &GramMatrix::gamma)
      .def_readonly("source", &GramMatrix::source);
  m.def("gram_from_distances", &gram_from_distances, py::arg("distances"), py::arg("gamma"),
        py::arg("source") = GramSource::LinearFgw);
  m.def("eigenvalue_range", &eigenvalue_range);
  m.def("is_positive_semidefinite", &is_positive_semidefinite);

  py::class_<KmeansResult>(m, "KmeansResult")
      .def_readonly("labels", &KmeansResult::labels)
      .def_readonly("centroids", &KmeansResult::centroids)
      .def_readonly("inertia", &KmeansResult::inertia);
  m.def("kmeans", &kmeans, py::arg("points"), py::arg("k"), py::arg("seed"),
        py::arg("restarts") = 50, py::arg("max_iters") = 100,
        py::call_guard<py::gil_scoped_release>());
  m.def("kmeans_embeddings", &kmeans_embeddings, py::arg("embeddings"), py::arg("sigma"),
        py::arg("k"), py::arg("seed"), py::arg("restarts") = 50,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "spectral_clustering",
      [](const GramMatrix& gram, int k, unsigned seed) {
        return spectral_clustering(gram, k, seed);
      },
      py::arg("gram"), py::arg("k"), py::arg("seed"),
      py::call_guard<py::gil_scoped_release>());
  m.def("adjusted_rand_index", &adjusted_rand_index);
  m.def("best_permutation_accuracy", &best_permutation_accuracy, py::arg("predicted"),
        py::arg("truth"), py::arg("k"));

  m.def(
      "svm_classify",
      [](const Matrix& k_train, const std::vector<int>& y_train, const Matrix& k_test,
         double c, int num_classes) {
        return svm_classify(k_train, y_train, k_test, c, num_classes);
      },
      py::arg("kernel_train"), py::arg("y_train"), py::arg("kernel_test_train"),
      py::arg("c"), py::arg("num_classes"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "cross_validate",
      [](const std::vector<int>& labels, int num_classes,
         const std::map<std::pair<double, int>, Matrix>& distances,
         const std::vector<double>& c_grid, const std::vector<double>& gamma_grid, int folds,
         int repeats, int inner_folds, unsigned seed, int threads) {
        std::map<ParamKey, Matrix> keyed;
        for (const auto& [key, d] : distances) keyed[{key.first, key.second}] = d;
        CvConfig cfg{folds, repeats, inner_folds, seed, threads};
        CvReport report = cross_validate(labels, num_classes, keyed, c_grid, gamma_grid, cfg);
        py::dict out;
        out["mean_accuracy"] = report.mean_accuracy;
        out["std_accuracy"] = report.std_accuracy;
        out["repeat_accuracies"] = report.repeat_accuracies;
        py::list selections;
        for (const auto& s : report.selections) {
          py::dict sel;
          sel["repeat"] = s.repeat;
          sel["fold"] = s.fold;
          sel["alpha"] = s.key.alpha;
          sel["wl_depth"] = s.key.wl_depth;
          sel["gamma"] = s.gamma;
          sel["C"] = s.c;
          sel["test_accuracy"] = s.test_accuracy;
          sel["test_indices"] = s.test_indices;
          sel["predictions"] = s.predictions;
          selections.append(sel);
        }
        out["selections"] = selections;
        return out;
      },
      py::arg("labels"), py::arg("num_classes"), py::arg("distances"), py::arg("c_grid"),
      py::arg("gamma_grid"), py::arg("folds") = 10, py::arg("repeats") = 10,
      py::arg("inner_folds") = 5, py::arg("seed") = 42, py::arg("threads") = 0);

  py::class_<ProjectionCheckReport>(m, "ProjectionCheckReport")
      .def_readonly("diag_value", &ProjectionCheckReport::diag_value)
      .def_readonly("fgw_to_surrogate", &ProjectionCheckReport::fgw_to_surrogate)
      .def_readonly("fgw_to_g", &ProjectionCheckReport::fgw_to_g)
      .def_readonly("optimality_checked", &ProjectionCheckReport::optimality_checked)
      .def_readonly("optimality_ok", &ProjectionCheckReport::optimality_ok)
      .def_readonly("optimality_margin", &ProjectionCheckReport::optimality_margin)
      .def_readonly("contraction_ok", &ProjectionCheckReport::contraction_ok)
      .def_readonly("contraction_margin", &ProjectionCheckReport::contraction_margin);
  m.def("check_projection_optimality", &check_projection_optimality, py::arg("reference"), py::arg("graph"),
        py::arg("config"), py::arg("tol") = 1e-6, py::arg("max_bruteforce_nodes") = 4,
        py::call_guard<py::gil_scoped_release>());

  py::class_<BoundCheckReport>(m, "BoundCheckReport")
      .def_readonly("lhs", &BoundCheckReport::lhs)
      .def_readonly("rhs", &BoundCheckReport::rhs)
      .def_readonly("fgw_12", &BoundCheckReport::fgw_12)
      .def_readonly("linear_fgw_12", &BoundCheckReport::linear_fgw_12)
      .def_readonly("fgw_1_ref", &BoundCheckReport::fgw_1_ref)
      .def_readonly("fgw_2_ref", &BoundCheckReport::fgw_2_ref)
      .def_readonly("diam_1", &BoundCheckReport::diam_1)
      .def_readonly("diam_2", &BoundCheckReport::diam_2)
      .def_readonly("ok", &BoundCheckReport::ok);
  m.def("check_linearization_bound", &check_linearization_bound, py::arg("g1"), py::arg("g2"), py::arg("reference"),
        py::arg("config"), py::arg("rel_tol") = 1e-4,
        py::call_guard<py::gil_scoped_release>());

  m.def("min_over_couplings", &bruteforce::min_over_couplings, py::arg("g1"), py::arg("g2"),
        py::arg("alpha"), py::arg("seed") = 1, py::arg("refine_starts") = 20,
        py::arg("refine_iters") = 120, py::arg("random_candidates") = 64);
  py::class_<bruteforce::SearchResult>(m, "SearchResult")
      .def_readonly("value", &bruteforce::SearchResult::value)
      .def_readonly("plan", &bruteforce::SearchResult::plan);

  m.def("content_hash",
        py::overload_cast<const MeasureGraph&>(&content_hash), py::arg("graph"));
  m.def("dataset_content_hash",
        py::overload_cast<const GraphDataset&>(&content_hash), py::arg("dataset"));

  m.attr("__version__") = "0.1.0";
}
