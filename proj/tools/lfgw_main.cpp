// lfgw command-line front-end: datasets -> barycenter reference -> embeddings
// -> kernels -> classification / clustering / benchmarks / property verification.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfgw/artifact_io.hpp"
#include "lfgw/barycenter.hpp"
#include "lfgw/cross_validate.hpp"
#include "lfgw/dataset_io.hpp"
#include "lfgw/hashing.hpp"
#include "lfgw/kernels.hpp"
#include "lfgw/linear_fgw.hpp"
#include "lfgw/parallel.hpp"
#include "lfgw/solvers.hpp"
#include "lfgw/wl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lfgw;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Raised by `verify` when a property check fails; mapped to exit code 1.
struct VerificationFailure {
  std::string message;
};

struct Options {
  std::string dataset;
  std::string dataset_root;
  std::string structure = "adjacency";
  int wl_depth = 0;
  double alpha = 0.5;
  double eta = 0.1;
  int outer_iters = 5;
  int inner_iters = 50;
  double sinkhorn_tol = 1e-9;

  long bary_nodes = 0;  // 0 = median node count
  int bary_iters = 10;
  double bary_tol = 1e-5;
  std::string bary_init = "feature-kmeans";

  double gamma = 0.01;
  std::vector<double> gamma_grid = {1e-2, 1e-1, 1.0, 1e1, 1e2};
  std::vector<double> c_grid;  // filled with 2^-5..2^10 below
  std::vector<double> alpha_grid = {0.0, 0.3, 0.5, 0.7, 0.9, 1.0};
  std::vector<int> h_grid = {0, 1, 2};
  int folds = 10;
  int repeats = 10;
  int inner_folds = 5;

  int clusters = 0;  // 0 = dataset class count

  unsigned seed = 42;
  int threads = 0;
  std::string out_dir = "out";
  std::string reference_file;
  std::string embeddings_file;

  bool synthetic = false;
  int synth_per_class = 50;
  int synth_classes = 1;
  int synth_nodes_min = 20;
  int synth_nodes_max = 40;
  std::vector<double> synth_edge_probs = {0.3};
  int synth_dim = 3;
  double synth_shift = 0.0;
  unsigned synth_seed = 42;

  int trials = 100;
  double tol = 1e-6;
  double bound_tol = 1e-4;
  int verify_max_nodes = 5;

  // set during parsing
  bool alpha_given = false;
};

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int p = -5; p <= 10; ++p) grid.push_back(std::pow(2.0, p));
  return grid;
}

json options_to_json(const Options& o) {
  json j;
  j["dataset"] = o.dataset;
  j["dataset_root"] = o.dataset_root;
  j["structure"] = o.structure;
  j["wl_depth"] = o.wl_depth;
  j["alpha"] = o.alpha;
  j["eta"] = o.eta;
  j["outer_iters"] = o.outer_iters;
  j["inner_iters"] = o.inner_iters;
  j["sinkhorn_tol"] = o.sinkhorn_tol;
  j["bary_nodes"] = o.bary_nodes;
  j["bary_iters"] = o.bary_iters;
  j["bary_tol"] = o.bary_tol;
  j["bary_init"] = o.bary_init;
  j["gamma"] = o.gamma;
  j["gamma_grid"] = o.gamma_grid;
  j["c_grid"] = o.c_grid;
  j["alpha_grid"] = o.alpha_grid;
  j["h_grid"] = o.h_grid;
  j["folds"] = o.folds;
  j["repeats"] = o.repeats;
  j["inner_folds"] = o.inner_folds;
  j["clusters"] = o.clusters;
  j["seed"] = o.seed;
  j["threads"] = o.threads;
  j["out_dir"] = o.out_dir;
  j["reference_file"] = o.reference_file;
  j["embeddings_file"] = o.embeddings_file;
  j["synthetic"] = o.synthetic;
  if (o.synthetic) {
    j["synth_per_class"] = o.synth_per_class;
    j["synth_classes"] = o.synth_classes;
    j["synth_nodes_min"] = o.synth_nodes_min;
    j["synth_nodes_max"] = o.synth_nodes_max;
    j["synth_edge_probs"] = o.synth_edge_probs;
    j["synth_dim"] = o.synth_dim;
    j["synth_shift"] = o.synth_shift;
    j["synth_seed"] = o.synth_seed;
  }
  j["trials"] = o.trials;
  j["tol"] = o.tol;
  j["bound_tol"] = o.bound_tol;
  return j;
}

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.alpha = o.alpha;
  cfg.eta = o.eta;
  cfg.outer_iters = o.outer_iters;
  cfg.inner_sinkhorn_iters = o.inner_iters;
  cfg.sinkhorn_tol = o.sinkhorn_tol;
  return cfg;
}

BarycenterConfig barycenter_config(const Options& o) {
  BarycenterConfig cfg;
  cfg.num_nodes = o.bary_nodes;
  cfg.outer_iters = o.bary_iters;
  cfg.tol = o.bary_tol;
  cfg.seed = o.seed;
  if (o.bary_init == "feature-kmeans") {
    cfg.init = BarycenterConfig::Init::FeatureKmeans;
  } else if (o.bary_init == "random-sample-graph") {
    cfg.init = BarycenterConfig::Init::RandomSampleGraph;
  } else {
    throw InputError("unknown barycenter init '" + o.bary_init +
                     "' (feature-kmeans | random-sample-graph)");
  }
  return cfg;
}

StructureKind structure_kind(const Options& o) {
  if (o.structure == "adjacency") return StructureKind::Adjacency;
  if (o.structure == "shortest-path") return StructureKind::ShortestPath;
  throw InputError("unknown structure kind '" + o.structure +
                   "' (adjacency | shortest-path)");
}

bool constant_features(const GraphDataset& ds) {
  if (ds.feature_dim() == 0) return true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& g : ds.graphs) {
    if (g.features.size() == 0) continue;
    lo = std::min(lo, g.features.minCoeff());
    hi = std::max(hi, g.features.maxCoeff());
  }
  return hi - lo < 1e-15;
}

/// Raw dataset (structure transform applied, WL not applied) plus its hash.
struct LoadedDataset {
  GraphDataset dataset;
  std::string hash;
};

LoadedDataset load_input_dataset(const Options& o) {
  LoadedDataset out;
  if (o.synthetic) {
    SyntheticSpec spec;
    spec.graphs_per_class = o.synth_per_class;
    spec.num_classes = o.synth_classes;
    spec.nodes_min = o.synth_nodes_min;
    spec.nodes_max = o.synth_nodes_max;
    spec.edge_probs = o.synth_edge_probs;
    spec.feature_dim = o.synth_dim;
    spec.feature_shift = o.synth_shift;
    spec.seed = o.synth_seed;
    out.dataset = make_synthetic_dataset(spec);
    if (structure_kind(o) == StructureKind::ShortestPath) {
      for (auto& g : out.dataset.graphs) g = to_shortest_path_structure(g);
    }
  } else {
    if (o.dataset.empty()) {
      throw InputError("no dataset given (use --dataset PATH or --synthetic)");
    }
    fs::path path = o.dataset;
    if (!fs::exists(path)) {
      std::string root = o.dataset_root;
      if (root.empty()) {
        if (const char* env = std::getenv("LFGW_DATASET_ROOT")) root = env;
      }
      bool found = false;
      if (!root.empty()) {
        for (const fs::path& candidate :
             {fs::path(root) / o.dataset, fs::path(root) / (o.dataset + ".json")}) {
          if (fs::exists(candidate)) {
            path = candidate;
            found = true;
            break;
          }
        }
      }
      if (!found) {
        throw FormatError("dataset path does not exist: " + o.dataset);
      }
    }
    out.dataset = load_dataset(path, structure_kind(o));
  }
  out.hash = content_hash(out.dataset);
  return out;
}

GraphDataset apply_wl(const GraphDataset& ds, int depth) {
  return depth > 0 ? wl_propagate(ds, depth) : ds;
}

void require_explicit_alpha_for_featureless(const Options& o, const GraphDataset& ds) {
  if (!o.alpha_given && constant_features(ds)) {
    throw InputError(
        "dataset carries no informative node features; pass --alpha explicitly "
        "(structure-only runs use --alpha 1)");
  }
}

json provenance(const Options& o, const std::string& command, const std::string& input_hash) {
  json j;
  j["tool"] = "lfgw";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = options_to_json(o);
  j["input_hash"] = input_hash;
  return j;
}

void write_json(const fs::path& path, const json& doc) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

fs::path out_path(const Options& o, const std::string& file) {
  fs::create_directories(o.out_dir);
  return fs::path(o.out_dir) / file;
}

// ---------------------------------------------------------------------------

struct ReferenceBundle {
  MeasureGraph graph;
  std::string hash;
};

ReferenceBundle compute_reference(const Options& o, const GraphDataset& propagated,
                                  std::vector<double>* history = nullptr) {
  ReferenceBundle bundle{
      compute_barycenter(propagated, barycenter_config(o), solver_config(o), o.threads,
                         history),
      ""};
  bundle.hash = content_hash(bundle.graph);
  return bundle;
}

void write_reference_file(const Options& o, const ReferenceBundle& ref,
                          const std::vector<double>& history, const std::string& input_hash,
                          const fs::path& path) {
  json doc = json::parse(measure_graph_to_json(ref.graph));
  doc["content_hash"] = ref.hash;
  doc["objective_history"] = history;
  doc["provenance"] = provenance(o, "barycenter", input_hash);
  write_json(path, doc);
}

ReferenceBundle load_reference_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open reference file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ReferenceBundle bundle{measure_graph_from_json(text), ""};
  bundle.hash = content_hash(bundle.graph);
  return bundle;
}

int cmd_barycenter(const Options& o) {
  LoadedDataset input = load_input_dataset(o);
  require_explicit_alpha_for_featureless(o, input.dataset);
  GraphDataset propagated = apply_wl(input.dataset, o.wl_depth);
  std::vector<double> history;
  ReferenceBundle ref = compute_reference(o, propagated, &history);
  const fs::path path = out_path(o, "reference.json");
  write_reference_file(o, ref, history, input.hash, path);
  std::cout << "barycenter: " << ref.graph.num_nodes() << " nodes, feature dim "
            << ref.graph.feature_dim() << "\n";
  for (size_t t = 0; t < history.size(); ++t) {
    std::cout << "round " << t << " objective " << format_double(history[t]) << "\n";
  }
  std::cout << "reference written to " << path.string() << " (hash " << ref.hash << ")\n";
  return 0;
}

struct EmbeddingBundle {
  std::vector<GraphEmbedding> embeddings;
  ReferenceBundle reference;
  std::string input_hash;
  GraphDataset propagated;
};

EmbeddingBundle build_embeddings(const Options& o) {
  LoadedDataset input = load_input_dataset(o);
  require_explicit_alpha_for_featureless(o, input.dataset);
  EmbeddingBundle bundle;
  bundle.input_hash = input.hash;
  bundle.propagated = apply_wl(input.dataset, o.wl_depth);
  if (!o.reference_file.empty()) {
    bundle.reference = load_reference_file(o.reference_file);
  } else {
    std::vector<double> history;
    bundle.reference = compute_reference(o, bundle.propagated, &history);
    write_reference_file(o, bundle.reference, history, input.hash,
                         out_path(o, "reference.json"));
  }
  bundle.embeddings = embed_dataset(bundle.propagated, bundle.reference.graph,
                                    solver_config(o), o.threads, bundle.reference.hash);
  return bundle;
}

void write_embedding_sidecar(const Options& o, const EmbeddingBundle& bundle,
                             const fs::path& csv_path) {
  json doc;
  doc["reference_nodes"] = bundle.reference.graph.num_nodes();
  doc["feature_dim"] = bundle.reference.graph.feature_dim();
  doc["alpha"] = o.alpha;
  doc["eta"] = o.eta;
  doc["outer_iters"] = o.outer_iters;
  doc["wl_depth"] = o.wl_depth;
  doc["reference_hash"] = bundle.reference.hash;
  json sigma = json::array();
  for (Index k = 0; k < bundle.reference.graph.measure.size(); ++k) {
    sigma.push_back(bundle.reference.graph.measure(k));
  }
  doc["sigma"] = std::move(sigma);
  doc["rows"] = bundle.embeddings.size();
  doc["csv"] = csv_path.filename().string();
  doc["provenance"] = provenance(o, "embed", bundle.input_hash);
  write_json(csv_path.parent_path() / (csv_path.stem().string() + ".json"), doc);
}

int cmd_embed(const Options& o) {
  EmbeddingBundle bundle = build_embeddings(o);
  const fs::path csv_path = out_path(o, "embeddings.csv");
  write_embeddings_csv(csv_path, bundle.embeddings, bundle.propagated.labels());
  write_embedding_sidecar(o, bundle, csv_path);
  std::cout << "embedded " << bundle.embeddings.size() << " graphs against reference "
            << bundle.reference.hash.substr(0, 12) << "... -> " << csv_path.string() << "\n";
  return 0;
}

int cmd_gram(const Options& o) {
  std::vector<GraphEmbedding> embeddings;
  Vector sigma;
  std::string input_hash;
  if (!o.embeddings_file.empty()) {
    const fs::path csv_path = o.embeddings_file;
    const fs::path sidecar = csv_path.parent_path() / (csv_path.stem().string() + ".json");
    std::ifstream in(sidecar);
    if (!in) throw FormatError("cannot open embeddings sidecar " + sidecar.string());
    json meta = json::parse(std::string((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>()));
    const Index k = meta.at("reference_nodes").get<Index>();
    const Index d = meta.at("feature_dim").get<Index>();
    const double alpha = meta.at("alpha").get<double>();
    const std::string ref_hash = meta.at("reference_hash").get<std::string>();
    sigma = Vector(k);
    for (Index i = 0; i < k; ++i) sigma(i) = meta.at("sigma")[static_cast<size_t>(i)].get<double>();
    EmbeddingsCsv loaded = read_embeddings_csv(csv_path, k, d, alpha, ref_hash);
    embeddings = std::move(loaded.embeddings);
    input_hash = sha256_file(csv_path);
  } else {
    EmbeddingBundle bundle = build_embeddings(o);
    embeddings = std::move(bundle.embeddings);
    sigma = bundle.reference.graph.measure;
    input_hash = bundle.input_hash;
  }

  Matrix distances = pairwise_distance_matrix(embeddings, sigma, o.threads);
  GramMatrix gram = gram_from_distances(distances, o.gamma, GramSource::LinearFgw);
  auto [lo, hi] = eigenvalue_range(gram.values);

  write_matrix_csv(out_path(o, "gram.csv"), gram.values);
  write_gram_blob(out_path(o, "gram.bin"), gram.values);
  json doc;
  doc["n"] = gram.values.rows();
  doc["gamma"] = o.gamma;
  doc["source"] = "linearFGW";
  doc["min_eigenvalue"] = lo;
  doc["max_eigenvalue"] = hi;
  doc["psd"] = (lo >= -1e-8 * std::max(hi, 0.0));
  doc["provenance"] = provenance(o, "gram", input_hash);
  write_json(out_path(o, "gram.json"), doc);
  std::cout << "gram: n = " << gram.values.rows() << ", gamma = " << o.gamma
            << ", min eigenvalue " << lo << "\n";
  return 0;
}

int cmd_classify(const Options& o) {
  LoadedDataset input = load_input_dataset(o);
  // no explicit-alpha gate here: the alpha grid is an explicit enumeration
  const std::vector<int> labels = input.dataset.labels();
  for (int l : labels) {
    if (l < 0) throw InputError("classify requires a labeled dataset");
  }

  std::map<ParamKey, Matrix> distances;
  for (int h : o.h_grid) {
    GraphDataset propagated = apply_wl(input.dataset, h);
    for (double alpha : o.alpha_grid) {
      Options local = o;
      local.alpha = alpha;
      local.wl_depth = h;
      std::vector<double> history;
      ReferenceBundle ref = compute_reference(local, propagated, &history);
      Matrix d = pairwise_linear_fgw(propagated, ref.graph, solver_config(local), o.threads);
      distances[{alpha, h}] = std::move(d);
      std::cout << "pipeline alpha=" << alpha << " H=" << h << " done (barycenter "
                << ref.graph.num_nodes() << " nodes)\n";
    }
  }

  CvConfig cv;
  cv.folds = o.folds;
  cv.repeats = o.repeats;
  cv.inner_folds = o.inner_folds;
  cv.seed = o.seed;
  cv.threads = o.threads;
  CvReport report =
      cross_validate(labels, input.dataset.num_classes, distances, o.c_grid, o.gamma_grid, cv);

  json doc;
  doc["mean_accuracy"] = report.mean_accuracy;
  doc["std_accuracy"] = report.std_accuracy;
  doc["repeat_accuracies"] = report.repeat_accuracies;
  json sels = json::array();
  for (const auto& s : report.selections) {
    sels.push_back({{"repeat", s.repeat},
                    {"fold", s.fold},
                    {"alpha", s.key.alpha},
                    {"wl_depth", s.key.wl_depth},
                    {"gamma", s.gamma},
                    {"C", s.c},
                    {"test_accuracy", s.test_accuracy},
                    {"test_indices", s.test_indices},
                    {"predictions", s.predictions}});
  }
  doc["selections"] = std::move(sels);
  doc["provenance"] = provenance(o, "classify", input.hash);
  write_json(out_path(o, "classify.json"), doc);
  std::cout << "accuracy " << 100.0 * report.mean_accuracy << " +- "
            << 100.0 * report.std_accuracy << " (over " << o.repeats << " repeats)\n";
  return 0;
}

int cmd_cluster(const Options& o) {
  EmbeddingBundle bundle = build_embeddings(o);
  const int k = o.clusters > 0 ? o.clusters : bundle.propagated.num_classes;
  const Vector& sigma = bundle.reference.graph.measure;

  auto kmeans_labels = kmeans_embeddings(bundle.embeddings, sigma, k, o.seed);
  Matrix distances = pairwise_distance_matrix(bundle.embeddings, sigma, o.threads);
  GramMatrix gram = gram_from_distances(distances, o.gamma, GramSource::LinearFgw);
  bool clipped = false;
  auto spectral_labels = spectral_clustering(gram, k, o.seed, &clipped);
  if (clipped) {
    std::cerr << "warning: kernel failed the PSD check and was clipped\n";
  }

  json doc;
  doc["k"] = k;
  doc["kmeans_labels"] = kmeans_labels;
  doc["spectral_labels"] = spectral_labels;
  const std::vector<int> truth = bundle.propagated.labels();
  const bool labeled = std::none_of(truth.begin(), truth.end(), [](int l) { return l < 0; });
  if (labeled) {
    doc["ari_kmeans"] = adjusted_rand_index(kmeans_labels, truth);
    doc["ari_spectral"] = adjusted_rand_index(spectral_labels, truth);
    if (k <= 8) {
      doc["accuracy_kmeans"] = best_permutation_accuracy(kmeans_labels, truth, k);
      doc["accuracy_spectral"] = best_permutation_accuracy(spectral_labels, truth, k);
    }
  }
  doc["provenance"] = provenance(o, "cluster", bundle.input_hash);
  write_json(out_path(o, "cluster.json"), doc);
  if (labeled) {
    std::cout << "kmeans ARI " << doc["ari_kmeans"].get<double>() << ", spectral ARI "
              << doc["ari_spectral"].get<double>() << "\n";
  } else {
    std::cout << "clustered " << kmeans_labels.size() << " graphs into " << k << " groups\n";
  }
  return 0;
}

int cmd_bench(const Options& o) {
  LoadedDataset input = load_input_dataset(o);
  require_explicit_alpha_for_featureless(o, input.dataset);
  GraphDataset propagated = apply_wl(input.dataset, o.wl_depth);
  const Index n = propagated.size();
  if (n < 2) throw InputError("bench needs at least two graphs");
  const SolverConfig cfg = solver_config(o);

  using clock = std::chrono::steady_clock;

  // (a) full pairwise FGW
  const auto t0 = clock::now();
  Matrix fgw_distances = Matrix::Zero(n, n);
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  parallel_for(0, static_cast<Index>(pairs.size()), o.threads, [&](Index p) {
    const auto [i, j] = pairs[static_cast<size_t>(p)];
    const double v = solve_fgw(propagated.graphs[static_cast<size_t>(i)],
                               propagated.graphs[static_cast<size_t>(j)], cfg)
                         .value;
    fgw_distances(i, j) = v;
    fgw_distances(j, i) = v;
  });
  const double t_fgw = std::chrono::duration<double>(clock::now() - t0).count();

  // (b) barycenter + embeddings + pairwise linearFGW
  const auto t1 = clock::now();
  ReferenceBundle ref = compute_reference(o, propagated);
  auto embeddings =
      embed_dataset(propagated, ref.graph, cfg, o.threads, ref.hash);
  Matrix linear_distances = pairwise_distance_matrix(embeddings, ref.graph.measure, o.threads);
  const double t_linear = std::chrono::duration<double>(clock::now() - t1).count();

  json doc;
  doc["n_graphs"] = n;
  doc["t_fgw"] = t_fgw;
  doc["t_linear"] = t_linear;
  doc["speedup"] = t_fgw / t_linear;
  if (n <= 10) {
    json fgw_rows = json::array();
    json lin_rows = json::array();
    for (Index i = 0; i < n; ++i) {
      json fr = json::array();
      json lr = json::array();
      for (Index j = 0; j < n; ++j) {
        fr.push_back(fgw_distances(i, j));
        lr.push_back(linear_distances(i, j));
      }
      fgw_rows.push_back(std::move(fr));
      lin_rows.push_back(std::move(lr));
    }
    doc["fgw_distances"] = std::move(fgw_rows);
    doc["linear_distances"] = std::move(lin_rows);
  }
  doc["provenance"] = provenance(o, "bench", input.hash);
  write_json(out_path(o, "bench.json"), doc);
  std::cout << "n = " << n << ": pairwise FGW " << t_fgw << " s, linearFGW pipeline "
            << t_linear << " s, speedup " << t_fgw / t_linear << "x\n";
  return 0;
}

int cmd_verify(const Options& o) {
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<Index> node_count(2, std::max(2, o.verify_max_nodes));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::vector<double> alphas = {0.0, 0.3, 0.5, 0.7, 1.0};

  auto random_instance = [&](Index m) {
    Matrix a = Matrix::Zero(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = i + 1; j < m; ++j)
        if (unif(rng) < 0.5) {
          a(i, j) = 1.0;
          a(j, i) = 1.0;
        }
    Matrix x(m, 2);
    for (Index i = 0; i < m; ++i)
      for (Index c = 0; c < 2; ++c) x(i, c) = gauss(rng);
    return make_measure_graph(std::move(x), std::move(a), uniform_measure(m));
  };

  SolverConfig cfg = solver_config(o);
  int optimality_failures = 0;
  int contraction_failures = 0;
  int bound_failures = 0;
  int optimality_checked = 0;
  for (int trial = 0; trial < o.trials; ++trial) {
    MeasureGraph ref = random_instance(node_count(rng));
    MeasureGraph g1 = random_instance(node_count(rng));
    MeasureGraph g2 = random_instance(node_count(rng));
    cfg.alpha = alphas[static_cast<size_t>(trial) % alphas.size()];

    ProjectionCheckReport l1 = check_projection_optimality(ref, g1, cfg, o.tol);
    if (l1.optimality_checked) ++optimality_checked;
    if (!l1.optimality_ok) {
      ++optimality_failures;
      std::cerr << "trial " << trial << ": diagonal-plan optimality violated, margin "
                << l1.optimality_margin << "\n";
    }
    if (!l1.contraction_ok) {
      ++contraction_failures;
      std::cerr << "trial " << trial << ": surrogate contraction violated, margin "
                << l1.contraction_margin << "\n";
    }
    BoundCheckReport l2 = check_linearization_bound(g1, g2, ref, cfg, o.bound_tol);
    if (!l2.ok) {
      ++bound_failures;
      std::cerr << "trial " << trial << ": linearization bound violated, lhs " << l2.lhs
                << " rhs " << l2.rhs << "\n";
    }
  }

  json doc;
  doc["trials"] = o.trials;
  doc["optimality_checked"] = optimality_checked;
  doc["optimality_failures"] = optimality_failures;
  doc["contraction_failures"] = contraction_failures;
  doc["bound_failures"] = bound_failures;
  doc["tol"] = o.tol;
  doc["bound_tol"] = o.bound_tol;
  doc["provenance"] = provenance(o, "verify", "");
  write_json(out_path(o, "verify.json"), doc);

  const int failures = optimality_failures + contraction_failures + bound_failures;
  std::cout << "verify: " << o.trials << " trials, " << failures << " failure(s)\n";
  if (failures > 0) {
    throw VerificationFailure{"property verification failed on " + std::to_string(failures) +
                              " trial(s)"};
  }
  return 0;
}

void add_common_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.dataset,
                  "dataset path: TU-format directory or internal .json (bare names resolve "
                  "against --dataset-root / $LFGW_DATASET_ROOT)");
  cmd->add_option("--dataset-root", o.dataset_root, "root directory for bare dataset names");
  cmd->add_option("--structure", o.structure, "structure matrix: adjacency | shortest-path");
  cmd->add_option("--wl-depth", o.wl_depth, "WL feature propagation depth H")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--alpha", o.alpha, "feature/structure trade-off in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--eta", o.eta, "proximal (entropic) weight");
  cmd->add_option("--iters", o.outer_iters, "proximal point iterations T");
  cmd->add_option("--inner-iters", o.inner_iters, "Sinkhorn iterations per proximal step");
  cmd->add_option("--sinkhorn-tol", o.sinkhorn_tol, "marginal residual stopping threshold");
  cmd->add_option("--bary-nodes", o.bary_nodes, "reference size K (0 = median node count)");
  cmd->add_option("--bary-iters", o.bary_iters, "barycenter block-coordinate rounds");
  cmd->add_option("--bary-tol", o.bary_tol, "barycenter relative objective tolerance");
  cmd->add_option("--bary-init", o.bary_init,
                  "barycenter init: feature-kmeans | random-sample-graph");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", o.out_dir, "output directory");

  cmd->add_flag("--synthetic", o.synthetic, "generate an Erdos-Renyi dataset instead of loading");
  cmd->add_option("--synth-per-class", o.synth_per_class, "synthetic graphs per class");
  cmd->add_option("--synth-classes", o.synth_classes, "synthetic class count");
  cmd->add_option("--synth-nodes-min", o.synth_nodes_min, "synthetic minimum node count");
  cmd->add_option("--synth-nodes-max", o.synth_nodes_max, "synthetic maximum node count");
  cmd->add_option("--synth-p", o.synth_edge_probs, "synthetic edge probabilities, one per class");
  cmd->add_option("--synth-dim", o.synth_dim, "synthetic feature dimension");
  cmd->add_option("--synth-shift", o.synth_shift, "synthetic per-class feature mean shift");
  cmd->add_option("--synth-seed", o.synth_seed, "synthetic generator seed");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.c_grid = default_c_grid();

  CLI::App app{"linearFGW graph embeddings: FGW solvers, barycenter references, "
               "Euclidean graph embeddings and kernel-based learning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML config file; flags override its values");
  add_common_options(&app, o);

  auto* bary = app.add_subcommand("barycenter", "compute the FGW barycenter reference");

  auto* emb = app.add_subcommand("embed", "embed every graph against a reference");
  emb->add_option("--reference", o.reference_file,
                  "reference JSON (computed and saved when omitted)");

  auto* gram = app.add_subcommand("gram", "Gaussian kernel matrix from embeddings");
  gram->add_option("--embeddings", o.embeddings_file,
                   "embeddings CSV written by `embed` (sidecar JSON expected next to it)");
  gram->add_option("--reference", o.reference_file, "reference JSON for the recompute path");
  gram->add_option("--gamma", o.gamma, "Gaussian kernel width");

  auto* cls = app.add_subcommand("classify", "cross-validated SVM classification");
  cls->add_option("--alpha-grid", o.alpha_grid, "alpha grid");
  cls->add_option("--h-grid", o.h_grid, "WL depth grid");
  cls->add_option("--gamma-grid", o.gamma_grid, "Gaussian kernel width grid");
  cls->add_option("--c-grid", o.c_grid, "SVM C grid");
  cls->add_option("--folds", o.folds, "outer folds");
  cls->add_option("--repeats", o.repeats, "experiment repeats");
  cls->add_option("--inner-folds", o.inner_folds, "inner selection folds");

  auto* clu = app.add_subcommand("cluster", "k-means and spectral clustering of embeddings");
  clu->add_option("--reference", o.reference_file,
                  "reference JSON (computed and saved when omitted)");
  clu->add_option("--clusters", o.clusters, "cluster count k (0 = class count)");
  clu->add_option("--gamma", o.gamma, "Gaussian kernel width for spectral clustering");

  auto* bench = app.add_subcommand("bench", "pairwise FGW vs the linearFGW pipeline");

  auto* verify = app.add_subcommand("verify", "randomized checks of the projection properties");
  verify->add_option("--trials", o.trials, "number of random instances");
  verify->add_option("--tol", o.tol, "absolute tolerance for the projection claims");
  verify->add_option("--bound-tol", o.bound_tol, "relative tolerance for the error bound");
  verify->add_option("--max-nodes", o.verify_max_nodes, "largest instance size");
  for (CLI::App* sub : {bary, emb, gram, cls, clu, bench, verify}) {
    sub->fallthrough();  // common options may follow the subcommand name
  }

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }
    o.alpha_given = app.get_option("--alpha")->count() > 0;
    if (bary->parsed()) return cmd_barycenter(o);
    if (emb->parsed()) return cmd_embed(o);
    if (gram->parsed()) return cmd_gram(o);
    if (cls->parsed()) return cmd_classify(o);
    if (clu->parsed()) return cmd_cluster(o);
    if (bench->parsed()) return cmd_bench(o);
    if (verify->parsed()) {
      // the checked margins are tight: default to a better-converged solver
      if (app.get_option("--iters")->count() == 0) o.outer_iters = 20;
      if (app.get_option("--inner-iters")->count() == 0) o.inner_iters = 200;
      if (app.get_option("--sinkhorn-tol")->count() == 0) o.sinkhorn_tol = 1e-10;
      if (app.get_option("--seed")->count() == 0) o.seed = 7;
      return cmd_verify(o);
    }
    return 2;
  } catch (const VerificationFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}
