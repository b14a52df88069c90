#include <fstream>
#include <random>

#include <json.hpp>

#include "lfgw/dataset_io.hpp"

namespace lfgw {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, Index expect_rows, Index expect_cols) {
  if (!rows.is_array()) throw FormatError("expected an array of feature rows");
  Matrix m(expect_rows, expect_cols);
  if (static_cast<Index>(rows.size()) != expect_rows) {
    throw CorruptionError("row count mismatch in matrix payload");
  }
  for (Index i = 0; i < expect_rows; ++i) {
    const auto& row = rows[static_cast<size_t>(i)];
    if (static_cast<Index>(row.size()) != expect_cols) {
      throw CorruptionError("ragged matrix payload");
    }
    for (Index j = 0; j < expect_cols; ++j) m(i, j) = row[static_cast<size_t>(j)].get<double>();
  }
  return m;
}

json parse(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw FormatError("invalid JSON document");
  return doc;
}

}  // namespace

std::string dataset_to_json(const GraphDataset& dataset) {
  json doc;
  doc["format"] = "lfgw-dataset-v1";
  doc["name"] = dataset.name;
  doc["num_classes"] = dataset.num_classes;
  json graphs = json::array();
  for (const auto& g : dataset.graphs) {
    json entry;
    entry["num_nodes"] = g.num_nodes();
    json edges = json::array();
    for (Index i = 0; i < g.num_nodes(); ++i)
      for (Index j = i; j < g.num_nodes(); ++j) {
        const double a = g.structure(i, j);
        if (a == 0.0) continue;
        if (a != 1.0) {
          throw InputError(
              "dataset_to_json: the dataset document stores binary adjacency only");
        }
        edges.push_back(json::array({i, j}));
      }
    entry["edges"] = std::move(edges);
    entry["features"] = matrix_to_json(g.features);
    if (g.label) {
      entry["label"] = *g.label;
    } else {
      entry["label"] = nullptr;
    }
    graphs.push_back(std::move(entry));
  }
  doc["graphs"] = std::move(graphs);
  return doc.dump();
}

GraphDataset dataset_from_json(const std::string& text, StructureKind structure) {
  json doc = parse(text);
  if (!doc.contains("graphs") || !doc["graphs"].is_array()) {
    throw FormatError("dataset document lacks a 'graphs' array");
  }
  GraphDataset dataset;
  dataset.name = doc.value("name", "dataset");
  dataset.num_classes = doc.value("num_classes", 1);
  for (const auto& entry : doc["graphs"]) {
    const Index m = entry.at("num_nodes").get<Index>();
    if (m <= 0) throw CorruptionError("graph with zero nodes in dataset document");
    Matrix a = Matrix::Zero(m, m);
    for (const auto& e : entry.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw FormatError("bad edge entry");
      const Index u = e[0].get<Index>();
      const Index v = e[1].get<Index>();
      if (u < 0 || u >= m || v < 0 || v >= m) {
        throw CorruptionError("edge endpoint out of range in dataset document");
      }
      a(u, v) = 1.0;
      a(v, u) = 1.0;
    }
    const auto& feature_rows = entry.at("features");
    const Index d = feature_rows.empty()
                        ? 0
                        : static_cast<Index>(feature_rows[0].size());
    Matrix x = matrix_from_json(feature_rows, m, d);
    std::optional<int> label;
    if (entry.contains("label") && !entry["label"].is_null()) {
      label = entry["label"].get<int>();
    }
    MeasureGraph g = make_measure_graph(std::move(x), std::move(a), uniform_measure(m), label);
    if (structure == StructureKind::ShortestPath) g = to_shortest_path_structure(g);
    dataset.graphs.push_back(std::move(g));
  }
  dataset.validate();
  return dataset;
}

void save_dataset_json(const GraphDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << dataset_to_json(dataset);
}

GraphDataset load_dataset_json(const std::filesystem::path& path, StructureKind structure) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return dataset_from_json(text, structure);
}

GraphDataset load_dataset(const std::filesystem::path& path, StructureKind structure) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) {
    fs::path trimmed = path;
    if (trimmed.filename().empty()) trimmed = trimmed.parent_path();  // trailing slash
    return load_tu_dataset(trimmed, trimmed.filename().string(), structure);
  }
  if (fs::exists(path) && path.extension() == ".json") {
    return load_dataset_json(path, structure);
  }
  if (!fs::exists(path)) {
    throw FormatError("dataset path does not exist: " + path.string());
  }
  throw FormatError("unrecognized dataset path (expect a TU directory or a .json file): " +
                    path.string());
}

std::string measure_graph_to_json(const MeasureGraph& g) {
  json doc;
  doc["format"] = "lfgw-measure-graph-v1";
  doc["num_nodes"] = g.num_nodes();
  doc["feature_dim"] = g.feature_dim();
  doc["features"] = matrix_to_json(g.features);
  doc["structure"] = matrix_to_json(g.structure);
  json measure = json::array();
  for (Index i = 0; i < g.measure.size(); ++i) measure.push_back(g.measure(i));
  doc["measure"] = std::move(measure);
  if (g.label) doc["label"] = *g.label;
  return doc.dump();
}

MeasureGraph measure_graph_from_json(const std::string& text) {
  json doc = parse(text);
  const Index m = doc.at("num_nodes").get<Index>();
  const Index d = doc.at("feature_dim").get<Index>();
  Matrix features = matrix_from_json(doc.at("features"), m, d);
  Matrix structure = matrix_from_json(doc.at("structure"), m, m);
  Vector measure(m);
  const auto& entries = doc.at("measure");
  if (static_cast<Index>(entries.size()) != m) {
    throw CorruptionError("measure length mismatch in measure-graph document");
  }
  for (Index i = 0; i < m; ++i) measure(i) = entries[static_cast<size_t>(i)].get<double>();
  std::optional<int> label;
  if (doc.contains("label") && !doc["label"].is_null()) label = doc["label"].get<int>();
  return make_measure_graph(std::move(features), std::move(structure), std::move(measure),
                            label);
}

void save_measure_graph_json(const MeasureGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << measure_graph_to_json(g);
}

MeasureGraph load_measure_graph_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return measure_graph_from_json(text);
}

GraphDataset make_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.graphs_per_class < 1 || spec.num_classes < 1) {
    throw InputError("synthetic dataset: need at least one graph and one class");
  }
  if (spec.nodes_min < 1 || spec.nodes_max < spec.nodes_min) {
    throw InputError("synthetic dataset: bad node-count range");
  }
  if (spec.edge_probs.empty()) throw InputError("synthetic dataset: no edge probabilities");
  for (double p : spec.edge_probs) {
    if (p < 0.0 || p > 1.0) throw InputError("synthetic dataset: edge probability not in [0,1]");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> node_count(spec.nodes_min, spec.nodes_max);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GraphDataset dataset;
  dataset.name = "synthetic";
  dataset.num_classes = spec.num_classes;
  for (int cls = 0; cls < spec.num_classes; ++cls) {
    const double p = spec.edge_probs[static_cast<size_t>(cls) % spec.edge_probs.size()];
    for (int g = 0; g < spec.graphs_per_class; ++g) {
      const Index m = node_count(rng);
      Matrix a = Matrix::Zero(m, m);
      for (Index i = 0; i < m; ++i)
        for (Index j = i + 1; j < m; ++j)
          if (unif(rng) < p) {
            a(i, j) = 1.0;
            a(j, i) = 1.0;
          }
      Matrix x(m, spec.feature_dim);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < spec.feature_dim; ++j)
          x(i, j) = gauss(rng) + cls * spec.feature_shift;
      dataset.graphs.push_back(
          make_measure_graph(std::move(x), std::move(a), uniform_measure(m), cls));
    }
  }
  return dataset;
}

}  // namespace lfgw
