#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "lfgw/dataset_io.hpp"

namespace lfgw {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<long> parse_int_line(const std::string& line, const fs::path& origin) {
  std::vector<long> values;
  std::string token;
  std::stringstream ss(line);
  while (std::getline(ss, token, ',')) {
    try {
      values.push_back(std::stol(token));
    } catch (const std::exception&) {
      throw FormatError("bad integer '" + token + "' in " + origin.string());
    }
  }
  return values;
}

std::vector<double> parse_float_line(const std::string& line, const fs::path& origin) {
  std::vector<double> values;
  std::string token;
  std::stringstream ss(line);
  while (std::getline(ss, token, ',')) {
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw FormatError("bad number '" + token + "' in " + origin.string());
    }
  }
  return values;
}

}  // namespace

MeasureGraph to_shortest_path_structure(const MeasureGraph& g) {
  const Index m = g.num_nodes();
  constexpr double kUnreached = -1.0;
  Matrix dist = Matrix::Constant(m, m, kUnreached);
  double longest = 0.0;
  for (Index s = 0; s < m; ++s) {
    dist(s, s) = 0.0;
    std::queue<Index> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      const Index u = frontier.front();
      frontier.pop();
      for (Index v = 0; v < m; ++v) {
        if (v != u && g.structure(u, v) != 0.0 && dist(s, v) == kUnreached) {
          dist(s, v) = dist(s, u) + 1.0;
          longest = std::max(longest, dist(s, v));
          frontier.push(v);
        }
      }
    }
  }
  const double unreachable = longest + 1.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      if (dist(i, j) == kUnreached) dist(i, j) = unreachable;

  MeasureGraph out = g;
  out.structure = std::move(dist);
  return out;
}

GraphDataset load_tu_dataset(const fs::path& root_dir, const std::string& name,
                             StructureKind structure) {
  fs::path base = root_dir;
  if (!fs::exists(base / (name + "_A.txt")) && fs::exists(base / name / (name + "_A.txt"))) {
    base = base / name;
  }
  const fs::path adjacency_file = base / (name + "_A.txt");
  const fs::path indicator_file = base / (name + "_graph_indicator.txt");
  if (!fs::exists(adjacency_file)) {
    throw FormatError("missing mandatory file " + adjacency_file.string());
  }
  if (!fs::exists(indicator_file)) {
    throw FormatError("missing mandatory file " + indicator_file.string());
  }

  // graph membership, 1-based node ids in file order
  const auto indicator_lines = read_lines(indicator_file);
  const long node_count = static_cast<long>(indicator_lines.size());
  if (node_count == 0) throw CorruptionError("empty graph indicator in " + indicator_file.string());
  std::vector<long> graph_of(static_cast<size_t>(node_count));
  long graph_count = 0;
  for (long i = 0; i < node_count; ++i) {
    const auto values = parse_int_line(indicator_lines[static_cast<size_t>(i)], indicator_file);
    if (values.size() != 1 || values[0] < 1) {
      throw CorruptionError("bad graph id at line " + std::to_string(i + 1) + " of " +
                            indicator_file.string());
    }
    graph_of[static_cast<size_t>(i)] = values[0] - 1;
    graph_count = std::max(graph_count, values[0]);
  }

  std::vector<std::vector<long>> nodes_of(static_cast<size_t>(graph_count));
  std::vector<long> local_index(static_cast<size_t>(node_count));
  for (long i = 0; i < node_count; ++i) {
    auto& members = nodes_of[static_cast<size_t>(graph_of[static_cast<size_t>(i)])];
    local_index[static_cast<size_t>(i)] = static_cast<long>(members.size());
    members.push_back(i);
  }
  for (long g = 0; g < graph_count; ++g) {
    if (nodes_of[static_cast<size_t>(g)].empty()) {
      throw CorruptionError("graph " + std::to_string(g + 1) + " has zero nodes");
    }
  }

  // adjacency list
  std::vector<Matrix> structures;
  structures.reserve(static_cast<size_t>(graph_count));
  for (long g = 0; g < graph_count; ++g) {
    const Index m = static_cast<Index>(nodes_of[static_cast<size_t>(g)].size());
    structures.emplace_back(Matrix::Zero(m, m));
  }
  for (const auto& line : read_lines(adjacency_file)) {
    const auto values = parse_int_line(line, adjacency_file);
    if (values.size() != 2) {
      throw FormatError("expected 'u, v' edge line in " + adjacency_file.string());
    }
    const long u = values[0] - 1;
    const long v = values[1] - 1;
    if (u < 0 || u >= node_count || v < 0 || v >= node_count) {
      throw CorruptionError("node index out of range in " + adjacency_file.string());
    }
    if (graph_of[static_cast<size_t>(u)] != graph_of[static_cast<size_t>(v)]) {
      throw CorruptionError("edge crosses graphs in " + adjacency_file.string());
    }
    auto& a = structures[static_cast<size_t>(graph_of[static_cast<size_t>(u)])];
    a(local_index[static_cast<size_t>(u)], local_index[static_cast<size_t>(v)]) = 1.0;
    a(local_index[static_cast<size_t>(v)], local_index[static_cast<size_t>(u)]) = 1.0;
  }

  // features: continuous attributes beat one-hot node labels beat a constant
  const fs::path attributes_file = base / (name + "_node_attributes.txt");
  const fs::path node_labels_file = base / (name + "_node_labels.txt");
  Matrix all_features;
  if (fs::exists(attributes_file)) {
    const auto lines = read_lines(attributes_file);
    if (static_cast<long>(lines.size()) != node_count) {
      throw CorruptionError("node attribute count does not match node count");
    }
    const auto first = parse_float_line(lines[0], attributes_file);
    all_features = Matrix(node_count, static_cast<Index>(first.size()));
    for (long i = 0; i < node_count; ++i) {
      const auto values = parse_float_line(lines[static_cast<size_t>(i)], attributes_file);
      if (values.size() != first.size()) {
        throw CorruptionError("ragged node attribute rows in " + attributes_file.string());
      }
      for (size_t c = 0; c < values.size(); ++c) {
        all_features(i, static_cast<Index>(c)) = values[c];
      }
    }
  } else if (fs::exists(node_labels_file)) {
    const auto lines = read_lines(node_labels_file);
    if (static_cast<long>(lines.size()) != node_count) {
      throw CorruptionError("node label count does not match node count");
    }
    std::vector<long> raw(static_cast<size_t>(node_count));
    std::map<long, Index> codes;
    for (long i = 0; i < node_count; ++i) {
      const auto values = parse_int_line(lines[static_cast<size_t>(i)], node_labels_file);
      if (values.size() != 1) {
        throw FormatError("expected one node label per line in " + node_labels_file.string());
      }
      raw[static_cast<size_t>(i)] = values[0];
      codes.emplace(values[0], 0);
    }
    Index next = 0;
    for (auto& [value, code] : codes) code = next++;
    all_features = Matrix::Zero(node_count, next);
    for (long i = 0; i < node_count; ++i) {
      all_features(i, codes[raw[static_cast<size_t>(i)]]) = 1.0;
    }
  } else {
    all_features = Matrix::Ones(node_count, 1);
  }

  // graph labels, remapped to [0, num_classes)
  const fs::path graph_labels_file = base / (name + "_graph_labels.txt");
  std::vector<std::optional<int>> labels(static_cast<size_t>(graph_count));
  int num_classes = 1;
  if (fs::exists(graph_labels_file)) {
    const auto lines = read_lines(graph_labels_file);
    if (static_cast<long>(lines.size()) != graph_count) {
      throw CorruptionError("graph label count does not match graph count");
    }
    std::vector<long> raw(static_cast<size_t>(graph_count));
    std::map<long, int> codes;
    for (long g = 0; g < graph_count; ++g) {
      const auto values = parse_int_line(lines[static_cast<size_t>(g)], graph_labels_file);
      if (values.size() != 1) {
        throw FormatError("expected one graph label per line in " + graph_labels_file.string());
      }
      raw[static_cast<size_t>(g)] = values[0];
      codes.emplace(values[0], 0);
    }
    int next = 0;
    for (auto& [value, code] : codes) code = next++;
    num_classes = next;
    for (long g = 0; g < graph_count; ++g) {
      labels[static_cast<size_t>(g)] = codes[raw[static_cast<size_t>(g)]];
    }
  }

  GraphDataset dataset;
  dataset.name = name;
  dataset.num_classes = num_classes;
  dataset.graphs.reserve(static_cast<size_t>(graph_count));
  for (long g = 0; g < graph_count; ++g) {
    const auto& members = nodes_of[static_cast<size_t>(g)];
    const Index m = static_cast<Index>(members.size());
    Matrix features(m, all_features.cols());
    for (Index r = 0; r < m; ++r) {
      features.row(r) = all_features.row(members[static_cast<size_t>(r)]);
    }
    MeasureGraph graph = make_measure_graph(
        std::move(features), std::move(structures[static_cast<size_t>(g)]),
        uniform_measure(m), labels[static_cast<size_t>(g)]);
    if (structure == StructureKind::ShortestPath) {
      graph = to_shortest_path_structure(graph);
    }
    dataset.graphs.push_back(std::move(graph));
  }
  dataset.validate();
  return dataset;
}

}  // namespace lfgw
