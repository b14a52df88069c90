#pragma once

#include <filesystem>
#include <string>

#include "lfgw/measure_graph.hpp"

namespace lfgw {

enum class StructureKind { Adjacency, ShortestPath };

/// Load a dataset in the TU-Dortmund benchmark text format. `root_dir` may be
/// the directory holding `{name}_A.txt` etc., or its parent (archives unpack
/// to a folder named after the dataset). Node attributes become continuous
/// features; datasets with only discrete node labels get one-hot features;
/// datasets with neither get a constant scalar feature. Measures are uniform.
GraphDataset load_tu_dataset(const std::filesystem::path& root_dir, const std::string& name,
                             StructureKind structure = StructureKind::Adjacency);

/// Serialize a binary-adjacency dataset to the internal JSON document
/// (per-graph node counts, edge lists, feature rows, labels).
std::string dataset_to_json(const GraphDataset& dataset);
GraphDataset dataset_from_json(const std::string& text,
                               StructureKind structure = StructureKind::Adjacency);

void save_dataset_json(const GraphDataset& dataset, const std::filesystem::path& path);
GraphDataset load_dataset_json(const std::filesystem::path& path,
                               StructureKind structure = StructureKind::Adjacency);

/// Dispatch on the path: a .json file uses the internal format, a directory
/// (or a bare name resolved against `tu_root`) the TU format.
GraphDataset load_dataset(const std::filesystem::path& path,
                          StructureKind structure = StructureKind::Adjacency);

/// Replace every adjacency matrix by the matrix of breadth-first shortest
/// path lengths (unreachable pairs get the longest finite distance plus one).
MeasureGraph to_shortest_path_structure(const MeasureGraph& g);

/// MeasureGraph JSON (used for persisted barycenter references).
std::string measure_graph_to_json(const MeasureGraph& g);
MeasureGraph measure_graph_from_json(const std::string& text);
void save_measure_graph_json(const MeasureGraph& g, const std::filesystem::path& path);
MeasureGraph load_measure_graph_json(const std::filesystem::path& path);

/// Erdos-Renyi graphs with Gaussian node features. `edge_probs` cycles per
/// class; class c feature means are shifted by c * feature_shift on every
/// coordinate. Labels are class indices.
struct SyntheticSpec {
  int graphs_per_class = 50;
  int num_classes = 1;
  int nodes_min = 20;
  int nodes_max = 40;
  std::vector<double> edge_probs = {0.3};
  int feature_dim = 3;
  double feature_shift = 0.0;
  unsigned seed = 42;
};
GraphDataset make_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace lfgw
