#include "lfgw/measure_graph.hpp"

#include <cmath>
#include <sstream>

namespace lfgw {

namespace {
constexpr double kMeasureTol = 1e-12;
constexpr double kSymmetryTol = 1e-12;
}  // namespace

void MeasureGraph::validate() const {
  const Index m = structure.rows();
  if (structure.cols() != m) {
    throw InputError("measure graph: structure matrix must be square");
  }
  if (m == 0) {
    throw InputError("measure graph: at least one node required");
  }
  if (features.rows() != m) {
    std::ostringstream os;
    os << "measure graph: feature matrix has " << features.rows() << " rows for " << m
       << " nodes";
    throw InputError(os.str());
  }
  if (measure.size() != m) {
    throw InputError("measure graph: measure length does not match node count");
  }
  if (!structure.allFinite() || !features.allFinite() || !measure.allFinite()) {
    throw InputError("measure graph: non-finite entries");
  }
  if ((measure.array() < 0.0).any()) {
    throw InputError("measure graph: measure entries must be nonnegative");
  }
  if (std::abs(measure.sum() - 1.0) > kMeasureTol) {
    throw InputError("measure graph: measure must sum to 1");
  }
  const double asym = (structure - structure.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) {
    throw InputError("measure graph: structure matrix must be symmetric");
  }
}

MeasureGraph make_measure_graph(Matrix features, Matrix structure, Vector measure,
                                std::optional<int> label) {
  MeasureGraph g{std::move(features), std::move(structure), std::move(measure), label};
  g.validate();
  return g;
}

Vector uniform_measure(Index m) {
  if (m <= 0) throw InputError("uniform_measure: node count must be positive");
  return Vector::Constant(m, 1.0 / static_cast<double>(m));
}

MeasureGraph permute_graph(const MeasureGraph& g, const std::vector<Index>& perm) {
  const Index m = g.num_nodes();
  if (static_cast<Index>(perm.size()) != m) {
    throw InputError("permute_graph: permutation length mismatch");
  }
  std::vector<bool> seen(static_cast<size_t>(m), false);
  for (Index p : perm) {
    if (p < 0 || p >= m || seen[static_cast<size_t>(p)]) {
      throw InputError("permute_graph: not a permutation");
    }
    seen[static_cast<size_t>(p)] = true;
  }
  MeasureGraph out;
  out.features = Matrix(m, g.feature_dim());
  out.structure = Matrix(m, m);
  out.measure = Vector(m);
  out.label = g.label;
  for (Index i = 0; i < m; ++i) {
    out.features.row(perm[static_cast<size_t>(i)]) = g.features.row(i);
    out.measure(perm[static_cast<size_t>(i)]) = g.measure(i);
    for (Index j = 0; j < m; ++j) {
      out.structure(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]) =
          g.structure(i, j);
    }
  }
  return out;
}

std::vector<int> GraphDataset::labels() const {
  std::vector<int> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(g.label.value_or(-1));
  return out;
}

void GraphDataset::validate() const {
  if (num_classes < 1) throw InputError("dataset: num_classes must be >= 1");
  const Index d = feature_dim();
  for (size_t i = 0; i < graphs.size(); ++i) {
    graphs[i].validate();
    if (graphs[i].feature_dim() != d) {
      throw InputError("dataset: graphs must share one feature dimensionality");
    }
    if (graphs[i].label && (*graphs[i].label < 0 || *graphs[i].label >= num_classes)) {
      throw InputError("dataset: label out of range");
    }
  }
}

}  // namespace lfgw
