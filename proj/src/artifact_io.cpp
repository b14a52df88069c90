#include "lfgw/artifact_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lfgw {

static_assert(std::endian::native == std::endian::little,
              "gram blob writer assumes a little-endian host");

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_embeddings_csv(const std::filesystem::path& path,
                          const std::vector<GraphEmbedding>& embeddings,
                          const std::vector<int>& labels) {
  if (embeddings.empty()) throw InputError("write_embeddings_csv: nothing to write");
  if (labels.size() != embeddings.size()) {
    throw InputError("write_embeddings_csv: label count mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  const Index k = embeddings.front().num_reference_nodes;
  const Index d = embeddings.front().feature_dim;
  out << "id,label";
  for (Index c = 0; c < k * d; ++c) out << ",n" << c;
  for (Index c = 0; c < k * k; ++c) out << ",e" << c;
  out << "\n";
  for (size_t i = 0; i < embeddings.size(); ++i) {
    const auto& e = embeddings[i];
    if (e.num_reference_nodes != k || e.feature_dim != d) {
      throw InputError("write_embeddings_csv: inconsistent embedding shapes");
    }
    out << i << "," << labels[i];
    for (Index c = 0; c < e.node_block.size(); ++c) out << "," << format_double(e.node_block(c));
    for (Index c = 0; c < e.edge_block.size(); ++c) out << "," << format_double(e.edge_block(c));
    out << "\n";
  }
}

EmbeddingsCsv read_embeddings_csv(const std::filesystem::path& path, Index reference_nodes,
                                  Index feature_dim, double alpha,
                                  const std::string& reference_id) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty embeddings CSV " + path.string());

  const Index node_len = reference_nodes * feature_dim;
  const Index edge_len = reference_nodes * reference_nodes;
  EmbeddingsCsv out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string token;
    std::vector<std::string> tokens;
    while (std::getline(ss, token, ',')) tokens.push_back(token);
    if (static_cast<Index>(tokens.size()) != 2 + node_len + edge_len) {
      throw CorruptionError("embeddings CSV row width does not match the sidecar shape");
    }
    GraphEmbedding e;
    e.alpha = alpha;
    e.reference_id = reference_id;
    e.num_reference_nodes = reference_nodes;
    e.feature_dim = feature_dim;
    e.node_block = Vector(node_len);
    e.edge_block = Vector(edge_len);
    try {
      for (Index c = 0; c < node_len; ++c) {
        e.node_block(c) = std::stod(tokens[static_cast<size_t>(2 + c)]);
      }
      for (Index c = 0; c < edge_len; ++c) {
        e.edge_block(c) = std::stod(tokens[static_cast<size_t>(2 + node_len + c)]);
      }
      out.labels.push_back(std::stoi(tokens[1]));
    } catch (const std::exception&) {
      throw FormatError("bad number in embeddings CSV " + path.string());
    }
    out.embeddings.push_back(std::move(e));
  }
  return out;
}

void write_gram_blob(const std::filesystem::path& path, const Matrix& gram) {
  if (gram.rows() != gram.cols()) throw InputError("write_gram_blob: matrix must be square");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  const uint64_t n = static_cast<uint64_t>(gram.rows());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  std::vector<double> row(static_cast<size_t>(gram.cols()));
  for (Index i = 0; i < gram.rows(); ++i) {
    for (Index j = 0; j < gram.cols(); ++j) row[static_cast<size_t>(j)] = gram(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
}

Matrix read_gram_blob(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n == 0) throw FormatError("bad gram blob header in " + path.string());
  Matrix gram(static_cast<Index>(n), static_cast<Index>(n));
  std::vector<double> row(static_cast<size_t>(n));
  for (uint64_t i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw CorruptionError("truncated gram blob " + path.string());
    for (uint64_t j = 0; j < n; ++j) {
      gram(static_cast<Index>(i), static_cast<Index>(j)) = row[static_cast<size_t>(j)];
    }
  }
  return gram;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ",";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

}  // namespace lfgw
