#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lfgw/linear_fgw.hpp"

namespace lfgw {

/// Deterministic shortest-round-trip formatting of a double.
std::string format_double(double value);

/// Embeddings CSV: header, then one row per graph
/// (id, label, K*d node entries, K*K edge entries). Deterministic bytes.
void write_embeddings_csv(const std::filesystem::path& path,
                          const std::vector<GraphEmbedding>& embeddings,
                          const std::vector<int>& labels);

struct EmbeddingsCsv {
  std::vector<GraphEmbedding> embeddings;
  std::vector<int> labels;  // -1 where absent
};
EmbeddingsCsv read_embeddings_csv(const std::filesystem::path& path, Index reference_nodes,
                                  Index feature_dim, double alpha,
                                  const std::string& reference_id);

/// Gram matrix binary blob: an 8-byte little-endian unsigned 64-bit N,
/// then N*N little-endian float64 values in row-major order.
void write_gram_blob(const std::filesystem::path& path, const Matrix& gram);
Matrix read_gram_blob(const std::filesystem::path& path);

/// Square matrix as CSV (no header), deterministic formatting.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

}  // namespace lfgw
