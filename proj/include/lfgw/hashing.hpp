#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lfgw/measure_graph.hpp"

namespace lfgw {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

/// Content hash of a measure graph: dimensions plus the raw little-endian
/// float64 payloads of features, structure and measure.
std::string content_hash(const MeasureGraph& g);

/// Content hash of a dataset (graph hashes plus labels and metadata).
std::string content_hash(const GraphDataset& dataset);

}  // namespace lfgw
