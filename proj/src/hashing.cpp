#include "lfgw/hashing.hpp"

#include <cstring>
#include <fstream>

#include <openssl/evp.h>

namespace lfgw {

namespace {

std::string digest_to_hex(const unsigned char* digest, unsigned len) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

void append_doubles(std::string& buffer, const double* data, size_t count) {
  const size_t offset = buffer.size();
  buffer.resize(offset + count * sizeof(double));
  std::memcpy(buffer.data() + offset, data, count * sizeof(double));
}

void append_index(std::string& buffer, Index value) {
  const auto v = static_cast<int64_t>(value);
  buffer.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericalError("sha256: digest computation failed");
  }
  EVP_MD_CTX_free(ctx);
  return digest_to_hex(digest, len);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

std::string content_hash(const MeasureGraph& g) {
  std::string buffer;
  append_index(buffer, g.num_nodes());
  append_index(buffer, g.feature_dim());
  if (g.features.size() > 0) append_doubles(buffer, g.features.data(), g.features.size());
  append_doubles(buffer, g.structure.data(), g.structure.size());
  append_doubles(buffer, g.measure.data(), g.measure.size());
  append_index(buffer, g.label ? *g.label : -1);
  return sha256_hex(buffer);
}

std::string content_hash(const GraphDataset& dataset) {
  std::string buffer = dataset.name;
  buffer.push_back('\0');
  append_index(buffer, dataset.num_classes);
  append_index(buffer, dataset.size());
  for (const auto& g : dataset.graphs) buffer += content_hash(g);
  return sha256_hex(buffer);
}

}  // namespace lfgw
