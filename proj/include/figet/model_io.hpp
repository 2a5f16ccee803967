#pragma once

// Versioned binary model container. All integers are little-endian; doubles
// are stored as their IEEE-754 bit patterns, so a save/load round trip is
// bit-exact.
//
//   "FIGETMDL" u32 version
//   str config   str embeddings_path   str clusters_path
//   u64 K, K x str type paths
//   u64 D_f, D_f x str feature names
//   u64 P, P x { str name, u32 rank, rank x u64 dim, n x f64 }
//   "END."
//
// where str is u64 length + bytes.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "figet/config.hpp"
#include "figet/corpus.hpp"
#include "figet/error.hpp"
#include "figet/model.hpp"

namespace figet {

inline constexpr char kModelMagic[8] = {'F', 'I', 'G', 'E', 'T', 'M', 'D', 'L'};
inline constexpr char kModelTrailer[4] = {'E', 'N', 'D', '.'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    buf_ += s;
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(std::string bytes, std::string source) : buf_(std::move(bytes)), source_(std::move(source)) {}

  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw CorruptFileError(source_ + ": truncated model file");
  }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u64();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  // Element counts are checked against the bytes left before allocating.
  std::uint64_t count(std::size_t min_item_bytes) {
    const auto n = u64();
    if (min_item_bytes && n > (buf_.size() - pos_) / min_item_bytes) {
      throw CorruptFileError(source_ + ": implausible element count");
    }
    return n;
  }
  bool at_end() const { return pos_ == buf_.size(); }
  const std::string& source() const { return source_; }

 private:
  std::string buf_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_model(Model& m) {
  detail::ByteWriter w;
  w.raw(kModelMagic, sizeof kModelMagic);
  w.u32(kModelVersion);
  w.str(config_to_text(m.config));
  w.str(m.embeddings_path);
  w.str(m.clusters_path);
  const auto types = m.types.type_strings();
  w.u64(types.size());
  for (const auto& t : types) w.str(t);
  w.u64(m.features.dim());
  for (const auto& f : m.features.names()) w.str(f);
  const auto params = m.named_parameters();
  w.u64(params.size());
  for (const auto& [name, p] : params) {
    w.str(name);
    const auto& shape = p->value.shape();
    w.u32(static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) w.u64(d);
    for (double v : p->value.span()) w.f64(v);
  }
  w.raw(kModelTrailer, sizeof kModelTrailer);
  return w.bytes();
}

inline void save_model(Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model file " + path);
  const auto bytes = serialize_model(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing model file " + path);
}

// Rebuilds a model from bytes. Embedding and cluster tables are not part of
// the container; attach them with attach_resources().
inline Model deserialize_model(std::string bytes, const std::string& source = "<memory>") {
  detail::ByteReader r(std::move(bytes), source);
  char magic[sizeof kModelMagic];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) throw CorruptFileError(source + ": not a model file");
  const auto version = r.u32();
  if (version != kModelVersion) {
    throw VersionError(source + ": model version " + std::to_string(version) + ", expected " +
                       std::to_string(kModelVersion));
  }
  ModelConfig config;
  try {
    config = parse_config_text(r.str());
  } catch (const ValidationError& e) {
    throw CorruptFileError(source + ": bad config block: " + e.what());
  }
  const auto embeddings_path = r.str();
  const auto clusters_path = r.str();
  std::vector<std::string> types(r.count(8));
  for (auto& t : types) t = r.str();
  std::vector<std::string> feature_names(r.count(8));
  for (auto& f : feature_names) f = r.str();

  Model m;
  try {
    m = make_model(config, TypeSystem(types), FeatureIndex::from_names(std::move(feature_names)), nullptr);
  } catch (const ValidationError& e) {
    throw CorruptFileError(source + ": " + e.what());
  }
  m.embeddings_path = embeddings_path;
  m.clusters_path = clusters_path;

  auto params = m.named_parameters();
  const auto count = r.count(8);
  if (count != params.size()) throw CorruptFileError(source + ": parameter count mismatch");
  for (auto& [name, p] : params) {
    if (r.str() != name) throw CorruptFileError(source + ": expected parameter " + name);
    std::vector<std::size_t> shape(r.u32());
    for (auto& d : shape) d = r.u64();
    if (shape != p->value.shape()) throw CorruptFileError(source + ": shape mismatch for " + name);
    r.need(p->value.size() * 8);
    for (auto& v : p->value.span()) v = r.f64();
  }
  char trailer[sizeof kModelTrailer];
  r.raw(trailer, sizeof trailer);
  if (std::memcmp(trailer, kModelTrailer, sizeof trailer) != 0 || !r.at_end()) {
    throw CorruptFileError(source + ": bad trailer");
  }
  return m;
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str(), path);
}

// Loads the embedding and cluster tables a model needs, preferring explicit
// paths over the ones recorded at training time.
inline void attach_resources(Model& m, const std::string& embeddings_override = {},
                             const std::string& clusters_override = {}) {
  const auto emb = embeddings_override.empty() ? m.embeddings_path : embeddings_override;
  if (m.config.encoder != EncoderKind::sparse) {
    if (emb.empty()) throw ValidationError("model needs an embedding table; pass --embeddings");
    m.embeddings = std::make_shared<const EmbeddingTable>(load_embedding_table(emb, m.config.embedding_dim));
  }
  const auto cl = clusters_override.empty() ? m.clusters_path : clusters_override;
  if (m.config.uses_features() && !cl.empty()) {
    m.clusters = std::make_shared<const ClusterTable>(load_cluster_table(cl));
  }
}

}  // namespace figet
