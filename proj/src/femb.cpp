#include "framepick/femb.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace framepick {

const char* to_string(FembErrorCode code) noexcept {
  switch (code) {
    case FembErrorCode::BadMagic: return "bad magic";
    case FembErrorCode::BadVersion: return "unsupported version";
    case FembErrorCode::BadKind: return "bad kind";
    case FembErrorCode::BadShape: return "bad shape";
    case FembErrorCode::SizeMismatch: return "size mismatch";
    case FembErrorCode::NonIncreasingIndices: return "non-increasing indices";
    case FembErrorCode::NonFinite: return "non-finite value";
    case FembErrorCode::KindMismatch: return "kind mismatch";
  }
  return "error";
}

namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'E', 'M', 'B'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[offset + k]) << (8 * k);
  return v;
}

std::vector<std::uint8_t> encode(FembKind kind, const std::vector<FrameIndex>& indices,
                                 std::size_t dim, const std::vector<float>& values) {
  if (indices.size() > std::numeric_limits<std::uint32_t>::max() ||
      dim > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("FEMB: dimensions exceed 32 bits");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kFembHeaderSize + 4 * indices.size() + 4 * values.size());
  for (const std::uint8_t b : kMagic) out.push_back(b);
  put_u32(out, kFembVersion);
  out.push_back(static_cast<std::uint8_t>(kind));
  put_u32(out, static_cast<std::uint32_t>(indices.size()));
  put_u32(out, static_cast<std::uint32_t>(dim));
  for (const FrameIndex idx : indices) {
    if (idx < 0 || idx > std::numeric_limits<std::uint32_t>::max()) {
      throw ValidationError("FEMB: frame index " + std::to_string(idx) + " does not fit in u32");
    }
    put_u32(out, static_cast<std::uint32_t>(idx));
  }
  for (const float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

}  // namespace

std::vector<std::uint8_t> write_femb(const EmbeddingMatrix& emb) {
  return encode(FembKind::Embeddings, emb.source_indices(), emb.dim(), emb.data());
}

std::vector<std::uint8_t> write_femb(const ScoreVector& scores) {
  return encode(FembKind::Scores, scores.source_indices(), 1, scores.scores());
}

std::vector<std::uint8_t> write_femb(const FembData& data) {
  return std::visit([](const auto& d) { return write_femb(d); }, data);
}

FembData parse_femb(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFembHeaderSize) {
    throw FembError(FembErrorCode::SizeMismatch,
                    "file is " + std::to_string(bytes.size()) + " bytes, shorter than the header");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FembError(FembErrorCode::BadMagic, "expected \"FEMB\"");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kFembVersion) {
    throw FembError(FembErrorCode::BadVersion, "version " + std::to_string(version));
  }
  const std::uint8_t kind = bytes[8];
  if (kind != static_cast<std::uint8_t>(FembKind::Embeddings) &&
      kind != static_cast<std::uint8_t>(FembKind::Scores)) {
    throw FembError(FembErrorCode::BadKind, "kind " + std::to_string(kind));
  }
  const std::uint64_t n = get_u32(bytes, 9);
  const std::uint64_t d = get_u32(bytes, 13);
  if (n == 0 || d == 0) {
    throw FembError(FembErrorCode::BadShape, "n and d must be >= 1");
  }
  if (kind == static_cast<std::uint8_t>(FembKind::Scores) && d != 1) {
    throw FembError(FembErrorCode::BadShape, "score files must have d = 1");
  }
  const std::uint64_t expected = kFembHeaderSize + 4 * n + 4 * n * d;
  if (bytes.size() != expected) {
    throw FembError(FembErrorCode::SizeMismatch, "header declares " + std::to_string(expected) +
                                                     " bytes, file has " +
                                                     std::to_string(bytes.size()));
  }

  std::vector<FrameIndex> indices(n);
  std::size_t offset = kFembHeaderSize;
  for (std::uint64_t i = 0; i < n; ++i, offset += 4) {
    indices[i] = get_u32(bytes, offset);
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw FembError(FembErrorCode::NonIncreasingIndices, "at row " + std::to_string(i));
    }
  }
  std::vector<float> values(n * d);
  for (std::uint64_t i = 0; i < n * d; ++i, offset += 4) {
    values[i] = std::bit_cast<float>(get_u32(bytes, offset));
    if (!std::isfinite(values[i])) {
      throw FembError(FembErrorCode::NonFinite, "at row " + std::to_string(i / d));
    }
  }
  if (kind == static_cast<std::uint8_t>(FembKind::Scores)) {
    return ScoreVector(std::move(indices), std::move(values));
  }
  return EmbeddingMatrix(std::move(indices), static_cast<std::size_t>(d), std::move(values));
}

FembData read_femb(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open FEMB file '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  try {
    return parse_femb(bytes);
  } catch (const FembError& e) {
    throw FembError(e.code(), path.string() + ": " + e.what());
  }
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  FembData data = read_femb(path);
  if (auto* emb = std::get_if<EmbeddingMatrix>(&data)) return std::move(*emb);
  throw FembError(FembErrorCode::KindMismatch, path.string() + " holds scores, not embeddings");
}

ScoreVector read_scores(const std::filesystem::path& path) {
  FembData data = read_femb(path);
  if (auto* s = std::get_if<ScoreVector>(&data)) return std::move(*s);
  throw FembError(FembErrorCode::KindMismatch, path.string() + " holds embeddings, not scores");
}

void write_femb_file(const std::filesystem::path& path, const FembData& data) {
  const std::vector<std::uint8_t> bytes = write_femb(data);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::filesystem::path femb_path(const std::filesystem::path& dir, std::string_view video_id) {
  return dir / (std::string(video_id) + ".femb");
}

}  // namespace framepick
