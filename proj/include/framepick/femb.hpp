#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "framepick/error.hpp"
#include "framepick/types.hpp"

namespace framepick {

// FEMB v1, all integers and floats little-endian:
//   "FEMB" | u32 version=1 | u8 kind | u32 n | u32 d | n x u32 frame index | n*d x f32 (row-major)
// kind 1 = embeddings, kind 2 = scores (d must be 1).
inline constexpr std::size_t kFembHeaderSize = 17;
inline constexpr std::uint32_t kFembVersion = 1;

enum class FembKind : std::uint8_t { Embeddings = 1, Scores = 2 };

enum class FembErrorCode {
  BadMagic,
  BadVersion,
  BadKind,
  BadShape,
  SizeMismatch,
  NonIncreasingIndices,
  NonFinite,
  KindMismatch,
};

const char* to_string(FembErrorCode code) noexcept;

class FembError : public ParseError {
 public:
  FembError(FembErrorCode code, const std::string& message)
      : ParseError(std::string("FEMB ") + to_string(code) + ": " + message), code_(code) {}
  FembErrorCode code() const noexcept { return code_; }

 private:
  FembErrorCode code_;
};

using FembData = std::variant<EmbeddingMatrix, ScoreVector>;

std::vector<std::uint8_t> write_femb(const EmbeddingMatrix& emb);
std::vector<std::uint8_t> write_femb(const ScoreVector& scores);
std::vector<std::uint8_t> write_femb(const FembData& data);

/// Validates every header field, the exact payload size, index ordering and
/// finiteness. Throws FembError.
FembData parse_femb(std::span<const std::uint8_t> bytes);

FembData read_femb(const std::filesystem::path& path);
/// read_femb restricted to one kind; the other kind throws KindMismatch.
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
ScoreVector read_scores(const std::filesystem::path& path);

void write_femb_file(const std::filesystem::path& path, const FembData& data);

/// `<dir>/<video_id>.femb`
std::filesystem::path femb_path(const std::filesystem::path& dir, std::string_view video_id);

}  // namespace framepick
