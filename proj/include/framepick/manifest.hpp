#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "framepick/types.hpp"

namespace framepick {

/// Canonical compact JSON; keys in the order documented in docs/formats.md.
/// Structurally equal manifests produce identical bytes.
std::string serialize_manifest(const SelectionManifest& manifest);

/// Strict inverse of serialize_manifest. Throws ParseError with a line/column
/// or field path on malformed input.
SelectionManifest parse_manifest(std::string_view text);

/// `<dir>/<video_id>.manifest.json`
std::filesystem::path manifest_path(const std::filesystem::path& dir, std::string_view video_id);

void write_manifest_file(const std::filesystem::path& path, const SelectionManifest& manifest);
SelectionManifest read_manifest_file(const std::filesystem::path& path);

/// Reads every `*.manifest.json` in `dir`, sorted by video id.
std::vector<SelectionManifest> read_manifest_dir(const std::filesystem::path& dir);

/// Parses a JSON-lines video list: one object per line with `video_id` and at
/// least two of `frame_count`, `native_fps`, `duration_s`; optional `path`.
std::vector<VideoMeta> parse_video_list(std::string_view text);
std::vector<VideoMeta> load_video_list(const std::filesystem::path& path);

/// Whole-file helpers that throw IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace framepick
