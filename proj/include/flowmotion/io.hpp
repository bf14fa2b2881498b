#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "flowmotion/detector.hpp"
#include "flowmotion/flow_model.hpp"

namespace flowmotion::io {

inline constexpr float kFloMagic = 202021.25f;

// Middlebury .flo: float magic, int32 width, int32 height, then interleaved
// (u, v) float32 pairs in row-major order, all little-endian.
FlowField read_flow(const std::filesystem::path& path);
void write_flow(const FlowField& field, const std::filesystem::path& path);

// Binary raster with header "P5 <width> <height> 255\n" followed by one byte
// per pixel: 0 background, 255 foreground.
ForegroundMask read_mask(const std::filesystem::path& path);
void write_mask(const ForegroundMask& mask, const std::filesystem::path& path);

struct ManifestEntry {
  int frame_index = 0;
  std::filesystem::path flow_path;
  std::optional<std::filesystem::path> gt_mask_path;
};

// Text manifest, one frame per line: "<index> <flow path> [<mask path>]".
// Blank lines and lines starting with '#' are ignored. Relative paths resolve
// against the manifest's directory. Every referenced file is opened at load
// time to check that it exists and that dimensions agree.
struct SequenceManifest {
  std::vector<ManifestEntry> entries;
  int width = 0;
  int height = 0;

  bool has_ground_truth() const noexcept;
};

SequenceManifest load_manifest(const std::filesystem::path& path);
// Writes paths exactly as stored in the entries.
void write_manifest(const SequenceManifest& manifest, const std::filesystem::path& path);

// Reads only the header of a .flo file.
std::pair<int, int> read_flow_dims(const std::filesystem::path& path);

}  // namespace flowmotion::io
