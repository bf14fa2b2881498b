#include "flowmotion/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "flowmotion/error.hpp"

namespace flowmotion::io {

namespace fs = std::filesystem;

namespace {

std::vector<char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t load_le32(const char* p) noexcept {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(p[i]);
  return v;
}

void store_le32(std::uint32_t v, char* p) noexcept {
  for (int i = 0; i < 4; ++i) {
    p[i] = static_cast<char>(v & 0xffu);
    v >>= 8;
  }
}

float load_f32(const char* p) noexcept { return std::bit_cast<float>(load_le32(p)); }
std::int32_t load_i32(const char* p) noexcept { return static_cast<std::int32_t>(load_le32(p)); }

void write_all(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

constexpr std::size_t kFloHeader = 12;

std::pair<int, int> parse_flo_header(const char* data, std::size_t size, const fs::path& path) {
  if (size < 4) throw Error(ErrorCode::TruncatedFile, path.string() + ": missing magic");
  if (load_f32(data) != kFloMagic) throw Error(ErrorCode::BadMagic, path.string() + ": not a .flo file");
  if (size < kFloHeader) throw Error(ErrorCode::TruncatedFile, path.string() + ": missing dimensions");
  const std::int32_t w = load_i32(data + 4);
  const std::int32_t h = load_i32(data + 8);
  if (w <= 0 || h <= 0) throw Error(ErrorCode::NonPositiveDims, path.string() + ": non-positive dimensions");
  return {w, h};
}

}  // namespace

std::pair<int, int> read_flow_dims(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  char header[kFloHeader];
  in.read(header, kFloHeader);
  return parse_flo_header(header, static_cast<std::size_t>(in.gcount()), path);
}

FlowField read_flow(const fs::path& path) {
  const auto bytes = slurp(path);
  const auto [w, h] = parse_flo_header(bytes.data(), bytes.size(), path);
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < kFloHeader + n * 8) {
    throw Error(ErrorCode::TruncatedFile, path.string() + ": payload shorter than width*height*8 bytes");
  }
  std::vector<float> u(n);
  std::vector<float> v(n);
  const char* p = bytes.data() + kFloHeader;
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    u[i] = load_f32(p);
    v[i] = load_f32(p + 4);
    if (!std::isfinite(u[i]) || !std::isfinite(v[i])) {
      throw Error(ErrorCode::NonFiniteValues, path.string() + ": NaN or infinite flow value");
    }
  }
  return FlowField(w, h, std::move(u), std::move(v));
}

void write_flow(const FlowField& field, const fs::path& path) {
  const std::size_t n = field.size();
  std::string bytes(kFloHeader + n * 8, '\0');
  store_le32(std::bit_cast<std::uint32_t>(kFloMagic), bytes.data());
  store_le32(static_cast<std::uint32_t>(field.width()), bytes.data() + 4);
  store_le32(static_cast<std::uint32_t>(field.height()), bytes.data() + 8);
  char* p = bytes.data() + kFloHeader;
  const auto u = field.u();
  const auto v = field.v();
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    store_le32(std::bit_cast<std::uint32_t>(u[i]), p);
    store_le32(std::bit_cast<std::uint32_t>(v[i]), p + 4);
  }
  write_all(path, bytes);
}

ForegroundMask read_mask(const fs::path& path) {
  const auto bytes = slurp(path);
  const std::string_view text(bytes.data(), bytes.size());
  const auto eol = text.find('\n');
  if (eol == std::string_view::npos) throw Error(ErrorCode::BadHeader, path.string() + ": missing header line");

  std::istringstream header{std::string(text.substr(0, eol))};
  std::string magic;
  long long w = 0;
  long long h = 0;
  int maxval = 0;
  std::string trailing;
  if (!(header >> magic >> w >> h >> maxval) || magic != "P5" || maxval != 255 || (header >> trailing)) {
    throw Error(ErrorCode::BadHeader, path.string() + ": expected 'P5 <width> <height> 255'");
  }
  if (w <= 0 || h <= 0 || w > INT32_MAX || h > INT32_MAX) {
    throw Error(ErrorCode::BadHeader, path.string() + ": non-positive dimensions");
  }
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const std::size_t payload = bytes.size() - (eol + 1);
  if (payload < n) throw Error(ErrorCode::TruncatedFile, path.string() + ": raster shorter than width*height");

  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto value = static_cast<std::uint8_t>(bytes[eol + 1 + i]);
    if (value != 0 && value != 255) {
      throw Error(ErrorCode::BadPixelValue, path.string() + ": pixel value " + std::to_string(value));
    }
    bits[i] = value ? 1 : 0;
  }
  return ForegroundMask(static_cast<int>(w), static_cast<int>(h), std::move(bits));
}

void write_mask(const ForegroundMask& mask, const fs::path& path) {
  std::string bytes = "P5 " + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + " 255\n";
  const std::size_t header = bytes.size();
  bytes.resize(header + mask.size());
  const auto bits = mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bytes[header + i] = static_cast<char>(bits[i] ? 255 : 0);
  write_all(path, bytes);
}

bool SequenceManifest::has_ground_truth() const noexcept {
  if (entries.empty()) return false;
  for (const auto& e : entries) {
    if (!e.gt_mask_path) return false;
  }
  return true;
}

SequenceManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  SequenceManifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string index_text;
    std::string flow;
    std::string mask;
    std::string extra;
    fields >> index_text >> flow;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (flow.empty()) throw Error(ErrorCode::ParseError, where + ": expected '<index> <flow> [<mask>]'");
    fields >> mask >> extra;
    if (!extra.empty()) throw Error(ErrorCode::ParseError, where + ": too many fields");

    ManifestEntry entry;
    std::size_t consumed = 0;
    try {
      entry.frame_index = std::stoi(index_text, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == 0 || consumed != index_text.size()) {
      throw Error(ErrorCode::ParseError, where + ": bad frame index '" + index_text + "'");
    }
    if (!manifest.entries.empty() && entry.frame_index <= manifest.entries.back().frame_index) {
      throw Error(ErrorCode::NonMonotoneIndices, where + ": frame indices must be strictly increasing");
    }
    entry.flow_path = resolve(flow);
    if (!mask.empty()) entry.gt_mask_path = resolve(mask);

    if (!fs::is_regular_file(entry.flow_path)) {
      throw Error(ErrorCode::ParseError, where + ": missing flow file " + entry.flow_path.string());
    }
    int w = 0;
    int h = 0;
    try {
      std::tie(w, h) = read_flow_dims(entry.flow_path);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    if (entry.gt_mask_path) {
      if (!fs::is_regular_file(*entry.gt_mask_path)) {
        throw Error(ErrorCode::ParseError, where + ": missing mask file " + entry.gt_mask_path->string());
      }
      const auto gt = read_mask(*entry.gt_mask_path);
      if (gt.width() != w || gt.height() != h) {
        throw Error(ErrorCode::DimensionMismatch, where + ": mask and flow dimensions differ");
      }
    }
    if (manifest.entries.empty()) {
      manifest.width = w;
      manifest.height = h;
    } else if (w != manifest.width || h != manifest.height) {
      throw Error(ErrorCode::DimensionMismatch, where + ": frame dimensions differ from the first frame");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void write_manifest(const SequenceManifest& manifest, const fs::path& path) {
  std::string text = "# frame_index flow_path [gt_mask_path]\n";
  for (const auto& e : manifest.entries) {
    text += std::to_string(e.frame_index) + " " + e.flow_path.generic_string();
    if (e.gt_mask_path) text += " " + e.gt_mask_path->generic_string();
    text += "\n";
  }
  write_all(path, text);
}

}  // namespace flowmotion::io
