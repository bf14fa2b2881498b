#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "flowmotion/detector.hpp"

namespace flowmotion {

// Line-delimited key=value configuration. Blank lines and '#' comments are
// skipped; keys absent from the text keep their defaults. Unknown keys and
// malformed values throw ParseError; the parsed config is validated.
DetectorConfig parse_config(std::string_view text);
DetectorConfig load_config(const std::filesystem::path& path);

// Emits every DetectorConfig field, one key=value per line, in a fixed order.
// parse_config(format_config(c)) reproduces c.
std::string format_config(const DetectorConfig& cfg);

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(ThresholdKind kind) noexcept;
std::string_view to_string(IntervalKind kind) noexcept;
std::string_view to_string(ResidualNorm norm) noexcept;

}  // namespace flowmotion
