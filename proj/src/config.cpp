#include "flowmotion/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "flowmotion/error.hpp"

namespace flowmotion {

std::string_view to_string(ModelKind kind) noexcept { return kind == ModelKind::Quadratic ? "quadratic" : "linear"; }
std::string_view to_string(ThresholdKind kind) noexcept {
  return kind == ThresholdKind::Adaptive ? "adaptive" : "fixed";
}
std::string_view to_string(IntervalKind kind) noexcept { return kind == IntervalKind::Adaptive ? "adaptive" : "fixed"; }
std::string_view to_string(ResidualNorm norm) noexcept { return norm == ResidualNorm::L2 ? "l2" : "l1"; }

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::ParseError, "bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

template <typename Enum>
Enum parse_enum(std::string_view key, std::string_view value, std::initializer_list<Enum> options) {
  for (Enum e : options) {
    if (to_string(e) == value) return e;
  }
  bad_value(key, value);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

using Setter = std::function<void(DetectorConfig&, std::string_view key, std::string_view value)>;
using Getter = std::function<std::string(const DetectorConfig&)>;

struct Field {
  const char* key;
  Setter set;
  Getter get;
};

template <typename T>
Field number_field(const char* key, T DetectorConfig::*member) {
  return {key, [member](DetectorConfig& c, std::string_view k, std::string_view v) { c.*member = parse_number<T>(k, v); },
          [member](const DetectorConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      number_field("alpha_s", &DetectorConfig::alpha_s),
      number_field("alpha_1", &DetectorConfig::alpha_1),
      number_field("alpha_2", &DetectorConfig::alpha_2),
      number_field("k_min", &DetectorConfig::k_min),
      number_field("k_max", &DetectorConfig::k_max),
      {"grid.piece_edge",
       [](DetectorConfig& c, std::string_view k, std::string_view v) { c.grid.piece_edge = parse_number<int>(k, v); },
       [](const DetectorConfig& c) { return std::to_string(c.grid.piece_edge); }},
      {"grid.sample_fraction",
       [](DetectorConfig& c, std::string_view k, std::string_view v) {
         c.grid.sample_fraction = parse_number<double>(k, v);
       },
       [](const DetectorConfig& c) { return format_double(c.grid.sample_fraction); }},
      {"ransac.iterations",
       [](DetectorConfig& c, std::string_view k, std::string_view v) { c.ransac.iterations = parse_number<int>(k, v); },
       [](const DetectorConfig& c) { return std::to_string(c.ransac.iterations); }},
      {"ransac.inlier_threshold",
       [](DetectorConfig& c, std::string_view k, std::string_view v) {
         c.ransac.inlier_threshold_px = parse_number<double>(k, v);
       },
       [](const DetectorConfig& c) { return format_double(c.ransac.inlier_threshold_px); }},
      {"ransac.seed",
       [](DetectorConfig& c, std::string_view k, std::string_view v) {
         c.ransac.seed = parse_number<std::uint64_t>(k, v);
       },
       [](const DetectorConfig& c) { return std::to_string(c.ransac.seed); }},
      {"model",
       [](DetectorConfig& c, std::string_view k, std::string_view v) {
         c.model_kind = parse_enum(k, v, {ModelKind::Quadratic, ModelKind::Linear});
       },
       [](const DetectorConfig& c) { return std::string(to_string(c.model_kind)); }},
      {"threshold",
       [](DetectorConfig& c, std::string_view k, std::string_view v) {
         c.threshold_kind = parse_enum(k, v, {ThresholdKind::Adaptive, ThresholdKind::Fixed});
       },
       [](const DetectorConfig& c) { return std::string(to_string(c.threshold_kind)); }},
      number_field("fixed_threshold", &DetectorConfig::fixed_threshold),
      {"interval",
       [](DetectorConfig& c, std::string_view k, std::string_view v) {
         c.interval_kind = parse_enum(k, v, {IntervalKind::Adaptive, IntervalKind::Fixed});
       },
       [](const DetectorConfig& c) { return std::string(to_string(c.interval_kind)); }},
      number_field("fixed_interval", &DetectorConfig::fixed_interval),
      {"residual_norm",
       [](DetectorConfig& c, std::string_view k, std::string_view v) {
         c.residual_norm = parse_enum(k, v, {ResidualNorm::L2, ResidualNorm::L1});
       },
       [](const DetectorConfig& c) { return std::string(to_string(c.residual_norm)); }},
  };
  return table;
}

}  // namespace

DetectorConfig parse_config(std::string_view text) {
  DetectorConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const Field* match = nullptr;
    for (const auto& f : fields()) {
      if (key == f.key) match = &f;
    }
    if (!match) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    match->set(cfg, key, value);
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return cfg;
}

DetectorConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string format_config(const DetectorConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += '=';
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

}  // namespace flowmotion
