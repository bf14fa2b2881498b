#include "flowmotion/report.hpp"

#include <charconv>
#include <string>

#include "flowmotion/config.hpp"

namespace flowmotion {

namespace {

std::string num(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

template <typename Model>
void write_coeffs(std::ostream& out, const Model& m) {
  for (int r = 0; r < 2; ++r) {
    out << (r == 0 ? "model_u=" : "model_v=");
    for (std::size_t j = 0; j < m.coeffs[r].size(); ++j) out << (j ? "," : "") << num(m.coeffs[r][j]);
    out << '\n';
  }
}

}  // namespace

void write_report_header(std::ostream& out, const DetectorConfig& cfg, std::uint64_t seed) {
  out << "report=flowmotion\n";
  out << "seed=" << seed << '\n';
  const std::string text = format_config(cfg);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    out << "config." << text.substr(start, end - start) << '\n';
    start = end + 1;
  }
  out << '\n';
}

void write_frame_record(std::ostream& out, const FrameRecord& rec) {
  const FrameResult& r = rec.result;
  out << "frame=" << rec.frame_index << '\n';
  out << "k_requested=" << rec.k_requested << '\n';
  out << "k=" << rec.k_used << '\n';
  out << "composed=" << (rec.composed ? 1 : 0) << '\n';
  out << "fallback=" << (rec.fallback ? 1 : 0) << '\n';
  if (rec.fallback) out << "fallback_reason=" << rec.fallback_reason << '\n';
  out << "model_kind=" << (std::holds_alternative<LinearFlowModel>(r.model) ? "linear" : "quadratic") << '\n';
  std::visit([&](const auto& m) { write_coeffs(out, m); }, r.model);
  out << "samples=" << r.sample_count << '\n';
  out << "inlier_ratio=" << num(r.inlier_ratio) << '\n';
  out << "mean_background_norm=" << num(r.mean_background_norm) << '\n';
  out << "threshold_used=" << num(r.threshold_used) << '\n';
  out << "foreground_pixels=" << r.mask.count() << '\n';
  out << "next_k=" << r.next_k << '\n';
  out << "time_compose_ms=" << num(rec.compose_ms) << '\n';
  out << "time_sampling_ms=" << num(r.timings.sampling_ms) << '\n';
  out << "time_cra_ms=" << num(r.timings.cra_ms) << '\n';
  out << "time_lsre_ms=" << num(r.timings.lsre_ms) << '\n';
  out << "time_mask_ms=" << num(r.timings.mask_ms) << '\n';
  out << '\n';
}

void write_score(std::ostream& out, const SequenceScore& score) {
  out << "frames=" << score.per_frame_iou.size() << '\n';
  out << "j_mean=" << num(score.j_mean) << '\n';
  out << "j_recall=" << num(score.j_recall) << '\n';
  out << "j_decay=" << num(score.j_decay) << '\n';
}

}  // namespace flowmotion
