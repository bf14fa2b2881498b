#include "flowmotion/sequence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "flowmotion/error.hpp"

namespace flowmotion {

namespace {

struct Bilinear {
  double u;
  double v;
};

// Bilinear lookup with coordinates clamped to the image.
Bilinear sample_bilinear(const FlowField& f, double x, double y) noexcept {
  const double cx = std::clamp(x, 0.0, static_cast<double>(f.width() - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(f.height() - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, f.width() - 1);
  const int y1 = std::min(y0 + 1, f.height() - 1);
  const double ax = cx - x0;
  const double ay = cy - y0;
  const auto u = f.u();
  const auto v = f.v();
  const auto i00 = f.index(x0, y0);
  const auto i10 = f.index(x1, y0);
  const auto i01 = f.index(x0, y1);
  const auto i11 = f.index(x1, y1);
  const double w00 = (1 - ax) * (1 - ay);
  const double w10 = ax * (1 - ay);
  const double w01 = (1 - ax) * ay;
  const double w11 = ax * ay;
  return {w00 * u[i00] + w10 * u[i10] + w01 * u[i01] + w11 * u[i11],
          w00 * v[i00] + w10 * v[i10] + w01 * v[i01] + w11 * v[i11]};
}

void check_same_dims(const FlowField& a, const FlowField& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch, "flow fields differ in size");
  }
}

inline void compose_pixel(const FlowField& newer, const FlowField& older, std::size_t i, int x, int y,
                          std::span<float> out_u, std::span<float> out_v) noexcept {
  const double du = newer.u()[i];
  const double dv = newer.v()[i];
  const auto back = sample_bilinear(older, x + du, y + dv);
  out_u[i] = static_cast<float>(du + back.u);
  out_v[i] = static_cast<float>(dv + back.v);
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

FlowField compose_flows(const FlowField& newer, const FlowField& older) {
  check_same_dims(newer, older);
  FlowField out(newer.width(), newer.height());
  auto out_u = out.u();
  auto out_v = out.v();
  const int height = newer.height();
  const int width = newer.width();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      compose_pixel(newer, older, newer.index(x, y), x, y, out_u, out_v);
    }
  }
  return out;
}

namespace reference {

FlowField compose_flows_serial(const FlowField& newer, const FlowField& older) {
  check_same_dims(newer, older);
  FlowField out(newer.width(), newer.height());
  for (int y = 0; y < newer.height(); ++y) {
    for (int x = 0; x < newer.width(); ++x) {
      const FlowVec d = newer.at(x, y);
      const auto back = sample_bilinear(older, x + d.u, y + d.v);
      out.set(x, y, {d.u + back.u, d.v + back.v});
    }
  }
  return out;
}

}  // namespace reference

std::uint64_t frame_seed(std::uint64_t run_seed, int frame_index) noexcept {
  std::uint64_t z = run_seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(frame_index) + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SequenceDetector::SequenceDetector(DetectorConfig cfg, std::uint64_t run_seed)
    : cfg_(std::move(cfg)), run_seed_(run_seed) {
  cfg_.validate();
  state_.k = cfg_.interval_kind == IntervalKind::Fixed ? cfg_.fixed_interval : cfg_.k_min;
}

FrameRecord SequenceDetector::process(int frame_index, FlowField interval_one_flow) {
  if (!history_.empty()) check_same_dims(history_.front(), interval_one_flow);
  history_.push_front(std::move(interval_one_flow));
  while (static_cast<int>(history_.size()) > cfg_.k_max) history_.pop_back();

  FrameRecord rec;
  rec.frame_index = frame_index;
  rec.k_requested = state_.k;
  rec.k_used = std::min<int>(state_.k, static_cast<int>(history_.size()));

  const auto t0 = std::chrono::steady_clock::now();
  FlowField composed;
  if (rec.k_used > 1) {
    composed = history_[0];
    for (int j = 1; j < rec.k_used; ++j) composed = compose_flows(composed, history_[static_cast<std::size_t>(j)]);
    rec.composed = true;
  }
  rec.compose_ms = ms_since(t0);
  const FlowField& field = rec.composed ? composed : history_.front();

  DetectorConfig frame_cfg = cfg_;
  frame_cfg.ransac.seed = frame_seed(run_seed_ ^ cfg_.ransac.seed, frame_index);
  IntervalState used = state_;
  used.k = rec.k_used;

  try {
    auto outcome = detect_frame(field, used, frame_cfg);
    rec.result = std::move(outcome.result);
    state_ = outcome.state;
    last_model_ = rec.result.model;
    last_threshold_ = rec.result.threshold_used;
    last_mean_norm_ = rec.result.mean_background_norm;
  } catch (const Error& e) {
    if (!is_fit_failure(e.code())) throw;
    rec.fallback = true;
    rec.fallback_reason = std::string(to_string(e.code()));
    rec.result.next_k = state_.k;
    if (last_model_) {
      rec.result.model = *last_model_;
      rec.result.threshold_used = last_threshold_;
      rec.result.mean_background_norm = last_mean_norm_;
      rec.result.mask = extract_mask(field, *last_model_, last_threshold_, cfg_.residual_norm);
    } else {
      rec.fallback_reason += " (no previous model; empty mask)";
      rec.result.mask = ForegroundMask(field.width(), field.height());
    }
  }
  return rec;
}

}  // namespace flowmotion
