#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "flowmotion/flow_model.hpp"
#include "flowmotion/sampling.hpp"

namespace flowmotion {

enum class ThresholdKind { Adaptive, Fixed };
enum class IntervalKind { Adaptive, Fixed };
enum class ResidualNorm { L2, L1 };

struct DetectorConfig {
  double alpha_s = 25.0;  // target mean background-flow norm, px
  double alpha_1 = 2.85;  // static threshold component, px
  double alpha_2 = 0.33;  // dynamic threshold gain
  int k_min = 1;
  int k_max = 5;
  GridConfig grid;
  RansacConfig ransac;
  ModelKind model_kind = ModelKind::Quadratic;
  ThresholdKind threshold_kind = ThresholdKind::Adaptive;
  double fixed_threshold = 11.1;  // used when threshold_kind == Fixed
  IntervalKind interval_kind = IntervalKind::Adaptive;
  int fixed_interval = 1;  // used when interval_kind == Fixed
  ResidualNorm residual_norm = ResidualNorm::L2;

  void validate() const;
};

struct IntervalState {
  int k = 1;
  std::optional<double> last_mean_norm;
};

class ForegroundMask {
 public:
  ForegroundMask() = default;
  ForegroundMask(int width, int height);
  ForegroundMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool fg) noexcept { bits_[index(x, y)] = fg ? 1 : 0; }
  // One byte per pixel, 0 or 1.
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> bits() noexcept { return bits_; }

  std::size_t count() const noexcept;

  friend bool operator==(const ForegroundMask&, const ForegroundMask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

using BackgroundModel = std::variant<QuadraticFlowModel, LinearFlowModel>;

struct StageTimings {
  double sampling_ms = 0.0;
  double cra_ms = 0.0;
  double lsre_ms = 0.0;
  double mask_ms = 0.0;

  double total_ms() const noexcept { return sampling_ms + cra_ms + lsre_ms + mask_ms; }
};

struct FrameResult {
  ForegroundMask mask;
  BackgroundModel model;
  double threshold_used = 0.0;
  double mean_background_norm = 0.0;
  double inlier_ratio = 0.0;
  int sample_count = 0;
  int next_k = 1;
  StageTimings timings;
};

// k_{t+1} = clamp(round(alpha_s * k_t / mean_norm), k_min, k_max), with k_max
// for a zero mean norm. A fixed interval config always returns fixed_interval.
int update_interval(const IntervalState& state, double mean_norm, const DetectorConfig& cfg);

// T_a = alpha_1 + alpha_2 * mean_norm; the fixed-threshold arm ignores the norm.
double adaptive_threshold(double mean_norm, const DetectorConfig& cfg) noexcept;
double frame_threshold(double mean_norm, const DetectorConfig& cfg) noexcept;

// Foreground iff |flow - model| > threshold (strict). Rows are processed in
// parallel.
ForegroundMask extract_mask(const FlowField& field, const QuadraticFlowModel& model, double threshold,
                            ResidualNorm norm = ResidualNorm::L2);
ForegroundMask extract_mask(const FlowField& field, const LinearFlowModel& model, double threshold,
                            ResidualNorm norm = ResidualNorm::L2);
ForegroundMask extract_mask(const FlowField& field, const BackgroundModel& model, double threshold,
                            ResidualNorm norm = ResidualNorm::L2);

struct DetectOutcome {
  FrameResult result;
  IntervalState state;
};

// One step of the per-frame pipeline: sample, robust fit, mean inlier norm,
// threshold, mask, interval update. Randomness is drawn from cfg.ransac.seed.
// Fit failures propagate as Error; the caller owns any fallback policy.
DetectOutcome detect_frame(const FlowField& field, const IntervalState& state, const DetectorConfig& cfg);

namespace reference {
ForegroundMask extract_mask_serial(const FlowField& field, const QuadraticFlowModel& model, double threshold,
                                   ResidualNorm norm = ResidualNorm::L2);
}  // namespace reference

}  // namespace flowmotion
