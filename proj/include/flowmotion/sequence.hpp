#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>

#include "flowmotion/detector.hpp"
#include "flowmotion/flow_model.hpp"

namespace flowmotion {

// Chains two displacement fields: the result maps a pixel p of the newer
// field's frame through `newer` and then through `older`, sampled bilinearly
// at p + newer(p) with border clamping. Occlusions are ignored.
FlowField compose_flows(const FlowField& newer, const FlowField& older);

// Per-frame RANSAC seed derived from a run seed; frames get independent
// streams while the run stays reproducible.
std::uint64_t frame_seed(std::uint64_t run_seed, int frame_index) noexcept;

struct FrameRecord {
  int frame_index = 0;
  int k_requested = 1;  // interval the detector asked for
  int k_used = 1;       // interval actually covered by the processed flow
  bool composed = false;
  bool fallback = false;
  std::string fallback_reason;
  double compose_ms = 0.0;
  FrameResult result;
};

// Runs the detector over a stream of consecutive interval-1 flow fields
// (field i maps frame i to frame i-1). When the interval controller asks for
// k > 1, the k most recent fields are composed. Fit failures reuse the last
// good model and threshold, and are flagged on the record.
class SequenceDetector {
 public:
  explicit SequenceDetector(DetectorConfig cfg, std::uint64_t run_seed = 0);

  FrameRecord process(int frame_index, FlowField interval_one_flow);

  const IntervalState& state() const noexcept { return state_; }
  const DetectorConfig& config() const noexcept { return cfg_; }

 private:
  DetectorConfig cfg_;
  std::uint64_t run_seed_;
  IntervalState state_;
  std::deque<FlowField> history_;  // newest first, at most k_max fields
  std::optional<BackgroundModel> last_model_;
  double last_threshold_ = 0.0;
  double last_mean_norm_ = 0.0;
};

namespace reference {
FlowField compose_flows_serial(const FlowField& newer, const FlowField& older);
}  // namespace reference

}  // namespace flowmotion
